"""Constructions of the EC, H_m and growing circuits and the growing matching graphs.

Register layout (shared by every circuit at a given distance): data qubits
0..n-1 in lattice order, then one gadget per face in lattice order. A
weight-4 gadget is (s, f1, f2) and a weight-6 gadget is
(s1, f1, s2, f2, s3, f3). Each f touches two data qubits of its face; in a
weight-6 gadget the qubits form a ring where s_i neighbours f_{i-1} and f_i.

In EC the s qubits are syndrome ancillas and the f qubits flags. In H_m
the roles swap: the f qubits hold the GHZ state and each s qubit checks
the Z-parity of the two f qubits it neighbours.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .circuit import Circuit, Gate, concatenate
from .lattice import CodeLattice, build_lattice, gf2_rank
from .pauli import PauliString
from .schedule import GateDAG

SUPPORTED_D = (3, 5, 7)


class UnsupportedDistance(ValueError):
    pass


# register --------------------------------------------------------------------


@dataclass(frozen=True)
class Gadget:
    face: int
    syn: tuple[int, ...]
    flags: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]

    @property
    def checks(self) -> tuple[tuple[int, tuple[int, int]], ...]:
        """(H_m flag qubit, pair of GHZ qubits it checks)."""
        if len(self.syn) == 1:
            return ((self.syn[0], (self.flags[0], self.flags[1])),)
        f = self.flags
        return tuple((self.syn[i], (f[i - 1], f[i])) for i in range(3))

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.syn + self.flags


@dataclass(frozen=True, eq=False)
class Register:
    lattice: CodeLattice
    gadgets: tuple[Gadget, ...]
    num_qubits: int

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def data(self) -> list[int]:
        return list(range(self.n))

    @property
    def syn_qubits(self) -> list[int]:
        return [q for g in self.gadgets for q in g.syn]

    @property
    def flag_qubits(self) -> list[int]:
        return [q for g in self.gadgets for q in g.flags]

    def roles(self, kind: str) -> tuple[str, ...]:
        roles = ["data"] * self.n + ["ancilla"] * (self.num_qubits - self.n)
        flagged = self.flag_qubits if kind == "ec" else self.syn_qubits
        for q in flagged:
            roles[q] = "flag"
        return tuple(roles)


def _cyclic(lat: CodeLattice, face_index: int) -> list[int]:
    face = lat.faces[face_index]
    r, c = face.site
    cx, cy = c - r / 2.0, -r * math.sqrt(3) / 2.0
    coords = lat.qubit_coords
    return sorted(face.qubits, key=lambda q: math.atan2(coords[q][1] - cy, coords[q][0] - cx))


@lru_cache(maxsize=None)
def build_register(d: int) -> Register:
    lat = build_lattice(d)
    nxt = lat.n
    gadgets = []
    for i, face in enumerate(lat.faces):
        cyc = _cyclic(lat, i)
        pairs = tuple((cyc[2 * k], cyc[2 * k + 1]) for k in range(face.weight // 2))
        if face.weight == 4:
            s, f1, f2 = nxt, nxt + 1, nxt + 2
            gadgets.append(Gadget(i, (s,), (f1, f2), pairs))
            nxt += 3
        else:
            q = list(range(nxt, nxt + 6))
            gadgets.append(Gadget(i, (q[0], q[2], q[4]), (q[1], q[3], q[5]), pairs))
            nxt += 6
    return Register(lat, tuple(gadgets), nxt)


# catalog entries -------------------------------------------------------------

HADAMARD = "H"  # marker for the transversal logical Hadamard


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    circuit: Circuit
    measured_operator: PauliString | str | None
    flag_qubits: tuple[int, ...]
    ancilla_qubits: tuple[int, ...]
    claimed_t: int
    data_qubits: tuple[int, ...] = ()
    meta: dict = field(default_factory=dict)

    @property
    def id(self) -> str:
        return self.name


# commutation-aware dependency building ----------------------------------------

# how a gate acts on each of its qubits: "Z" diagonal, "X" X-like, None otherwise
def _actions(g: Gate) -> tuple[str | None, ...]:
    if g.kind == "cnot":
        return ("Z", "X")
    if g.kind == "cz":
        return ("Z", "Z")
    if g.kind in ("t_gate", "t_dagger"):
        return ("Z",)
    return (None,)


class ProgramDAG:
    """Build a GateDAG from program order, dropping edges between commuting gates."""

    def __init__(self) -> None:
        self.dag = GateDAG()
        self.history: dict[int, list[int]] = {}

    def add(self, g: Gate, after: tuple[int, ...] = (), min_step: int = 0) -> int:
        acts = _actions(g)
        deps = set(after)
        for q, a in zip(g.qubits, acts):
            for j in self.history.get(q, []):
                other = self.dag.nodes[j].gate
                b = _actions(other)[other.qubits.index(q)]
                if a is None or b is None or a != b:
                    deps.add(j)
        i = self.dag.add(g, sorted(deps), min_step)
        for q in g.qubits:
            self.history.setdefault(q, []).append(i)
        return i

    def schedule(self, restarts: int = 1, seed: int = 0) -> list[list[Gate]]:
        return self.dag.schedule(restarts, seed)


def _gadget_round(prog: ProgramDAG, g: Gadget, kind: str, tag: str, face_tag: str) -> None:
    """Append one X- or Z-type measurement of a face using its gadget."""
    x_type = kind == "X"
    prep_s, prep_f = ("prep_plus", "prep_zero") if x_type else ("prep_zero", "prep_plus")
    meas_s, meas_f = ("measure_x", "measure_z") if x_type else ("measure_z", "measure_x")

    def cx(a: int, b: int) -> Gate:  # X round keeps direction, Z round reverses it
        return Gate("cnot", (a, b) if x_type else (b, a))

    # s1 seeds the cat state; the other gadget qubits join it through CNOTs
    prog.add(Gate(prep_s, (g.syn[0],)))
    for q in g.syn[1:] + g.flags:
        prog.add(Gate(prep_f, (q,)))
    if len(g.syn) == 1:
        s = g.syn[0]
        for f in g.flags:
            prog.add(cx(s, f))
    else:
        s1, s2, s3 = g.syn
        f1, f2, f3 = g.flags
        prog.add(cx(s1, f1))
        prog.add(cx(s1, f3))
        prog.add(cx(f1, s2))
        prog.add(cx(s2, f2))
        prog.add(cx(f3, s3))
    for f, (a, b) in zip(g.flags, g.pairs):
        prog.add(cx(f, a))
        prog.add(cx(f, b))
    # never uncompute a flag from the qubit that copied it (or that it was copied from
    # after branching): the copy would cancel the flag's own X error
    owner = g.syn * 2 if len(g.syn) == 1 else (g.syn[0], g.syn[2], g.syn[0])
    for s, f in zip(owner, g.flags):
        prog.add(cx(s, f))
    for s in g.syn:
        prog.add(Gate(meas_s, (s,), f"{tag}:{face_tag}:{kind}"))
    for f in g.flags:
        prog.add(Gate(meas_f, (f,), "flag" if tag == "syn" else f"{tag}flag"))


def _ec_round(reg: Register, kind: str, faces: list[int] | None = None, tag: str = "syn") -> list[list[Gate]]:
    prog = ProgramDAG()
    for g in reg.gadgets:
        if faces is None or g.face in faces:
            _gadget_round(prog, g, kind, tag, str(g.face))
    return prog.schedule(restarts=200, seed=1)


def _check_d(d: int) -> None:
    if d not in SUPPORTED_D:
        raise UnsupportedDistance(f"catalog circuits exist for d in {SUPPORTED_D}, got {d}")


@lru_cache(maxsize=None)
def ec_rounds(d: int) -> tuple[Circuit, Circuit]:
    _check_d(d)
    reg = build_register(d)
    roles = reg.roles("ec")
    xs = _ec_round(reg, "X")
    zs = _ec_round(reg, "Z")
    cx = Circuit(reg.num_qubits, roles, tuple(tuple(s) for s in xs), f"EC{d}-X")
    cz = Circuit(reg.num_qubits, roles, tuple(tuple(s) for s in zs), f"EC{d}-Z")
    return cx, cz


@lru_cache(maxsize=None)
def build_ec_circuit(d: int) -> CatalogEntry:
    cx, cz = ec_rounds(d)
    reg = build_register(d)
    circ = concatenate(cx, cz, name=f"EC{d}")
    return CatalogEntry(
        f"EC{d}", circ, None, tuple(reg.flag_qubits), tuple(reg.syn_qubits), 2,
        tuple(reg.data), {"d": d, "depth_x": cx.depth, "depth_z": cz.depth},
    )


def gadget_entry(d: int, face: int, kind: str = "X") -> CatalogEntry:
    """One face's gadget cut out of the scheduled EC round, on its own register."""
    reg = build_register(d)
    g = reg.gadgets[face]
    round_c = ec_rounds(d)[0 if kind == "X" else 1]
    data = list(reg.lattice.faces[face].qubits)
    keep = data + list(g.qubits)
    remap = {q: i for i, q in enumerate(keep)}
    steps = []
    for step in round_c.steps:
        gates = [
            Gate(gt.kind, tuple(remap[q] for q in gt.qubits), gt.tag)
            for gt in step
            if all(q in remap for q in gt.qubits)
        ]
        steps.append(tuple(gates))
    while steps and not steps[0]:
        steps.pop(0)
    while steps and not steps[-1]:
        steps.pop()
    roles = ["data"] * len(data) + ["ancilla" if q in g.syn else "flag" for q in g.qubits]
    circ = Circuit(len(keep), tuple(roles), tuple(steps), f"EC{d}-w{len(data)}-face{face}-{kind}")
    op = PauliString.from_support(len(data), kind, range(len(data)))
    return CatalogEntry(
        circ.name, circ, op, tuple(remap[q] for q in g.flags), tuple(remap[q] for q in g.syn),
        2, tuple(range(len(data))), {"d": d, "face": face, "kind": kind},
    )


# growing ---------------------------------------------------------------------


@dataclass(frozen=True)
class MatchingGraph1D:
    """Path graph: vertices are white plaquettes, edges weight-2 corrections.

    ``edges[i]`` joins ``ends[i][0]`` and ``ends[i][1]``; an end of -1 is the
    boundary. Vertices are listed along the path starting from the end
    that has no boundary edge.
    """

    n_qubits: int
    vertices: tuple[tuple[int, ...], ...]  # white plaquette supports
    edges: tuple[tuple[int, int], ...]  # data-qubit pairs
    ends: tuple[tuple[int, int], ...]
    correction_kind: str  # "Z" for the X-type outcomes graph, "X" for the Z-type one


def matching_correction(g: MatchingGraph1D, outcomes) -> PauliString:
    """Minimum-weight edge set whose odd-degree vertices are the highlighted ones."""
    m = [int(b) & 1 for b in outcomes]
    k = len(g.vertices)
    if len(m) != k:
        raise ValueError(f"expected {k} outcome bits, got {len(m)}")
    left = right = None
    inner: dict[tuple[int, int], int] = {}
    for e, (u, v) in enumerate(g.ends):
        if -1 in (u, v):
            w = v if u == -1 else u
            if w == k - 1 and right is None:
                right = e
            else:
                left = e
        else:
            inner[(min(u, v), max(u, v))] = e
    best: list[int] | None = None
    for x0 in ((0, 1) if left is not None else (0,)):
        chosen, cur = [], x0
        if x0:
            chosen.append(left)
        ok = True
        for i in range(k):
            nxt = m[i] ^ cur
            if i < k - 1:
                if nxt:
                    chosen.append(inner[(i, i + 1)])
            else:
                if nxt:
                    if right is None:
                        ok = False
                    else:
                        chosen.append(right)
            cur = nxt
        if ok and (best is None or len(chosen) < len(best)):
            best = chosen
    if best is None:
        raise ValueError("outcome pattern has no matching on this graph")
    qubits = [q for e in best for q in g.edges[e]]
    mask = 0
    for q in qubits:
        mask ^= 1 << q
    if g.correction_kind == "Z":
        return PauliString(g.n_qubits, 0, mask)
    return PauliString(g.n_qubits, mask, 0)


@dataclass(frozen=True, eq=False)
class GrowthLayout:
    d_from: int
    d_to: int
    patch: tuple[int, ...]
    whites: tuple[int, ...]  # face indices, in matching-path order
    pairs: tuple[tuple[int, int], ...]  # weight-2 supports, in matching-path order
    st_faces: tuple[int, ...]
    graph_x: MatchingGraph1D
    graph_z: MatchingGraph1D


@lru_cache(maxsize=None)
def growth_layout(d_from: int, d_to: int) -> GrowthLayout:
    if d_from not in (1, 3, 5) or d_to not in SUPPORTED_D or d_from >= d_to:
        raise UnsupportedDistance(f"unsupported growth {d_from}->{d_to}")
    lat = build_lattice(d_to)
    if d_from == 1:
        patch, patch_faces = {0}, []
    else:
        small = build_lattice(d_from)
        patch = set(range(small.n))  # the small lattice is the top corner of the big one
        patch_faces = [set(f.qubits) for f in small.faces]
    b = list(lat.boundary_b1)
    pairs = [tuple(b[i : i + 2]) for i in range(d_from, d_to, 2)]
    whites, inside = [], []
    for i, f in enumerate(lat.faces):
        s = set(f.qubits)
        if s <= patch:
            continue
        if s & patch:
            if (s & patch) in patch_faces:
                pairs.append(tuple(sorted(s - patch)))
            else:
                whites.append(i)
        else:
            inside.append(i)
    st_faces = []
    for i in inside:
        s = set(lat.faces[i].qubits)
        if any(len(s & set(p)) % 2 for p in pairs):
            whites.append(i)
        else:
            st_faces.append(i)
    # incidence of pairs on whites -> path
    ends = []
    for p in pairs:
        hit = [w for w in whites if len(set(lat.faces[w].qubits) & set(p)) % 2]
        if len(hit) == 1:
            hit.append(-1)
        if len(hit) != 2:
            raise AssertionError(f"pair {p} touches {len(hit)} white plaquettes")
        ends.append(tuple(hit))
    degree = {w: sum(w in e for e in ends) for w in whites}
    boundary_touch = {w for e in ends for w in e if -1 in e and w != -1}
    start = next(w for w in whites if degree[w] == 1 and w not in boundary_touch) if len(whites) > 1 else whites[0]
    order, order_edges, cur = [start], [], start
    while True:
        nxt = [e for e in range(len(ends)) if e not in order_edges and cur in ends[e]]
        if not nxt:
            break
        e = nxt[0]
        order_edges.append(e)
        w = ends[e][1] if ends[e][0] == cur else ends[e][0]
        if w == -1:
            break
        order.append(w)
        cur = w
    pair_order = [pairs[e] for e in order_edges]
    pos = {w: i for i, w in enumerate(order)}
    new_ends = tuple(tuple(pos.get(w, -1) for w in ends[e]) for e in order_edges)
    verts = tuple(lat.faces[w].qubits for w in order)
    gx = MatchingGraph1D(lat.n, verts, tuple(pair_order), new_ends, "Z")
    gz = MatchingGraph1D(lat.n, verts, tuple(pair_order), new_ends, "X")
    return GrowthLayout(d_from, d_to, tuple(sorted(patch)), tuple(order), tuple(pair_order), tuple(st_faces), gx, gz)


def st_generators(layout: GrowthLayout) -> list[tuple[int, ...]]:
    """Supports of the X-type (equivalently Z-type) generators of |S_t>."""
    lat = build_lattice(layout.d_to)
    return [lat.faces[i].qubits for i in layout.st_faces] + [tuple(p) for p in layout.pairs]


def _rref(g: np.ndarray, order: list[int]) -> tuple[np.ndarray, list[int]]:
    g = g.copy() % 2
    r, piv = 0, []
    for c in order:
        rows = [i for i in range(r, len(g)) if g[i, c]]
        if not rows:
            continue
        g[[r, rows[0]]] = g[[rows[0], r]]
        for i in range(len(g)):
            if i != r and g[i, c]:
                g[i] ^= g[r]
        piv.append(c)
        r += 1
        if r == len(g):
            break
    return g[:r], piv


def _edge_colour(edges: list[tuple[int, int]]) -> list[int]:
    """Proper edge colouring of a bipartite multigraph with max-degree colours."""
    deg: dict = {}
    for u, v in edges:
        deg[("u", u)] = deg.get(("u", u), 0) + 1
        deg[("v", v)] = deg.get(("v", v), 0) + 1
    delta = max(deg.values(), default=0)
    at: dict = {}  # (node, colour) -> edge index
    colour = [-1] * len(edges)

    for e, (u, v) in enumerate(edges):
        nu, nv = ("u", u), ("v", v)
        a = next(c for c in range(delta) if (nu, c) not in at)
        b = next(c for c in range(delta) if (nv, c) not in at)
        if (nv, a) in at:
            # swap colours a/b along the alternating path starting at nv
            path, node, c = [], nv, a
            while (node, c) in at:
                f = at[(node, c)]
                path.append(f)
                fu, fv = ("u", edges[f][0]), ("v", edges[f][1])
                node = fu if node == fv else fv
                c = b if c == a else a
            for f in path:
                del at[(("u", edges[f][0]), colour[f])]
                del at[(("v", edges[f][1]), colour[f])]
            for f in path:
                colour[f] = b if colour[f] == a else a
                at[(("u", edges[f][0]), colour[f])] = f
                at[(("v", edges[f][1]), colour[f])] = f
        colour[e] = a
        at[(nu, a)] = e
        at[(nv, a)] = e
    return colour


@lru_cache(maxsize=None)
def st_encoder(d_from: int, d_to: int, tries: int = 400) -> tuple[list[int], list[list[tuple[int, int]]]]:
    """Pivots (prepared in |+>) and CNOT layers preparing |S_t> from |0>/|+>."""
    import random

    layout = growth_layout(d_from, d_to)
    lat = build_lattice(d_to)
    gens = st_generators(layout)
    gmat = np.zeros((len(gens), lat.n), dtype=np.uint8)
    for i, s in enumerate(gens):
        gmat[i, list(s)] = 1
    q_free = [q for q in range(lat.n) if q not in layout.patch]
    rnd = random.Random(7)
    best = None
    for it in range(tries):
        order = q_free[:] if it == 0 else rnd.sample(q_free, len(q_free))
        red, piv = _rref(gmat, order)
        edges = [(p, int(t)) for row, p in zip(red, piv) for t in np.flatnonzero(row) if t != p]
        cost = max(
            max((sum(1 for e in edges if e[0] == p) for p in piv), default=0),
            max((sum(1 for e in edges if e[1] == t) for t in set(e[1] for e in edges)), default=0),
        )
        if best is None or cost < best[0]:
            best = (cost, piv, edges)
    _, piv, edges = best
    colours = _edge_colour(edges)
    layers = [[e for e, c in zip(edges, colours) if c == k] for k in range(max(colours, default=-1) + 1)]
    assert gf2_rank(gmat) == len(gens)
    return sorted(piv), layers


@lru_cache(maxsize=None)
def build_grow_circuit(d_from: int, d_to: int) -> tuple[CatalogEntry, MatchingGraph1D, MatchingGraph1D]:
    layout = growth_layout(d_from, d_to)
    reg = build_register(d_to)
    pivots, layers = st_encoder(d_from, d_to)
    prog = ProgramDAG()
    prep_nodes = []
    if d_from == 1:
        prep_nodes.append(prog.add(Gate("prep_h", (0,))))
    for q in range(reg.n):
        if q in layout.patch:
            continue
        prep_nodes.append(prog.add(Gate("prep_plus" if q in pivots else "prep_zero", (q,))))
    for k, layer in enumerate(layers):
        for a, b in layer:
            prog.add(Gate("cnot", (a, b)), min_step=k + 1)
    rounds = 1 if d_from == 1 else d_from
    faces = list(layout.whites) if d_from == 1 else None
    for r in range(rounds):
        for kind in ("X", "Z"):
            for g in reg.gadgets:
                if faces is None or g.face in faces:
                    tag = "white" if g.face in layout.whites else "grow"
                    _gadget_round(prog, g, kind, f"{tag}{r}", str(g.face))
    steps = prog.schedule(restarts=200, seed=3)
    roles = reg.roles("ec")
    circ = Circuit(reg.num_qubits, roles, tuple(tuple(s) for s in steps), f"G{d_from}->{d_to}")
    entry = CatalogEntry(
        circ.name, circ, None, tuple(reg.flag_qubits), tuple(reg.syn_qubits), 0, tuple(reg.data),
        {"d_from": d_from, "d_to": d_to, "rounds": rounds, "whites": layout.whites, "pairs": layout.pairs},
    )
    return entry, layout.graph_x, layout.graph_z


# H_m -------------------------------------------------------------------------


@dataclass(frozen=True)
class HmDesign:
    """GHZ preparation tree and controlled-Hadamard ownership for H_m.

    ``edges`` are CNOTs (parent, child) between GHZ qubits in program order,
    ``owners[q]`` is the GHZ qubit controlling the Hadamard on data qubit q.
    """

    d: int
    root: int
    edges: tuple[tuple[int, int], ...]
    owners: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"d": self.d, "root": self.root, "edges": [list(e) for e in self.edges], "owners": list(self.owners)}

    @classmethod
    def from_dict(cls, obj: dict) -> "HmDesign":
        return cls(int(obj["d"]), int(obj["root"]), tuple(tuple(e) for e in obj["edges"]), tuple(obj["owners"]))


def hm_checks(reg: Register, reduced: bool = False) -> list[tuple[int, tuple[int, int]]]:
    """Flag checks of the GHZ state: all of them, or one per face when ``reduced``."""
    out = []
    for g in reg.gadgets:
        checks = g.checks
        out.extend(checks[:1] if reduced else checks)
    return out


def _delay_preps(steps: list[list[Gate]]) -> list[list[Gate]]:
    """Move every preparation to the step just before the qubit's next gate."""
    steps = [list(s) for s in steps]
    for t in range(len(steps)):
        for g in [g for g in steps[t] if g.kind in ("prep_zero", "prep_plus")]:
            q = g.qubits[0]
            nxt = next((u for u in range(t + 1, len(steps)) if any(q in h.qubits for h in steps[u])), None)
            if nxt is not None and nxt - 1 > t:
                steps[t].remove(g)
                steps[nxt - 1].append(g)
    return steps


def build_hm_from_design(design: HmDesign, reduced: bool = False) -> CatalogEntry:
    d = design.d
    reg = build_register(d)
    ghz = reg.flag_qubits
    prog = ProgramDAG()
    prog.add(Gate("prep_plus", (design.root,)))
    for f in ghz:
        if f != design.root:
            prog.add(Gate("prep_zero", (f,)))
    last_edge: dict[int, int] = {}
    tree_nodes: dict[int, list[int]] = {}
    for p, c in design.edges:
        after = (last_edge[p],) if p in last_edge else ()
        i = prog.add(Gate("cnot", (p, c)), after=after)
        last_edge[p] = i
        tree_nodes.setdefault(p, []).append(i)
        tree_nodes.setdefault(c, []).append(i)
    tdg = {q: prog.add(Gate("t_dagger", (q,)), min_step=1) for q in reg.data}
    cz_of: dict[int, list[int]] = {}
    cz_nodes = {}
    for q in reg.data:
        f = design.owners[q]
        i = prog.add(Gate("cz", (f, q)), after=(tdg[q],))
        cz_of.setdefault(f, []).append(i)
        cz_nodes[q] = i
    checks = hm_checks(reg, reduced)
    for s, (fa, fb) in checks:
        prog.add(Gate("prep_zero", (s,)))
    for s, (fa, fb) in checks:
        deps = tuple(cz_of.get(fa, []) + cz_of.get(fb, []) + tree_nodes.get(fa, []) + tree_nodes.get(fb, []))
        prog.add(Gate("cnot", (fa, s)), after=deps)
        prog.add(Gate("cnot", (fb, s)), after=deps)
    # the T layer is transversal: one step, after every CZ
    for q in reg.data:
        prog.add(Gate("t_gate", (q,)), after=tuple(cz_nodes.values()))
    for s, _ in checks:
        prog.add(Gate("measure_z", (s,), "flag"))
    for f in ghz:
        prog.add(Gate("measure_x", (f,), "ghz"))
    steps = _delay_preps(prog.schedule(restarts=100, seed=5))
    check_qubits = [s for s, _ in checks]
    used = set(check_qubits) | set(ghz) | set(reg.data)
    roles = list(reg.roles("hm"))
    name = f"Hm{d}" + ("-reduced" if reduced else "")
    circ = Circuit(reg.num_qubits, tuple(roles), tuple(tuple(s) for s in steps), name)
    return CatalogEntry(
        name, circ, HADAMARD, tuple(check_qubits), tuple(ghz), (d - 1) // 2, tuple(reg.data),
        {"d": d, "ghz_size": len(ghz), "flags": len(check_qubits), "reduced": reduced, "idle_qubits": sorted(set(range(reg.num_qubits)) - used)},
    )


def load_hm_design(d: int) -> HmDesign:
    text = resources.files("hstateprep").joinpath("data/hm_designs.json").read_text()
    return HmDesign.from_dict(json.loads(text)[str(d)])


@lru_cache(maxsize=None)
def build_hm_circuit(d: int, reduced: bool = False) -> CatalogEntry:
    _check_d(d)
    return build_hm_from_design(load_hm_design(d), reduced)


def catalog_entries(d: int) -> dict[str, CatalogEntry]:
    """Every circuit of the protocol at distance d."""
    out = {f"EC{d}": build_ec_circuit(d), f"Hm{d}": build_hm_circuit(d)}
    out[f"G1->{d}"] = build_grow_circuit(1, d)[0]
    return out
