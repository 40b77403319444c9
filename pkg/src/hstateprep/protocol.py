"""The full preparation protocol: grow, then (d-1)/2 pairs of H_m and EC.

Trials run in two stages. Stage 1 simulates G^(1->d), applies the matching
corrections for the white plaquette outcomes and aborts when the data error
has a nontrivial syndrome or is a nontrivial logical. Stage 2 starts from
the identity frame and runs the H_m/EC pairs, aborting on any flag, any
nontrivial face outcome or odd GHZ parity. Accepted trials are classified
by the ideal decoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .catalog import SUPPORTED_D, UnsupportedDistance, build_ec_circuit, build_grow_circuit, build_hm_circuit, matching_correction
from .circuit import Circuit, concatenate
from .decoder import CLASSES, StabilizerReducer, classify_batch, decode, min_coset_weight
from .framesim import (
    ABORT_FLAG,
    VERDICT_NAMES,
    CompiledCircuit,
    ForcedFaults,
    OutcomeGroups,
    Twirl,
    compile_circuit,
    run_batch,
)
from .lattice import CodeLattice, build_lattice
from .noise import EncodedNoise, LogicalNoiseModel, NoiseModel
from .pauli import PauliString

ABORT_REASONS = ("stage1_syndrome", "stage1_logical", "flag", "w4_syndrome", "w6_parity", "ghz_parity")
ORDERINGS = ("paired", "unpaired")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolSpec:
    d: int
    mode: str = "physical"  # "physical" | "encoded"
    d1: int | None = None
    d2: int | None = None
    logical: LogicalNoiseModel | None = None
    t_only: bool = False
    ordering: str = "paired"  # "unpaired" exists only for the ordering regression

    def __post_init__(self) -> None:
        if self.d not in SUPPORTED_D:
            raise UnsupportedDistance(f"protocol needs d in {SUPPORTED_D}, got {self.d}")
        if self.mode not in ("physical", "encoded"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.ordering not in ORDERINGS:
            raise ConfigError(f"unknown ordering {self.ordering!r}")
        if self.mode == "encoded":
            if self.logical is None:
                raise ConfigError("encoded mode needs a LogicalNoiseModel")
            if self.d1 is None or self.d2 is None or self.d1 > self.d2:
                raise ConfigError("encoded mode needs d1 <= d2")

    @property
    def r(self) -> int:
        return (self.d - 1) // 2

    def noise(self, p: float) -> NoiseModel | EncodedNoise:
        if self.mode == "encoded":
            return EncodedNoise(p, self.logical, self.t_only)
        return NoiseModel(p)


# compiled skeleton ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Skeleton:
    d: int
    ordering: str
    grow: CompiledCircuit
    white_x: tuple[np.ndarray, ...]  # outcome slots per white vertex, path order
    white_z: tuple[np.ndarray, ...]
    corr_x: np.ndarray  # (2^k, n) X correction for each Z-type outcome pattern
    corr_z: np.ndarray  # (2^k, n) Z correction for each X-type outcome pattern
    stage2: CompiledCircuit
    groups: OutcomeGroups
    stages: tuple[str, ...]
    reducer: StabilizerReducer

    @property
    def lattice(self) -> CodeLattice:
        return build_lattice(self.d)


def stage2_circuit(d: int, ordering: str = "paired") -> tuple[Circuit, tuple[str, ...]]:
    hm = build_hm_circuit(d).circuit
    ec = build_ec_circuit(d).circuit
    r = (d - 1) // 2
    if ordering == "paired":
        parts = [hm, ec] * r
    else:
        parts = [hm] * r + [ec] * r
    names = tuple("Hm" if c is hm else "EC" for c in parts)
    return concatenate(*parts, name=f"stage2-d{d}-{ordering}", prefix_tags=True), names


def _pattern_table(graph, n: int) -> np.ndarray:
    k = len(graph.vertices)
    out = np.zeros((1 << k, n), dtype=bool)
    for m in range(1 << k):
        c = matching_correction(graph, [(m >> i) & 1 for i in range(k)])
        cx, cz = c.to_arrays()
        out[m] = cx | cz
    return out


@lru_cache(maxsize=None)
def skeleton(d: int, ordering: str = "paired") -> Skeleton:
    entry, gx, gz = build_grow_circuit(1, d)
    idx = entry.circuit.measurement_index()
    whites = entry.meta["whites"]
    wx = tuple(np.asarray(idx[f"white0:{w}:X"], dtype=np.intp) for w in whites)
    wz = tuple(np.asarray(idx[f"white0:{w}:Z"], dtype=np.intp) for w in whites)
    n = build_lattice(d).n
    circ2, names = stage2_circuit(d, ordering)
    return Skeleton(
        d, ordering, compile_circuit(entry.circuit), wx, wz,
        _pattern_table(gz, n), _pattern_table(gx, n),
        compile_circuit(circ2), OutcomeGroups.from_circuit(circ2), names,
        StabilizerReducer(build_lattice(d)),
    )


def _patterns(meas: np.ndarray, slots: tuple[np.ndarray, ...]) -> np.ndarray:
    pat = np.zeros(meas.shape[1], dtype=np.int64)
    for i, s in enumerate(slots):
        pat |= (meas[s].sum(axis=0) % 2).astype(np.int64) << i
    return pat


# batched trials -----------------------------------------------------------------


@dataclass
class BlockResult:
    """Per-trial outcome of a batch: verdict index into ``("accepted",) + ABORT_REASONS``."""

    verdict: np.ndarray
    failure: np.ndarray  # index into CLASSES for accepted trials, -1 otherwise
    residual_x: np.ndarray  # (n, B) final data frame (stage-1 frame for stage-1 aborts)
    residual_z: np.ndarray


VERDICTS = ("accepted",) + ABORT_REASONS


def stage1_batch(
    sk: Skeleton,
    noise,
    B: int,
    rng: np.random.Generator | None,
    forced: ForcedFaults | None = None,
    twirl: Twirl | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(verdict, data x, data z) after growth and matching; verdict 0 means proceed."""
    nq = sk.grow.circuit.num_qubits
    x = np.zeros((nq, B), dtype=bool)
    z = np.zeros((nq, B), dtype=bool)
    res = run_batch(sk.grow, x, z, rng=rng, noise=noise, forced=forced, twirl=twirl)
    data = sk.grow.data
    ex = res.x[data] ^ sk.corr_x[_patterns(res.meas, sk.white_z)].T
    ez = res.z[data] ^ sk.corr_z[_patterns(res.meas, sk.white_x)].T
    lat = sk.lattice
    h = lat.face_matrix.astype(np.int64)
    bad_syn = ((h @ ex.astype(np.int64)) % 2).any(axis=0) | ((h @ ez.astype(np.int64)) % 2).any(axis=0)
    b1 = lat.b1_vector.astype(np.int64)
    logical = ((b1 @ ex.astype(np.int64)) % 2 == 1) | ((b1 @ ez.astype(np.int64)) % 2 == 1)
    verdict = np.zeros(B, dtype=np.int8)
    verdict[logical & ~bad_syn] = VERDICTS.index("stage1_logical")
    verdict[bad_syn] = VERDICTS.index("stage1_syndrome")
    return verdict, ex, ez


def stage2_batch(
    sk: Skeleton,
    noise,
    B: int,
    rng: np.random.Generator | None,
    forced: ForcedFaults | None = None,
    twirl: Twirl | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(verdict, data x, data z, meas) for stage 2 started from the identity frame."""
    nq = sk.stage2.circuit.num_qubits
    x = np.zeros((nq, B), dtype=bool)
    z = np.zeros((nq, B), dtype=bool)
    res = run_batch(sk.stage2, x, z, rng=rng, noise=noise, forced=forced, twirl=twirl, canonicalize=sk.reducer)
    v = sk.groups.verdicts(res.meas).astype(np.int8)
    # framesim verdict codes 1..4 map onto flag..ghz_parity
    verdict = np.where(v > 0, v - ABORT_FLAG + VERDICTS.index("flag"), 0).astype(np.int8)
    data = sk.stage2.data
    return verdict, res.x[data], res.z[data], res.meas


def run_block(spec: ProtocolSpec, p: float, B: int, rng: np.random.Generator) -> BlockResult:
    sk = skeleton(spec.d, spec.ordering)
    noise = spec.noise(p)
    v1, ex, ez = stage1_batch(sk, noise, B, rng)
    verdict = v1.copy()
    rx, rz = ex, ez
    go = np.flatnonzero(v1 == 0)
    failure = np.full(B, -1, dtype=np.int8)
    if len(go):
        v2, x2, z2, _ = stage2_batch(sk, noise, len(go), rng)
        verdict[go] = v2
        rx[:, go] = x2
        rz[:, go] = z2
        acc = go[v2 == 0]
        if len(acc):
            failure[acc] = classify_batch(sk.lattice, rx[:, acc], rz[:, acc])
    return BlockResult(verdict, failure, rx, rz)


@dataclass
class ProtocolTrial:
    verdict: str
    residual_error: PauliString
    failure: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return self.verdict == "accepted"


def run_trial(spec: ProtocolSpec, nm: NoiseModel | EncodedNoise | float, rng: np.random.Generator) -> ProtocolTrial:
    """One protocol trial; ``nm`` may also be given as the bare rate p."""
    p = nm if isinstance(nm, float | int) else nm.p
    if not isinstance(nm, float | int) and spec.mode == "physical" and not isinstance(nm, NoiseModel):
        raise ConfigError("physical mode takes a NoiseModel")
    res = run_block(spec, float(p), 1, rng)
    v = VERDICTS[int(res.verdict[0])]
    e = PauliString.from_arrays(res.residual_x[:, 0], res.residual_z[:, 0])
    f = CLASSES[int(res.failure[0])] if v == "accepted" else None
    return ProtocolTrial(v, e, f, {"stages": ("G",) + skeleton(spec.d, spec.ordering).stages})


def run_encoded_trial(spec: ProtocolSpec, p: float, rng: np.random.Generator) -> ProtocolTrial:
    if spec.mode != "encoded" or spec.logical is None:
        raise ConfigError("run_encoded_trial needs an encoded spec with a LogicalNoiseModel")
    return run_trial(spec, float(p), rng)


# fault-set sweeps ---------------------------------------------------------


@dataclass
class SweepReport:
    d: int
    faults: int
    fault_sets: int = 0
    branch_runs: int = 0
    accepted_runs: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _coset_weight(lat: CodeLattice, ex: np.ndarray, ez: np.ndarray, limit: int) -> tuple[int, str]:
    """Least weight of the residual up to stabilizers (capped at limit + 1) and its decoded class."""
    e = PauliString.from_arrays(ex, ez)
    c = decode(lat, lat.syndrome(e))
    cls = lat.logical_class(e * c)
    w = c.weight if c.weight <= limit else min_coset_weight(lat, e, limit)
    return w, "success" if cls == "I" else f"fail_{cls}"


def _check_rows(sk: Skeleton, s: int, verdict, ex, ez, rows_meta, report: SweepReport) -> None:
    lat = sk.lattice
    for b in np.flatnonzero(verdict == 0).tolist():
        report.accepted_runs += 1
        if not (ex[:, b].any() or ez[:, b].any()):
            continue
        w, cls = _coset_weight(lat, ex[:, b], ez[:, b], s)
        if w > s or cls != "success":
            report.violations.append({**rows_meta(b), "weight": w, "class": cls})


def _past_cones(cc: CompiledCircuit) -> np.ndarray:
    """(n_meas, n_T) bool: T locations that can influence each outcome.

    Two-qubit gates merge the cones of both qubits and every E'_Z selection
    merges all data qubits, which over-approximates the true dependence.
    """
    nq = cc.circuit.num_qubits
    cone = [0] * nq
    out = np.zeros((cc.n_meas, len(cc.t_index)), dtype=bool)
    data = cc.data.tolist()
    for s, step in enumerate(cc.steps):
        if s in cc.zselect_steps:
            merged = 0
            for q in data:
                merged |= cone[q]
            for q in data:
                cone[q] = merged
        for op in step:
            if op.code <= 2:
                cone[op.q0] = 0
            elif op.meas >= 0:
                m = cone[op.q0]
                out[op.meas] = [(m >> j) & 1 for j in range(out.shape[1])]
                cone[op.q0] = 0
            elif op.loc in cc.t_index:
                cone[op.q0] |= 1 << cc.t_index[op.loc]
            elif op.q1 >= 0:
                cone[op.q0] = cone[op.q1] = cone[op.q0] | cone[op.q1]
    return out


def _robust_abort(groups: OutcomeGroups, meas: np.ndarray, dependent: np.ndarray) -> np.ndarray:
    """Rows whose abort is fixed whatever the remaining twirl choices."""
    ind = ~dependent
    hit = np.zeros(meas.shape[1], dtype=bool)
    single = np.concatenate([groups.flags, groups.w4]).astype(np.intp)
    if len(single):
        hit |= (meas[single] & ind[single]).any(axis=0)
    for g in list(groups.w6) + list(groups.ghz):
        hit |= (meas[g].sum(axis=0) % 2 == 1) & ind[g].all(axis=0)
    return hit


def _enumerate_branches(run, forced: ForcedFaults, on_leaf, chunk: int = 20000) -> int:
    """Run every live twirl branch of every row; returns the number of branch runs.

    A run whose choice bits beyond ``fixed`` are zero is itself a leaf; it
    spawns one child per nonzero setting of the new bits it revealed.
    """
    rows = np.arange(forced.locs.shape[0])
    choice = np.zeros(len(rows), dtype=np.int64)
    fixed = np.zeros(len(rows), dtype=np.int64)
    runs = 0
    while len(rows):
        nxt_rows, nxt_choice, nxt_fixed = [], [], []
        for lo in range(0, len(rows), chunk):
            r, c, f = rows[lo : lo + chunk], choice[lo : lo + chunk], fixed[lo : lo + chunk]
            out, k, settled = run(forced.subset(r), Twirl(mode="choice", choice=c, record=True))
            runs += len(r)
            on_leaf(r, c, out)
            grow = (k > f) & ~settled
            for i in np.flatnonzero(grow).tolist():
                extra = np.arange(1, 1 << int(k[i] - f[i]), dtype=np.int64) << int(f[i])
                nxt_rows.append(np.full(len(extra), r[i]))
                nxt_choice.append(c[i] | extra)
                nxt_fixed.append(np.full(len(extra), k[i]))
        if not nxt_rows:
            break
        rows = np.concatenate(nxt_rows)
        choice = np.concatenate(nxt_choice)
        fixed = np.concatenate(nxt_fixed)
    return runs


def _stage2_runner(sk: Skeleton):
    cones = _past_cones(sk.stage2).astype(np.int64)

    def run(forced: ForcedFaults, tw: Twirl):
        nq = sk.stage2.circuit.num_qubits
        B = forced.locs.shape[0]
        x = np.zeros((nq, B), dtype=bool)
        z = np.zeros((nq, B), dtype=bool)
        res = run_batch(sk.stage2, x, z, forced=forced, twirl=tw, canonicalize=sk.reducer)
        v = sk.groups.verdicts(res.meas)
        dependent = (cones @ res.event_at.astype(np.int64)) > 0
        settled = _robust_abort(sk.groups, res.meas, dependent)
        return (v, res.x[sk.stage2.data], res.z[sk.stage2.data]), res.branch_events, settled

    return run


def fault_sweep(
    d: int,
    s: int = 1,
    samples: int | None = None,
    seed: int = 0,
    chunk: int = 4000,
    ordering: str = "paired",
) -> SweepReport:
    """Inject s faults, follow every twirl branch, and test accepted trials.

    With ``samples=None`` every set of s faults at distinct locations is
    tried (stage 1 and stage 2 separately); otherwise ``samples`` random
    stage-2 fault sets are drawn. Accepted trials must leave a residual
    whose coset has weight <= s and decodes to the ideal state.
    """
    from .flagverify import _combos, fault_events

    sk = skeleton(d, ordering)
    report = SweepReport(d, s)
    locs_all = sk.stage2.circuit.locations()

    # stage 1: an accepted growth leaves a stabilizer, so stage 2 starts clean
    g_loc, g_code = fault_events(sk.grow)
    if samples is None:
        for idx in _combos(np.searchsorted(g_loc, g_loc, side="right"), len(g_loc), s, chunk):
            forced = ForcedFaults(g_loc[idx], g_code[idx])
            v1, ex, ez = stage1_batch(sk, None, len(idx), None, forced=forced)
            report.fault_sets += len(idx)
            ok = v1 == 0
            lat = sk.lattice
            for b in np.flatnonzero(ok).tolist():
                e = PauliString.from_arrays(ex[:, b], ez[:, b])
                if lat.syndrome(e).any() or lat.logical_class(e) != "I":
                    report.violations.append({"stage": 1, "faults": idx[b].tolist()})

    ev_loc, ev_code = fault_events(sk.stage2)
    run = _stage2_runner(sk)
    if samples is None:
        batches = _combos(np.searchsorted(ev_loc, ev_loc, side="right"), len(ev_loc), s, chunk)
    else:
        rng = np.random.default_rng(seed)
        batches = _random_sets(rng, ev_loc, s, samples, chunk)

    for idx in batches:
        forced = ForcedFaults(ev_loc[idx], ev_code[idx])
        report.fault_sets += len(idx)

        def on_leaf(rows, choice, out, idx=idx):
            v, ex, ez = out

            def meta(b):
                return {
                    "stage": 2,
                    "faults": [
                        {"step": locs_all[int(ev_loc[i])].step, "kind": locs_all[int(ev_loc[i])].kind,
                         "qubits": [q + 1 for q in locs_all[int(ev_loc[i])].qubits], "code": int(ev_code[i])}
                        for i in idx[rows[b]]
                    ],
                    "branch": int(choice[b]),
                }

            _check_rows(sk, s, v, ex, ez, meta, report)

        report.branch_runs += _enumerate_branches(run, forced, on_leaf)
    return report


def _random_sets(rng: np.random.Generator, ev_loc: np.ndarray, s: int, samples: int, chunk: int):
    """Random event tuples at s distinct locations, sorted by location."""
    n = len(ev_loc)
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        idx = np.sort(rng.integers(0, n, size=(m, s)), axis=1)
        locs = ev_loc[idx]
        distinct = (np.diff(locs, axis=1) > 0).all(axis=1)
        idx = idx[distinct]
        done += len(idx)
        if len(idx):
            yield idx


# exact check of the pair ordering ------------------------------------------------


class _CodeState:
    """Dense state vector on the data qubits of a color code (d <= 5)."""

    def __init__(self, lat: CodeLattice) -> None:
        if lat.n > 22:
            raise ValueError("state vector too large")
        self.lat = lat
        self.n = lat.n
        self.idx = np.arange(1 << lat.n, dtype=np.int64)

    def _masks(self, e: PauliString) -> tuple[int, int]:
        ex, ez = e.to_arrays()
        # qubit q is bit q of the basis index
        return int(sum(1 << q for q in np.flatnonzero(ex))), int(sum(1 << q for q in np.flatnonzero(ez)))

    def pauli(self, psi: np.ndarray, e: PauliString) -> np.ndarray:
        xm, zm = self._masks(e)
        y = int(bin(xm & zm).count("1"))
        out = psi[self.idx ^ xm]  # out[i] = psi[i ^ xm]
        # X^a Z^b ordering: Z acts first, phase from the source index
        par = np.bitwise_count((self.idx ^ xm) & zm) & 1
        out = out * (1 - 2 * par.astype(np.int8))
        return out * (1j**y)

    def hadamard_all(self, psi: np.ndarray) -> np.ndarray:
        t = psi.reshape((2,) * self.n)
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        for ax in range(self.n):
            t = np.moveaxis(np.tensordot(h, t, axes=([1], [ax])), 0, ax)
        return t.reshape(-1)

    def project_code(self, psi: np.ndarray) -> np.ndarray:
        for s in self.lat.x_stabilizers + self.lat.z_stabilizers:
            psi = (psi + self.pauli(psi, s)) / 2
        return psi

    def project_h(self, psi: np.ndarray, sign: int = 1) -> np.ndarray:
        return (psi + sign * self.hadamard_all(psi)) / 2

    def h_state(self) -> np.ndarray:
        zero = np.zeros(1 << self.n, dtype=complex)
        zero[0] = 1
        zero = self.project_code(zero)
        zero /= np.linalg.norm(zero)
        one = self.pauli(zero, self.lat.logical_x)
        return np.cos(np.pi / 8) * zero + np.sin(np.pi / 8) * one


@dataclass(frozen=True)
class OrderingOutcome:
    ordering: str
    accepted: float  # probability of acceptance
    accepted_bad: float  # probability of accepting a state orthogonal to |H>


def ordering_regression(d: int = 5, ordering: str = "paired", qubit: int = 0) -> OrderingOutcome:
    """Exact run of the adversarial sequence with ideal H_m and EC.

    The input is E' Xbar |Hbar> with E' = X on ``qubit``. The first H_m
    accepts (E' Xbar + E~' Zbar)/sqrt(2) |Hbar>; a second fault E' then
    hits the data at the start of the first EC. Ideal H_m is the projector
    onto the +1 eigenspace of H on all data, ideal EC the code-space
    projector; any other outcome aborts.
    """
    if d < 5:
        raise ValueError("the ordering only matters with at least two pairs (d >= 5)")
    lat = build_lattice(d)
    cs = _CodeState(lat)
    good = cs.h_state()
    ep = PauliString.single(lat.n, qubit, "X")
    psi = cs.pauli(cs.pauli(good, lat.logical_x), ep)
    r = (d - 1) // 2
    ops = ["Hm", "EC"] * r if ordering == "paired" else ["Hm"] * r + ["EC"] * r
    first_ec = ops.index("EC")
    for i, op in enumerate(ops):
        if i == first_ec:
            psi = cs.pauli(psi, ep)
        psi = cs.project_h(psi) if op == "Hm" else cs.project_code(psi)
    acc = float(np.vdot(psi, psi).real)
    overlap = abs(np.vdot(good, psi)) ** 2
    return OrderingOutcome(ordering, acc, max(acc - overlap, 0.0))
