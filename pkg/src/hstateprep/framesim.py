"""Batched Pauli-frame simulation of catalog circuits.

Frames are stored qubit-major as boolean arrays ``x[q, shot]`` and
``z[q, shot]`` so every gate is a couple of row XORs over the whole batch.
Clifford gates conjugate the frame exactly. T and T-dagger locations use
the pessimistic twirl: an incoming X or Z leaves as X or Z with equal
probability, Y passes unchanged. Before every step that applies T or
T-dagger to data qubits the Z part of the data frame is replaced by its
lighter representative modulo Z on all data qubits (see
``select_z_component``).

The reference run has every measurement outcome equal to +1, so a recorded
outcome bit is 1 exactly when the frame anticommutes with the measured
operator or a measurement fault flipped it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .circuit import MEASURE_KINDS, Circuit, LocationIndex
from .noise import FLIP, SUPPORT, EncodedNoise, NoiseModel, X, Y, Z, split_two
from .pauli import PauliString

# operation codes for the compiled program
_OP = {
    "prep_zero": 0, "prep_plus": 1, "prep_h": 2,
    "measure_z": 3, "measure_x": 4, "measure_y": 5,
    "hadamard": 6, "t_gate": 7, "t_dagger": 8,
    "cnot": 9, "cz": 10, "idle": 11,
}
_T_OPS = (7, 8)
_MAGIC_OPS = (2, 7, 8)  # locations that consume an injected magic state


@dataclass(frozen=True)
class Op:
    loc: int
    code: int
    q0: int
    q1: int
    noise: str
    meas: int  # outcome slot, -1 if not a measurement
    terminal: bool  # T location after which the qubit only idles


@dataclass(frozen=True)
class CompiledCircuit:
    circuit: Circuit
    steps: tuple[tuple[Op, ...], ...]
    zselect_steps: frozenset[int]
    data: np.ndarray
    n_meas: int
    n_locations: int
    t_index: dict[int, int] = field(default_factory=dict)  # location -> T/T-dagger ordinal
    tdg_steps: frozenset[int] = frozenset()  # steps opening an H_m T-dagger layer on data


@lru_cache(maxsize=64)
def compile_circuit(circuit: Circuit) -> CompiledCircuit:
    locs = circuit.locations()
    data = np.array(circuit.qubits_with_role("data"), dtype=np.intp)
    data_set = set(data.tolist())
    last_active: dict[int, int] = {}
    for i, loc in enumerate(locs):
        if loc.kind != "idle":
            for q in loc.qubits:
                last_active[q] = i
    steps: list[list[Op]] = [[] for _ in range(circuit.depth)]
    zsel: set[int] = set()
    tdg: set[int] = set()
    m = 0
    for i, loc in enumerate(locs):
        code = _OP[loc.kind]
        meas = -1
        if loc.kind in MEASURE_KINDS:
            meas, m = m, m + 1
        q1 = loc.qubits[1] if len(loc.qubits) > 1 else -1
        terminal = code in _T_OPS and last_active[loc.qubits[0]] == i
        steps[loc.step].append(Op(i, code, loc.qubits[0], q1, loc.noise_kind, meas, terminal))
        if code in _T_OPS and loc.qubits[0] in data_set:
            zsel.add(loc.step)
            if loc.kind == "t_dagger":
                tdg.add(loc.step)
    t_index = {i: j for j, i in enumerate(i for i, loc in enumerate(locs) if _OP[loc.kind] in _T_OPS)}
    return CompiledCircuit(
        circuit, tuple(tuple(s) for s in steps), frozenset(zsel), data, m, len(locs), t_index, frozenset(tdg)
    )


@dataclass
class ForcedFaults:
    """Deterministic faults: row ``r`` gets ``codes[r, j]`` at location ``locs[r, j]``.

    Unused slots hold location -1. Codes follow ``noise``: single-qubit
    Pauli codes, ``pa + 4 * pb`` for two-qubit locations, FLIP for
    measurements.
    """

    locs: np.ndarray
    codes: np.ndarray

    def by_location(self) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        rows, cols = np.nonzero(self.locs >= 0)
        locs = self.locs[rows, cols]
        codes = self.codes[rows, cols]
        order = np.argsort(locs, kind="stable")
        locs, rows, codes = locs[order], rows[order], codes[order]
        keys, starts = np.unique(locs, return_index=True)
        ends = np.append(starts[1:], len(locs))
        return {int(k): (rows[a:b], codes[a:b]) for k, a, b in zip(keys, starts, ends)}

    def subset(self, rows: np.ndarray) -> "ForcedFaults":
        return ForcedFaults(self.locs[rows], self.codes[rows])


@dataclass
class BatchResult:
    x: np.ndarray
    z: np.ndarray
    meas: np.ndarray  # (n_meas, B) bool
    free: np.ndarray | None = None  # (nq, B) qubits left in an unresolved X-or-Z twirl
    branch_events: np.ndarray | None = None
    event_at: np.ndarray | None = None  # (n_T, B) T locations where a row branched


@dataclass
class Twirl:
    """How T locations resolve X/Z inputs."""

    mode: str = "random"  # "random" | "choice"
    choice: np.ndarray | None = None  # per-row branch index for mode "choice"
    free_terminal: bool = False
    record: bool = False  # keep which T locations branched, per row


def _apply_pauli(x, z, q, code, rows):
    if code & X:
        x[q, rows] ^= True
    if code & Z:
        z[q, rows] ^= True


def _inject(x, z, meas_flip, op: Op, rows, codes):
    if op.noise == "measure":
        meas_flip[rows] ^= True
        return
    if op.noise == "two":
        pa, pb = codes & 3, codes >> 2
        x[op.q0, rows] ^= (pa & X).astype(bool)
        z[op.q0, rows] ^= (pa & Z).astype(bool)
        x[op.q1, rows] ^= (pb & X).astype(bool)
        z[op.q1, rows] ^= (pb & Z).astype(bool)
    else:
        x[op.q0, rows] ^= (codes & X).astype(bool)
        z[op.q0, rows] ^= (codes & Z).astype(bool)


def run_batch(
    cc: CompiledCircuit,
    x: np.ndarray,
    z: np.ndarray,
    rng: np.random.Generator | None = None,
    noise: NoiseModel | EncodedNoise | None = None,
    forced: ForcedFaults | None = None,
    twirl: Twirl | None = None,
    select_z: bool = True,
    canonicalize: Callable[[np.ndarray, np.ndarray, np.ndarray], None] | None = None,
) -> BatchResult:
    """Propagate frames ``x``/``z`` (modified in place) through the circuit.

    ``canonicalize(x, z, data)`` may rewrite the data frame in place before
    each T-dagger layer, where the data still carries a code state.
    """
    twirl = twirl or Twirl()
    B = x.shape[1]
    meas = np.zeros((cc.n_meas, B), dtype=bool)
    free = np.zeros_like(x) if twirl.free_terminal else None
    events = np.zeros(B, dtype=np.int64) if twirl.mode == "choice" else None
    event_at = np.zeros((len(cc.t_index), B), dtype=bool) if twirl.record else None
    forced_map = forced.by_location() if forced is not None else {}
    noisy = noise is not None and noise.p > 0
    rates = {(k, m): noise.location_rate(k, m) for k in SUPPORT for m in (False, True)} if noisy else {}
    data = cc.data
    n_data = len(data)

    for s, step in enumerate(cc.steps):
        if canonicalize is not None and s in cc.tdg_steps:
            canonicalize(x, z, data)
        if select_z and s in cc.zselect_steps and n_data:
            zd = z[data]
            flip = 2 * zd.sum(axis=0) > n_data
            if flip.any():
                z[np.ix_(data, np.flatnonzero(flip))] ^= True
        for op in step:
            c, a, b = op.code, op.q0, op.q1
            mflip = None
            if c <= 2:
                x[a] = False
                z[a] = False
                if free is not None:
                    free[a] = False
            elif c <= 5:
                if c == 3:
                    out = x[a].copy()
                elif c == 4:
                    out = z[a].copy()
                else:
                    out = x[a] ^ z[a]
                meas[op.meas] = out
                mflip = meas[op.meas]
                x[a] = False
                z[a] = False
            elif c == 6:
                x[a], z[a] = z[a].copy(), x[a].copy()
            elif c in _T_OPS:
                mixed = np.flatnonzero(x[a] ^ z[a])
                if mixed.size:
                    if op.terminal and free is not None:
                        free[a, mixed] = True
                    elif twirl.mode == "random":
                        bit = rng.integers(0, 2, size=mixed.size).astype(bool)
                        x[a, mixed] = bit
                        z[a, mixed] = ~bit
                    else:
                        k = events[mixed]
                        bit = ((twirl.choice[mixed] >> k) & 1).astype(bool)
                        x[a, mixed] = ~bit  # branch bit 0 -> X
                        z[a, mixed] = bit
                        events[mixed] += 1
                        if event_at is not None:
                            event_at[cc.t_index[op.loc], mixed] = True
            elif c == 9:
                x[b] ^= x[a]
                z[a] ^= z[b]
            elif c == 10:
                z[b] ^= x[a]
                z[a] ^= x[b]
            # idle (11) acts trivially on the frame

            # faults occur after the location
            if mflip is None and c in (3, 4, 5):
                mflip = meas[op.meas]
            target_flip = mflip if mflip is not None else np.empty(0, dtype=bool)
            hit = forced_map.get(op.loc)
            if hit is not None:
                _inject(x, z, target_flip, op, hit[0], hit[1])
            if noisy:
                magic = c in _MAGIC_OPS
                r = rates[(op.noise, magic)]
                k = rng.binomial(B, r) if r > 0 else 0
                if k:
                    rows = rng.choice(B, size=k, replace=False) if k > 1 else rng.integers(0, B, size=1)
                    codes = noise.sample_codes(op.noise, magic, k, rng)
                    _inject(x, z, target_flip, op, rows, codes)
    return BatchResult(x, z, meas, free, events, event_at)


# pure single-operator rules ---------------------------------------------------


def apply_t_twirl(incoming: int, rng: np.random.Generator) -> int:
    """Twirl rule at a T/T-dagger location for a single-qubit Pauli code."""
    if incoming in (0, Y):
        return incoming
    if incoming in (X, Z):
        return X if rng.random() < 0.5 else Z
    raise ValueError(f"not a single-qubit Pauli code: {incoming}")


def select_z_component(e: PauliString, n: int | None = None) -> PauliString:
    """Lighter of E_Z and E_Z * Z^n (ties keep E_Z), as a Z-type operator on the data."""
    n = e.n if n is None else n
    if n != e.n:
        raise ValueError("n must equal the number of data qubits in e")
    ez = e.z_component()
    comp = ez * PauliString.from_support(n, "Z", range(n))
    return comp if comp.weight < ez.weight else ez


def canonical_frame(e: PauliString) -> PauliString:
    """Frame with its Z part replaced by ``select_z_component``."""
    return e.x_component() * select_z_component(e)


# helpers --------------------------------------------------------------------


def frames_from_pauli(e: PauliString, B: int, nq: int, qubits: np.ndarray | list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Broadcast a data-register Pauli into (nq, B) frame arrays."""
    x = np.zeros((nq, B), dtype=bool)
    z = np.zeros((nq, B), dtype=bool)
    ex, ez = e.to_arrays()
    qubits = np.asarray(qubits)
    x[qubits[ex]] = True
    z[qubits[ez]] = True
    return x, z


def location_list(circuit: Circuit) -> list[LocationIndex]:
    return circuit.locations()


FaultInjector = Callable[[Op, np.ndarray, np.ndarray], None]


# outcome groups and verdicts ------------------------------------------------

ACCEPTED, ABORT_FLAG, ABORT_W4, ABORT_W6, ABORT_GHZ = range(5)
VERDICT_NAMES = ("accepted", "flag", "w4_syndrome", "w6_parity", "ghz_parity")


def _tag_kind(tag: str) -> str:
    return tag.rsplit("/", 1)[-1]


@dataclass(frozen=True)
class OutcomeGroups:
    """Measurement slots grouped for the abort decision."""

    flags: np.ndarray
    w4: np.ndarray  # one slot per weight-4 face measurement
    w6: np.ndarray  # (groups, 3) slots whose XOR is a weight-6 face outcome
    ghz: tuple[np.ndarray, ...]  # one slot array per H_m round

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "OutcomeGroups":
        flags, w4, w6, ghz = [], [], [], []
        for tag, slots in circuit.measurement_index().items():
            kind = _tag_kind(tag)
            if kind == "flag":
                flags += slots
            elif kind.startswith("syn:"):
                if len(slots) == 1:
                    w4 += slots
                elif len(slots) == 3:
                    w6.append(slots)
                else:
                    raise ValueError(f"face group {tag!r} has {len(slots)} outcomes")
            elif kind == "ghz":
                ghz.append(np.asarray(slots, dtype=np.intp))
        return cls(
            np.asarray(flags, dtype=np.intp),
            np.asarray(w4, dtype=np.intp),
            np.asarray(w6, dtype=np.intp).reshape(-1, 3),
            tuple(ghz),
        )

    def verdicts(self, meas: np.ndarray) -> np.ndarray:
        """Per-shot verdict code; the first failing check in VERDICT_NAMES order wins."""
        B = meas.shape[1]
        out = np.zeros(B, dtype=np.int8)
        tests = (
            (ABORT_FLAG, meas[self.flags].any(axis=0) if len(self.flags) else None),
            (ABORT_W4, meas[self.w4].any(axis=0) if len(self.w4) else None),
            (ABORT_W6, (meas[self.w6].sum(axis=1) % 2).any(axis=0) if len(self.w6) else None),
            (ABORT_GHZ, np.any([meas[g].sum(axis=0) % 2 for g in self.ghz], axis=0) if self.ghz else None),
        )
        for code, hit in reversed(tests):
            if hit is not None:
                out[hit] = code
        return out

    def syndrome_parities(self, meas: np.ndarray) -> np.ndarray:
        parts = []
        if len(self.w4):
            parts.append(meas[self.w4])
        if len(self.w6):
            parts.append((meas[self.w6].sum(axis=1) % 2).astype(bool))
        return np.concatenate(parts) if parts else np.zeros((0, meas.shape[1]), dtype=bool)

    def ghz_parity(self, meas: np.ndarray) -> np.ndarray:
        if not self.ghz:
            return np.zeros((0, meas.shape[1]), dtype=bool)
        return np.array([meas[g].sum(axis=0) % 2 for g in self.ghz], dtype=bool)


@dataclass
class TrialRecord:
    residual_error: PauliString
    flag_bits: np.ndarray
    syndrome_parities: np.ndarray
    ghz_parity: np.ndarray
    verdict: str

    @property
    def accepted(self) -> bool:
        return self.verdict == "accepted"


def propagate(
    circuit: Circuit,
    nm: NoiseModel | None,
    rng: np.random.Generator,
    input_error: PauliString | None = None,
) -> TrialRecord:
    """One trial of ``circuit``; ``input_error`` acts on the data qubits beforehand."""
    cc = compile_circuit(circuit)
    nq = circuit.num_qubits
    if input_error is None:
        x = np.zeros((nq, 1), dtype=bool)
        z = np.zeros((nq, 1), dtype=bool)
    else:
        x, z = frames_from_pauli(input_error, 1, nq, cc.data)
    res = run_batch(cc, x, z, rng=rng, noise=nm)
    groups = OutcomeGroups.from_circuit(circuit)
    v = int(groups.verdicts(res.meas)[0])
    residual = PauliString.from_arrays(res.x[cc.data, 0], res.z[cc.data, 0])
    return TrialRecord(
        residual,
        res.meas[groups.flags, 0].astype(np.uint8),
        groups.syndrome_parities(res.meas)[:, 0].astype(np.uint8),
        groups.ghz_parity(res.meas)[:, 0].astype(np.uint8),
        VERDICT_NAMES[v],
    )
