"""Exhaustive t-flag verification by fault enumeration.

A circuit measuring U is t-flag when every set of v <= t faults that leaves
no flag raised produces a data error E with min(wt(E), wt(E U)) <= v.
Fault sets are drawn from the noise model's support at distinct
locations and propagated in batches through the frame simulator.

For U = H on every data qubit the comparison partner of E is E Z^n, and
every branch of the T-gate twirl must satisfy the condition. A T location
after which the qubit only idles leaves that qubit "free": the adversary
picks X there, which is non-identity in both E and E Z^n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .catalog import HADAMARD, CatalogEntry
from .circuit import LocationIndex
from .framesim import CompiledCircuit, ForcedFaults, Twirl, compile_circuit, run_batch
from .noise import FLIP, SUPPORT
from .pauli import PauliString

DEFAULT_BUDGET = 10**9
_LETTERS = {1: "X", 2: "Z", 3: "Y", 0: "I"}


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Counterexample:
    faults: list[tuple[LocationIndex, str]]
    error: PauliString
    weight: int
    weight_u: int
    flags: list[int]

    def to_dict(self) -> dict:
        return {
            "faults": [
                {"step": f.step, "kind": f.kind, "qubits": [q + 1 for q in f.qubits], "fault": p}
                for f, p in self.faults
            ],
            "error": str(self.error),
            "weight": self.weight,
            "weight_u": self.weight_u,
            "flags": self.flags,
        }


@dataclass
class FlagReport:
    circuit_id: str
    t_checked: int
    verdict: str  # "t-flag" | "violated"
    counterexample: Counterexample | None = None
    fault_sets: int = 0
    single_events: int = 0
    branch_runs: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict == "t-flag"

    def to_json(self) -> str:
        d = {
            "circuit_id": self.circuit_id,
            "t_checked": self.t_checked,
            "verdict": self.verdict,
            "fault_sets": self.fault_sets,
            "single_events": self.single_events,
            "branch_runs": self.branch_runs,
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
        }
        return json.dumps(d, indent=2)


# fault events ----------------------------------------------------------------


def fault_events(cc: CompiledCircuit) -> tuple[np.ndarray, np.ndarray]:
    """(location, code) of every single fault, in location order."""
    locs, codes = [], []
    for step in cc.steps:
        for op in sorted(step, key=lambda o: o.loc):
            for code in SUPPORT[op.noise]:
                locs.append(op.loc)
                codes.append(code)
    order = np.argsort(np.asarray(locs), kind="stable")
    return np.asarray(locs, dtype=np.int64)[order], np.asarray(codes, dtype=np.int64)[order]


def expected_single_events(entry: CatalogEntry) -> int:
    """Independent count: sum of support sizes over all locations."""
    return sum(len(SUPPORT[loc.noise_kind]) for loc in entry.circuit.locations())


def count_fault_sets(ev_loc: np.ndarray, t: int) -> int:
    """Number of fault sets of size 1..t at distinct locations."""
    _, sizes = np.unique(ev_loc, return_counts=True)
    e = [1] + [0] * t  # elementary symmetric polynomials
    for s in sizes.tolist():
        for k in range(t, 0, -1):
            e[k] += e[k - 1] * s
    return sum(e[1:])


def _combos(next_start: np.ndarray, n: int, v: int, chunk: int) -> Iterator[np.ndarray]:
    """Index tuples i1 < i2 < ... at strictly increasing locations, in lexicographic order."""
    if v == 1:
        for a in range(0, n, chunk):
            yield np.arange(a, min(n, a + chunk), dtype=np.int64)[:, None]
        return
    for pre in _combos(next_start, n, v - 1, chunk):
        starts = next_start[pre[:, -1]]
        counts = n - starts
        cum = np.cumsum(counts)
        lo = 0
        while lo < len(pre):
            base = cum[lo - 1] if lo else 0
            hi = int(np.searchsorted(cum, base + chunk, side="right"))
            hi = max(hi, lo + 1)
            c = counts[lo:hi]
            tot = int(c.sum())
            if tot:
                rows = np.repeat(np.arange(lo, hi), c)
                offs = np.arange(tot) - np.repeat(np.cumsum(c) - c, c)
                yield np.column_stack([pre[rows], starts[rows] + offs])
            lo = hi


# evaluation ------------------------------------------------------------------


def _popcount_rows(a: np.ndarray) -> np.ndarray:
    return a.sum(axis=0)


class _Evaluator:
    def __init__(self, entry: CatalogEntry) -> None:
        self.entry = entry
        self.cc = compile_circuit(entry.circuit)
        self.data = np.asarray(entry.data_qubits or entry.circuit.qubits_with_role("data"), dtype=np.intp)
        idx = entry.circuit.measurement_index()
        self.flag_slots = np.asarray(idx.get("flag", []), dtype=np.intp)
        op = entry.measured_operator
        self.hadamard = op == HADAMARD
        if isinstance(op, PauliString):
            ux, uz = op.to_arrays()
            self.ux, self.uz = ux[:, None], uz[:, None]
        else:
            self.ux = self.uz = None

    def run(self, forced: ForcedFaults, choice: np.ndarray):
        B = forced.locs.shape[0]
        nq = self.entry.circuit.num_qubits
        x = np.zeros((nq, B), dtype=bool)
        z = np.zeros((nq, B), dtype=bool)
        tw = Twirl(mode="choice", choice=choice, free_terminal=True)
        res = run_batch(self.cc, x, z, forced=forced, twirl=tw)
        flags = res.meas[self.flag_slots] if len(self.flag_slots) else np.zeros((0, B), dtype=bool)
        flagged = flags.any(axis=0)
        ex, ez = res.x[self.data], res.z[self.data]
        free = res.free[self.data]
        w = _popcount_rows(ex | ez | free)
        if self.hadamard:
            wu = _popcount_rows(ex | ~ez | free)
        elif self.ux is not None:
            wu = _popcount_rows((ex ^ self.ux) | (ez ^ self.uz) | free)
        else:
            wu = w
        return flagged, ex, ez, free, w, wu, flags, res.branch_events


def _next_choice(choice: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Advance each row to its next twirl leaf; returns (new choice, done mask)."""
    new = choice.copy()
    done = np.ones(len(choice), dtype=bool)
    for r in np.flatnonzero(k > 0).tolist():
        c, kk = int(choice[r]), int(k[r])
        for j in range(kk - 1, -1, -1):
            if not (c >> j) & 1:
                new[r] = (c & ((1 << j) - 1)) | (1 << j)
                done[r] = False
                break
    return new, done


def verify_t_flag(
    entry: CatalogEntry,
    t: int,
    budget: int = DEFAULT_BUDGET,
    chunk: int = 20000,
    stop_at_first: bool = True,
) -> FlagReport:
    if t < 1:
        raise ValueError("t must be at least 1")
    ev = _Evaluator(entry)
    ev_loc, ev_code = fault_events(ev.cc)
    n_ev = len(ev_loc)
    total = count_fault_sets(ev_loc, t)
    if total > budget:
        raise BudgetExceeded(f"{total} fault sets for t={t} exceed the budget of {budget}")
    next_start = np.searchsorted(ev_loc, ev_loc, side="right")
    report = FlagReport(entry.id, t, "t-flag", single_events=n_ev)
    locs_all = entry.circuit.locations()

    for v in range(1, t + 1):
        for idx in _combos(next_start, n_ev, v, chunk):
            forced = ForcedFaults(ev_loc[idx], ev_code[idx])
            report.fault_sets += len(idx)
            rows = np.arange(len(idx))
            choice = np.zeros(len(idx), dtype=np.int64)
            bad_rows: list[int] = []
            while len(rows):
                sub = forced.subset(rows)
                flagged, ex, ez, free, w, wu, flags, k = ev.run(sub, choice[rows])
                report.branch_runs += len(rows)
                viol = (~flagged) & (np.minimum(w, wu) > v)
                if viol.any():
                    r = int(np.flatnonzero(viol)[0])
                    bad_rows.append(int(rows[r]))
                    if report.counterexample is None or int(rows[r]) < report.meta.get("row", 1 << 62):
                        e = PauliString.from_arrays(ex[:, r] | free[:, r], ez[:, r])
                        report.counterexample = Counterexample(
                            [(locs_all[int(ev_loc[i])], _fault_text(int(ev_code[i]), locs_all[int(ev_loc[i])])) for i in idx[rows[r]]],
                            e, int(w[r]), int(wu[r]), flags[:, r].astype(int).tolist(),
                        )
                        report.meta["row"] = int(rows[r])
                new_choice, done = _next_choice(choice[rows], k)
                choice[rows] = new_choice
                rows = rows[~done]
            if bad_rows:
                report.verdict = "violated"
                report.meta.pop("row", None)
                report.meta["v"] = v
                if stop_at_first:
                    return report
    report.meta.pop("row", None)
    return report


def _fault_text(code: int, loc: LocationIndex) -> str:
    if code == FLIP:
        return "flip"
    if loc.noise_kind == "two":
        return _LETTERS[code & 3] + _LETTERS[code >> 2]
    return _LETTERS[code]


def exhaustive_count_ok(entry: CatalogEntry) -> bool:
    ev_loc, _ = fault_events(compile_circuit(entry.circuit))
    return len(ev_loc) == expected_single_events(entry)


def fault_set_count(entry: CatalogEntry, t: int) -> int:
    ev_loc, _ = fault_events(compile_circuit(entry.circuit))
    return count_fault_sets(ev_loc, t)

