"""Acceptance gate: criteria 1 to 7, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
written straight to the terminal even when output is captured.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from hstateprep.catalog import (
    build_ec_circuit, build_hm_circuit, build_register, gadget_entry, growth_layout,
    matching_correction,
)
from hstateprep.framesim import OutcomeGroups, compile_circuit, frames_from_pauli, run_batch
from hstateprep.lattice import build_lattice
from hstateprep.montecarlo import fit_slope, run_campaign
from hstateprep.overhead import encoded_qubits, min_qubits, n_anc, n_data, n_df
from hstateprep.pauli import PauliString
from hstateprep.protocol import ProtocolSpec, fault_sweep, ordering_regression

from test_catalog import _grow_once

FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "growth_corrections.json").read_text())
WORKERS = 4


@pytest.fixture
def verdict(capsys):
    def emit(n: int, checks: list[tuple[str, bool]]) -> None:
        failed = [name for name, ok in checks if not ok]
        line = f"{'FAIL' if failed else 'PASS'} criterion {n}: " + (
            "; ".join(failed) if failed else f"{len(checks)} checks"
        )
        if not failed and len(checks) <= 4:
            line += " (" + "; ".join(name for name, _ in checks) + ")"
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line

    return emit


def test_criterion_1_formulas(verdict):
    checks = [(f"min n_tot d={d}", min_qubits(d) == m) for d, m in [(3, 16), (5, 55), (7, 118)]]
    for d1, d2, df, mn in [(7, 11, 3, 6288), (5, 9, 5, 12795), (3, 7, 7, 15600)]:
        got = encoded_qubits(d1, d2, df, 0.5, 1.0, n_df(df) + 1)[1]
        checks.append((f"min n_f ({d1},{d2},{df}) = {got}", got == mn))
    for d in (3, 5, 7):
        reg = build_register(d)
        same = reg.num_qubits == min_qubits(d) == n_data(d) + n_anc(d) == build_ec_circuit(d).circuit.num_qubits
        checks.append((f"register triangle d={d}", same))
    verdict(1, checks)


def test_criterion_2_flag_properties(verdict):
    from hstateprep.flagverify import verify_t_flag

    checks = []
    for d in (3, 5, 7):
        reg = build_register(d)
        for g in reg.gadgets:
            for kind in "XZ":
                r = verify_t_flag(gadget_entry(d, g.face, kind), 2)
                checks.append((f"EC{d} face {g.face} {kind} 2-flag", r.ok))
    checks.append(("Hm3 1-flag", verify_t_flag(build_hm_circuit(3), 1).ok))
    checks.append(("Hm5 2-flag", verify_t_flag(build_hm_circuit(5), 2).ok))
    checks.append(("Hm7 2-flag", verify_t_flag(build_hm_circuit(7), 2).ok))
    red = verify_t_flag(build_hm_circuit(5, reduced=True), 2)
    cx = red.counterexample
    checks.append(("reduced Hm5 violated at t=2", red.verdict == "violated"))
    checks.append(("reduced Hm5 counterexample", cx is not None and len(cx.faults) <= 2 and not any(cx.flags)))
    verdict(2, checks)


def test_criterion_3_growth_tables(verdict):
    checks = []
    for key in ("1->5", "3->7"):
        layout = growth_layout(*(int(x) for x in key.split("->")))
        fx = FIXTURES[key]
        n = layout.graph_x.n_qubits
        verts = [sorted(q + 1 for q in v) for v in layout.graph_x.vertices]
        pos = [verts.index(sorted(w)) for w in fx["whites"]]
        for bits, expected in fx["x_outcome_corrections"].items():
            outcomes = [0] * len(verts)
            for i, b in enumerate(bits):
                outcomes[pos[i]] = int(b)
            ok = matching_correction(layout.graph_x, outcomes) == PauliString.parse(expected, n)
            checks.append((f"table {key} {bits}", ok))
    rng = np.random.default_rng(7)
    for a, b in [(1, 3), (1, 5), (1, 7), (3, 7)]:
        lat = build_lattice(b)
        k = len(growth_layout(a, b).whites)
        for basis in "XZ":
            seen, good = set(), True
            for _ in range(16 * 2**k):
                t, nq, mx, mz = _grow_once(a, b, basis, rng)
                seen.add(mx if basis == "X" else mz)
                good &= all(
                    t.expectation(PauliString.from_support(nq, kind, f.qubits)) == 1
                    for f in lat.faces
                    for kind in "XZ"
                )
                good &= t.expectation(PauliString.from_support(nq, basis, lat.boundary_b1)) == 1
                if len(seen) == 2**k:
                    break
            checks.append((f"growth {a}->{b} {basis}: all {2**k} patterns stabilized", good and len(seen) == 2**k))
    verdict(3, checks)


def test_criterion_4_injected_logicals(verdict):
    checks = []
    for d in (3, 5, 7):
        lat = build_lattice(d)
        c = build_hm_circuit(d).circuit
        cc = compile_circuit(c)
        groups = OutcomeGroups.from_circuit(c)
        for which, expected in [("Y", 1.0), ("X", 0.5), ("Z", 0.5)]:
            e = {"X": lat.logical_x, "Z": lat.logical_z, "Y": lat.logical_x * lat.logical_z}[which]
            x, z = frames_from_pauli(e, 100_000, c.num_qubits, cc.data)
            res = run_batch(cc, x, z, rng=np.random.default_rng(100 + d))
            rate = float((groups.verdicts(res.meas) != 0).mean())
            checks.append((f"d={d} {which} abort {rate:.4f}", abs(rate - expected) <= 0.01))
    checks.append(("paired ordering rejects", ordering_regression(5, "paired").accepted_bad < 1e-12))
    checks.append(("unpaired ordering leaks", ordering_regression(5, "unpaired").accepted_bad > 0.1))
    verdict(4, checks)


def test_criterion_5_fault_sweeps(verdict):
    checks = []
    for d in (3, 5):
        rep = fault_sweep(d, 1)
        checks.append((f"exhaustive s=1 d={d} ({rep.fault_sets} sets, {len(rep.violations)} bad)", rep.ok))
    rep = fault_sweep(5, 2, samples=100_000, seed=2024)
    checks.append((f"sampled s=2 d=5 ({rep.fault_sets} sets, {len(rep.violations)} bad)", rep.ok))
    verdict(5, checks)


def test_criterion_6_table1_desk_scale(verdict):
    s = run_campaign(ProtocolSpec(3), 5e-4, 10_000_000, seed=51, workers=WORKERS)
    checks = [
        (f"p_L {s.p_L:.3e} vs 8.51e-05", abs(s.p_L / 8.51e-5 - 1) <= 0.30),
        (f"<n> = 16/{s.p_acc:.4f} rounds to 19", round(16 / s.p_acc) == 19),
    ]
    pts = []
    for i, p in enumerate([2e-4, 4e-4, 6e-4, 1e-3]):
        st = run_campaign(ProtocolSpec(3), p, 4_000_000, seed=60 + i, workers=WORKERS)
        pts.append((p, st.p_L, st.p_L_ci))
    slope, err = fit_slope(pts)
    checks.append((f"slope {slope:.2f} +- {err:.2f}", abs(slope - 2.0) <= 0.3))
    verdict(6, checks)


def test_criterion_7_determinism(verdict):
    spec = ProtocolSpec(3)
    one = run_campaign(spec, 1e-3, 200_000, seed=77, workers=1, block_size=25_000)
    many = run_campaign(spec, 1e-3, 200_000, seed=77, workers=WORKERS, block_size=25_000)
    spec5 = ProtocolSpec(5)
    one5 = run_campaign(spec5, 1e-3, 40_000, seed=78, workers=1, block_size=10_000)
    many5 = run_campaign(spec5, 1e-3, 40_000, seed=78, workers=3, block_size=10_000)
    verdict(7, [("d=3 counters 1 vs N", one.counters() == many.counters()),
                ("d=5 counters 1 vs N", one5.counters() == many5.counters())])
