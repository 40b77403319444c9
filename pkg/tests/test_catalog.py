"""Catalog circuits: registers, depths, growth corrections and noiseless growth."""

import itertools
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hstateprep.catalog import (
    UnsupportedDistance, build_ec_circuit, build_grow_circuit, build_hm_circuit, build_register,
    catalog_entries, growth_layout, matching_correction,
)
from hstateprep.decoder import decode
from hstateprep.lattice import build_lattice
from hstateprep.overhead import min_qubits, n_anc, n_data
from hstateprep.pauli import PauliString
from hstateprep.tableau import Tableau, run_circuit

FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "growth_corrections.json").read_text())


@pytest.mark.parametrize("d,ghz", [(3, 6), (5, 21), (7, 45)])
def test_register_counts(d, ghz):
    reg = build_register(d)
    assert reg.num_qubits == min_qubits(d) == n_data(d) + n_anc(d)
    assert len(reg.flag_qubits) == ghz  # EC flags are the H_m GHZ qubits
    for g in reg.gadgets:
        w = reg.lattice.faces[g.face].weight
        assert (len(g.syn), len(g.flags)) == ((1, 2) if w == 4 else (3, 3))


@pytest.mark.parametrize("d,t_g,t_hm,t_ec", [(3, 14, 8, 14), (5, 16, 11, 16), (7, 18, 12, 18)])
def test_depths(d, t_g, t_hm, t_ec):
    assert build_grow_circuit(1, d)[0].circuit.depth == t_g
    assert build_hm_circuit(d).circuit.depth == t_hm
    assert build_ec_circuit(d).circuit.depth == t_ec


@pytest.mark.parametrize("d", [3, 5, 7])
def test_hm_flag_counts(d):
    e = build_hm_circuit(d)
    lat = build_lattice(d)
    assert len(e.flag_qubits) == lat.n_w4 + 3 * lat.n_w6
    assert e.claimed_t == (d - 1) // 2
    assert len(build_hm_circuit(d, reduced=True).flag_qubits) == len(lat.faces)


def test_unsupported():
    with pytest.raises(UnsupportedDistance):
        build_ec_circuit(9)
    with pytest.raises(UnsupportedDistance):
        growth_layout(3, 3)


def test_catalog_entries():
    assert set(catalog_entries(3)) == {"EC3", "Hm3", "G1->3"}


# growth corrections ----------------------------------------------------------


def _graph_for(key):
    a, b = (int(x) for x in key.split("->"))
    return growth_layout(a, b)


@pytest.mark.parametrize("key", ["1->5", "3->7"])
def test_layout_matches_fixture(key):
    layout = _graph_for(key)
    fx = FIXTURES[key]
    verts = [sorted(q + 1 for q in v) for v in layout.graph_x.vertices]
    assert sorted(map(sorted, fx["whites"])) == sorted(verts)
    assert sorted(map(sorted, fx["pairs"])) == sorted(sorted(q + 1 for q in p) for p in layout.pairs)


@pytest.mark.parametrize("key", ["1->5", "3->7"])
def test_correction_tables(key):
    layout = _graph_for(key)
    fx = FIXTURES[key]
    n = layout.graph_x.n_qubits
    # fixture bit i refers to fixture white i; map it onto the graph's vertex order
    verts = [sorted(q + 1 for q in v) for v in layout.graph_x.vertices]
    pos = [verts.index(sorted(w)) for w in fx["whites"]]
    for bits, expected in fx["x_outcome_corrections"].items():
        outcomes = [0] * len(verts)
        for i, b in enumerate(bits):
            outcomes[pos[i]] = int(b)
        assert matching_correction(layout.graph_x, outcomes) == PauliString.parse(expected, n)
        # the Z-outcome graph returns the X-type mirror image
        mirror = PauliString.parse(expected.replace("Z", "X"), n)
        assert matching_correction(layout.graph_z, outcomes) == mirror


@settings(max_examples=40)
@given(st.sampled_from([(1, 3), (1, 5), (1, 7), (3, 7), (5, 7)]), st.data())
def test_correction_flips_only_highlighted(growth, data):
    layout = growth_layout(*growth)
    g = layout.graph_x
    bits = data.draw(st.lists(st.integers(0, 1), min_size=len(g.vertices), max_size=len(g.vertices)))
    corr = matching_correction(g, bits)
    lat = build_lattice(growth[1])
    for i, v in enumerate(g.vertices):
        x_check = PauliString.from_support(lat.n, "X", v)
        assert corr.commutes(x_check) == (bits[i] == 0)
    whites = set(layout.whites)
    for i, f in enumerate(lat.faces):
        if i not in whites:
            assert corr.commutes(lat.x_stabilizers[i])


def test_correction_is_minimal_weight():
    g = growth_layout(1, 7).graph_x
    for bits in itertools.product((0, 1), repeat=len(g.vertices)):
        w = matching_correction(g, bits).weight
        assert w <= 2 * len(g.edges) and w % 2 == 0


def test_correction_rejects_wrong_length():
    with pytest.raises(ValueError):
        matching_correction(growth_layout(1, 5).graph_x, [0])


# noiseless growth --------------------------------------------------------------


def _prepare_code_state(t: Tableau, d: int, basis: str, ancilla: int) -> None:
    """Project the first n qubits of ``t`` onto the d code space, logical |0> or |+>."""
    lat = build_lattice(d)
    nq = t.n
    if basis == "X":
        for q in range(lat.n):
            t.h(q)
    check = "Z" if basis == "X" else "X"
    for f in lat.faces:
        if check == "X":
            t.reset_x(ancilla)
            for q in f.qubits:
                t.cnot(ancilla, q)
            m = t.measure_x(ancilla)
        else:
            t.reset_z(ancilla)
            for q in f.qubits:
                t.cnot(q, ancilla)
            m = t.measure_z(ancilla)
        if m:
            syn = np.zeros(2 * len(lat.faces), dtype=np.uint8)
            syn[(0 if check == "X" else len(lat.faces)) + lat.faces.index(f)] = 1
            c = decode(lat, syn)
            t.pauli(PauliString(nq, c.x_mask, c.z_mask))
    t.reset_z(ancilla)


def _grow_once(a, b, basis, rng):
    entry, gx, gz = build_grow_circuit(a, b)
    c = entry.circuit
    if a == 1:
        t, outs = run_circuit(c, rng, prep_h_as="prep_plus" if basis == "X" else "prep_zero")
    else:
        t = Tableau(c.num_qubits, rng)
        _prepare_code_state(t, a, basis, c.num_qubits - 1)
        t, outs = run_circuit(c, rng, tableau=t)
    layout = growth_layout(a, b)
    mi = c.measurement_index()
    mx = [sum(outs[i] for i in mi[f"white0:{w}:X"]) % 2 for w in layout.whites]
    mz = [sum(outs[i] for i in mi[f"white0:{w}:Z"]) % 2 for w in layout.whites]
    t.pauli(PauliString(c.num_qubits, 0, matching_correction(gx, mx).z_mask))
    t.pauli(PauliString(c.num_qubits, matching_correction(gz, mz).x_mask, 0))
    return t, c.num_qubits, tuple(mx), tuple(mz)


@pytest.mark.parametrize("growth", [(1, 3), (1, 5), (1, 7), (3, 7)])
@pytest.mark.parametrize("basis", ["X", "Z"])
def test_noiseless_growth(growth, basis):
    a, b = growth
    lat = build_lattice(b)
    rng = np.random.default_rng(2024)
    k = len(growth_layout(a, b).whites)
    seen_x, seen_z = set(), set()
    for _ in range(12 * 2**k):
        t, nq, mx, mz = _grow_once(a, b, basis, rng)
        seen_x.add(mx)
        seen_z.add(mz)
        for f in lat.faces:
            for kind in "XZ":
                assert t.expectation(PauliString.from_support(nq, kind, f.qubits)) == 1
        assert t.expectation(PauliString.from_support(nq, basis, lat.boundary_b1)) == 1
        if len(seen_x) == len(seen_z) == 2**k:
            break
    # the random outcomes of the white checks must have covered every pattern
    assert len(seen_x) == 2**k or basis == "Z"
    assert len(seen_z) == 2**k or basis == "X"
