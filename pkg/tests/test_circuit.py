"""Circuit IR: validation, locations, text format."""

import pytest
from hypothesis import given, settings, strategies as st

from hstateprep.catalog import build_ec_circuit, build_grow_circuit, build_hm_circuit, ec_rounds
from hstateprep.circuit import Circuit, CircuitBuilder, CircuitError, Gate, concatenate


def _bell() -> Circuit:
    b = CircuitBuilder(["data", "ancilla"], "bell")
    b.step([Gate("prep_plus", (1,))])
    b.step([Gate("cnot", (1, 0))])
    b.step([Gate("measure_x", (1,))])
    return b.build()


def test_empty():
    c = Circuit(2, ("data", "data"))
    assert c.depth == 0 and c.locations() == []


def test_locations_include_idles():
    c = _bell()
    kinds = [(l.step, l.kind) for l in c.locations()]
    assert kinds == [(0, "prep_plus"), (0, "idle"), (1, "cnot"), (2, "measure_x"), (2, "idle")]


def test_location_enumeration_stable():
    c = build_hm_circuit(3).circuit
    fresh = Circuit.from_text(c.to_text())
    assert c.locations() == fresh.locations()


@pytest.mark.parametrize(
    "steps",
    [
        [[Gate("cnot", (0, 1)), Gate("hadamard", (1,))]],  # qubit reused in a step
        [[Gate("measure_z", (1,))]],  # never prepared
        [[Gate("prep_zero", (1,))]],  # ancilla left live
    ],
)
def test_invalid(steps):
    with pytest.raises(CircuitError):
        Circuit(2, ("data", "ancilla"), tuple(tuple(s) for s in steps))


def test_gate_arity():
    with pytest.raises(CircuitError):
        Gate("cnot", (1,))
    with pytest.raises(CircuitError):
        Gate("cz", (2, 2))


@pytest.mark.parametrize("make", [lambda: build_ec_circuit(5), lambda: build_hm_circuit(5), lambda: build_grow_circuit(1, 3)[0]])
def test_text_round_trip(make):
    c = make().circuit
    back = Circuit.from_text(c.to_text())
    assert back == c


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4))
def test_depth_additive(a, b):
    x = concatenate(*([_bell()] * a))
    y = concatenate(*([_bell()] * b))
    assert concatenate(x, y).depth == x.depth + y.depth


def test_concatenate_prefixes_tags():
    c = build_ec_circuit(3).circuit
    both = concatenate(c, c, prefix_tags=True)
    tags = both.measurement_index()
    assert all(t.split("/")[0] in ("0", "1") for t in tags)
    assert len(both.measurements()) == 2 * len(c.measurements())


def test_ec_round_depth():
    # one X-type round at d = 5; a figure elsewhere draws it in nine steps
    x_round, z_round = ec_rounds(5)
    assert x_round.depth == z_round.depth <= 9
