"""Symplectic Pauli algebra."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hstateprep.pauli import DimensionError, PauliString, commutes, multiply, weight, z_component

N = 12


@st.composite
def paulis(draw, n=N):
    return PauliString(n, draw(st.integers(0, (1 << n) - 1)), draw(st.integers(0, (1 << n) - 1)))


@given(paulis(), paulis())
def test_multiply_commutative(a, b):
    assert multiply(a, b) == multiply(b, a)


@given(paulis(), paulis(), paulis())
def test_multiply_associative(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@given(paulis())
def test_involution(a):
    assert (a * a).is_identity()


@given(paulis(), paulis())
def test_commutes_symmetric(a, b):
    assert commutes(a, b) == commutes(b, a)


@given(paulis(), paulis(), paulis())
def test_symplectic_form_bilinear(a, b, c):
    # anticommutation bits add over GF(2)
    assert (not commutes(a, b * c)) == ((not commutes(a, b)) ^ (not commutes(a, c)))


@given(paulis())
def test_z_component_weight(a):
    assert weight(z_component(a)) <= weight(a)


@given(paulis())
def test_text_round_trip(a):
    assert PauliString.parse(str(a), N) == a


@given(paulis())
def test_array_round_trip(a):
    assert PauliString.from_arrays(*a.to_arrays()) == a


def test_single_qubit_relations():
    x, y, z = (PauliString.single(1, 0, k) for k in "XYZ")
    assert x * z == y
    assert not x.commutes(z) and not y.commutes(x)
    assert x.commutes(x)


def test_text_format():
    p = PauliString.parse("X1 Z3 Y7", 8)
    assert str(p) == "X1 Z3 Y7"
    assert p.weight == 3
    assert str(PauliString.identity(4)) == "I"


def test_size_mismatch():
    with pytest.raises(DimensionError):
        PauliString.identity(3) * PauliString.identity(4)


@pytest.mark.parametrize("text", ["X0", "X9", "X1 Z1", "Q2"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        PauliString.parse(text, 8)


def test_restrict():
    p = PauliString.parse("X2 Z4 Y5", 6)
    assert str(p.restrict([1, 4])) == "X1 Y2"
    assert np.array_equal(p.to_arrays()[0], [0, 1, 0, 0, 1, 0])
