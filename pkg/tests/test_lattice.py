"""Color-code geometry, syndromes and logical classes."""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hstateprep.lattice import InvalidDistanceError, build_lattice, gf2_rank
from hstateprep.pauli import PauliString


def _kernel_basis(h: np.ndarray) -> np.ndarray:
    """Basis of {v : h v = 0} over GF(2), rows are basis vectors."""
    a = h.copy() % 2
    rows, cols = a.shape
    pivots, r = [], 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i, c]), None)
        if p is None:
            continue
        a[[r, p]] = a[[p, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = a[i, f]
        basis.append(v)
    return np.array(basis)


@pytest.mark.parametrize("d,n,w4,w6", [(3, 7, 3, 0), (5, 19, 6, 3), (7, 37, 9, 9)])
def test_counts(d, n, w4, w6):
    lat = build_lattice(d)
    assert lat.n == n == (3 * d * d + 1) // 4
    assert (lat.n_w4, lat.n_w6) == (w4, w6)
    assert lat.stabilizer_rank() == lat.n - 1


@pytest.mark.parametrize("d", [3, 5, 7])
def test_distance_exhaustive(d):
    # every codeword of ker(H) with odd overlap on b1 is an X-type logical
    lat = build_lattice(d)
    basis = _kernel_basis(lat.face_matrix.astype(np.uint8))
    k = len(basis)
    masks = np.array([int("".join(map(str, v[::-1])), 2) for v in basis], dtype=np.int64)
    words = np.zeros(1, dtype=np.int64)
    for m in masks:
        words = np.concatenate([words, words ^ m])
    assert len(words) == 1 << k
    b1 = int("".join(map(str, lat.b1_vector[::-1])), 2)
    odd = np.bitwise_count(words & b1) % 2 == 1
    assert int(np.bitwise_count(words[odd]).min()) == d


@pytest.mark.parametrize("d", [3, 5, 7])
def test_logicals(d):
    lat = build_lattice(d)
    assert lat.logical_x.weight == d
    assert not lat.logical_x.commutes(lat.logical_z)
    assert lat.logical_class(lat.logical_x) == "X"
    assert lat.logical_class(lat.logical_x * lat.logical_z) == "Y"
    assert all(s.commutes(t) for s in lat.x_stabilizers for t in lat.z_stabilizers)


def test_b1_numbering():
    assert [q + 1 for q in build_lattice(5).boundary_b1] == [1, 3, 5, 11, 15]


@st.composite
def errors(draw, d):
    n = build_lattice(d).n
    return PauliString(n, draw(st.integers(0, (1 << n) - 1)), draw(st.integers(0, (1 << n) - 1)))


@given(errors(5), errors(5))
def test_syndrome_linear(a, b):
    lat = build_lattice(5)
    assert np.array_equal(lat.syndrome(a * b), lat.syndrome(a) ^ lat.syndrome(b))


@settings(max_examples=50)
@given(st.integers(0, 3), st.lists(st.integers(0, 17), max_size=6), st.booleans())
def test_logical_class_constant_on_cosets(which, gens, z_type):
    lat = build_lattice(5)
    e = [PauliString.identity(19), lat.logical_x, lat.logical_z, lat.logical_x * lat.logical_z][which]
    cls = lat.logical_class(e)
    pool = lat.z_stabilizers if z_type else lat.x_stabilizers
    for g in gens:
        e = e * pool[g % len(pool)]
    assert lat.logical_class(e) == cls


@pytest.mark.parametrize("d", [1, 2, 4, 0])
def test_bad_distance(d):
    with pytest.raises(InvalidDistanceError):
        build_lattice(d)


def test_json_dump():
    obj = json.loads(build_lattice(3).to_json())
    assert obj["n"] == 7 and len(obj["faces"]) == 3
    assert obj["logical_x"] == "X1 X3 X5"


def test_gf2_rank():
    assert gf2_rank(np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])) == 2
