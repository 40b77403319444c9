"""Ideal minimum-weight decoding for classifying residual errors.

The color code is CSS with the same faces supporting X and Z checks, so one
table maps a face syndrome to a minimum-weight binary correction and serves
both error types. Entries are added weight by weight in lexicographic
order of qubit subsets, which fixes the tie-break.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .lattice import CodeLattice, build_lattice
from .pauli import PauliString

DECODER_ID = "exact-min-weight-table/v1"
DEFAULT_CAP = 5


class DecodeFailure(RuntimeError):
    pass


@dataclass
class SyndromeTable:
    lattice: CodeLattice
    cap: int = DEFAULT_CAP
    table: dict[int, int] = field(default_factory=dict)
    max_weight_built: int = -1

    def __post_init__(self) -> None:
        h = self.lattice.face_matrix
        self.columns = [int(sum(int(h[f, q]) << f for f in range(h.shape[0]))) for q in range(self.lattice.n)]
        self.n_faces = h.shape[0]
        self._extend(0)

    def _extend(self, w: int) -> None:
        if w == 0:
            self.table.setdefault(0, 0)
        else:
            cols = self.columns
            for combo in itertools.combinations(range(self.lattice.n), w):
                s = 0
                mask = 0
                for q in combo:
                    s ^= cols[q]
                    mask |= 1 << q
                if s not in self.table:
                    self.table[s] = mask
        self.max_weight_built = w

    def lookup(self, syndrome: int) -> int:
        while syndrome not in self.table:
            if self.max_weight_built >= self.cap or len(self.table) == 1 << self.n_faces:
                raise DecodeFailure(f"syndrome {syndrome:#x} needs weight above the cap {self.cap}")
            self._extend(self.max_weight_built + 1)
        return self.table[syndrome]

    def syndrome_of(self, mask: int) -> int:
        s = 0
        q = 0
        while mask:
            if mask & 1:
                s ^= self.columns[q]
            mask >>= 1
            q += 1
        return s


_TABLES: dict[tuple[int, int], SyndromeTable] = {}


def get_table(d: int, cap: int = DEFAULT_CAP) -> SyndromeTable:
    key = (d, cap)
    if key not in _TABLES:
        _TABLES[key] = SyndromeTable(build_lattice(d), cap)
    return _TABLES[key]


def _split_syndrome(lat: CodeLattice, s) -> tuple[int, int]:
    """(X-type check bits, Z-type check bits) as face-indexed integers."""
    bits = np.asarray(s, dtype=np.uint8).ravel()
    f = len(lat.faces)
    if len(bits) != 2 * f:
        raise ValueError(f"syndrome must have {2 * f} bits, got {len(bits)}")
    sx = int(sum(int(b) << i for i, b in enumerate(bits[:f])))
    sz = int(sum(int(b) << i for i, b in enumerate(bits[f:])))
    return sx, sz


def decode(lat: CodeLattice, s, cap: int = DEFAULT_CAP) -> PauliString:
    """Minimum-weight correction for a syndrome laid out as ``lat.syndrome`` returns it.

    X-type check bits locate Z errors and Z-type check bits locate X errors.
    """
    table = get_table(lat.d, cap)
    sx, sz = _split_syndrome(lat, s)
    return PauliString(lat.n, table.lookup(sz), table.lookup(sx))


CLASSES = ("success", "fail_X", "fail_Y", "fail_Z")


def classify(lat: CodeLattice, residual: PauliString, cap: int = DEFAULT_CAP) -> str:
    c = decode(lat, lat.syndrome(residual), cap)
    cls = lat.logical_class(residual * c)
    assert cls is not None
    return "success" if cls == "I" else f"fail_{cls}"


def classify_batch(lat: CodeLattice, x: np.ndarray, z: np.ndarray, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Class index (into CLASSES) for residual frames given as (n, B) boolean arrays."""
    table = get_table(lat.d, cap)
    h = lat.face_matrix.astype(np.int64)
    weights = (1 << np.arange(h.shape[0], dtype=np.int64))
    sx_int = ((h @ z.astype(np.int64)) % 2).T @ weights  # X checks see Z errors
    sz_int = ((h @ x.astype(np.int64)) % 2).T @ weights
    lx = lat.b1_vector.astype(np.int64)
    out = np.zeros(x.shape[1], dtype=np.int64)
    cache: dict[int, np.ndarray] = {}

    def corr(s: int) -> np.ndarray:
        if s not in cache:
            m = table.lookup(s)
            cache[s] = np.array([(m >> q) & 1 for q in range(lat.n)], dtype=np.int64)
        return cache[s]

    for b in range(x.shape[1]):
        cx = (x[:, b].astype(np.int64) + corr(int(sz_int[b]))) % 2
        cz = (z[:, b].astype(np.int64) + corr(int(sx_int[b]))) % 2
        # logical X part anticommutes with Z on b1, logical Z part with X on b1
        has_x = int(cx @ lx) % 2
        has_z = int(cz @ lx) % 2
        out[b] = {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}[(has_x, has_z)]
    return out


def min_coset_weight(lat: CodeLattice, e: PauliString, limit: int) -> int:
    """Least weight of a Pauli equal to ``e`` up to stabilizers, or limit + 1 if above limit."""
    if e.weight <= limit:
        return e.weight
    syn = lat.syndrome(e)
    for w in range(limit + 1):
        for support in itertools.combinations(range(lat.n), w):
            for letters in itertools.product("XYZ", repeat=w):
                p = PauliString.identity(lat.n)
                for q, a in zip(support, letters):
                    p = p * PauliString.single(lat.n, q, a)
                if np.array_equal(lat.syndrome(p), syn) and lat.logical_class(p * e) == "I":
                    return w
    return limit + 1


class StabilizerReducer:
    """Rewrites data frames to light representatives modulo the stabilizer group.

    X and Z parts are reduced separately: a part is replaced by the
    minimum-weight correction of its syndrome when the two differ by a
    stabilizer, and otherwise by the lighter of itself and correction * logical.
    Only valid where the data carries a code state.
    """

    def __init__(self, lat: CodeLattice, cap: int = DEFAULT_CAP) -> None:
        self.lat = lat
        self.table = get_table(lat.d, cap)
        self.h = lat.face_matrix.astype(np.int64)
        self.w = 1 << np.arange(self.h.shape[0], dtype=np.int64)
        self.b1 = lat.b1_vector.astype(bool)
        self._cache: dict[int, np.ndarray] = {}

    def _corr(self, s: int) -> np.ndarray:
        if s not in self._cache:
            m = self.table.lookup(s)
            self._cache[s] = np.array([(m >> q) & 1 for q in range(self.lat.n)], dtype=bool)
        return self._cache[s]

    def reduce(self, part: np.ndarray) -> np.ndarray:
        """(n, B) bool -> reduced copy."""
        out = part.copy()
        cols = np.flatnonzero(part.any(axis=0))
        if not len(cols):
            return out
        sub = part[:, cols]
        syn = ((self.h @ sub.astype(np.int64)) % 2).T @ self.w
        corr = np.stack([self._corr(int(s)) for s in syn], axis=1)
        logical = ((sub ^ corr) & self.b1[:, None]).sum(axis=0) % 2 == 1
        alt = corr ^ self.b1[:, None]
        lighter = alt.sum(axis=0) < sub.sum(axis=0)
        rep = np.where(logical & ~lighter, sub, np.where(logical, alt, corr))
        out[:, cols] = rep
        return out

    def __call__(self, x: np.ndarray, z: np.ndarray, data: np.ndarray) -> None:
        x[data] = self.reduce(x[data])
        z[data] = self.reduce(z[data])
