"""Triangular 6.6.6 color-code lattices.

Geometry: sites (r, c) with 0 <= c <= r <= 3(d-1)/2 of a triangular grid.
Sites with (r + c) % 3 == 1 are face centres; every other site is a data
qubit. A face contains the qubit sites among its six grid neighbours, so
interior faces have weight 6 and faces on the boundary weight 4.

Qubits are numbered row-major from the top corner (r = 0), left to right.
Internally indices are 0-based; the text format and all figures are
1-based. With this numbering the boundary b1 is the c = 0 side, which
runs from the top corner (qubit 1) down to the bottom-left corner. For
d = 5 it is {1, 3, 5, 11, 15}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Literal

import numpy as np

from .pauli import DimensionError, PauliString

COLORS = ("red", "green", "blue")
LogicalClass = Literal["I", "X", "Y", "Z"]


class InvalidDistanceError(ValueError):
    pass


@dataclass(frozen=True)
class Face:
    color: str
    qubits: tuple[int, ...]  # 0-indexed, sorted
    site: tuple[int, int]

    @property
    def weight(self) -> int:
        return len(self.qubits)


_NEIGHBOURS = ((0, -1), (0, 1), (-1, 0), (1, 0), (-1, -1), (1, 1))


@dataclass(frozen=True, eq=False)
class CodeLattice:
    d: int
    n: int
    faces: tuple[Face, ...]
    qubit_sites: tuple[tuple[int, int], ...]
    boundary_b1: tuple[int, ...] = field(repr=False)

    # stabilizers -----------------------------------------------------------

    @cached_property
    def x_stabilizers(self) -> list[PauliString]:
        return [PauliString.from_support(self.n, "X", f.qubits) for f in self.faces]

    @cached_property
    def z_stabilizers(self) -> list[PauliString]:
        return [PauliString.from_support(self.n, "Z", f.qubits) for f in self.faces]

    @cached_property
    def logical_x(self) -> PauliString:
        return PauliString.from_support(self.n, "X", self.boundary_b1)

    @cached_property
    def logical_z(self) -> PauliString:
        return PauliString.from_support(self.n, "Z", self.boundary_b1)

    @cached_property
    def face_matrix(self) -> np.ndarray:
        """Face-qubit incidence matrix, shape (#faces, n), dtype uint8."""
        h = np.zeros((len(self.faces), self.n), dtype=np.uint8)
        for i, f in enumerate(self.faces):
            h[i, list(f.qubits)] = 1
        return h

    @cached_property
    def b1_vector(self) -> np.ndarray:
        v = np.zeros(self.n, dtype=np.uint8)
        v[list(self.boundary_b1)] = 1
        return v

    @property
    def qubit_coords(self) -> list[tuple[float, float]]:
        return [(c - r / 2.0, -r * math.sqrt(3) / 2.0) for r, c in self.qubit_sites]

    @property
    def n_w4(self) -> int:
        return sum(1 for f in self.faces if f.weight == 4)

    @property
    def n_w6(self) -> int:
        return sum(1 for f in self.faces if f.weight == 6)

    def faces_of_qubit(self, q: int) -> list[int]:
        return [i for i, f in enumerate(self.faces) if q in f.qubits]

    # syndromes and classes --------------------------------------------------

    def syndrome(self, e: PauliString) -> np.ndarray:
        """Bits for the X-type generators (detect Z/Y) followed by the Z-type ones."""
        if e.n != self.n:
            raise DimensionError(f"error acts on {e.n} qubits, lattice has {self.n}")
        x, z = e.to_arrays()
        h = self.face_matrix
        return np.concatenate([(h @ z) % 2, (h @ x) % 2]).astype(np.uint8)

    def logical_class(self, e: PauliString) -> LogicalClass | None:
        """I/X/Y/Z for elements of the normalizer, ``None`` otherwise."""
        if self.syndrome(e).any():
            return None
        anti_z = not e.commutes(self.logical_z)
        anti_x = not e.commutes(self.logical_x)
        return {(False, False): "I", (True, False): "X", (False, True): "Z", (True, True): "Y"}[
            (anti_z, anti_x)
        ]

    def stabilizer_rank(self) -> int:
        h = self.face_matrix
        z = np.zeros_like(h)
        return gf2_rank(np.block([[h, z], [z, h]]))

    def to_json(self) -> str:
        return json.dumps(
            {
                "d": self.d,
                "n": self.n,
                "numbering": "row-major from the top corner, 1-indexed",
                "faces": [
                    {"color": f.color, "qubits": [q + 1 for q in f.qubits]} for f in self.faces
                ],
                "logical_x": str(self.logical_x),
                "logical_z": str(self.logical_z),
                "qubit_coords": [list(c) for c in self.qubit_coords],
            },
            indent=2,
        )


def gf2_rank(m: np.ndarray) -> int:
    a = (np.asarray(m) % 2).astype(np.uint8).copy()
    rank, rows, cols = 0, a.shape[0], a.shape[1]
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, col]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, col]:
                a[r] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


@lru_cache(maxsize=None)
def build_lattice(d: int) -> CodeLattice:
    if not isinstance(d, int) or d < 3 or d % 2 == 0:
        raise InvalidDistanceError(f"distance must be an odd integer >= 3, got {d!r}")
    top = 3 * (d - 1) // 2
    sites = [(r, c) for r in range(top + 1) for c in range(r + 1)]
    is_face = {s: (s[0] + s[1]) % 3 == 1 for s in sites}
    qubit_sites = [s for s in sites if not is_face[s]]
    index = {s: i for i, s in enumerate(qubit_sites)}
    faces = []
    for s in sites:
        if not is_face[s]:
            continue
        r, c = s
        qs = sorted(index[(r + dr, c + dc)] for dr, dc in _NEIGHBOURS if (r + dr, c + dc) in index)
        faces.append(Face(COLORS[c % 3], tuple(qs), s))
    b1 = tuple(index[(r, 0)] for r in range(top + 1) if (r, 0) in index)
    return CodeLattice(d, len(qubit_sites), tuple(faces), tuple(qubit_sites), b1)
