"""Phase-free n-qubit Pauli operators in the symplectic (x|z) representation.

Supports are stored as Python integers used as bitsets: bit ``i`` of
``x_mask`` set means the operator has an X component on qubit ``i``
(0-indexed internally). The text format is 1-indexed, e.g. ``"X1 Z3 Y7"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


class DimensionError(ValueError):
    """Raised when two Pauli operators act on different numbers of qubits."""


_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


@dataclass(frozen=True, slots=True)
class PauliString:
    n: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        full = (1 << self.n) - 1
        if self.x_mask & ~full or self.z_mask & ~full or self.x_mask < 0 or self.z_mask < 0:
            raise ValueError("mask has bits outside the qubit range")

    # construction -----------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_support(cls, n: int, kind: str, qubits: Iterable[int]) -> "PauliString":
        """Uniform Pauli ``kind`` on 0-indexed ``qubits``."""
        mask = 0
        for q in qubits:
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for n={n}")
            mask |= 1 << q
        kind = kind.upper()
        if kind == "X":
            return cls(n, mask, 0)
        if kind == "Z":
            return cls(n, 0, mask)
        if kind == "Y":
            return cls(n, mask, mask)
        if kind == "I":
            return cls(n)
        raise ValueError(f"unknown Pauli kind {kind!r}")

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliString":
        return cls.from_support(n, kind, [qubit])

    @classmethod
    def from_arrays(cls, x: np.ndarray, z: np.ndarray) -> "PauliString":
        x = np.asarray(x, dtype=bool)
        z = np.asarray(z, dtype=bool)
        if x.shape != z.shape or x.ndim != 1:
            raise DimensionError("x and z must be 1-D arrays of equal length")
        return cls(len(x), _bits_to_int(x), _bits_to_int(z))

    @classmethod
    def parse(cls, text: str, n: int) -> "PauliString":
        """Parse ``"X1 Z3 Y7"`` (1-indexed) or ``"I"``."""
        x = z = 0
        text = text.strip()
        if text in ("", "I"):
            return cls(n)
        for tok in text.replace(",", " ").split():
            letter, idx = tok[0].upper(), int(tok[1:]) - 1
            if not 0 <= idx < n:
                raise ValueError(f"qubit index in {tok!r} out of range for n={n}")
            bit = 1 << idx
            if (x | z) & bit:
                raise ValueError(f"qubit {idx + 1} listed twice")
            if letter in "XY":
                x |= bit
            if letter in "ZY":
                z |= bit
            if letter not in "XYZ":
                raise ValueError(f"bad token {tok!r}")
        return cls(n, x, z)

    # algebra ----------------------------------------------------------------

    def _check(self, other: "PauliString") -> None:
        if self.n != other.n:
            raise DimensionError(f"size mismatch: {self.n} vs {other.n}")

    def __mul__(self, other: "PauliString") -> "PauliString":
        self._check(other)
        return PauliString(self.n, self.x_mask ^ other.x_mask, self.z_mask ^ other.z_mask)

    def commutes(self, other: "PauliString") -> bool:
        self._check(other)
        s = (self.x_mask & other.z_mask).bit_count() + (self.z_mask & other.x_mask).bit_count()
        return s % 2 == 0

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def z_component(self) -> "PauliString":
        return PauliString(self.n, 0, self.z_mask)

    def x_component(self) -> "PauliString":
        return PauliString(self.n, self.x_mask, 0)

    def restrict(self, qubits: Iterable[int]) -> "PauliString":
        """Project onto ``qubits`` (0-indexed) and renumber them 0..k-1."""
        qubits = list(qubits)
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x_mask >> q) & 1) << j
            z |= ((self.z_mask >> q) & 1) << j
        return PauliString(len(qubits), x, z)

    def letter(self, q: int) -> str:
        return _LETTER[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return _int_to_bits(self.x_mask, self.n), _int_to_bits(self.z_mask, self.n)

    def __str__(self) -> str:
        toks = [f"{self.letter(q)}{q + 1}" for q in range(self.n) if (self.support >> q) & 1]
        return " ".join(toks) if toks else "I"

    def __repr__(self) -> str:
        return f"PauliString(n={self.n}, '{self}')"


def multiply(a: PauliString, b: PauliString) -> PauliString:
    return a * b


def commutes(a: PauliString, b: PauliString) -> bool:
    return a.commutes(b)


def weight(a: PauliString) -> int:
    return a.weight


def z_component(a: PauliString) -> PauliString:
    return a.z_component()


def _bits_to_int(bits: np.ndarray) -> int:
    out = 0
    for i in np.flatnonzero(bits):
        out |= 1 << int(i)
    return out


def _int_to_bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
