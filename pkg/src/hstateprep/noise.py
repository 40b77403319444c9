"""Circuit-level depolarizing noise and the logical-level noise used in encoded mode.

Single-qubit Paulis are coded as 2-bit integers: bit 0 = X part, bit 1 = Z
part (1 = X, 2 = Z, 3 = Y). A two-qubit Pauli on (a, b) is ``pa + 4 * pb``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

X, Z, Y = 1, 2, 3
SINGLE_PAULIS = (X, Y, Z)
TWO_PAULIS = tuple(range(1, 16))
FLIP = -1  # outcome-flip token for measurement faults

# fault support per noise kind; probabilities are attached by NoiseModel
SUPPORT: dict[str, tuple[int, ...]] = {
    "single": SINGLE_PAULIS,
    "idle": SINGLE_PAULIS,
    "prep_h": SINGLE_PAULIS,
    "two": TWO_PAULIS,
    "prep_zero": (X,),
    "prep_plus": (Z,),
    "measure": (FLIP,),
}


class UnknownLocationKind(KeyError):
    pass


@dataclass(frozen=True)
class Fault:
    """A Pauli insertion (codes per qubit of the location) or an outcome flip."""

    paulis: tuple[int, ...] = ()
    flip: bool = False


def split_two(code: int) -> tuple[int, int]:
    return code & 3, code >> 2


@dataclass(frozen=True)
class NoiseModel:
    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    def rate(self, kind: str) -> float:
        """Total fault probability at a location of the given noise kind."""
        if kind in ("single", "idle", "prep_h", "two"):
            return self.p
        if kind in ("prep_zero", "prep_plus", "measure"):
            return 2.0 * self.p / 3.0
        raise UnknownLocationKind(kind)

    def location_rate(self, kind: str, magic: bool = False) -> float:
        return self.rate(kind)

    def sample_codes(self, kind: str, magic: bool, k: int, rng: np.random.Generator) -> np.ndarray:
        support = np.asarray(SUPPORT[kind])
        return support[rng.integers(0, len(support), size=k)]

    def distribution(self, kind: str) -> dict[int, float]:
        """Probability of each non-trivial fault code (FLIP for measurements)."""
        support = SUPPORT.get(kind)
        if support is None:
            raise UnknownLocationKind(kind)
        r = self.rate(kind)
        return {s: r / len(support) for s in support}


def sample_fault(kind: str, p: float, rng: np.random.Generator) -> Fault | None:
    nm = NoiseModel(p)
    support = SUPPORT.get(kind)
    if support is None:
        raise UnknownLocationKind(kind)
    if rng.random() >= nm.rate(kind):
        return None
    code = support[int(rng.integers(len(support)))]
    if code == FLIP:
        return Fault(flip=True)
    if kind == "two":
        return Fault(paulis=split_two(code))
    return Fault(paulis=(code,))


def eval_poly(coeffs: Sequence[float], p: float) -> float:
    """sum_k coeffs[k] * p**k."""
    return float(sum(c * p**k for k, c in enumerate(coeffs)))


@dataclass(frozen=True)
class LogicalNoiseModel:
    """Logical fault rates for encoded-Clifford mode.

    ``p_lc`` and ``p_inject`` are polynomial coefficient lists in the
    physical error rate ``p`` (constant term first). The default class
    split of injected-state errors is uniform over X, Y, Z.
    """

    p_lc: tuple[float, ...]
    p_inject: tuple[float, ...]
    class_weights: tuple[float, float, float] = field(default=(1 / 3, 1 / 3, 1 / 3))

    def lc_rate(self, p: float) -> float:
        r = eval_poly(self.p_lc, p)
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"p_LC({p}) = {r} is not a probability")
        return r

    def inject_rate(self, p: float) -> float:
        r = eval_poly(self.p_inject, p)
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"p_inject({p}) = {r} is not a probability")
        return r


@dataclass(frozen=True)
class EncodedNoise:
    """Logical-level fault injection for the encoded protocol.

    Clifford, preparation and measurement locations fail at p_LC(p).
    Magic locations (T, T-dagger, |H> preparation) consume an injected state
    and fail at p_inject(p) with the model's X/Y/Z class weights.
    ``t_only`` switches off every non-magic fault.
    """

    p: float
    model: LogicalNoiseModel
    t_only: bool = False

    def location_rate(self, kind: str, magic: bool = False) -> float:
        if magic:
            return self.model.inject_rate(self.p)
        if kind not in SUPPORT:
            raise UnknownLocationKind(kind)
        return 0.0 if self.t_only else self.model.lc_rate(self.p)

    def sample_codes(self, kind: str, magic: bool, k: int, rng: np.random.Generator) -> np.ndarray:
        if magic:
            w = np.asarray(self.model.class_weights, dtype=float)
            return np.asarray((X, Y, Z))[rng.choice(3, size=k, p=w / w.sum())]
        support = np.asarray(SUPPORT[kind])
        return support[rng.integers(0, len(support), size=k)]
