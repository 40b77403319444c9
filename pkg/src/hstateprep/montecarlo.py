"""Monte Carlo campaigns, acceptance and failure statistics, power-law fits.

Trials are split into fixed-size blocks. Block k draws from its own stream
``SeedSequence(seed, spawn_key=(k,))``, so counters depend only on the seed
and the trial count, never on how blocks are spread over workers.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .decoder import CLASSES, DECODER_ID
from .protocol import ABORT_REASONS, VERDICTS, ProtocolSpec, run_block

DEFAULT_BLOCK = 50_000
CONFIDENCE = 0.95
FIT_VALIDITY_P = 1e-3


def wilson_interval(k: int, n: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    if n <= 0:
        return (0.0, 1.0)
    z = float(norm.ppf(0.5 + confidence / 2))
    ph = k / n
    denom = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / denom
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return (lo, hi)


@dataclass
class MCStats:
    d: int
    p: float
    trials: int = 0
    accepted: int = 0
    aborts: dict[str, int] = field(default_factory=lambda: {r: 0 for r in ABORT_REASONS})
    failures: dict[str, int] = field(default_factory=lambda: {"X": 0, "Y": 0, "Z": 0})
    seed: int | None = None
    decoder_id: str = DECODER_ID
    wall_clock: float = 0.0
    mode: str = "physical"
    block_size: int = DEFAULT_BLOCK

    @property
    def n_failures(self) -> int:
        return sum(self.failures.values())

    @property
    def p_acc(self) -> float:
        return self.accepted / self.trials if self.trials else float("nan")

    @property
    def p_acc_ci(self) -> tuple[float, float]:
        return wilson_interval(self.accepted, self.trials)

    @property
    def p_L(self) -> float:
        return self.n_failures / self.accepted if self.accepted else float("nan")

    @property
    def p_L_ci(self) -> tuple[float, float]:
        return wilson_interval(self.n_failures, self.accepted)

    @property
    def acceptance_by_stage(self) -> tuple[float, float]:
        """(p_acc,1, p_acc,2); their product is p_acc."""
        s1 = self.trials - self.aborts["stage1_syndrome"] - self.aborts["stage1_logical"]
        a1 = s1 / self.trials if self.trials else float("nan")
        a2 = self.accepted / s1 if s1 else float("nan")
        return a1, a2

    def counters(self) -> tuple[int, ...]:
        return (self.trials, self.accepted, *self.aborts.values(), *self.failures.values())

    def add_counts(self, verdict_counts: np.ndarray, failure_counts: np.ndarray) -> None:
        self.trials += int(verdict_counts.sum())
        self.accepted += int(verdict_counts[0])
        for i, r in enumerate(ABORT_REASONS, start=1):
            self.aborts[r] += int(verdict_counts[i])
        for i, c in enumerate(CLASSES[1:], start=1):
            self.failures[c[-1]] += int(failure_counts[i])

    def check(self) -> None:
        if self.accepted + sum(self.aborts.values()) != self.trials:
            raise AssertionError("accepted + aborts != trials")
        if self.n_failures > self.accepted:
            raise AssertionError("more failures than accepted trials")

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(
            p_acc=self.p_acc, p_acc_ci=list(self.p_acc_ci), p_L=self.p_L,
            p_L_ci=list(self.p_L_ci), confidence=CONFIDENCE, ci_method="wilson",
        )
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "MCStats":
        keys = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in obj.items() if k in keys})


def _block_counts(spec: ProtocolSpec, p: float, seed: int, block: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    res = run_block(spec, p, size, rng)
    v = np.bincount(res.verdict, minlength=len(VERDICTS))
    f = np.bincount(res.failure[res.failure >= 0], minlength=len(CLASSES))
    return v, f


def _block_sizes(trials: int, block_size: int) -> list[int]:
    full, rest = divmod(trials, block_size)
    return [block_size] * full + ([rest] if rest else [])


def run_campaign(
    spec: ProtocolSpec,
    p: float,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK,
    checkpoint: str | Path | None = None,
) -> MCStats:
    """Run ``trials`` protocol trials at physical rate p.

    With ``checkpoint`` the per-block counters are saved after each block
    and finished blocks are skipped on a rerun with the same arguments.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    t0 = time.perf_counter()
    sizes = _block_sizes(trials, block_size)
    done: dict[int, tuple[list[int], list[int]]] = {}
    ck = Path(checkpoint) if checkpoint else None
    key = {"d": spec.d, "mode": spec.mode, "p": p, "trials": trials, "seed": seed, "block_size": block_size}
    if ck and ck.exists():
        saved = json.loads(ck.read_text())
        if saved.get("key") == key:
            done = {int(k): tuple(v) for k, v in saved["blocks"].items()}

    def save() -> None:
        if ck:
            ck.write_text(json.dumps({"key": key, "blocks": {str(k): v for k, v in done.items()}}))

    todo = [b for b in range(len(sizes)) if b not in done]
    if workers <= 1:
        for b in todo:
            v, f = _block_counts(spec, p, seed, b, sizes[b])
            done[b] = (v.tolist(), f.tolist())
            save()
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = {b: pool.submit(_block_counts, spec, p, seed, b, sizes[b]) for b in todo}
            for b, fut in futs.items():
                v, f = fut.result()
                done[b] = (v.tolist(), f.tolist())
                save()

    stats = MCStats(spec.d, p, seed=seed, mode=spec.mode, block_size=block_size)
    for b in sorted(done):
        v, f = done[b]
        stats.add_counts(np.asarray(v), np.asarray(f))
    stats.wall_clock = time.perf_counter() - t0
    stats.check()
    return stats


# power-law fits -------------------------------------------------------------


@dataclass
class PowerLawFit:
    d: int
    alpha: float
    exponent: float
    residuals: list[float]
    points: list[tuple[float, float, tuple[float, float] | None]]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _log_sigma(p_l: float, ci) -> float | None:
    if ci is None:
        return None
    lo, hi = ci
    if lo <= 0 or hi <= lo:
        return None
    return (math.log(hi) - math.log(lo)) / (2 * float(norm.ppf(0.5 + CONFIDENCE / 2)))


def _weights(points) -> np.ndarray:
    sig = [_log_sigma(pl, ci) for _, pl, ci in points]
    if all(s is None for s in sig):
        return np.ones(len(points))
    fallback = max(s for s in sig if s is not None)
    return np.array([1 / (s if s is not None else fallback) ** 2 for s in sig])


def fit_alpha(points: Sequence[tuple[float, float, tuple[float, float] | None]], d: int) -> PowerLawFit:
    """Weighted least squares for log p_L = log alpha + ((d+1)/2) log p."""
    pts = [(float(p), float(pl), tuple(ci) if ci is not None else None) for p, pl, ci in points]
    if not pts:
        raise ValueError("need at least one point")
    if any(pl <= 0 or p <= 0 for p, pl, _ in pts):
        raise ValueError("p and p_L must be positive for a log-space fit")
    k = (d + 1) / 2
    y = np.array([math.log(pl) - k * math.log(p) for p, pl, _ in pts])
    w = _weights(pts)
    log_a = float((w * y).sum() / w.sum())
    notes = []
    if any(p > FIT_VALIDITY_P for p, _, _ in pts):
        notes.append(f"points above p = {FIT_VALIDITY_P:g}: higher-order terms may bias alpha")
        warnings.warn(notes[-1], stacklevel=2)
    return PowerLawFit(d, math.exp(log_a), k, (y - log_a).tolist(), pts, notes)


def extrapolate(fit: PowerLawFit, p: float) -> float:
    return fit.alpha * p**fit.exponent


def fit_slope(points: Sequence[tuple[float, float, tuple[float, float] | None]]) -> tuple[float, float]:
    """Free-exponent weighted fit of log p_L against log p: (slope, standard error)."""
    pts = [(float(p), float(pl), ci) for p, pl, ci in points]
    if len(pts) < 2:
        raise ValueError("a slope needs at least two points")
    lx = np.log([p for p, _, _ in pts])
    ly = np.log([pl for _, pl, _ in pts])
    w = _weights(pts)
    a = np.column_stack([lx, np.ones_like(lx)])
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(a * sw[:, None], ly * sw, rcond=None)
    cov = np.linalg.inv(a.T @ (a * w[:, None]))
    return float(coef[0]), float(math.sqrt(cov[0, 0]))
