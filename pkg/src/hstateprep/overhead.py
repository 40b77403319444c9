"""Closed-form qubit counts and space-time costs, physical and encoded.

Depth inputs default to the scheduled depths of the catalog circuits.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from scipy.stats import binom

EC_ROUND_STEPS_ENCODED = 16  # one encoded EC round when d2 > 3
GROW_STEPS = 14  # time allotted to G^(1->d)
DEFAULT_MDF_CAP = 2000


class OverheadError(ValueError):
    pass


def _check_odd(d: int, name: str = "d") -> None:
    if d < 3 or d % 2 == 0:
        raise OverheadError(f"{name} must be an odd distance >= 3, got {d}")


# qubit counts ----------------------------------------------------------------


def n_data(d: int) -> int:
    return (3 * d * d + 1) // 4


def n_w4(d: int) -> int:
    return 3 * (d - 1) // 2


def n_w6(d: int) -> int:
    return (3 * d * d - 12 * d + 9) // 8


def n_anc(d: int) -> int:
    return 6 * n_w6(d) + 3 * n_w4(d)


def min_qubits(d: int) -> int:
    _check_odd(d)
    return (6 * d * d - 9 * d + 5) // 2


def measured_depths(d: int) -> tuple[int, int]:
    """(t_Hm, t_EC) from the scheduled catalog circuits."""
    from .catalog import build_ec_circuit, build_hm_circuit

    return build_hm_circuit(d).circuit.depth, build_ec_circuit(d).circuit.depth


@dataclass(frozen=True)
class PhysicalOverhead:
    d: int
    p_acc: float
    t_hm: int
    t_ec: int
    avg_qubits: float
    min_qubits: int
    spacetime: float


def physical_overhead(d: int, p_acc: float, t_hm: int | None = None, t_ec: int | None = None) -> PhysicalOverhead:
    _check_odd(d)
    if p_acc == 0:
        raise OverheadError("the average qubit count is undefined at zero acceptance")
    if not 0 < p_acc <= 1:
        raise OverheadError(f"p_acc must lie in (0, 1], got {p_acc}")
    if t_hm is None or t_ec is None:
        mh, me = measured_depths(d)
        t_hm = mh if t_hm is None else t_hm
        t_ec = me if t_ec is None else t_ec
    m = min_qubits(d)
    avg = m / p_acc
    st = avg * (GROW_STEPS + (d - 1) / 2 * (t_hm + t_ec))
    return PhysicalOverhead(d, p_acc, t_hm, t_ec, avg, m, st)


def n_st(d1: int, d2: int) -> int:
    """Qubits of the stabilizer state grown onto |H>_{d1}."""
    return ((3 * d2 - 1) ** 2 - (3 * d1 - 1) ** 2) // 4


def n_d1(d1: int) -> int:
    return min_qubits(d1)


def n_add(d2: int, d_f: int) -> int:
    """Extra qubits for running the d_f protocol on d2-encoded blocks."""
    return (3 * d2 - 1) ** 2 * (6 * d_f * d_f - 9 * d_f + 5) // 8


def n_df(d_f: int) -> int:
    return (3 * d_f * d_f + 1) // 4


def acceptance_tail(m: int, k: int, p_acc: float) -> float:
    """P(at least k of m independent preparations pass), each passing with p_acc."""
    if k <= 0:
        return 1.0
    return float(binom.sf(k - 1, m, p_acc))


def _validate_encoded(d1: int, d2: int, d_f: int, m_df: int | None) -> None:
    _check_odd(d1, "d1")
    _check_odd(d2, "d2")
    if d1 > d2:
        raise OverheadError("d1 must not exceed d2")
    if d_f not in (3, 5, 7):
        raise OverheadError(f"d_f must be 3, 5 or 7, got {d_f}")
    if m_df is not None and m_df < n_df(d_f) + 1:
        raise OverheadError(f"m_df = {m_df} is below n_df + 1 = {n_df(d_f) + 1}")


def acceptance_denominator(d_f: int, p_acc_d1: float, p_a_hf: float, m_df: int) -> float:
    """First layer needs n_df + 1 good states (one feeds G), each later layer n_df."""
    k = n_df(d_f)
    return acceptance_tail(m_df, k + 1, p_acc_d1) * acceptance_tail(m_df, k, p_acc_d1) ** (d_f - 2) * p_a_hf


def encoded_qubits(d1: int, d2: int, d_f: int, p_acc_d1: float, p_a_hf: float, m_df: int) -> tuple[float, int]:
    """(<n_f>, min(n_f))."""
    _validate_encoded(d1, d2, d_f, m_df)
    per_state = n_d1(d1) + n_st(d1, d2)
    minimum = n_add(d2, d_f) + (n_df(d_f) + 1) * per_state
    den = acceptance_denominator(d_f, p_acc_d1, p_a_hf, m_df)
    avg = math.inf if den == 0 else (n_add(d2, d_f) + m_df * per_state) / den
    return avg, minimum


@dataclass(frozen=True)
class EncodedSpacetime:
    S1: float
    S_G: float
    S2: float
    S_df: float
    S_tot: float


def encoded_spacetime(
    d1: int,
    d2: int,
    d_f: int,
    p_acc_d1: float,
    p_a_hf: float,
    m_df: int,
    depths_d1: tuple[int, int] | None = None,
    depths_df: tuple[int, int] | None = None,
) -> EncodedSpacetime:
    """Depth pairs are (t_Hm, t_EC); they default to the catalog's measured depths."""
    _validate_encoded(d1, d2, d_f, m_df)
    th1, te1 = depths_d1 or measured_depths(d1)
    thf, tef = depths_df or measured_depths(d_f)
    s1 = n_d1(d1) * (GROW_STEPS + (d1 - 1) / 2 * (th1 + te1))
    s_g = te1 * d1 * (n_st(d1, d2) + n_d1(d1))
    s2 = m_df * (s1 + s_g)
    window = max(GROW_STEPS, d2) + (d_f - 1) / 2 * (max(thf, d2) + max(tef, d2))
    s_df = EC_ROUND_STEPS_ENCODED * n_add(d2, d_f) * window
    den = acceptance_denominator(d_f, p_acc_d1, p_a_hf, m_df)
    total = math.inf if den == 0 else (s2 + s_df) / den
    return EncodedSpacetime(s1, s_g, s2, s_df, total)


def _avg(d1, d2, d_f, p_acc_d1, p_a_hf, m):
    return encoded_qubits(d1, d2, d_f, p_acc_d1, p_a_hf, m)[0]


def optimize_mdf(
    d1: int,
    d2: int,
    d_f: int,
    p_acc_d1: float,
    p_a_hf: float = 1.0,
    cap: int = DEFAULT_MDF_CAP,
    method: str = "scan",
) -> int:
    """Integer minimizer of <n_f> over [n_df + 1, cap]; ties go to the smallest m."""
    _validate_encoded(d1, d2, d_f, None)
    lo = n_df(d_f) + 1
    if cap < lo:
        raise OverheadError(f"cap {cap} below the smallest admissible m_df {lo}")
    if method == "scan":
        best, best_val = lo, _avg(d1, d2, d_f, p_acc_d1, p_a_hf, lo)
        for m in range(lo + 1, cap + 1):
            v = _avg(d1, d2, d_f, p_acc_d1, p_a_hf, m)
            if v < best_val:
                best, best_val = m, v
        return best
    if method == "local":
        # walk up while the average keeps falling; infinite plateaus are crossed
        m = lo
        cur = _avg(d1, d2, d_f, p_acc_d1, p_a_hf, m)
        while m < cap:
            nxt = _avg(d1, d2, d_f, p_acc_d1, p_a_hf, m + 1)
            if not (nxt < cur or math.isinf(cur)):
                break
            m, cur = m + 1, nxt
        return m
    raise OverheadError(f"unknown method {method!r}")


@dataclass(frozen=True)
class OverheadReport:
    mode: str
    inputs: dict
    avg_qubits: float
    min_qubits: int
    spacetime: float
    m_df: int | None = None
    S1: float | None = None
    S_G: float | None = None
    S2: float | None = None
    S_df: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def row(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "inputs"}
        out.update(self.inputs)
        return out


def physical_report(d: int, p_acc: float, t_hm: int | None = None, t_ec: int | None = None) -> OverheadReport:
    o = physical_overhead(d, p_acc, t_hm, t_ec)
    return OverheadReport(
        "physical", {"d": d, "p_acc": p_acc, "t_hm": o.t_hm, "t_ec": o.t_ec},
        o.avg_qubits, o.min_qubits, o.spacetime,
    )


def encoded_report(
    d1: int,
    d2: int,
    d_f: int,
    p_acc_d1: float,
    p_a_hf: float,
    m_df: int | None = None,
    depths_d1: tuple[int, int] | None = None,
    depths_df: tuple[int, int] | None = None,
) -> OverheadReport:
    m = m_df if m_df is not None else optimize_mdf(d1, d2, d_f, p_acc_d1, p_a_hf)
    avg, mn = encoded_qubits(d1, d2, d_f, p_acc_d1, p_a_hf, m)
    st = encoded_spacetime(d1, d2, d_f, p_acc_d1, p_a_hf, m, depths_d1, depths_df)
    inputs = {"d1": d1, "d2": d2, "d_f": d_f, "p_acc_d1": p_acc_d1, "p_a_hf": p_a_hf}
    return OverheadReport("encoded", inputs, avg, mn, st.S_tot, m, st.S1, st.S_G, st.S2, st.S_df)
