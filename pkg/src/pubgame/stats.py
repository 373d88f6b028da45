"""Rank correlation and weekly significance tests.

Self-contained: the Student t tail comes from a regularized incomplete
beta evaluated by modified Lentz continued fractions, accurate to
roughly 1e-12 over the degrees of freedom used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_BETA_EPS = 3e-16
_BETA_FPMIN = 1e-300
_BETA_MAXIT = 300


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    df: float
    p_value: float
    mean_a: float
    mean_b: float
    paired: bool
    n_a: int
    n_b: int


def _double_average_ranks(values: Sequence[float]) -> list[int]:
    """Average ranks over ties, doubled so they stay integers."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    out = [0] * n
    pos = 0
    while pos < n:
        end = pos
        while end + 1 < n and values[order[end + 1]] == values[order[pos]]:
            end += 1
        dr = (pos + 1) + (end + 1)
        for j in range(pos, end + 1):
            out[order[j]] = dr
        pos = end + 1
    return out


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Tie-corrected Spearman correlation with a t-approximation p-value.

    Ranks use average positions over ties; the correlation is the
    Pearson correlation of the ranks, computed in exact integer
    arithmetic so perfectly monotone inputs give exactly +/-1.  The
    p-value tests rho = 0 via t = rho * sqrt((n-2)/(1-rho^2)) on n-2
    degrees of freedom.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    rx = _double_average_ranks(x)
    ry = _double_average_ranks(y)
    sx = sum(rx)
    sy = sum(ry)
    sxx = sum(v * v for v in rx)
    syy = sum(v * v for v in ry)
    sxy = sum(a * b for a, b in zip(rx, ry))
    num = n * sxy - sx * sy
    dx = n * sxx - sx * sx
    dy = n * syy - sy * sy
    if dx == 0 or dy == 0:
        raise ValueError("constant input has no rank ordering")
    if num * num == dx * dy:
        rho = 1.0 if num > 0 else -1.0
    else:
        rho = num / math.sqrt(dx) / math.sqrt(dy)
        rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        p = 2.0 * student_t_sf(abs(t), n - 2)
    return CorrelationResult(rho=rho, p_value=p, n=n)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_FPMIN:
        d = _BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge "
        f"(a={a}, b={b}, x={x})"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return tail if t >= 0 else 1.0 - tail


def weekly_ttest(
    a: Sequence[float], b: Sequence[float], *, paired: bool = True
) -> TTestResult:
    """Two-sided t-test between two weekly series.

    Positive t means the second series is larger.  Paired (default)
    tests the per-week differences b - a; unpaired runs Welch's test.
    Zero spread is reported as p = 1 when the means agree (an all-zero
    difference series) and p = 0 otherwise.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if paired:
        if len(av) != len(bv):
            raise ValueError(
                f"paired test needs equal lengths, got {len(av)} and {len(bv)}"
            )
        n = len(av)
        if n < 2:
            raise ValueError(f"need at least 2 paired points, got {n}")
        diff = bv - av
        mean = float(diff.mean())
        spread = float(diff.std(ddof=1)) / math.sqrt(n)
        df = float(n - 1)
    else:
        n_a, n_b = len(av), len(bv)
        if n_a < 2 or n_b < 2:
            raise ValueError(
                f"Welch test needs at least 2 points per side, got {n_a} and {n_b}"
            )
        va = float(av.var(ddof=1))
        vb = float(bv.var(ddof=1))
        se2 = va / n_a + vb / n_b
        mean = float(bv.mean() - av.mean())
        spread = math.sqrt(se2)
        if se2 == 0.0:
            df = float(n_a + n_b - 2)
        else:
            df = se2 * se2 / (
                (va / n_a) ** 2 / (n_a - 1) + (vb / n_b) ** 2 / (n_b - 1)
            )
    if spread == 0.0:
        # zero-variance series: identical means are a non-result, any
        # difference is treated as overwhelming
        t_stat = 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
        p = 1.0 if mean == 0.0 else 0.0
    else:
        t_stat = mean / spread
        p = 2.0 * student_t_sf(abs(t_stat), df)
    return TTestResult(
        t_stat=t_stat,
        df=df,
        p_value=p,
        mean_a=float(av.mean()),
        mean_b=float(bv.mean()),
        paired=paired,
        n_a=len(av),
        n_b=len(bv),
    )
