"""One-sample Kolmogorov-Smirnov aggregation of p-values against U(0, 1)."""
from __future__ import annotations

import math
from typing import Sequence

from .sts import PValue

__all__ = ["ks_statistic", "kolmogorov_sf", "ks_uniform", "pass_proportion"]

MIN_SAMPLES = 5
_TERM_CUTOFF = 1e-10


def _values(pvalues) -> list[float]:
    out = [p.value if isinstance(p, PValue) else float(p) for p in pvalues]
    for v in out:
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"p-value out of [0, 1]: {v!r}")
    return out


def ks_statistic(values: Sequence[float]) -> float:
    """Two-sided sup distance between the empirical CDF and U(0, 1)."""
    xs = sorted(values)
    m = len(xs)
    return max(max((i + 1) / m - x, x - i / m) for i, x in enumerate(xs))


def kolmogorov_sf(t: float) -> float:
    """Asymptotic Kolmogorov tail 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 t^2).

    The alternating series is summed until a term drops below 1e-10. Below
    t = 1 it converges slowly and leaves truncation noise next to 1, so the
    equivalent theta-function form
    1 - sqrt(2 pi)/t * sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 t^2)) is used there.
    """
    if t <= 0:
        return 1.0
    if t < 1.0:
        s = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * t * t))
            s += term
            if term < _TERM_CUTOFF * 1e-6:
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / t * s))
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * t * t)
        total += term if k % 2 else -term
        if term < _TERM_CUTOFF:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_uniform(pvalues, test_name: str = "ks") -> PValue:
    """Final p-value for a collection of p-values, Stephens-corrected."""
    values = _values(pvalues)
    m = len(values)
    if m < MIN_SAMPLES:
        raise ValueError(f"KS aggregation needs at least {MIN_SAMPLES} p-values, got {m}")
    d = ks_statistic(values)
    root = math.sqrt(m)
    return PValue(kolmogorov_sf(d * (root + 0.12 + 0.11 / root)), test_name)


def pass_proportion(pvalues, alpha: float = 0.01) -> tuple[float, float, float]:
    """Fraction of p-values >= alpha, with the (1 - alpha) +- 3 sigma band clipped to [0, 1]."""
    values = _values(pvalues)
    m = len(values)
    if m < 10:
        raise ValueError(f"pass proportion needs at least 10 p-values, got {m}")
    if not (0.0 < alpha < 0.5):
        raise ValueError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    proportion = sum(v >= alpha for v in values) / m
    centre = 1.0 - alpha
    half = 3.0 * math.sqrt(alpha * (1.0 - alpha) / m)
    return proportion, max(0.0, centre - half), min(1.0, centre + half)
