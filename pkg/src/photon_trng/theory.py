"""Closed-form probability model of the photon-number-detection TRNG.

All functions take ``mu``, the detected mean photon number per gate
(detection efficiency times mean photons per pulse).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "EfficiencyPoint",
    "poisson_pmf",
    "bit_probability",
    "extraction_efficiency",
    "optimal_mu",
    "efficiency_curve",
]


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not math.isfinite(mu) or mu < 0:
        raise ValueError(f"mean photon number must be finite and >= 0, got {mu!r}")
    return mu


@dataclass(frozen=True)
class EfficiencyPoint:
    mu: float
    efficiency: float


def poisson_pmf(mu: float, n: int) -> float:
    """P(n) for a Poisson distribution of mean ``mu``, evaluated in log space."""
    mu = _check_mu(mu)
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    if mu == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(mu) - mu - math.lgamma(n + 1))


def bit_probability(mu: float) -> float:
    """Probability that an ordered pair of gates yields bit 1 (equally, bit 0).

    Product of P(click) on one gate and P(no click) on the other.
    """
    mu = _check_mu(mu)
    p_vacuum = math.exp(-mu)
    p_click = -math.expm1(-mu)
    return p_click * p_vacuum


def extraction_efficiency(mu: float) -> float:
    """Random bits per detection event: ``(P(1) + P(0)) / 2``."""
    p = bit_probability(mu)
    return (p + p) / 2


def optimal_mu() -> float:
    """The ``mu`` maximising the extraction efficiency, where P(click) = P(no click)."""
    return math.log(2.0)


def efficiency_curve(mu_min: float, mu_max: float, steps: int) -> list[EfficiencyPoint]:
    """Efficiency on a uniform closed grid ``[mu_min, mu_max]`` with ``steps`` points."""
    mu_min = _check_mu(mu_min)
    mu_max = _check_mu(mu_max)
    if not mu_min < mu_max:
        raise ValueError(f"need mu_min < mu_max, got [{mu_min}, {mu_max}]")
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    span = mu_max - mu_min
    grid = [mu_min + span * i / (steps - 1) for i in range(steps)]
    grid[-1] = mu_max
    return [EfficiencyPoint(mu, extraction_efficiency(mu)) for mu in grid]
