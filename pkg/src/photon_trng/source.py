"""Pulsed attenuated laser: Poissonian photon numbers per pulse."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_LAMBDA",
    "SourceConfig",
    "RandomStream",
    "poisson_cdf_table",
    "sample_photon_number",
    "generate_pulses",
]

MAX_LAMBDA = 100.0
_MASK64 = (1 << 64) - 1


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not (0.0 <= lam <= MAX_LAMBDA):
        raise ValueError(f"mean photon number must lie in [0, {MAX_LAMBDA:g}], got {lam!r}")
    return lam


@dataclass(frozen=True)
class SourceConfig:
    """Laser source. ``rep_rate_hz`` is only used for throughput reporting."""

    lam: float = 6.93
    rep_rate_hz: float = 1e6

    def __post_init__(self):
        _check_lambda(self.lam)
        if not self.rep_rate_hz > 0:
            raise ValueError(f"rep_rate_hz must be > 0, got {self.rep_rate_hz!r}")


@dataclass
class RandomStream:
    """Seedable PCG64 substream addressed by ``(seed, stream_id)``.

    Distinct ``stream_id`` values map to distinct ``SeedSequence`` spawn keys,
    so substreams are independent. A stream is single-owner and sequential.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64 and 0 <= self.stream_id <= _MASK64):
            raise ValueError("seed and stream_id must be 64-bit unsigned integers")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def substream(self, stream_id: int) -> "RandomStream":
        return RandomStream(self.seed, stream_id)

    def uniform(self) -> float:
        return float(self.generator.random())


def poisson_cdf_table(lam: float) -> np.ndarray:
    """Cumulative Poisson(lam) pmf accumulated in the sequential-search order.

    The table stops once the remaining tail is below double resolution.
    """
    lam = _check_lambda(lam)
    p = math.exp(-lam)
    acc = p
    cdf = [acc]
    n = 0
    while acc < 1.0 and (n < lam or p > 1e-17):
        n += 1
        p *= lam / n
        acc += p
        cdf.append(acc)
    return np.asarray(cdf)


def _invert(u: float, lam: float) -> int:
    # sequential search on the cumulative pmf
    p = math.exp(-lam)
    acc = p
    n = 0
    while u > acc and acc < 1.0 and (n < lam or p > 1e-17):
        n += 1
        p *= lam / n
        acc += p
    return n


def sample_photon_number(stream: RandomStream, lam: float) -> int:
    """One Poisson(lam) draw by inversion, consuming exactly one uniform."""
    lam = _check_lambda(lam)
    return _invert(stream.uniform(), lam)


def generate_pulses(config: SourceConfig, count: int, stream: RandomStream) -> np.ndarray:
    """Photon numbers of ``count`` consecutive, mutually independent pulses.

    Produces the same values as ``count`` calls to :func:`sample_photon_number`
    on the same stream.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    u = stream.generator.random(count)
    cdf = poisson_cdf_table(config.lam)
    n = np.searchsorted(cdf, u, side="left")
    return np.minimum(n, len(cdf) - 1).astype(np.int64)
