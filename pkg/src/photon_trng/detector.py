"""Gated Geiger-mode APD model.

Each applied gate clicks if any of three independent events fires:

* signal: each incident photon is detected with probability ``eta``
  (Bernoulli thinning of the pulse's photon number),
* dark count: probability ``dark_prob`` per applied gate,
* afterpulse: a single trap filled by the most recent avalanche fires with
  probability ``afterpulse_prob * exp(-gates_since_avalanche / afterpulse_tau_gates)``.

Any click, whatever its cause, refills the trap and suppresses the next
``dead_time_gates`` gates. Suppressed gates are not applied and consume no
randomness.

The compiled kernel and :func:`detect_gate` draw uniforms in the same order,
so :func:`run_gates` and :func:`run_gates_reference` agree bit for bit.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numba
import numpy as np

from .source import RandomStream, SourceConfig, _invert

__all__ = [
    "DetectorConfig",
    "DetectorState",
    "GateRecord",
    "GateRecords",
    "detect_gate",
    "run_gates",
    "run_gates_reference",
    "click_rate",
]


def _check_prob(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")


@dataclass(frozen=True)
class DetectorConfig:
    """SPD parameters.

    Defaults follow the experimental operating point: 10% efficiency,
    3e-5 dark counts per 2.5 ns gate, 8 us dead time at 1 MHz (8 gates).
    The afterpulse trap defaults (0.05, 3 gates) are simulation choices with
    no measured counterpart.
    """

    eta: float = 0.10
    dark_prob: float = 3e-5
    dead_time_gates: int = 8
    afterpulse_prob: float = 0.05
    afterpulse_tau_gates: float = 3.0
    gate_width_ns: float = 2.5

    def __post_init__(self):
        _check_prob("eta", self.eta)
        _check_prob("dark_prob", self.dark_prob)
        _check_prob("afterpulse_prob", self.afterpulse_prob)
        if int(self.dead_time_gates) != self.dead_time_gates or self.dead_time_gates < 0:
            raise ValueError(f"dead_time_gates must be an integer >= 0, got {self.dead_time_gates!r}")
        if not self.afterpulse_tau_gates > 0:
            raise ValueError(f"afterpulse_tau_gates must be > 0, got {self.afterpulse_tau_gates!r}")
        if not self.gate_width_ns > 0:
            raise ValueError(f"gate_width_ns must be > 0, got {self.gate_width_ns!r}")

    @classmethod
    def ideal(cls, eta: float = 0.10) -> "DetectorConfig":
        """No dark counts, no afterpulsing, no dead time."""
        return cls(eta=eta, dark_prob=0.0, dead_time_gates=0, afterpulse_prob=0.0)


@dataclass
class DetectorState:
    gates_remaining_dead: int = 0
    last_avalanche_gate: Optional[int] = None


@dataclass(frozen=True)
class GateRecord:
    index: int
    applied: bool
    click: bool


class GateRecords:
    """Columnar run of consecutive gate records starting at gate ``start``."""

    def __init__(self, applied: np.ndarray, click: np.ndarray, start: int = 0):
        self.applied = np.asarray(applied, dtype=bool)
        self.click = np.asarray(click, dtype=bool)
        if self.applied.shape != self.click.shape or self.applied.ndim != 1:
            raise ValueError("applied and click must be 1-d arrays of equal length")
        if np.any(self.click & ~self.applied):
            raise ValueError("a click requires an applied gate")
        self.start = int(start)

    @classmethod
    def from_records(cls, records) -> "GateRecords":
        records = list(records)
        start = records[0].index if records else 0
        for k, r in enumerate(records):
            if r.index != start + k:
                raise ValueError("gate indices must increase by 1")
        return cls(
            np.array([r.applied for r in records], dtype=bool),
            np.array([r.click for r in records], dtype=bool),
            start,
        )

    @property
    def index(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self), dtype=np.int64)

    def __len__(self) -> int:
        return len(self.applied)

    def __getitem__(self, k: int) -> GateRecord:
        if k < 0:
            k += len(self)
        return GateRecord(self.start + k, bool(self.applied[k]), bool(self.click[k]))

    def __iter__(self) -> Iterator[GateRecord]:
        for k in range(len(self)):
            yield GateRecord(self.start + k, bool(self.applied[k]), bool(self.click[k]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GateRecords):
            return NotImplemented
        return (
            self.start == other.start
            and np.array_equal(self.applied, other.applied)
            and np.array_equal(self.click, other.click)
        )

    def applied_clicks(self) -> np.ndarray:
        """Click outcomes of the applied gates only, in gate order."""
        return self.click[self.applied]

    def to_csv(self) -> str:
        """Debug dump: ``index,applied,click`` with 0/1 booleans."""
        buf = io.StringIO()
        buf.write("index,applied,click\n")
        table = np.column_stack(
            [self.index, self.applied.astype(np.int64), self.click.astype(np.int64)]
        )
        np.savetxt(buf, table, fmt="%d", delimiter=",")
        return buf.getvalue()


def detect_gate(
    state: DetectorState,
    config: DetectorConfig,
    photon_count: int,
    gate_index: int,
    stream: RandomStream,
) -> GateRecord:
    """Advance the detector by one gate. Mutates ``state``."""
    if state.gates_remaining_dead > 0:
        state.gates_remaining_dead -= 1
        return GateRecord(gate_index, False, False)

    signal = False
    for _ in range(photon_count):
        if stream.uniform() < config.eta:
            signal = True
            break
    dark = config.dark_prob > 0 and stream.uniform() < config.dark_prob
    after = False
    if config.afterpulse_prob > 0 and state.last_avalanche_gate is not None:
        dg = gate_index - state.last_avalanche_gate
        p = config.afterpulse_prob * math.exp(-dg / config.afterpulse_tau_gates)
        after = stream.uniform() < p

    click = signal or dark or after
    if click:
        state.gates_remaining_dead = config.dead_time_gates
        state.last_avalanche_gate = gate_index
    return GateRecord(gate_index, True, click)


def run_gates_reference(
    source: SourceConfig,
    detector: DetectorConfig,
    n_gates: int,
    stream: RandomStream,
    state: Optional[DetectorState] = None,
    start: int = 0,
) -> GateRecords:
    """Pure-Python gate loop built on :func:`detect_gate`. Slow; used as a cross-check."""
    if n_gates < 1:
        raise ValueError(f"n_gates must be >= 1, got {n_gates}")
    state = DetectorState() if state is None else state
    applied = np.zeros(n_gates, dtype=bool)
    click = np.zeros(n_gates, dtype=bool)
    for k in range(n_gates):
        g = start + k
        n = 0
        if state.gates_remaining_dead == 0:
            n = _invert(stream.uniform(), source.lam)
        rec = detect_gate(state, detector, n, g, stream)
        applied[k] = rec.applied
        click[k] = rec.click
    return GateRecords(applied, click, start)


@numba.njit(cache=True)
def _gate_kernel(gen, lam, eta, dark_prob, dead_time, ap_prob, ap_tau,
                 n_gates, start, remaining_dead, last_avalanche, applied, click):
    p0 = math.exp(-lam)
    for k in range(n_gates):
        g = start + k
        if remaining_dead > 0:
            remaining_dead -= 1
            continue
        applied[k] = True

        # photon number: sequential search, same loop as source._invert
        u = gen.random()
        p = p0
        acc = p
        n = 0
        while u > acc and acc < 1.0 and (n < lam or p > 1e-17):
            n += 1
            p *= lam / n
            acc += p

        hit = False
        for _ in range(n):
            if gen.random() < eta:
                hit = True
                break
        if dark_prob > 0 and gen.random() < dark_prob:
            hit = True
        if ap_prob > 0 and last_avalanche >= 0:
            pa = ap_prob * math.exp(-(g - last_avalanche) / ap_tau)
            if gen.random() < pa:
                hit = True
        if hit:
            click[k] = True
            remaining_dead = dead_time
            last_avalanche = g
    return remaining_dead, last_avalanche


def run_gates(
    source: SourceConfig,
    detector: DetectorConfig,
    n_gates: int,
    stream: RandomStream,
    state: Optional[DetectorState] = None,
    start: int = 0,
) -> GateRecords:
    """Simulate ``n_gates`` consecutive gates.

    Passing a ``state`` (mutated in place) and ``start`` lets a long run be
    produced in chunks that are identical to one uninterrupted run.
    """
    if n_gates < 1:
        raise ValueError(f"n_gates must be >= 1, got {n_gates}")
    state = DetectorState() if state is None else state
    applied = np.zeros(n_gates, dtype=np.bool_)
    click = np.zeros(n_gates, dtype=np.bool_)
    last = -1 if state.last_avalanche_gate is None else state.last_avalanche_gate
    rem, last = _gate_kernel(
        stream.generator,
        float(source.lam),
        float(detector.eta),
        float(detector.dark_prob),
        int(detector.dead_time_gates),
        float(detector.afterpulse_prob),
        float(detector.afterpulse_tau_gates),
        int(n_gates),
        int(start),
        int(state.gates_remaining_dead),
        int(last),
        applied,
        click,
    )
    state.gates_remaining_dead = int(rem)
    state.last_avalanche_gate = None if last < 0 else int(last)
    return GateRecords(applied, click, start)


def click_rate(records) -> float:
    """Clicks per applied gate."""
    if not isinstance(records, GateRecords):
        records = GateRecords.from_records(records)
    n_applied = int(np.count_nonzero(records.applied))
    if n_applied == 0:
        raise ZeroDivisionError("click rate is undefined with no applied gates")
    return int(np.count_nonzero(records.click)) / n_applied
