import numpy as np
import pytest

from photon_trng.source import RandomStream


@pytest.fixture
def stream():
    return RandomStream(seed=20260101, stream_id=0)


@pytest.fixture
def reference_bits():
    """Bits from a generator independent of the simulation's PCG64 streams."""
    rng = np.random.Generator(np.random.MT19937(12345))
    return rng.integers(0, 2, size=2_000_000, dtype=np.uint8)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the assertion is still made by the caller."""

    def record(label: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
