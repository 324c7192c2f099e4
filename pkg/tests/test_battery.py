import json

import numpy as np
import pytest

from photon_trng.randtest import battery_failures, render_table, run_battery
from photon_trng.randtest.battery import STS_TESTS


def test_partitioning_and_schema(reference_bits):
    r = run_battery(reference_bits, 100_000)
    assert r.n_substreams == 20
    assert set(r.sts_pvalues) == set(STS_TESTS)
    assert all(len(v) == 20 for v in r.sts_pvalues.values())
    doc = json.loads(r.to_json())
    assert 0 <= doc["ent"]["arithmetic_mean"] <= 1
    assert set(doc["ks_final"]) == set(STS_TESTS)
    for name in STS_TESTS:
        band = doc["pass_proportion"][name]
        assert 0 <= band["low"] <= band["high"] <= 1
    assert battery_failures(r) == []
    assert "monobit" in render_table(r)


def test_deterministic(reference_bits):
    a = run_battery(reference_bits, 200_000).to_json()
    b = run_battery(reference_bits.copy(), 200_000).to_json()
    assert a == b


def test_few_substreams_skip_aggregation(reference_bits):
    r = run_battery(reference_bits[:300_000], 100_000)
    assert all(v is None for v in r.ks_final.values())
    assert all(v is None for v in r.pass_proportion.values())
    assert r.notes


def test_biased_input_rejected():
    bits = (np.random.Generator(np.random.PCG64(6)).random(5_000_000) < 0.6).astype(np.uint8)
    r = run_battery(bits, 1_000_000)
    assert all(p.value < 0.01 for p in r.sts_pvalues["monobit"])
    assert any(f.startswith("monobit") for f in battery_failures(r))


def test_too_short():
    with pytest.raises(ValueError):
        run_battery(np.zeros(500, dtype=np.uint8), 1000)
    with pytest.raises(ValueError):
        run_battery(np.zeros(500, dtype=np.uint8), 50)


def test_calibration_on_reference_generator():
    # 200 substreams from a generator independent of the simulator
    rng = np.random.Generator(np.random.MT19937(777))
    bits = rng.integers(0, 2, 200 * 20_000, dtype=np.uint8)
    r = run_battery(bits, 20_000)
    for name in STS_TESTS:
        assert r.ks_final[name].value >= 1e-4, name
