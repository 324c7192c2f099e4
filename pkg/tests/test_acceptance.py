"""Exit criteria, at their stated tolerances.

The large default-pipeline stream (1e8 bits, about 2e9 gates) is simulated
once per session and sliced for the criteria that need 1e6, 1e7 and 1e8 bits.
"""
import itertools
import math
import time

import numpy as np
import pytest

from photon_trng.cli import EXIT_FAIL, main
from photon_trng.detector import DetectorConfig, run_gates
from photon_trng.extractor import pack_bits, von_neumann_extract
from photon_trng.pipeline import RunConfig, simulate, sweep
from photon_trng.randtest import (
    arithmetic_mean,
    chi2_sf,
    ent_report,
    run_battery,
    serial_correlation,
)
from photon_trng.randtest.battery import STS_TESTS
from photon_trng.source import RandomStream, SourceConfig

BIG_BITS = 100 * 1_000_000
SEED = 20100301


@pytest.fixture(scope="module")
def default_bits():
    gates = 2_100_000_000
    result = simulate(RunConfig(n_gates=gates, seed=SEED))
    assert result.bits.bit_length >= BIG_BITS, "increase gates for the 1e8-bit stream"
    return np.unpackbits(np.frombuffer(result.bits.payload, dtype=np.uint8), count=BIG_BITS)


def _lag1(x):
    x = np.asarray(x, dtype=float)
    return float(np.corrcoef(x[:-1], x[1:])[0, 1])


def test_c01_efficiency_optimum(criterion):
    simulate(RunConfig(n_gates=1000))  # warm the compiled kernel
    t0 = time.perf_counter()
    ideal = simulate(RunConfig(detector=DetectorConfig.ideal(0.1), n_gates=4_000_000, seed=SEED))
    elapsed = time.perf_counter() - t0
    full = simulate(RunConfig(n_gates=4_000_000, seed=SEED))
    e_ideal, e_full = ideal.stats.efficiency, full.stats.efficiency
    ok = 0.248 <= e_ideal <= 0.252 and 0.248 <= e_full <= 0.252 and elapsed < 10
    criterion("C1 efficiency optimum", ok,
              f"ideal {e_ideal:.5f}, full defaults {e_full:.5f} in [0.248, 0.252]; {elapsed:.2f}s < 10s")
    assert ok


def test_c02_sweep_fidelity(criterion):
    t0 = time.perf_counter()
    rows = sweep(0.0, 2.0, 21, 1_000_000, seed=SEED)
    elapsed = time.perf_counter() - t0
    worst = max(abs(s - a) for _, a, s in rows)
    argmax_mu = max(rows, key=lambda r: r[1])[0]
    nearest = min((r[0] for r in rows), key=lambda m: abs(m - math.log(2)))
    ok = worst <= 0.01 and argmax_mu == nearest and elapsed < 60
    criterion("C2 sweep fidelity", ok,
              f"max |sim-analytic| {worst:.5f} <= 0.01; argmax mu {argmax_mu:.2f} (nearest ln2 {nearest:.2f}); {elapsed:.1f}s < 60s")
    assert ok


def test_c03_exact_unbiasedness(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    strings = list(itertools.product((False, True), repeat=10))
    counts = []
    for s in strings:
        _, st = von_neumann_extract(s)
        counts.append((sum(s), st.ones_emitted, st.bits_emitted - st.ones_emitted))
    for p in (0.1, 0.3, 0.5, 0.7, 0.9):
        ones = sum(p**k * (1 - p) ** (10 - k) * o for k, o, _ in counts)
        zeros = sum(p**k * (1 - p) ** (10 - k) * z for k, _, z in counts)
        worst = max(worst, abs(ones - zeros))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1
    criterion("C3 exact unbiasedness", ok, f"max |P1 mass - P0 mass| {worst:.2e} <= 1e-12; {elapsed:.2f}s < 1s")
    assert ok


def test_c04_statistical_unbiasedness(criterion, default_bits):
    x = default_bits[:1_000_000]
    mean, scc = arithmetic_mean(x), serial_correlation(x)
    ok = abs(mean - 0.5) <= 0.002 and abs(scc) <= 0.004
    criterion("C4 statistical unbiasedness", ok, f"1e6 bits: mean {mean:.5f}, serial corr {scc:+.6f}")
    assert ok


def test_c05_ent_suite(criterion, default_bits):
    r = ent_report(default_bits[:10_000_000])
    ok = (
        r.entropy_bits_per_bit >= 0.99999
        and abs(r.monte_carlo_pi - math.pi) <= 0.02
        and 0.001 <= r.chi_square_exceed_prob <= 0.999
    )
    criterion("C5 ENT suite", ok,
              f"1e7 bits: entropy {r.entropy_bits_per_bit:.7f}, pi {r.monte_carlo_pi:.6f}, "
              f"chi2 {r.chi_square_stat:.3f} exceed {r.chi_square_exceed_prob:.4f}")
    assert ok


def test_c06_chi_square_tail_anchor(criterion):
    p = chi2_sf(1.49, 1)
    ok = 0.2210 <= p <= 0.2235
    criterion("C6 chi-square tail anchor", ok, f"exceed_prob(1.49) = {p:.5f} in [0.2210, 0.2235]")
    assert ok


def test_c07_dark_counts(criterion):
    det = DetectorConfig(dark_prob=3e-5)
    rec = run_gates(SourceConfig(lam=0.0), det, 10_000_000, RandomStream(SEED))
    clicks = int(rec.click.sum())
    ok = abs(clicks - 300) <= 70
    criterion("C7 dark-count regime", ok, f"{clicks} clicks in 1e7 gates, 300 +- 70")
    assert ok


def test_c08_afterpulse_suppression(criterion):
    # 1e6 applied gates per arm, so the 0.004 bound is 4/sqrt(N) for the
    # autocorrelation sample itself (dead time 30 applies ~1 gate in 16)
    n = 1_000_000
    src = SourceConfig()
    base = dict(eta=0.1, dark_prob=3e-5, afterpulse_prob=0.2, afterpulse_tau_gates=3.0)
    raw = run_gates(src, DetectorConfig(dead_time_gates=0, **base), n, RandomStream(SEED, 1))
    dead = run_gates(src, DetectorConfig(dead_time_gates=30, **base), 20 * n, RandomStream(SEED, 2))
    c_raw, c_dead = raw.applied_clicks()[:n], dead.applied_clicks()
    assert c_dead.size >= n
    r_raw, r_dead = _lag1(c_raw), _lag1(c_dead[:n])
    ok = r_raw > 0.01 and abs(r_dead) < 0.004
    criterion("C8 afterpulse suppression", ok,
              f"lag-1 autocorr over 1e6 applied gates: dead 0 -> {r_raw:+.4f} (> 0.01), "
              f"dead 30 -> {r_dead:+.5f} (|.| < 0.004)")
    assert ok


def test_c09_sts_calibration(criterion, default_bits):
    report = run_battery(default_bits, 1_000_000)
    assert report.n_substreams == 100
    parts, ok = [], True
    for name in STS_TESTS:
        prop = report.pass_proportion[name][0]
        ks = report.ks_final[name].value
        ok &= 0.9601 <= prop <= 1.0 and ks >= 1e-4
        parts.append(f"{name} {prop:.2f}/KS {ks:.3f}")
    criterion("C9 STS subset calibration", ok, "100 x 1e6 bits: " + ", ".join(parts))
    assert ok


def test_c10_determinism(criterion, tmp_path):
    outs = []
    for k in range(2):
        bits = tmp_path / f"run{k}.bin"
        report = tmp_path / f"run{k}.report.json"
        assert main(["generate", "--gates", "3e7", "--seed", "77", "--out", str(bits)]) == 0
        main(["test", str(bits), "--substream-bits", "100000", "--report", str(report)])
        outs.append((bits.read_bytes(), bits.with_name(bits.name + ".json").read_text(), report.read_text()))
    ok = outs[0] == outs[1] and len(outs[0][0]) > 0
    criterion("C10 determinism", ok, f"identical bit files ({len(outs[0][0])} bytes), stats and reports")
    assert ok


def test_c11_pathological_rejection(criterion, tmp_path):
    n_bytes = 10_000_000 // 8
    constant = tmp_path / "constant.bin"
    constant.write_bytes(bytes(n_bytes))
    rng = np.random.Generator(np.random.PCG64(SEED))
    biased = tmp_path / "biased.bin"
    biased.write_bytes(pack_bits((rng.random(10_000_000) < 0.6).astype(np.uint8)).payload)
    codes = [main(["test", str(constant)]), main(["test", str(biased)])]
    ok = codes == [EXIT_FAIL, EXIT_FAIL]
    criterion("C11 pathological rejection", ok, f"exit codes constant={codes[0]}, 0.6-biased={codes[1]} (expect 2)")
    assert ok
