"""Statistical randomness battery: ENT metrics, an STS subset and KS aggregation."""
from .battery import BatteryReport, battery_failures, render_table, run_battery
from .ent import (
    DegenerateStreamError,
    EntReport,
    arithmetic_mean,
    chi_square_bits,
    chi_square_bytes,
    ent_report,
    monte_carlo_pi,
    serial_correlation,
    shannon_entropy_per_bit,
)
from .ks import kolmogorov_sf, ks_statistic, ks_uniform, pass_proportion
from .special import chi2_sf, gammainc, gammaincc
from .sts import PValue, block_frequency, frequency_monobit, runs_test

__all__ = [
    "BatteryReport",
    "DegenerateStreamError",
    "EntReport",
    "PValue",
    "arithmetic_mean",
    "battery_failures",
    "block_frequency",
    "chi2_sf",
    "chi_square_bits",
    "chi_square_bytes",
    "ent_report",
    "frequency_monobit",
    "gammainc",
    "gammaincc",
    "kolmogorov_sf",
    "ks_statistic",
    "ks_uniform",
    "monte_carlo_pi",
    "pass_proportion",
    "render_table",
    "run_battery",
    "runs_test",
    "serial_correlation",
    "shannon_entropy_per_bit",
]
