"""Whole battery: ENT metrics on the full stream, STS subset per substream."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from ._bits import as_bit_array
from .ent import EntReport, ent_report
from .ks import ks_uniform, pass_proportion
from .sts import DEFAULT_BLOCK_LEN, PValue, block_frequency, frequency_monobit, runs_test

__all__ = ["BatteryReport", "STS_TESTS", "run_battery", "battery_failures", "render_table"]

STS_TESTS = ("monobit", "block_frequency", "runs")
ALPHA = 0.01


@dataclass
class BatteryReport:
    ent: EntReport
    substream_bits: int
    alpha: float
    sts_pvalues: dict[str, list[PValue]]
    ks_final: dict[str, Optional[PValue]]
    pass_proportion: dict[str, Optional[tuple[float, float, float]]]
    block_len: int = DEFAULT_BLOCK_LEN
    notes: list[str] = field(default_factory=list)

    @property
    def n_substreams(self) -> int:
        return len(next(iter(self.sts_pvalues.values()), []))

    def to_dict(self) -> dict:
        return {
            "ent": self.ent.to_dict(),
            "substream_bits": self.substream_bits,
            "n_substreams": self.n_substreams,
            "block_len": self.block_len,
            "alpha": self.alpha,
            "sts_pvalues": {k: [p.value for p in v] for k, v in self.sts_pvalues.items()},
            "ks_final": {k: (None if p is None else p.value) for k, p in self.ks_final.items()},
            "pass_proportion": {
                k: (None if t is None else {"proportion": t[0], "low": t[1], "high": t[2]})
                for k, t in self.pass_proportion.items()
            },
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def run_battery(
    bits, substream_bits: int, *, block_len: int = DEFAULT_BLOCK_LEN, alpha: float = ALPHA
) -> BatteryReport:
    x = as_bit_array(bits)
    if substream_bits < 100:
        raise ValueError(f"substream_bits must be >= 100, got {substream_bits}")
    if x.size < substream_bits:
        raise ValueError(f"stream has {x.size} bits, fewer than one substream of {substream_bits}")

    ent = ent_report(x)
    tests = {
        "monobit": frequency_monobit,
        "block_frequency": lambda s: block_frequency(s, block_len),
        "runs": runs_test,
    }
    n_sub = x.size // substream_bits
    pvals: dict[str, list[PValue]] = {name: [] for name in STS_TESTS}
    for k in range(n_sub):
        sub = x[k * substream_bits : (k + 1) * substream_bits]
        for name in STS_TESTS:
            pvals[name].append(tests[name](sub))

    notes = []
    ks_final: dict[str, Optional[PValue]] = {}
    proportions: dict[str, Optional[tuple[float, float, float]]] = {}
    for name in STS_TESTS:
        ks_final[name] = ks_uniform(pvals[name], name) if n_sub >= 5 else None
        proportions[name] = pass_proportion(pvals[name], alpha) if n_sub >= 10 else None
    if n_sub < 5:
        notes.append(f"only {n_sub} substream(s): KS aggregation skipped")
    if n_sub < 10:
        notes.append(f"only {n_sub} substream(s): pass proportion skipped")
    if ent.serial_correlation is None:
        notes.append("constant stream: serial correlation undefined")
    return BatteryReport(ent, substream_bits, alpha, pvals, ks_final, proportions, block_len, notes)


def battery_failures(report: BatteryReport, ks_threshold: float = 1e-4) -> list[str]:
    """Reasons the report fails; empty when every check passes.

    With too few substreams for KS or proportions, the individual substream
    p-values are judged against ``alpha`` instead.
    """
    out = []
    for name in STS_TESTS:
        ks = report.ks_final[name]
        prop = report.pass_proportion[name]
        if ks is not None and ks.value < ks_threshold:
            out.append(f"{name}: KS final p {ks.value:.3g} < {ks_threshold:g}")
        if prop is not None and not (prop[1] <= prop[0] <= prop[2]):
            out.append(f"{name}: pass proportion {prop[0]:.4f} outside [{prop[1]:.4f}, {prop[2]:.4f}]")
        if ks is None and prop is None:
            bad = [p.value for p in report.sts_pvalues[name] if p.value < report.alpha]
            if bad:
                out.append(f"{name}: {len(bad)} substream p-value(s) below {report.alpha:g}")
    return out


def render_table(report: BatteryReport, ks_threshold: float = 1e-4) -> str:
    e = report.ent
    scc = "undefined" if e.serial_correlation is None else f"{e.serial_correlation:.6f}"
    lines = [
        f"ENT ({e.bit_length} bits)",
        f"  entropy              {e.entropy_bits_per_bit:.6f} bits per bit",
        f"  optimum compression  {e.compression_percent:.0f} percent",
        f"  chi-square           {e.chi_square_stat:.2f}, exceeded {100 * e.chi_square_exceed_prob:.2f}% of the time",
        f"  arithmetic mean      {e.arithmetic_mean:.4f} (0.5 = random)",
        f"  monte carlo pi       {e.monte_carlo_pi:.9f} (error {e.monte_carlo_pi_error_percent:.2f} percent)",
        f"  serial correlation   {scc} (uncorrelated = 0.0)",
        "",
        f"STS subset: {report.n_substreams} substreams of {report.substream_bits} bits, alpha={report.alpha:g}",
        f"  {'test':<16}{'KS final p':>12}{'proportion':>12}  band              result",
    ]
    for name in STS_TESTS:
        ks = report.ks_final[name]
        prop = report.pass_proportion[name]
        ks_s = "n/a" if ks is None else f"{ks.value:.4f}"
        if prop is None:
            prop_s, band_s = "n/a", "n/a"
        else:
            prop_s, band_s = f"{prop[0]:.4f}", f"[{prop[1]:.4f}, {prop[2]:.4f}]"
        ok = not any(f.startswith(name + ":") for f in battery_failures(report, ks_threshold))
        lines.append(f"  {name:<16}{ks_s:>12}{prop_s:>12}  {band_s:<18}{'PASS' if ok else 'FAIL'}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines)
