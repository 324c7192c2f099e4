"""Command-line front end: ``generate``, ``test`` and ``sweep``.

Exit codes: 0 success / statistical pass, 1 usage or I/O error,
2 statistical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .detector import DetectorConfig
from .pipeline import FORMATS, RunConfig, decode_bits, encode_bits, parse_config_text, simulate, sweep
from .randtest import battery_failures, render_table, run_battery
from .source import SourceConfig

log = logging.getLogger("photon_trng")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAIL = 2

# flag name -> (RunConfig section, field, type)
_RUN_FLAGS = {
    "lambda": ("source", "lam", float),
    "rep-rate": ("source", "rep_rate_hz", float),
    "eta": ("detector", "eta", float),
    "dark": ("detector", "dark_prob", float),
    "dead-time-gates": ("detector", "dead_time_gates", int),
    "afterpulse-prob": ("detector", "afterpulse_prob", float),
    "afterpulse-tau": ("detector", "afterpulse_tau_gates", float),
    "gate-width": ("detector", "gate_width_ns", float),
    "gates": (None, "n_gates", int),
    "seed": (None, "seed", int),
    "format": (None, "output_format", str),
    "substream-bits": (None, "substream_bits", int),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number(kind):
    def convert(text):
        # accept 4e6 style integers
        value = float(text)
        if kind is int:
            if value != int(value):
                raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
            return int(value)
        return value

    convert.__name__ = kind.__name__
    return convert


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    for flag, (_, _, kind) in _RUN_FLAGS.items():
        if flag == "format":
            p.add_argument("--format", choices=FORMATS, default=None)
        else:
            p.add_argument(f"--{flag}", type=_number(kind) if kind is not str else str, default=None)
    p.add_argument("--config", type=Path, help="key=value file with the same names as the flags")
    p.add_argument("--ideal", action="store_true", help="no dark counts, afterpulses or dead time")
    p.add_argument("--restart-on-gap", action="store_true",
                   help="restart pairing after each dead-time gap instead of pairing across it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photon-trng", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="simulate the generator and write extracted bits")
    _add_run_flags(gen)
    gen.add_argument("--out", default="-", help="bit file, '-' for stdout (default)")
    gen.add_argument("--stats", type=Path, help="stats JSON file (default: <out>.json, or stderr)")

    test = sub.add_parser("test", help="run the statistical battery on a bit file")
    test.add_argument("path", help="bit file, '-' for stdin")
    test.add_argument("--format", choices=FORMATS, default="raw")
    test.add_argument("--substream-bits", type=_number(int), default=1_000_000)
    test.add_argument("--block-len", type=_number(int), default=128)
    test.add_argument("--alpha", type=float, default=0.01)
    test.add_argument("--ks-threshold", type=float, default=1e-4)
    test.add_argument("--report", type=Path, help="write the JSON report here")
    test.add_argument("--json", action="store_true", help="print the JSON report instead of the table")

    sw = sub.add_parser("sweep", help="efficiency versus mu, analytic and simulated, as CSV")
    sw.add_argument("--mu-min", type=float, default=0.0)
    sw.add_argument("--mu-max", type=float, default=2.0)
    sw.add_argument("--steps", type=_number(int), default=21)
    sw.add_argument("--gates-per-point", type=_number(int), default=1_000_000)
    sw.add_argument("--seed", type=_number(int), default=0)
    sw.add_argument("--eta", type=float, default=0.10)
    sw.add_argument("--out", default="-", help="CSV file, '-' for stdout (default)")
    return parser


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    values: dict[str, object] = {}
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        for key, raw in parse_config_text(text).items():
            if key in ("ideal", "restart-on-gap"):
                values[key] = raw.lower() in ("1", "true", "yes", "on")
                continue
            if key not in _RUN_FLAGS:
                raise UsageError(f"unknown config key {key!r}")
            kind = _RUN_FLAGS[key][2]
            try:
                values[key] = kind(raw) if kind is str else _number(kind)(raw)
            except (ValueError, argparse.ArgumentTypeError):
                raise UsageError(f"bad value for {key}: {raw!r}") from None
    for flag in _RUN_FLAGS:
        v = getattr(args, flag.replace("-", "_"))
        if v is not None:
            values[flag] = v
    if args.ideal:
        values["ideal"] = True
    if args.restart_on_gap:
        values["restart-on-gap"] = True

    sections: dict[str | None, dict] = {"source": {}, "detector": {}, None: {}}
    if values.pop("ideal", False):
        sections["detector"].update(dark_prob=0.0, afterpulse_prob=0.0, dead_time_gates=0)
    sections[None]["restart_on_gap"] = bool(values.pop("restart-on-gap", False))
    for flag, v in values.items():
        section, name, _ = _RUN_FLAGS[flag]
        sections[section][name] = v
    try:
        return RunConfig(
            source=SourceConfig(**sections["source"]),
            detector=DetectorConfig(**sections["detector"]),
            **sections[None],
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _write(dest: str, data: bytes) -> None:
    if dest == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(dest).write_bytes(data)


def cmd_generate(args) -> int:
    config = resolve_run_config(args)
    log.info("generating: mu=%.6g, %d gates, seed %d", config.mu, config.n_gates, config.seed)
    result = simulate(config)
    doc = json.dumps(result.stats_document(), indent=2) + "\n"
    _write(args.out, encode_bits(result.bits, config.output_format))
    if args.stats is not None:
        args.stats.write_text(doc)
    elif args.out == "-":
        sys.stderr.write(doc)
    else:
        Path(args.out + ".json").write_text(doc)
    return EXIT_OK


def cmd_test(args) -> int:
    try:
        data = sys.stdin.buffer.read() if args.path == "-" else Path(args.path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc}") from None
    try:
        bits = decode_bits(data, args.format)
        report = run_battery(bits, args.substream_bits, block_len=args.block_len, alpha=args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.report is not None:
        args.report.write_text(report.to_json() + "\n")
    print(report.to_json() if args.json else render_table(report, args.ks_threshold))
    failures = battery_failures(report, args.ks_threshold)
    for f in failures:
        log.warning("FAIL %s", f)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_sweep(args) -> int:
    try:
        rows = sweep(args.mu_min, args.mu_max, args.steps, args.gates_per_point, args.seed, args.eta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["mu", "analytic", "simulated"])
        for mu, analytic, simulated in rows:
            w.writerow([repr(mu), repr(analytic), repr(simulated)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    handler = {"generate": cmd_generate, "test": cmd_test, "sweep": cmd_sweep}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"photon-trng {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"photon-trng {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
