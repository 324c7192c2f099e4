"""Source -> detector -> extractor pipeline, output encodings and the efficiency sweep."""
from __future__ import annotations

import base64
import binascii
from dataclasses import asdict, dataclass, field

import numpy as np

from . import theory
from .detector import DetectorConfig, DetectorState, run_gates
from .extractor import BitStream, ExtractionStats, PairExtractor, pack_bits, unpack_bits
from .source import RandomStream, SourceConfig

__all__ = [
    "FORMATS",
    "RunConfig",
    "RunResult",
    "simulate",
    "sweep",
    "encode_bits",
    "decode_bits",
    "parse_config_text",
]

FORMATS = ("raw", "hex", "base64", "ascii01")
ASCII01_LINE = 64
CHUNK_GATES = 1 << 22


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run. Defaults sit at the optimum mu = ln 2."""

    source: SourceConfig = field(default_factory=SourceConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    n_gates: int = 4_000_000
    seed: int = 0
    output_format: str = "raw"
    substream_bits: int = 1_000_000
    restart_on_gap: bool = False

    def __post_init__(self):
        if self.n_gates < 2:
            raise ValueError(f"n_gates must be >= 2, got {self.n_gates}")
        if self.substream_bits < 100:
            raise ValueError(f"substream_bits must be >= 100, got {self.substream_bits}")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}, got {self.output_format!r}")

    @property
    def mu(self) -> float:
        """Detected mean photon number per gate."""
        return self.detector.eta * self.source.lam

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        src = SourceConfig(**d.pop("source", {}))
        det = DetectorConfig(**d.pop("detector", {}))
        return cls(source=src, detector=det, **d)


@dataclass
class RunResult:
    bits: BitStream
    stats: ExtractionStats
    config: RunConfig
    n_gates: int = 0

    def stats_document(self) -> dict:
        """Stats JSON body: extraction counters, efficiency, mu and the resolved config."""
        doc = self.stats.to_dict()
        doc["efficiency"] = self.stats.efficiency
        doc["mu"] = self.config.mu
        doc["analytic_efficiency"] = theory.extraction_efficiency(self.config.mu)
        doc["n_gates"] = self.n_gates
        doc["bit_length"] = self.bits.bit_length
        # one gate per laser pulse
        doc["bits_per_second"] = self.stats.bits_emitted / self.n_gates * self.config.source.rep_rate_hz
        doc["config"] = self.config.to_dict()
        return doc


class _BitPacker:
    def __init__(self):
        self._bytes = bytearray()
        self._tail = np.zeros(0, dtype=np.uint8)
        self.bit_length = 0

    def add(self, bits: np.ndarray) -> None:
        if self._tail.size:
            bits = np.concatenate([self._tail, bits])
        whole = bits.size - bits.size % 8
        self._bytes += np.packbits(bits[:whole]).tobytes()
        self._tail = bits[whole:].copy()
        self.bit_length += bits.size - self._tail.size

    def finish(self) -> BitStream:
        tail = pack_bits(self._tail)
        return BitStream(bytes(self._bytes) + tail.payload, self.bit_length + tail.bit_length)


def simulate(config: RunConfig, stream_id: int = 0, chunk_gates: int = CHUNK_GATES) -> RunResult:
    """Run ``config.n_gates`` gates and extract bits.

    The run is processed in chunks with carried detector and pairing state;
    the output does not depend on ``chunk_gates``.
    """
    stream = RandomStream(config.seed, stream_id)
    state = DetectorState()
    extractor = PairExtractor(config.restart_on_gap)
    packer = _BitPacker()
    done = 0
    while done < config.n_gates:
        n = min(chunk_gates, config.n_gates - done)
        records = run_gates(config.source, config.detector, n, stream, state, start=done)
        packer.add(extractor.feed_gates(records))
        done += n
    return RunResult(packer.finish(), extractor.stats, config, config.n_gates)


def sweep(
    mu_min: float = 0.0,
    mu_max: float = 2.0,
    steps: int = 21,
    gates_per_point: int = 1_000_000,
    seed: int = 0,
    eta: float = 0.10,
) -> list[tuple[float, float, float]]:
    """Rows of ``(mu, analytic, simulated)`` efficiency with an ideal detector.

    Point ``i`` uses stream id ``i``, so points are independent and can be
    computed in any order.
    """
    if gates_per_point < 10_000:
        raise ValueError(f"gates_per_point must be >= 1e4, got {gates_per_point}")
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta!r}")
    rows = []
    detector = DetectorConfig.ideal(eta)
    for i, point in enumerate(theory.efficiency_curve(mu_min, mu_max, steps)):
        cfg = RunConfig(source=SourceConfig(lam=point.mu / eta), detector=detector,
                        n_gates=gates_per_point, seed=seed)
        result = simulate(cfg, stream_id=i)
        rows.append((point.mu, point.efficiency, result.stats.efficiency))
    return rows


def encode_bits(bits: BitStream, fmt: str) -> bytes:
    if fmt == "raw":
        return bits.payload
    if fmt == "hex":
        return bits.payload.hex().encode() + b"\n"
    if fmt == "base64":
        return base64.encodebytes(bits.payload)
    if fmt == "ascii01":
        chars = (unpack_bits(bits) + ord("0")).astype(np.uint8).tobytes()
        lines = [chars[i : i + ASCII01_LINE] for i in range(0, len(chars), ASCII01_LINE)]
        return b"".join(line + b"\n" for line in lines)
    raise ValueError(f"unknown format {fmt!r}")


def decode_bits(data: bytes, fmt: str) -> BitStream:
    """Inverse of :func:`encode_bits`. Byte formats carry no bit length, so it is 8 * bytes."""
    if fmt == "raw":
        return BitStream.from_bytes(data)
    if fmt == "hex":
        try:
            return BitStream.from_bytes(bytes.fromhex(data.decode("ascii").strip()))
        except ValueError as exc:
            raise ValueError(f"malformed hex input: {exc}") from None
    if fmt == "base64":
        try:
            return BitStream.from_bytes(base64.b64decode(b"".join(data.split()), validate=True))
        except binascii.Error as exc:
            raise ValueError(f"malformed base64 input: {exc}") from None
    if fmt == "ascii01":
        chars = np.frombuffer(b"".join(data.split()), dtype=np.uint8)
        if chars.size and not np.all((chars == ord("0")) | (chars == ord("1"))):
            raise ValueError("ascii01 input may contain only '0', '1' and whitespace")
        return pack_bits(chars - ord("0"))
    raise ValueError(f"unknown format {fmt!r}")


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment, keys may use - or _."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("_", "-")] = value
    return out
