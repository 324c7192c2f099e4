"""Simulation of a photon-number-detection true random number generator.

Weak laser pulses (Poissonian photon numbers) are detected by a gated
single-photon detector; pairs of detection outcomes are turned into bits by
von Neumann pair coding, and the output is checked by a small statistical
battery.
"""
from .detector import DetectorConfig, DetectorState, GateRecord, GateRecords, click_rate, detect_gate, run_gates
from .extractor import BitStream, ExtractionStats, extract_from_gates, pack_bits, unpack_bits, von_neumann_extract
from .pipeline import RunConfig, RunResult, simulate, sweep
from .source import RandomStream, SourceConfig, generate_pulses, sample_photon_number
from .theory import bit_probability, efficiency_curve, extraction_efficiency, optimal_mu, poisson_pmf

__version__ = "0.1.0"

__all__ = [
    "BitStream",
    "DetectorConfig",
    "DetectorState",
    "ExtractionStats",
    "GateRecord",
    "GateRecords",
    "RandomStream",
    "RunConfig",
    "RunResult",
    "SourceConfig",
    "bit_probability",
    "click_rate",
    "detect_gate",
    "efficiency_curve",
    "extract_from_gates",
    "extraction_efficiency",
    "generate_pulses",
    "optimal_mu",
    "pack_bits",
    "poisson_pmf",
    "run_gates",
    "sample_photon_number",
    "simulate",
    "sweep",
    "unpack_bits",
    "von_neumann_extract",
]
