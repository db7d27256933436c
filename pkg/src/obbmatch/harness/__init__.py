"""Desk-scale experiment harness: ingestion, synthetic scenes, stats, CLI."""

from .annotations import GroundTruth, ParseResult, Scene, parse_annotations
from .bench import BenchReport, run_benchmark
from .experiment import STRATEGIES, run_experiment
from .oracle import mc_iou_oracle
from .stats import Histogram, ScatterSummary, StatsReport, emit_report, load_report
from .synthetic import CorpusParams, RegressorParams, synthetic_regressor, synthetic_scenes

__all__ = [
    "BenchReport",
    "CorpusParams",
    "GroundTruth",
    "Histogram",
    "ParseResult",
    "RegressorParams",
    "STRATEGIES",
    "ScatterSummary",
    "Scene",
    "StatsReport",
    "emit_report",
    "load_report",
    "mc_iou_oracle",
    "parse_annotations",
    "run_benchmark",
    "run_experiment",
    "synthetic_regressor",
    "synthetic_scenes",
]
