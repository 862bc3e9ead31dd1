"""Experiment harness: multi-run CSV output, aggregation, sweeps, runtime and FSC studies."""
from .aggregate import RaggedTraceError, aggregate_file, aggregate_rows, nearest_rank
from .experiment import ExperimentConfig, RunRecord, TruthOracle, default_checkpoints, run_experiment
from .fsc import fsc_compare
from .runtime import measure_iteration_runtime, median_near
from .sweep import sweep

__all__ = [
    "ExperimentConfig",
    "RaggedTraceError",
    "RunRecord",
    "TruthOracle",
    "aggregate_file",
    "aggregate_rows",
    "default_checkpoints",
    "fsc_compare",
    "measure_iteration_runtime",
    "median_near",
    "nearest_rank",
    "run_experiment",
    "sweep",
]
