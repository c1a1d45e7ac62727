"""Sequential change detection with a confusing change.

A library for quickest-change detection when the post-change
distribution can be either a bad change to detect or a confusing change
to ignore, with two-statistic CuSum detectors, Shiryaev-Roberts
companions, a scenario taxonomy driven by KL divergences, and a
reproducible Monte Carlo harness.
"""

from .distributions import (
    DensityModel,
    Gaussian,
    KlEstimate,
    KlMethod,
    Tabulated,
    keyed_rng,
    kl_divergence,
    log_likelihood_ratio,
    parse_density_spec,
)
from .statistics import CusumStat, SrStat, cusum_batch, cusum_update, drift, first_passage, sr_update
from .detectors import DetectorConfig, DetectorKind, DetectorState, run_to_alarm, step
from .theory import BoundSet, Scenario, ScenarioReport, bounds, calibrate_thresholds, classify, scenario_preset
from .harness import (
    ExperimentSummary,
    ObservationStream,
    Regime,
    RegimeKind,
    SummaryRow,
    TrialRecord,
    make_stream,
    run_experiment,
    run_trial,
    summarize,
    write_records_csv,
    write_summary_csv,
)

__version__ = "0.1.0"

__all__ = [
    "DensityModel",
    "Gaussian",
    "Tabulated",
    "KlEstimate",
    "KlMethod",
    "keyed_rng",
    "kl_divergence",
    "log_likelihood_ratio",
    "parse_density_spec",
    "CusumStat",
    "SrStat",
    "cusum_batch",
    "cusum_update",
    "drift",
    "first_passage",
    "sr_update",
    "DetectorConfig",
    "DetectorKind",
    "DetectorState",
    "run_to_alarm",
    "step",
    "BoundSet",
    "Scenario",
    "ScenarioReport",
    "bounds",
    "calibrate_thresholds",
    "classify",
    "scenario_preset",
    "ExperimentSummary",
    "ObservationStream",
    "Regime",
    "RegimeKind",
    "SummaryRow",
    "TrialRecord",
    "make_stream",
    "run_experiment",
    "run_trial",
    "summarize",
    "write_records_csv",
    "write_summary_csv",
    "__version__",
]
