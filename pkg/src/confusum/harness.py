"""Monte Carlo experiment engine.

Generates regime-conditioned observation streams, runs detectors to
alarm or censoring, and aggregates delay and run-length estimates with
reproducible seeding and CSV persistence.

Seeding: every trial's stream is keyed by (experiment seed, regime code,
change point, trial index, stream index) through a counter-based
generator, so trials are independent, order-independent, and identical
streams are shared across detectors and thresholds (paired comparisons).

Horizon policy: run-length regimes use ceil(50 * e^b) and the delay
regime uses ceil(200 * b / min_kl).  A censored run-length trial
substitutes its horizon as a conservative lower bound; censored delay
trials are excluded from delay means (and flagged when a whole cell is
censored).  Delay under a change at nu = 1 is recorded as the stopping
time itself: every consumed observation is post-change, and the
conditioning T >= nu is automatic.
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .detectors import DetectorConfig, DetectorKind, run_to_alarm
from .distributions import DensityModel, Gaussian, keyed_rng, kl_divergence
from .theory import classify

__all__ = [
    "RegimeKind",
    "Regime",
    "ObservationStream",
    "TrialRecord",
    "SummaryRow",
    "ExperimentSummary",
    "make_stream",
    "run_trial",
    "run_experiment",
    "summarize",
    "write_records_csv",
    "write_summary_csv",
    "RECORD_COLUMNS",
    "SUMMARY_COLUMNS",
    "DEFAULT_NU_GRID",
]

DEFAULT_NU_GRID = (1, 5, 10, 25, 50)

RECORD_COLUMNS = [
    "scenario",
    "detector",
    "b0",
    "bC",
    "regime",
    "nu",
    "trial",
    "stopping_time",
    "censored",
    "horizon",
    "seed",
]

SUMMARY_COLUMNS = [
    "scenario",
    "detector",
    "b",
    "mean_delay",
    "se_delay",
    "mean_rl_pre",
    "se_rl_pre",
    "mean_rl_confusing",
    "se_rl_confusing",
    "min_rl",
    "censored_pre",
    "censored_confusing",
    "trials",
]


class RegimeKind(Enum):
    PRE_CHANGE = "pre-change"
    BAD = "bad"
    CONFUSING = "confusing"


_REGIME_CODE = {RegimeKind.PRE_CHANGE: 0, RegimeKind.BAD: 1, RegimeKind.CONFUSING: 2}


@dataclass(frozen=True)
class Regime:
    """The data-generating regime of one trial.

    Observations at t < nu come from the pre-change model and at t >= nu
    from the regime's post-change model; the pre-change-forever regime
    has no change point (nu is None).
    """

    kind: RegimeKind
    nu: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind is RegimeKind.PRE_CHANGE:
            if self.nu is not None:
                raise ValueError("pre-change regime has no change point")
        else:
            if self.nu is None or self.nu < 1:
                raise ValueError(f"change point nu must be >= 1, got {self.nu}")

    @classmethod
    def pre_change(cls) -> "Regime":
        return cls(RegimeKind.PRE_CHANGE)

    @classmethod
    def bad(cls, nu: int = 1) -> "Regime":
        return cls(RegimeKind.BAD, nu)

    @classmethod
    def confusing(cls, nu: int = 1) -> "Regime":
        return cls(RegimeKind.CONFUSING, nu)


class ObservationStream:
    """Lazy observation source: pre-change draws before nu, post-change after.

    One standard-normal draw is consumed per observation regardless of
    chunking, so the served sequence depends only on the generator key,
    never on how it is read.  A stream is owned by exactly one consumer.
    """

    def __init__(
        self,
        pre: DensityModel,
        post: Optional[DensityModel],
        nu: Optional[int],
        rng: np.random.Generator,
    ) -> None:
        if not isinstance(pre, Gaussian):
            raise ValueError(f"model {pre.label!r} does not support sampling")
        if nu is not None and nu < 1:
            raise ValueError(f"change point nu must be >= 1, got {nu}")
        if nu is not None and post is None:
            raise ValueError("a change point requires a post-change model")
        if post is not None and not isinstance(post, Gaussian):
            raise ValueError(f"model {post.label!r} does not support sampling")
        self._pre = pre
        self._post = post
        self._nu = nu
        self._rng = rng
        self._t = 0

    def take(self, n: int) -> np.ndarray:
        """Serve the next n observations as a float array."""
        if n < 0:
            raise ValueError("n must be >= 0")
        z = self._rng.standard_normal(n)
        idx = np.arange(self._t + 1, self._t + n + 1)
        self._t += n
        if self._nu is None or self._post is None:
            return self._pre.mean + self._pre.std * z
        post_mask = idx >= self._nu
        out = np.where(
            post_mask,
            self._post.mean + self._post.std * z,
            self._pre.mean + self._pre.std * z,
        )
        return out

    def __iter__(self) -> Iterator[float]:
        while True:
            for x in self.take(256):
                yield float(x)


def make_stream(
    pre: DensityModel,
    post: Optional[DensityModel],
    nu: Optional[int],
    rng: np.random.Generator,
) -> ObservationStream:
    """Observation source with change point nu (None means no change ever)."""
    return ObservationStream(pre, post, nu, rng)


@dataclass(frozen=True)
class TrialRecord:
    """One Monte Carlo run of one detector under one regime."""

    scenario: str
    detector: DetectorKind
    b0: float
    bC: float
    regime: Regime
    trial: int
    stopping_time: Optional[int]
    censored: bool
    horizon: int
    seed: int

    def __post_init__(self) -> None:
        if self.censored != (self.stopping_time is None):
            raise ValueError("censored iff stopping_time is absent")
        if self.stopping_time is not None and self.stopping_time > self.horizon:
            raise ValueError("stopping_time cannot exceed the horizon")


def _trial_stream(
    config: DetectorConfig, regime: Regime, seed: int, trial: int
) -> ObservationStream:
    code = _REGIME_CODE[regime.kind]
    nu = regime.nu or 0
    rng = keyed_rng(seed, code, nu, trial, 0)
    post = {
        RegimeKind.PRE_CHANGE: None,
        RegimeKind.BAD: config.bad,
        RegimeKind.CONFUSING: config.confusing,
    }[regime.kind]
    return make_stream(config.pre_change, post, regime.nu, rng)


def run_trial(
    config: DetectorConfig,
    regime: Regime,
    horizon: int,
    seed: int,
    trial: int,
    scenario: str = "custom",
) -> TrialRecord:
    """Run one detector to alarm or censoring and record the outcome."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    stream = _trial_stream(config, regime, seed, trial)
    alarm, _state = run_to_alarm(config, stream, horizon)
    return TrialRecord(
        scenario=scenario,
        detector=config.kind,
        b0=config.b0,
        bC=config.bC,
        regime=regime,
        trial=trial,
        stopping_time=alarm,
        censored=alarm is None,
        horizon=horizon,
        seed=seed,
    )


def horizon_for(regime: Regime, b: float, min_kl: float) -> int:
    """Default horizon: ceil(50 e^b) for run-length regimes, ceil(200 b / min_kl) for delay."""
    if regime.kind is RegimeKind.BAD:
        return math.ceil(200.0 * b / min_kl)
    return math.ceil(50.0 * math.exp(b))


def _run_cell(args: tuple) -> list[TrialRecord]:
    config, regime, horizon, seed, trials, scenario = args
    return [
        run_trial(config, regime, horizon, seed, trial, scenario) for trial in range(trials)
    ]


def run_experiment(
    pre: DensityModel,
    confusing: DensityModel,
    bad: DensityModel,
    detectors: Sequence[DetectorKind],
    thresholds: Sequence[float],
    trials: int,
    seed: int,
    scenario: str | None = None,
    regimes: Sequence[RegimeKind] | None = None,
    nu_grid: Sequence[int] | None = None,
    horizon_rl: int | None = None,
    horizon_delay: int | None = None,
    workers: int = 1,
) -> tuple[list[TrialRecord], "ExperimentSummary"]:
    """Run the full (detector, threshold, regime) grid of Monte Carlo cells.

    Every cell runs ``trials`` trials with b0 = bC = b.  The confusing
    regime runs at nu = 1 by default, or over ``nu_grid`` when given (a
    heuristic probe of the infimum over change points, not the exact
    infimum).  Horizon overrides replace the policy values.
    """
    if not detectors:
        raise ValueError("at least one detector required")
    if not thresholds:
        raise ValueError("at least one threshold required")
    if any(b <= 0 for b in thresholds):
        raise ValueError("thresholds must be > 0")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if scenario is None:
        scenario = str(int(classify(pre, confusing, bad).scenario))
    regime_kinds = list(regimes) if regimes is not None else [
        RegimeKind.BAD,
        RegimeKind.PRE_CHANGE,
        RegimeKind.CONFUSING,
    ]
    nus = sorted(nu_grid) if nu_grid else [1]
    regime_instances: list[Regime] = []
    for kind in regime_kinds:
        if kind is RegimeKind.PRE_CHANGE:
            regime_instances.append(Regime.pre_change())
        elif kind is RegimeKind.BAD:
            regime_instances.append(Regime.bad(1))
        else:
            regime_instances.extend(Regime.confusing(nu) for nu in nus)

    min_kl = min(kl_divergence(bad, pre).value, kl_divergence(bad, confusing).value)
    cells = []
    for det in detectors:
        for b in thresholds:
            config = DetectorConfig(det, pre, confusing, bad, b0=b, bC=b)
            for regime in regime_instances:
                if regime.kind is RegimeKind.BAD:
                    horizon = horizon_delay or horizon_for(regime, b, min_kl)
                else:
                    horizon = horizon_rl or horizon_for(regime, b, min_kl)
                cells.append((config, regime, horizon, seed, trials, scenario))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_cell = list(pool.map(_run_cell, cells, chunksize=1))
    else:
        per_cell = [_run_cell(cell) for cell in cells]
    records = [record for cell_records in per_cell for record in cell_records]
    return records, summarize(records)


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


@dataclass(frozen=True)
class SummaryRow:
    """Aggregates for one (detector, threshold) cell group."""

    scenario: str
    detector: DetectorKind
    b: float
    mean_delay: float
    se_delay: float
    mean_rl_pre: float
    se_rl_pre: float
    mean_rl_confusing: float
    se_rl_confusing: float
    min_rl: float
    censored_pre: int
    censored_confusing: int
    trials: int


@dataclass(frozen=True)
class ExperimentSummary:
    """Summary rows for one scenario, one row per (detector, threshold)."""

    scenario: str
    rows: tuple[SummaryRow, ...]


def summarize(records: Sequence[TrialRecord]) -> ExperimentSummary:
    """Aggregate trial records into per-(detector, threshold) summary rows.

    Delay means use uncensored bad-regime trials (a fully censored delay
    cell is flagged with a warning and reported as NaN).  Run-length
    means substitute the horizon for censored trials, making them
    conservative lower-bound estimates.  With a nu grid, the confusing
    run length is the minimum of the per-nu means.  Aggregation is a pure
    fold: record order never affects the result.
    """
    if not records:
        raise ValueError("record set must be nonempty")
    scenarios = {r.scenario for r in records}
    if len(scenarios) > 1:
        raise ValueError(f"mixed-configuration record set: scenarios {sorted(scenarios)}")
    if any(r.b0 != r.bC for r in records):
        raise ValueError("mixed-configuration record set: b0 != bC")
    scenario = next(iter(scenarios))

    groups: dict[tuple[str, float], list[TrialRecord]] = {}
    order: list[tuple[str, float]] = []
    for r in records:
        key = (r.detector.value, r.b0)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)

    rows = []
    for det_value, b in order:
        group = groups[(det_value, b)]
        detector = DetectorKind(det_value)
        by_kind: dict[RegimeKind, list[TrialRecord]] = {}
        for r in group:
            by_kind.setdefault(r.regime.kind, []).append(r)

        bad_recs = by_kind.get(RegimeKind.BAD, [])
        delays = [float(r.stopping_time) for r in bad_recs if not r.censored]
        if bad_recs and not delays:
            warnings.warn(
                f"all {len(bad_recs)} delay trials censored for {det_value} at b={b:g}",
                stacklevel=2,
            )
        mean_delay, se_delay = _mean_se(delays)

        pre_recs = by_kind.get(RegimeKind.PRE_CHANGE, [])
        pre_values = [float(r.stopping_time) if not r.censored else float(r.horizon) for r in pre_recs]
        mean_rl_pre, se_rl_pre = _mean_se(pre_values)
        censored_pre = sum(r.censored for r in pre_recs)

        conf_recs = by_kind.get(RegimeKind.CONFUSING, [])
        by_nu: dict[int, list[float]] = {}
        for r in conf_recs:
            value = float(r.stopping_time) if not r.censored else float(r.horizon)
            by_nu.setdefault(r.regime.nu or 1, []).append(value)
        if by_nu:
            per_nu = {nu: _mean_se(vals) for nu, vals in by_nu.items()}
            # ties on the mean (e.g. two fully censored change points)
            # break on nu so record order cannot leak into the summary
            worst_nu = min(per_nu, key=lambda nu: (per_nu[nu][0], nu))
            mean_rl_confusing, se_rl_confusing = per_nu[worst_nu]
        else:
            mean_rl_confusing, se_rl_confusing = math.nan, math.nan
        censored_confusing = sum(r.censored for r in conf_recs)

        rl_means = [m for m in (mean_rl_pre, mean_rl_confusing) if not math.isnan(m)]
        min_rl = min(rl_means) if rl_means else math.nan

        # Trials per cell, where a cell is one (regime, change point) pair;
        # a change-point grid multiplies records but not the per-cell count.
        cell_sizes: dict[tuple[RegimeKind, Optional[int]], int] = {}
        for r in group:
            key = (r.regime.kind, r.regime.nu)
            cell_sizes[key] = cell_sizes.get(key, 0) + 1
        trials = max(cell_sizes.values())

        rows.append(
            SummaryRow(
                scenario=scenario,
                detector=detector,
                b=b,
                mean_delay=mean_delay,
                se_delay=se_delay,
                mean_rl_pre=mean_rl_pre,
                se_rl_pre=se_rl_pre,
                mean_rl_confusing=mean_rl_confusing,
                se_rl_confusing=se_rl_confusing,
                min_rl=min_rl,
                censored_pre=censored_pre,
                censored_confusing=censored_confusing,
                trials=trials,
            )
        )
    rows.sort(key=lambda row: (row.detector.value, row.b))
    return ExperimentSummary(scenario=scenario, rows=tuple(rows))


def _fmt(x: float | int | None) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return f"{x:.6g}"
    return str(x)


def write_records_csv(records: Sequence[TrialRecord], path: str) -> None:
    """Write trial records with the fixed column order (floats at 6 significant digits)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.scenario,
                    r.detector.value,
                    _fmt(r.b0),
                    _fmt(r.bC),
                    r.regime.kind.value,
                    _fmt(r.regime.nu),
                    r.trial,
                    _fmt(r.stopping_time),
                    int(r.censored),
                    r.horizon,
                    r.seed,
                ]
            )


def write_summary_csv(summary: ExperimentSummary, path: str) -> None:
    """Write summary rows with the fixed column order (floats at 6 significant digits)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in summary.rows:
            writer.writerow(
                [
                    row.scenario,
                    row.detector.value,
                    _fmt(row.b),
                    _fmt(row.mean_delay),
                    _fmt(row.se_delay),
                    _fmt(row.mean_rl_pre),
                    _fmt(row.se_rl_pre),
                    _fmt(row.mean_rl_confusing),
                    _fmt(row.se_rl_confusing),
                    _fmt(row.min_rl),
                    row.censored_pre,
                    row.censored_confusing,
                    row.trials,
                ]
            )
