"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Every tolerance and time budget is pinned here; nothing is deferred
to later calibration.
"""

from __future__ import annotations

import csv
import math
import subprocess
import sys
from contextlib import contextmanager
from time import perf_counter

import numpy as np
import pytest

from confusum.detectors import DetectorKind
from confusum.distributions import Gaussian, keyed_rng, log_likelihood_ratio
from confusum.harness import RegimeKind, run_experiment
from confusum.statistics import CusumStat, cusum_update, drift
from confusum.theory import Scenario, classify, scenario_preset

S_CUSUM = DetectorKind.S_CUSUM
J_CUSUM = DetectorKind.J_CUSUM
CUSUM_W = DetectorKind.CUSUM_W
CUSUM_LAMBDA = DetectorKind.CUSUM_LAMBDA


@contextmanager
def criterion(name: str, limit_seconds: float):
    start = perf_counter()
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL ({perf_counter() - start:.2f}s)")
        raise
    elapsed = perf_counter() - start
    assert elapsed < limit_seconds, f"{name}: {elapsed:.2f}s exceeded the {limit_seconds}s budget"
    print(f"[acceptance] {name}: PASS ({elapsed:.2f}s, budget {limit_seconds:g}s)")


def summary_row(summary, detector: DetectorKind, b: float):
    for row in summary.rows:
        if row.detector is detector and row.b == b:
            return row
    raise AssertionError(f"no summary row for {detector.value} at b={b}")


def test_scenario_classification() -> None:
    classify(*scenario_preset(1))  # warm-up outside the timed region
    with criterion("scenario classification", limit_seconds=1.0):
        timings = []
        for which in (1, 2, 3):
            models = scenario_preset(which)
            start = perf_counter()
            report = classify(*models)
            timings.append(perf_counter() - start)
            assert report.scenario == Scenario(which)
        assert min(timings) < 1e-3, f"classification took {min(timings) * 1e3:.3f} ms"


def test_drift_sign_table() -> None:
    # Expected analytic drifts of the two statistics under each model,
    # per preset: (W under pre, confusing, bad), (Lambda under same).
    expected = {
        1: ((-0.125, -0.375, 0.125), (0.0, -0.5, 0.5)),
        2: ((-0.72, 0.12, 0.72), (-0.475, -0.125, 0.125)),
        3: ((-0.125, 0.375, 0.125), (0.375, -0.125, 0.125)),
    }
    with criterion("drift signs match the analytic table", limit_seconds=5.0):
        for which, (w_row, lam_row) in expected.items():
            pre, confusing, bad = scenario_preset(which)
            pairs = [((bad, pre), w_row), ((bad, confusing), lam_row)]
            for pair_index, ((num, den), row) in enumerate(pairs):
                for under_index, (under, expected_value) in enumerate(zip((pre, confusing, bad), row)):
                    analytic = drift(num, den, under=under)
                    assert analytic == pytest.approx(expected_value, abs=1e-12)
                    draws = under.mean + under.std * keyed_rng(
                        101, which, pair_index, under_index
                    ).standard_normal(100_000)
                    values = np.asarray(log_likelihood_ratio(num, den, draws))
                    mc_mean = float(values.mean())
                    mc_se = float(values.std(ddof=1) / math.sqrt(values.size))
                    if expected_value == 0.0:
                        assert abs(mc_mean) < 4 * mc_se
                    else:
                        assert math.copysign(1, mc_mean) == math.copysign(1, expected_value)


def test_recursion_batch_equivalence() -> None:
    rng = keyed_rng(103)
    num, den = Gaussian(0.5, 1), Gaussian(0, 1)
    with criterion("recursive/batch equivalence at every prefix", limit_seconds=5.0):
        for _ in range(1000):
            n = int(rng.integers(1, 513))
            incs = rng.normal(size=n)
            prefix_sums = np.concatenate([[0.0], np.cumsum(incs)])
            stat = CusumStat(numerator=num, denominator=den)
            for t in range(1, n + 1):
                stat = cusum_update(stat, float(incs[t - 1]))
                # enumerated suffix sums: S[t] - S[k-1] over all k <= t
                batch = float((prefix_sums[t] - prefix_sums[:t]).max())
                assert abs(stat.value - max(0.0, batch)) <= 1e-9


def test_shiryaev_roberts_martingale() -> None:
    trials, n = 10_000, 50
    with criterion("Shiryaev-Roberts martingale mean", limit_seconds=30.0):
        rng = keyed_rng(107)
        x = rng.standard_normal((trials, n))
        ratios = np.exp(0.5 * x - 0.125)  # bad N(0.5,1) over pre N(0,1), under pre
        r = np.zeros(trials)
        for t in range(n):
            r = (1.0 + r) * ratios[:, t]
        deviations = r - n
        se = float(deviations.std(ddof=1) / math.sqrt(trials))
        assert abs(float(deviations.mean())) < 4 * se


def test_false_alarm_lower_bounds() -> None:
    with criterion("run-length lower bounds for s-cusum and j-cusum", limit_seconds=300.0):
        for which in (1, 2, 3):
            pre, confusing, bad = scenario_preset(which)
            _, summary = run_experiment(
                pre,
                confusing,
                bad,
                detectors=[S_CUSUM, J_CUSUM],
                thresholds=[2.0, 3.0, 4.0],
                trials=200,
                seed=109,
                scenario=str(which),
                regimes=[RegimeKind.PRE_CHANGE, RegimeKind.CONFUSING],
            )
            for detector in (S_CUSUM, J_CUSUM):
                for b in (2.0, 3.0, 4.0):
                    row = summary_row(summary, detector, b)
                    floor = 0.8 * math.exp(b)
                    assert row.mean_rl_pre >= floor, (
                        f"scenario {which} {detector.value} b={b}: "
                        f"pre-change run length {row.mean_rl_pre:.1f} < {floor:.1f}"
                    )
                    assert row.mean_rl_confusing >= floor, (
                        f"scenario {which} {detector.value} b={b}: "
                        f"confusing run length {row.mean_rl_confusing:.1f} < {floor:.1f}"
                    )


def test_delay_scaling_slope() -> None:
    bs = [2.0, 3.0, 4.0, 5.0]
    with criterion("delay growth slope within the theorem window", limit_seconds=300.0):
        pre, confusing, bad = scenario_preset(3)
        _, summary = run_experiment(
            pre,
            confusing,
            bad,
            detectors=[S_CUSUM, J_CUSUM],
            thresholds=bs,
            trials=400,
            seed=113,
            scenario="3",
            regimes=[RegimeKind.BAD],
        )
        for detector in (S_CUSUM, J_CUSUM):
            delays = [summary_row(summary, detector, b).mean_delay for b in bs]
            slope = float(np.polyfit(bs, delays, 1)[0])
            # 1.2 * (1/0.125 + 1/0.125) = 19.2 and 0.5 * (1/0.125) = 4.0
            assert 4.0 <= slope <= 19.2, f"{detector.value} slope {slope:.2f}"


def test_baseline_fails_in_scenario_three() -> None:
    with criterion("cusum-w false-alarms quickly under the confusing change", limit_seconds=30.0):
        pre, confusing, bad = scenario_preset(3)
        _, summary = run_experiment(
            pre,
            confusing,
            bad,
            detectors=[CUSUM_W],
            thresholds=[4.0],
            trials=200,
            seed=127,
            scenario="3",
            regimes=[RegimeKind.CONFUSING],
        )
        row = summary_row(summary, CUSUM_W, 4.0)
        assert row.mean_rl_confusing < math.exp(4.0), (
            f"confusing run length {row.mean_rl_confusing:.1f} is not below e^4"
        )


def test_j_cusum_beats_s_cusum() -> None:
    with criterion("j-cusum mean delay at most s-cusum on shared seeds", limit_seconds=60.0):
        for which in (1, 2, 3):
            pre, confusing, bad = scenario_preset(which)
            _, summary = run_experiment(
                pre,
                confusing,
                bad,
                detectors=[S_CUSUM, J_CUSUM],
                thresholds=[3.0],
                trials=400,
                seed=131,
                scenario=str(which),
                regimes=[RegimeKind.BAD],
            )
            s_delay = summary_row(summary, S_CUSUM, 3.0).mean_delay
            j_delay = summary_row(summary, J_CUSUM, 3.0).mean_delay
            assert j_delay <= s_delay, f"scenario {which}: J {j_delay:.2f} > S {s_delay:.2f}"


def read_summary(path) -> list[dict]:
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for key in ("b", "mean_delay", "min_rl"):
            row[key] = float(row[key]) if row[key] else math.nan
    return rows


def pick(rows: list[dict], detector: str, b: float) -> dict:
    for row in rows:
        if row["detector"] == detector and row["b"] == b:
            return row
    raise AssertionError(f"missing row {detector} b={b}")


def test_full_replication(tmp_path) -> None:
    with criterion("full replication run and qualitative ordering", limit_seconds=600.0):
        result = subprocess.run(
            [
                sys.executable,
                "-m",
                "confusum",
                "replicate",
                "all",
                "--trials",
                "60",
                "--seed",
                "1",
                "--out-dir",
                str(tmp_path),
            ],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stderr
        b_grid = [1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
        for which in (1, 2, 3):
            rows = read_summary(tmp_path / f"summary-scenario{which}.csv")
            assert len(rows) == 4 * 6
            # The proposed detectors grow delay linearly in b (straight
            # lines against the log run-length axis).
            for detector in ("s-cusum", "j-cusum"):
                delays = [pick(rows, detector, b)["mean_delay"] for b in b_grid]
                corr = float(np.corrcoef(b_grid, delays)[0, 1])
                assert corr > 0.9, f"scenario {which} {detector}: corr {corr:.3f}"
                assert delays[-1] > delays[0]
            s_rl = pick(rows, "s-cusum", 4.0)["min_rl"]
            j_rl = pick(rows, "j-cusum", 4.0)["min_rl"]
            w_rl = pick(rows, "cusum-w", 4.0)["min_rl"]
            lam_rl = pick(rows, "cusum-lambda", 4.0)["min_rl"]
            if which == 1:
                # cusum-w survives scenario 1; cusum-lambda does not.
                assert w_rl >= 0.8 * math.exp(4.0)
                assert lam_rl < 0.5 * s_rl
            elif which == 2:
                assert lam_rl >= 0.8 * math.exp(4.0)
                assert w_rl < 0.5 * s_rl
            else:
                # Neither single statistic achieves the run length the
                # two-statistic detectors reach.
                assert w_rl < math.exp(4.0) and lam_rl < math.exp(4.0)
                assert w_rl < 0.5 * s_rl and lam_rl < 0.5 * j_rl
