"""Scenario classification, threshold calibration, and closed-form bounds.

Problem instances (pre-change, confusing, bad) fall into three scenarios
according to the drift signs of the two CuSum statistics:

* Scenario 1: the W statistic (bad vs pre-change) has zero or negative
  drift under the confusing model, so the plain ``cusum-w`` detector
  already ignores confusing changes.
* Scenario 2: W drifts upward under the confusing model, but the Lambda
  statistic (bad vs confusing) has zero or negative drift under the
  pre-change model, so plain ``cusum-lambda`` suffices.
* Scenario 3: both drifts are positive; every single-statistic detector
  raises false alarms quickly, and the two-statistic detectors are
  required.

Bound values are asymptotic leading terms with the (1 +/- o(1)) factors
dropped; overlays should label them "asymptotic".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from .distributions import DensityModel, Gaussian, KlEstimate, kl_divergence

__all__ = [
    "Scenario",
    "ScenarioReport",
    "BoundSet",
    "classify",
    "calibrate_thresholds",
    "bounds",
    "scenario_preset",
    "PRESETS",
]


class Scenario(IntEnum):
    S1 = 1
    S2 = 2
    S3 = 3


@dataclass(frozen=True)
class ScenarioReport:
    """Six pairwise KL divergences, the two decisive drifts, and the label."""

    kl_pre_confusing: KlEstimate
    kl_pre_bad: KlEstimate
    kl_confusing_pre: KlEstimate
    kl_confusing_bad: KlEstimate
    kl_bad_pre: KlEstimate
    kl_bad_confusing: KlEstimate
    drift_w_under_confusing: float
    drift_lam_under_pre: float
    scenario: Scenario

    def to_dict(self) -> dict:
        return {
            "scenario": int(self.scenario),
            "kl": {
                "pre||confusing": self.kl_pre_confusing.value,
                "pre||bad": self.kl_pre_bad.value,
                "confusing||pre": self.kl_confusing_pre.value,
                "confusing||bad": self.kl_confusing_bad.value,
                "bad||pre": self.kl_bad_pre.value,
                "bad||confusing": self.kl_bad_confusing.value,
            },
            "drift_w_under_confusing": self.drift_w_under_confusing,
            "drift_lam_under_pre": self.drift_lam_under_pre,
        }


@dataclass(frozen=True)
class BoundSet:
    """Asymptotic delay bounds at false-alarm target gamma (nats-based).

    ``universal_lower`` holds for any procedure meeting the run-length
    requirement; ``s_upper`` and ``j_upper`` are the two-statistic
    detectors' delay upper bounds.  The lower bound never exceeds the
    upper bounds.
    """

    gamma: float
    universal_lower: float
    s_upper: float
    j_upper: float


def classify(pre: DensityModel, confusing: DensityModel, bad: DensityModel) -> ScenarioReport:
    """Classify a problem instance into Scenario 1, 2, or 3.

    Drift ties (exactly zero) classify into the zero-or-negative branch.

    Raises:
        ValueError: If any two of the models are identical.
    """
    if pre == confusing or pre == bad or confusing == bad:
        raise ValueError("models must be pairwise distinct")
    kl_pre_confusing = kl_divergence(pre, confusing)
    kl_pre_bad = kl_divergence(pre, bad)
    kl_confusing_pre = kl_divergence(confusing, pre)
    kl_confusing_bad = kl_divergence(confusing, bad)
    kl_bad_pre = kl_divergence(bad, pre)
    kl_bad_confusing = kl_divergence(bad, confusing)
    drift_w_under_confusing = -kl_confusing_bad.value + kl_confusing_pre.value
    drift_lam_under_pre = -kl_pre_bad.value + kl_pre_confusing.value
    if drift_w_under_confusing <= 0:
        scenario = Scenario.S1
    elif drift_lam_under_pre <= 0:
        scenario = Scenario.S2
    else:
        scenario = Scenario.S3
    return ScenarioReport(
        kl_pre_confusing=kl_pre_confusing,
        kl_pre_bad=kl_pre_bad,
        kl_confusing_pre=kl_confusing_pre,
        kl_confusing_bad=kl_confusing_bad,
        kl_bad_pre=kl_bad_pre,
        kl_bad_confusing=kl_bad_confusing,
        drift_w_under_confusing=drift_w_under_confusing,
        drift_lam_under_pre=drift_lam_under_pre,
        scenario=scenario,
    )


def calibrate_thresholds(
    gamma: float,
    mode: str = "equal",
    pre: DensityModel | None = None,
    confusing: DensityModel | None = None,
    bad: DensityModel | None = None,
) -> tuple[float, float]:
    """Thresholds (b0, bC) meeting the run-length target gamma.

    The default "equal" mode returns b0 = bC = log(gamma).  The
    "kl-proportional" mode scales log(gamma) by each statistic's KL
    divergence relative to the smaller of the two, which equalizes the
    two passage phases; when the KLs are equal the modes coincide.

    Raises:
        ValueError: If gamma <= 1, the mode is unknown, or the
            kl-proportional mode is requested without the three models.
    """
    if gamma <= 1:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    log_gamma = math.log(gamma)
    if mode == "equal":
        return log_gamma, log_gamma
    if mode == "kl-proportional":
        if pre is None or confusing is None or bad is None:
            raise ValueError("kl-proportional mode requires the three models")
        d_bad_pre = kl_divergence(bad, pre).value
        d_bad_confusing = kl_divergence(bad, confusing).value
        min_kl = min(d_bad_pre, d_bad_confusing)
        if min_kl <= 0:
            raise ValueError("kl-proportional mode requires pairwise distinct models")
        return log_gamma * d_bad_pre / min_kl, log_gamma * d_bad_confusing / min_kl
    raise ValueError(f"unknown mode {mode!r}; expected 'equal' or 'kl-proportional'")


def bounds(
    gamma: float, pre: DensityModel, confusing: DensityModel, bad: DensityModel
) -> BoundSet:
    """Asymptotic delay bounds at false-alarm target gamma.

    universal_lower = log(gamma) / min{D(bad||pre), D(bad||confusing)};
    s_upper = j_upper = log(gamma)/D(bad||pre) + log(gamma)/D(bad||confusing).
    """
    if gamma <= 1:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    if pre == confusing or pre == bad or confusing == bad:
        raise ValueError("models must be pairwise distinct")
    log_gamma = math.log(gamma)
    d_bad_pre = kl_divergence(bad, pre).value
    d_bad_confusing = kl_divergence(bad, confusing).value
    universal_lower = log_gamma / min(d_bad_pre, d_bad_confusing)
    upper = log_gamma / d_bad_pre + log_gamma / d_bad_confusing
    return BoundSet(gamma=gamma, universal_lower=universal_lower, s_upper=upper, j_upper=upper)


PRESETS: dict[int, tuple[Gaussian, Gaussian, Gaussian]] = {
    1: (Gaussian(0.0, 1.0), Gaussian(-0.5, 1.0), Gaussian(0.5, 1.0)),
    2: (Gaussian(0.0, 1.0), Gaussian(0.7, 1.0), Gaussian(1.2, 1.0)),
    3: (Gaussian(0.0, 1.0), Gaussian(1.0, 1.0), Gaussian(0.5, 1.0)),
}


def scenario_preset(which: int) -> tuple[Gaussian, Gaussian, Gaussian]:
    """The standard Gaussian triple (pre, confusing, bad) for scenario 1, 2, or 3."""
    try:
        return PRESETS[which]
    except KeyError:
        raise ValueError(f"unknown scenario preset {which}; expected 1, 2, or 3") from None
