"""Streaming detector state machines.

Four detectors share one state machine, each consuming one observation
per step and reporting an alarm time:

* ``cusum-w``: plain CuSum of bad-versus-pre-change log ratios against
  threshold b0.
* ``cusum-lambda``: plain CuSum of bad-versus-confusing log ratios
  against threshold bC.
* ``s-cusum`` (successive): runs the W statistic first and freezes it at
  b0; only then does the Lambda statistic start accumulating, and the
  alarm fires at the first step where it reaches bC.  Pathwise the alarm
  time decomposes into the two first-passage times run back to back.
* ``j-cusum`` (joint): both statistics update concurrently, each frozen
  once it reaches its threshold; whenever the W statistic hits zero
  (before freezing) the Lambda statistic is reset to zero, which keeps it
  from drifting up during a long pre-change stretch.  The alarm fires at
  the first step where both statistics are at or above their thresholds.

Within one step the order is: W update, Lambda update, alarm check,
reset check.  Threshold crossings are inclusive (value >= threshold).

``step`` is the reference single-observation transition; ``run_to_alarm``
runs the same semantics over a stream with vectorized increment
computation and is the path the Monte Carlo harness uses.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .distributions import DensityModel, log_likelihood_ratio
from .statistics import _as_chunks

__all__ = [
    "DetectorKind",
    "DetectorConfig",
    "DetectorState",
    "step",
    "run_to_alarm",
]

_CHUNK = 512


class DetectorKind(Enum):
    """The four detector flavors; values are the serialized names used in
    CLI flags and CSV output."""

    CUSUM_W = "cusum-w"
    CUSUM_LAMBDA = "cusum-lambda"
    S_CUSUM = "s-cusum"
    J_CUSUM = "j-cusum"


@dataclass(frozen=True)
class DetectorConfig:
    """Immutable detector configuration.

    The three models must be pairwise distinct and both thresholds
    strictly positive.  Baselines use only their single relevant
    threshold (b0 for cusum-w, bC for cusum-lambda) but carry both.
    """

    kind: DetectorKind
    pre_change: DensityModel
    confusing: DensityModel
    bad: DensityModel
    b0: float
    bC: float

    def __post_init__(self) -> None:
        if self.b0 <= 0 or self.bC <= 0:
            raise ValueError(f"thresholds must be > 0, got b0={self.b0}, bC={self.bC}")
        pairs = [
            ("pre_change", "confusing", self.pre_change, self.confusing),
            ("pre_change", "bad", self.pre_change, self.bad),
            ("confusing", "bad", self.confusing, self.bad),
        ]
        for name_a, name_b, a, b in pairs:
            if a == b:
                raise ValueError(f"models must be pairwise distinct; {name_a} equals {name_b}")


@dataclass(frozen=True)
class DetectorState:
    """Per-detector running state.

    Invariants: both statistics are >= 0; a frozen statistic is at or
    above its threshold and never changes again (except that a J-CuSum
    reset, reachable only while W is unfrozen and at zero, clears the
    Lambda statistic and its freeze flag); once ``alarm_time`` is set no
    field changes.
    """

    t: int = 0
    w_stat: float = 0.0
    lam_stat: float = 0.0
    w_frozen: bool = False
    lam_frozen: bool = False
    alarm_time: Optional[int] = None


def step(state: DetectorState, config: DetectorConfig, x: float) -> DetectorState:
    """Advance the detector by one observation.

    Raises:
        ValueError: If the detector has already alarmed.
    """
    if state.alarm_time is not None:
        raise ValueError("detector has alarmed; stepping a stopped detector is rejected")
    t = state.t + 1
    kind = config.kind

    if kind is DetectorKind.CUSUM_W:
        w = max(0.0, state.w_stat + log_likelihood_ratio(config.bad, config.pre_change, x))
        alarmed = w >= config.b0
        return replace(
            state, t=t, w_stat=w, w_frozen=alarmed, alarm_time=t if alarmed else None
        )

    if kind is DetectorKind.CUSUM_LAMBDA:
        lam = max(0.0, state.lam_stat + log_likelihood_ratio(config.bad, config.confusing, x))
        alarmed = lam >= config.bC
        return replace(
            state, t=t, lam_stat=lam, lam_frozen=alarmed, alarm_time=t if alarmed else None
        )

    if kind is DetectorKind.S_CUSUM:
        if not state.w_frozen:
            w = max(0.0, state.w_stat + log_likelihood_ratio(config.bad, config.pre_change, x))
            return replace(state, t=t, w_stat=w, w_frozen=w >= config.b0)
        lam = max(0.0, state.lam_stat + log_likelihood_ratio(config.bad, config.confusing, x))
        alarmed = lam >= config.bC
        return replace(
            state, t=t, lam_stat=lam, lam_frozen=alarmed, alarm_time=t if alarmed else None
        )

    # J-CuSum
    w, w_frozen = state.w_stat, state.w_frozen
    lam, lam_frozen = state.lam_stat, state.lam_frozen
    if not w_frozen:
        w = max(0.0, w + log_likelihood_ratio(config.bad, config.pre_change, x))
        w_frozen = w >= config.b0
    if not lam_frozen:
        lam = max(0.0, lam + log_likelihood_ratio(config.bad, config.confusing, x))
        lam_frozen = lam >= config.bC
    alarm_time = None
    if w_frozen and lam_frozen:
        alarm_time = t
    elif w == 0.0 and not w_frozen:
        lam, lam_frozen = 0.0, False
    return replace(
        state,
        t=t,
        w_stat=w,
        lam_stat=lam,
        w_frozen=w_frozen,
        lam_frozen=lam_frozen,
        alarm_time=alarm_time,
    )


def run_to_alarm(
    config: DetectorConfig, stream: Iterable[float], horizon: int
) -> tuple[Optional[int], DetectorState]:
    """Run the detector over a stream until it alarms or the horizon is hit.

    Returns the alarm time (None when censored, i.e. no alarm within the
    horizon) together with the final state.  Increments are computed
    vectorized per chunk; the per-step logic matches ``step``, with
    statistic values agreeing to floating-point rounding (vectorized
    versus scalar evaluation of the log ratios).
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    kind = config.kind
    b0, bC = config.b0, config.bC
    t = 0
    w = lam = 0.0
    w_frozen = lam_frozen = False
    alarm: Optional[int] = None

    for xs in _as_chunks(stream, horizon, _CHUNK):
        ld_bad = np.asarray(config.bad.log_density(xs), dtype=float)
        if kind is DetectorKind.CUSUM_LAMBDA:
            w_incs: list[float] = []
        else:
            w_incs = (ld_bad - np.asarray(config.pre_change.log_density(xs), dtype=float)).tolist()
        if kind is DetectorKind.CUSUM_W:
            lam_incs: list[float] = []
        else:
            lam_incs = (ld_bad - np.asarray(config.confusing.log_density(xs), dtype=float)).tolist()

        if kind is DetectorKind.CUSUM_W:
            for inc in w_incs:
                t += 1
                w = max(0.0, w + inc)
                if w >= b0:
                    w_frozen = True
                    alarm = t
                    break
        elif kind is DetectorKind.CUSUM_LAMBDA:
            for inc in lam_incs:
                t += 1
                lam = max(0.0, lam + inc)
                if lam >= bC:
                    lam_frozen = True
                    alarm = t
                    break
        elif kind is DetectorKind.S_CUSUM:
            for i in range(len(w_incs)):
                t += 1
                if not w_frozen:
                    w = max(0.0, w + w_incs[i])
                    if w >= b0:
                        w_frozen = True
                else:
                    lam = max(0.0, lam + lam_incs[i])
                    if lam >= bC:
                        lam_frozen = True
                        alarm = t
                        break
        else:
            for i in range(len(w_incs)):
                t += 1
                if not w_frozen:
                    w = max(0.0, w + w_incs[i])
                    if w >= b0:
                        w_frozen = True
                if not lam_frozen:
                    lam = max(0.0, lam + lam_incs[i])
                    if lam >= bC:
                        lam_frozen = True
                if w_frozen and lam_frozen:
                    alarm = t
                    break
                if w == 0.0 and not w_frozen:
                    lam, lam_frozen = 0.0, False
        if alarm is not None:
            break

    state = DetectorState(
        t=t,
        w_stat=w,
        lam_stat=lam,
        w_frozen=w_frozen,
        lam_frozen=lam_frozen,
        alarm_time=alarm,
    )
    return alarm, state
