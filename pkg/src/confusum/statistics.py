"""Recursive statistic kernels: CuSum first-passage statistics and
Shiryaev-Roberts companions.

A CuSum statistic over a numerator/denominator density pair is the
running maximum of suffix sums of log-likelihood ratios,

    max over k <= t of  sum_{i=k..t} log(num(X_i) / den(X_i)),

floored at 0 and updated by the reflected recursion
``value <- max(0, value + increment)``.  The Shiryaev-Roberts companion
replaces the max by a sum of likelihood-ratio products and satisfies
``R[t] >= exp(batch max)`` pathwise, which makes it a testable upper
envelope and, via the martingale property of ``R[t] - t`` under the
denominator model, the source of run-length lower bounds.

Values accumulate in double precision; no compensated summation is used,
which is adequate for desk-scale horizons (<= 1e7 steps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .distributions import DensityModel, _draw, keyed_rng, kl_divergence, log_likelihood_ratio

__all__ = [
    "CusumStat",
    "SrStat",
    "cusum_update",
    "cusum_batch",
    "first_passage",
    "sr_update",
    "drift",
]


@dataclass(frozen=True)
class CusumStat:
    """A CuSum statistic value with its density pair.

    ``value`` is always >= 0 (reflection at zero).  After n reflected
    updates it equals the batch definition, floored at 0.
    """

    numerator: DensityModel
    denominator: DensityModel
    value: float = 0.0

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("CuSum value must be >= 0")


@dataclass(frozen=True)
class SrStat:
    """A Shiryaev-Roberts statistic value and its step counter.

    Starts at value 0 at t = 0 and satisfies
    ``value >= exp(max over k of sum_{i=k..t} log ratios)`` pathwise.
    """

    value: float = 0.0
    t: int = 0

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("Shiryaev-Roberts value must be >= 0")


def cusum_update(stat: CusumStat, increment: float) -> CusumStat:
    """Apply one reflected update: new value = max(0, value + increment)."""
    if not math.isfinite(increment):
        raise ValueError(f"increment must be finite, got {increment}")
    return replace(stat, value=max(0.0, stat.value + increment))


def cusum_batch(increments: Sequence[float]) -> float:
    """Batch CuSum value: max over start indices k of the suffix sum.

    Enumerates every suffix sum explicitly, which makes this the
    independent oracle for the reflected recursion (the recursion equals
    ``max(0, cusum_batch(prefix))`` at every prefix).  Note the batch max
    is not floored: for all-negative increments it is the largest single
    increment.
    """
    arr = np.asarray(increments, dtype=float)
    if arr.size == 0:
        raise ValueError("increments must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("increments must be finite")
    suffix_sums = np.cumsum(arr[::-1])[::-1]
    return float(suffix_sums.max())


def first_passage(
    numerator: DensityModel,
    denominator: DensityModel,
    threshold: float,
    stream: Iterable[float],
    horizon: int,
) -> Optional[int]:
    """First time t <= horizon at which the CuSum statistic reaches the threshold.

    The crossing is inclusive (value >= threshold).  Returns None when the
    statistic never reaches the threshold within the horizon (a censored
    outcome, not an error).  When ``stream`` is an iterator, exactly the
    consumed observations are read, so a second passage can continue on
    the same iterator.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    value = 0.0
    t = 0
    for x in stream:
        t += 1
        value = max(0.0, value + log_likelihood_ratio(numerator, denominator, x))
        if value >= threshold:
            return t
        if t >= horizon:
            break
    return None


def sr_update(stat: SrStat, likelihood_ratio: float) -> SrStat:
    """Apply one Shiryaev-Roberts update: new value = (1 + value) * likelihood_ratio."""
    if not (math.isfinite(likelihood_ratio) and likelihood_ratio >= 0):
        raise ValueError(f"likelihood ratio must be finite and >= 0, got {likelihood_ratio}")
    return SrStat(value=(1.0 + stat.value) * likelihood_ratio, t=stat.t + 1)


def drift(
    numerator: DensityModel,
    denominator: DensityModel,
    under: DensityModel,
    samples: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Expected per-step increment E_under[log(num/den)] of a CuSum statistic.

    Computed as -D(under || num) + D(under || den), analytically for
    Gaussian triples.  With ``samples`` given, a Monte Carlo average of
    the log-likelihood ratio under draws from ``under`` is returned
    instead.
    """
    if samples is not None:
        if samples <= 0:
            raise ValueError("samples must be a positive integer")
        if not under.supports_sampling():
            raise ValueError(f"model {under.label!r} does not support sampling")
        if rng is None:
            rng = keyed_rng(0)
        draws = _draw(under, rng, samples)
        return float(np.mean(log_likelihood_ratio(numerator, denominator, draws)))
    return -kl_divergence(under, numerator).value + kl_divergence(under, denominator).value


def _as_chunks(stream: Iterable[float], horizon: int, size: int) -> Iterator[np.ndarray]:
    """Yield observations as float arrays, up to ``horizon`` in total.

    Stream objects exposing ``take(n)`` are consumed chunk-wise; plain
    iterables are buffered into chunks.
    """
    take = getattr(stream, "take", None)
    if callable(take):
        served = 0
        while served < horizon:
            n = min(size, horizon - served)
            chunk = np.asarray(take(n), dtype=float)
            if chunk.size == 0:
                return
            served += chunk.size
            yield chunk
        return
    buf: list[float] = []
    for x in stream:
        buf.append(float(x))
        horizon -= 1
        if len(buf) == size or horizon == 0:
            yield np.asarray(buf, dtype=float)
            buf = []
        if horizon == 0:
            return
    if buf:
        yield np.asarray(buf, dtype=float)
