"""Univariate density models and divergence estimates.

The detection procedures in this package are driven by three known
densities: the pre-change density, the bad-change density we want to
detect, and the confusing-change density we want to ignore.  This module
provides the model objects (Gaussian, and tabulated log-densities for
generic one-dimensional models), log-likelihood-ratio evaluation,
reproducible sampling, and Kullback-Leibler divergence computation.

All logarithms are natural logarithms; divergences, log-likelihood
ratios, and detector thresholds throughout the package are in nats.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "DensityModel",
    "Gaussian",
    "Tabulated",
    "KlMethod",
    "KlEstimate",
    "log_likelihood_ratio",
    "kl_divergence",
    "parse_density_spec",
    "keyed_rng",
]

_TABULATED_NORMALIZATION_TOL = 1e-6


class DensityModel(ABC):
    """A named univariate density with log-density evaluation.

    Instances are immutable value objects and can be shared freely across
    concurrent trial workers.
    """

    label: str

    @abstractmethod
    def log_density(self, x: float | np.ndarray) -> float | np.ndarray:
        """Return ``log f(x)`` in nats, elementwise for arrays."""

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> float:
        """Draw one pseudo-random observation from the model."""

    def supports_sampling(self) -> bool:
        return True


@dataclass(frozen=True)
class Gaussian(DensityModel):
    """Gaussian density with the given mean and (strictly positive) variance.

    Args:
        mean: Location parameter.
        variance: Scale parameter, must be > 0.
        label: Short identifier; defaults to the parseable form
            ``gaussian:<mean>:<variance>``.
    """

    mean: float
    variance: float
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise ValueError(f"mean must be finite, got {self.mean}")
        if not (math.isfinite(self.variance) and self.variance > 0):
            raise ValueError(f"variance must be finite and > 0, got {self.variance}")
        if not self.label:
            object.__setattr__(self, "label", f"gaussian:{self.mean:g}:{self.variance:g}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def log_density(self, x: float | np.ndarray) -> float | np.ndarray:
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ValueError("log_density requires finite x")
        out = -0.5 * np.log(2.0 * np.pi * self.variance) - (x - self.mean) ** 2 / (2.0 * self.variance)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator) -> float:
        # One standard-normal draw per observation, shifted and scaled, so
        # models sharing an RNG stream see location/scale shifts of the
        # same underlying draws.
        return self.mean + self.std * float(rng.standard_normal())


@dataclass(frozen=True, eq=False)
class Tabulated(DensityModel):
    """Generic univariate model given by a grid of (point, log-density) pairs.

    Log-densities are interpolated linearly between grid points.  The
    implied density must integrate to 1 within 1e-6 under trapezoidal
    quadrature over the grid.  Tabulated models support log-density
    evaluation and quadrature-based KL divergence only; sampling is
    rejected.

    Args:
        points: Strictly increasing grid of evaluation points.
        log_densities: Finite log-density values at the grid points.
        label: Short identifier.
    """

    points: np.ndarray
    log_densities: np.ndarray
    label: str = "tabulated"

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        lds = np.asarray(self.log_densities, dtype=float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "log_densities", lds)
        if pts.ndim != 1 or pts.size < 2 or lds.shape != pts.shape:
            raise ValueError("points and log_densities must be matching 1-d grids with >= 2 points")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if not np.all(np.isfinite(lds)):
            raise ValueError("log-densities must be finite")
        total = float(np.trapezoid(np.exp(lds), pts))
        if abs(total - 1.0) > _TABULATED_NORMALIZATION_TOL:
            raise ValueError(
                f"tabulated density integrates to {total:.8f}, not 1 within {_TABULATED_NORMALIZATION_TOL:g}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tabulated):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(
            self.log_densities, other.log_densities
        )

    def log_density(self, x: float | np.ndarray) -> float | np.ndarray:
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ValueError("log_density requires finite x")
        lo, hi = self.points[0], self.points[-1]
        if np.any(x < lo) or np.any(x > hi):
            raise ValueError(f"x outside tabulated grid range [{lo:g}, {hi:g}]")
        out = np.interp(x, self.points, self.log_densities)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator) -> float:
        raise ValueError("tabulated models do not support sampling")

    def supports_sampling(self) -> bool:
        return False


class KlMethod(Enum):
    CLOSED_FORM = "closed-form"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class KlEstimate:
    """A KL divergence value in nats with its estimation metadata.

    ``std_error`` is 0 for deterministic routes (closed form, grid
    quadrature); Monte Carlo estimates carry the sample standard error
    and the sample count.
    """

    value: float
    std_error: float
    method: KlMethod
    samples: int | None = None

    def __post_init__(self) -> None:
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        if self.method is KlMethod.MONTE_CARLO and not (self.samples and self.samples > 0):
            raise ValueError("Monte Carlo estimates require a positive sample count")


def log_likelihood_ratio(
    num: DensityModel, den: DensityModel, x: float | np.ndarray
) -> float | np.ndarray:
    """Return ``log num(x) - log den(x)``, the per-observation detector increment."""
    return num.log_density(x) - den.log_density(x)


def _draw(model: DensityModel, rng: np.random.Generator, n: int) -> np.ndarray:
    """n draws from a sampling-capable model; vectorized for Gaussians."""
    if isinstance(model, Gaussian):
        return model.mean + model.std * rng.standard_normal(n)
    return np.array([model.sample(rng) for _ in range(n)])


def _gaussian_kl(p: Gaussian, q: Gaussian) -> float:
    # (mu_p - mu_q)^2 / (2 sigma^2) when variances are equal; the general
    # Gaussian formula reduces to that case.
    ratio = p.variance / q.variance
    return 0.5 * (math.log(1.0 / ratio) + ratio + (p.mean - q.mean) ** 2 / q.variance - 1.0)


def _quadrature_kl(p: DensityModel, q: DensityModel, grid: np.ndarray) -> float:
    log_p = np.asarray(p.log_density(grid), dtype=float)
    log_q = np.asarray(q.log_density(grid), dtype=float)
    return float(np.trapezoid(np.exp(log_p) * (log_p - log_q), grid))


def kl_divergence(
    p: DensityModel,
    q: DensityModel,
    samples: int | None = None,
    rng: np.random.Generator | None = None,
) -> KlEstimate:
    """Compute the KL divergence D(p || q) in nats.

    Routes:
      * both models Gaussian and ``samples`` omitted: exact closed form;
      * a Tabulated model involved and ``samples`` omitted: trapezoidal
        quadrature of ``p log(p/q)`` over the tabulated grid;
      * ``samples`` given: Monte Carlo average of the log-likelihood
        ratio under draws from ``p`` (``p`` must support sampling), with
        the sample standard error reported.

    Args:
        p: Numerator model (expectation is taken under ``p``).
        q: Denominator model.
        samples: Number of Monte Carlo draws; requests the Monte Carlo
            route explicitly.
        rng: Generator for the Monte Carlo route; a fixed-seed generator
            is used when omitted so estimates are reproducible.

    Raises:
        ValueError: If ``samples`` is requested but ``p`` cannot sample,
            or if a non-closed-form pair is given without a usable grid.
    """
    if p == q:
        return KlEstimate(0.0, 0.0, KlMethod.CLOSED_FORM)
    if samples is not None:
        if samples <= 0:
            raise ValueError("samples must be a positive integer")
        if not p.supports_sampling():
            raise ValueError(f"model {p.label!r} does not support sampling")
        if rng is None:
            rng = keyed_rng(0)
        draws = _draw(p, rng, samples)
        values = np.asarray(log_likelihood_ratio(p, q, draws), dtype=float)
        std_error = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
        return KlEstimate(float(values.mean()), std_error, KlMethod.MONTE_CARLO, samples)
    if isinstance(p, Gaussian) and isinstance(q, Gaussian):
        return KlEstimate(_gaussian_kl(p, q), 0.0, KlMethod.CLOSED_FORM)
    if isinstance(p, Tabulated):
        return KlEstimate(_quadrature_kl(p, q, p.points), 0.0, KlMethod.CLOSED_FORM)
    if isinstance(q, Tabulated):
        return KlEstimate(_quadrature_kl(p, q, q.points), 0.0, KlMethod.CLOSED_FORM)
    raise ValueError("samples required for model pairs without a deterministic KL route")


def parse_density_spec(spec: str) -> DensityModel:
    """Parse a density spec string such as ``gaussian:0.5:1``."""
    parts = spec.strip().split(":")
    if len(parts) == 3 and parts[0].lower() == "gaussian":
        try:
            mean, variance = float(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"invalid gaussian spec {spec!r}: non-numeric parameter") from None
        return Gaussian(mean, variance)
    raise ValueError(f"invalid density spec {spec!r}; expected gaussian:<mean>:<variance>")


def keyed_rng(*key: int) -> np.random.Generator:
    """Build a counter-based generator from integer key components.

    Keys such as (experiment seed, regime code, change point, trial
    index, stream index) give reproducible, order-independent streams:
    every worker derives its own generator from its key, and no state is
    shared between trials.
    """
    if not key:
        raise ValueError("at least one key component required")
    if any((not isinstance(k, (int, np.integer))) or k < 0 for k in key):
        raise ValueError(f"key components must be non-negative integers, got {key}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(tuple(int(k) for k in key))))
