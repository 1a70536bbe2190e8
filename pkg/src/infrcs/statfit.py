"""Maximum-likelihood log-normal fitting and CDF goodness-of-fit scores."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .model import LognormalFit, RcsError, RcsSampleSet

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _as_samples(samples) -> np.ndarray:
    if isinstance(samples, RcsSampleSet):
        return samples.samples
    return np.asarray(samples, dtype=float).ravel()


def _check_params(sigma: float) -> None:
    if not sigma > 0:
        raise RcsError(f"log-normal sigma must be positive, got {sigma!r}")


def fit_lognormal(samples) -> LognormalFit:
    """Fit ``ln X ~ N(mu, sigma^2)`` by maximum likelihood.

    sigma uses the MLE divisor ``n``. A zero-spread sample (all values
    equal) yields a degenerate fit with ``sigma == 0``; its KS and MSE are
    reported as 0 because the fitted point mass reproduces the data.

    Parameters
    ----------
    samples : RcsSampleSet or array_like
        Strictly positive RCS values, at least two of them.
    """
    x = _as_samples(samples)
    if x.size < 2:
        raise RcsError(f"log-normal fit needs at least 2 samples, got {x.size}")
    if not np.all(x > 0):
        raise RcsError("log-normal fit needs strictly positive samples")
    logs = np.log(x)
    mu = math.fsum(logs.tolist()) / logs.size
    sigma = math.sqrt(math.fsum(((logs - mu) ** 2).tolist()) / logs.size)
    if sigma == 0.0 or np.all(logs == logs[0]):
        return LognormalFit(mu=float(logs[0]), sigma=0.0, n=int(x.size), ks=0.0, mse=0.0)
    return LognormalFit(
        mu=mu,
        sigma=sigma,
        n=int(x.size),
        ks=ks_statistic(x, mu, sigma),
        mse=cdf_mse(x, mu, sigma),
    )


def lognormal_pdf(x, mu: float, sigma: float):
    _check_params(sigma)
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise RcsError("log-normal pdf is defined for x > 0 only")
    z = (np.log(arr) - mu) / sigma
    out = np.exp(-0.5 * z * z) / (arr * sigma * SQRT_2PI)
    return float(out) if out.ndim == 0 else out


def lognormal_cdf(x, mu: float, sigma: float):
    """``Phi((ln x - mu) / sigma)``; x = 0 maps to 0 and x = inf to 1."""
    _check_params(sigma)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise RcsError("log-normal cdf is defined for x >= 0 only")
    with np.errstate(divide="ignore"):
        out = ndtr((np.log(arr) - mu) / sigma)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EmpiricalCDF:
    """Right-continuous step function: ``F(x) = #{x_i <= x} / n``."""

    values: np.ndarray
    fractions: np.ndarray

    def __call__(self, x):
        idx = np.searchsorted(self.values, np.asarray(x, dtype=float), side="right")
        out = idx / self.values.size
        return float(out) if np.ndim(out) == 0 else out


def empirical_cdf(samples) -> EmpiricalCDF:
    x = np.sort(_as_samples(samples))
    if x.size < 1:
        raise RcsError("empirical CDF needs at least one sample")
    return EmpiricalCDF(values=x, fractions=np.arange(1, x.size + 1) / x.size)


def ks_statistic(samples, mu: float, sigma: float) -> float:
    """Sup-distance between the empirical and fitted CDFs.

    Evaluated at the order statistics using both sides of each step, which
    is exact for a step function against a continuous CDF.
    """
    _check_params(sigma)
    x = np.sort(_as_samples(samples))
    n = x.size
    if n < 1:
        raise RcsError("KS statistic needs at least one sample")
    f = lognormal_cdf(x, mu, sigma)
    i = np.arange(1, n + 1)
    d = max(np.max(np.abs(i / n - f)), np.max(np.abs((i - 1) / n - f)))
    return float(min(d, 1.0))


def cdf_mse(samples, mu: float, sigma: float) -> float:
    """Mean squared CDF gap at the samples, with ``F(x_(i)) = i / n``."""
    _check_params(sigma)
    x = np.sort(_as_samples(samples))
    n = x.size
    if n < 1:
        raise RcsError("CDF MSE needs at least one sample")
    gap = np.arange(1, n + 1) / n - lognormal_cdf(x, mu, sigma)
    return math.fsum((gap * gap).tolist()) / n
