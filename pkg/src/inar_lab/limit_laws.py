"""Limit distributions of the scaled CLS errors.

Case (1, 0): a degenerate normal law along (-1, 1).
Case (0, 1): the Dickey-Fuller functional  int W dW / int W^2 dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .innovations import stream

DEFAULT_DF_STEPS = 10_000
DF_BLOCK = 1_000


@dataclass(frozen=True)
class CltLimit:
    mu: float
    sigma2: float

    @property
    def variance(self) -> float:
        return 4 * self.sigma2 / (self.mu**2 + 4 * self.sigma2)

    @property
    def scale(self) -> float:
        return 2 * math.sqrt(self.sigma2) / math.sqrt(self.mu**2 + 4 * self.sigma2)

    @property
    def covariance(self) -> np.ndarray:
        return self.variance * np.array([[1.0, -1.0], [-1.0, 1.0]])

    def cdf(self, x):
        """Distribution function of one coordinate, N(0, variance)."""
        return normal_cdf(np.asarray(x) / self.scale)


def clt_limit(mu: float, sigma2: float) -> CltLimit:
    if not mu > 0:
        raise ValueError("mu must be positive")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive; a degenerate innovation has a degenerate limit")
    return CltLimit(float(mu), float(sigma2))


_erfc = np.frompyfunc(math.erfc, 1, 1)


def normal_cdf(x):
    """Standard normal distribution function; scalar in, scalar out."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    return 0.5 * _erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0)).astype(float)


@dataclass(frozen=True)
class DfSample:
    value: float
    steps: int
    numerator: float
    denominator: float


def _check_steps(steps: int) -> None:
    if steps < 100:
        raise ValueError("steps must be at least 100")


@numba.njit(cache=True)
def _df_kernel(rng, size, steps):
    out = np.empty((size, 2))
    dt = 1.0 / steps
    sd = math.sqrt(dt)
    i = 0
    while i < size:
        w = 0.0
        s = 0.0
        for _ in range(steps):
            s += w * w
            w += sd * rng.standard_normal()
        if s > 0.0:
            out[i, 0] = 0.5 * (w * w - 1.0)
            out[i, 1] = s * dt
            i += 1
    return out


def _from_increments(increments: np.ndarray) -> tuple[float, float]:
    steps = increments.size
    w = np.concatenate([[0.0], np.cumsum(increments)])
    return 0.5 * (w[-1] ** 2 - 1.0), float(np.dot(w[:-1], w[:-1])) / steps


def sample_df(steps: int, rng: np.random.Generator, increments=None) -> DfSample:
    """One draw of the Dickey-Fuller functional on a grid of ``steps`` cells.

    The numerator uses int_0^1 W dW = (W_1^2 - 1) / 2 exactly; the
    denominator is the left-endpoint Riemann sum of W^2.  ``increments``
    replaces the Gaussian increments of the first attempt (a test hook); a
    zero denominator is discarded and redrawn from ``rng``.
    """
    _check_steps(steps)
    if increments is not None:
        inc = np.asarray(increments, dtype=float)
        if inc.size != steps:
            raise ValueError("need exactly one increment per step")
        num, den = _from_increments(inc)
        if den > 0:
            return DfSample(num / den, steps, num, den)
    num, den = _df_kernel(rng, 1, steps)[0]
    return DfSample(num / den, steps, float(num), float(den))


def sample_df_parts(size: int, steps: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` draws of (numerator, denominator) from one stream."""
    _check_steps(steps)
    return _df_kernel(rng, size, steps)


def df_oracle(size: int, steps: int, seed: int, with_parts: bool = False) -> np.ndarray:
    """Reference draws of the Dickey-Fuller law.

    Draws are produced in fixed blocks of ``DF_BLOCK``, block ``j`` using the
    stream ``(seed, j)``, so the sample depends only on ``(size, steps, seed)``.
    """
    _check_steps(steps)
    parts = []
    for j, start in enumerate(range(0, size, DF_BLOCK)):
        parts.append(_df_kernel(stream(seed, j), min(DF_BLOCK, size - start), steps))
    nd = np.concatenate(parts) if parts else np.empty((0, 2))
    values = nd[:, 0] / nd[:, 1]
    if with_parts:
        return np.column_stack([values, nd])
    return values
