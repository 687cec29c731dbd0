"""Conditional least squares estimation of (alpha, beta) with known mu.

The estimator minimises

    Q_n(alpha', beta') = sum_k (x_k - alpha' x_{k-1} - beta' x_{k-2} - mu)^2

over the plane.  Cross-products of the path are accumulated exactly as Python
integers and the 2x2 system is solved through its adjugate, so the only
rounding happens in the final division.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .process import InarParams, SamplePath, as_path, split_even_odd

_INT64_MAX = np.iinfo(np.int64).max


class Branch(str, enum.Enum):
    FULL_RANK = "FullRank"
    LAG1_ONLY = "Lag1Only"
    DEGENERATE = "Degenerate"


class Rate(str, enum.Enum):
    SQRT_N = "sqrt_n"
    N = "n"


class AccumulatorOverflow(OverflowError):
    """Raised when exact int64 cross-product sums could wrap around."""


class CollinearRegressors(ArithmeticError):
    """The lag regressors are nonzero but exactly proportional (det = 0)."""


@dataclass(frozen=True)
class NormalEquations:
    """Exact sufficient statistics of a path for the CLS problem.

    ``c1``, ``c2`` are sum X_k X_{k-1} and sum X_k X_{k-2}; ``t1``, ``t2`` are
    sum X_{k-1} and sum X_{k-2}.  The right-hand side is b_j = c_j - mu * t_j.
    """

    n: int
    mu: float
    s11: int
    s12: int
    s22: int
    c1: int
    c2: int
    t1: int
    t2: int
    last: int
    second_last: int

    @property
    def det(self) -> int:
        return self.s11 * self.s22 - self.s12 * self.s12

    @property
    def b1(self) -> float:
        return self.c1 - self.mu * self.t1

    @property
    def b2(self) -> float:
        return self.c2 - self.mu * self.t2

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.s11, self.s12], [self.s12, self.s22]], dtype=float)

    @property
    def adjugate(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.s22, -self.s12), (-self.s12, self.s11))

    @property
    def rhs(self) -> np.ndarray:
        return np.array([self.b1, self.b2])


@dataclass(frozen=True)
class ClsEstimate:
    alpha_hat: float | None
    beta_hat: float | None
    branch: Branch
    det: int
    n: int

    def to_dict(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "beta_hat": self.beta_hat,
            "branch": self.branch.value,
            "det": self.det,
            "n": self.n,
        }


def objective(path, mu: float, alpha_p: float, beta_p: float) -> float:
    """Evaluate Q_n termwise at ``(alpha_p, beta_p)``."""
    x = np.asarray(path.values if isinstance(path, SamplePath) else path, dtype=float)
    x1 = np.concatenate([[0.0], x[:-1]])
    x2 = np.concatenate([[0.0, 0.0], x[:-2]])[: x.size]
    r = x - alpha_p * x1 - beta_p * x2 - mu
    return float(np.dot(r, r))


def _exact_dot(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.dot(a, b))


def accumulate(path, mu: float) -> NormalEquations:
    p = as_path(path)
    x = p.values
    n = p.n
    peak = int(x.max()) if n else 0
    if n and peak * peak > _INT64_MAX // n:
        raise AccumulatorOverflow(
            f"cross-product sums of a length-{n} path with counts up to {peak} exceed int64"
        )
    x1, x2 = p.lagged(1), p.lagged(2)
    return NormalEquations(
        n=n,
        mu=mu,
        s11=_exact_dot(x1, x1),
        s12=_exact_dot(x1, x2),
        s22=_exact_dot(x2, x2),
        c1=_exact_dot(x, x1),
        c2=_exact_dot(x, x2),
        t1=int(x1.sum()),
        t2=int(x2.sum()),
        last=int(x[-1]) if n else 0,
        second_last=int(x[-2]) if n >= 2 else 0,
    )


def solve(neq: NormalEquations) -> ClsEstimate:
    """Apply the closed-form estimator to precomputed normal equations."""
    det = neq.det
    if neq.s22 > 0:
        if det == 0:
            raise CollinearRegressors("lag regressors are proportional; the CLS minimiser is not unique")
        mu = Fraction(neq.mu)
        b1 = neq.c1 - mu * neq.t1
        b2 = neq.c2 - mu * neq.t2
        alpha = (neq.s22 * b1 - neq.s12 * b2) / det
        beta = (neq.s11 * b2 - neq.s12 * b1) / det
        return ClsEstimate(float(alpha), float(beta), Branch.FULL_RANK, det, neq.n)
    if neq.second_last != 0:
        alpha = (neq.last - Fraction(neq.mu)) / neq.second_last
        return ClsEstimate(float(alpha), None, Branch.LAG1_ONLY, det, neq.n)
    # Q_n does not depend on (alpha', beta') here
    return ClsEstimate(None, None, Branch.DEGENERATE, det, neq.n)


def estimate(path, mu: float) -> ClsEstimate:
    return solve(accumulate(path, mu))


def gradient(path, mu: float, alpha_p: float, beta_p: float) -> np.ndarray:
    """Partial derivatives of Q_n in (alpha', beta')."""
    p = as_path(path)
    x1, x2 = p.lagged(1).astype(float), p.lagged(2).astype(float)
    r = p.values - alpha_p * x1 - beta_p * x2 - mu
    return -2.0 * np.array([np.dot(r, x1), np.dot(r, x2)])


def scaled_error(est: ClsEstimate, truth: InarParams, n: int, rate: Rate | str) -> np.ndarray:
    if est.branch is not Branch.FULL_RANK:
        raise ValueError(f"scaled error needs a FullRank estimate, got {est.branch.value}")
    factor = math.sqrt(n) if Rate(rate) is Rate.SQRT_N else float(n)
    return factor * np.array([est.alpha_hat - truth.alpha, est.beta_hat - truth.beta])


def det_scaling(neq: NormalEquations, exponent: float) -> float:
    if neq.n < 1:
        raise ValueError("empty path")
    return neq.det / neq.n**exponent


def sum_sq_scaling(path, lag: int, exponent: float) -> float:
    p = as_path(path)
    if lag not in (1, 2):
        raise ValueError("lag must be 1 or 2")
    if p.n < 1:
        raise ValueError("empty path")
    x = p.lagged(lag)
    return _exact_dot(x, x) / p.n**exponent


def building_blocks(path, mu: float) -> np.ndarray:
    """The nine normalized functionals of the centered even/odd walks.

    With m = floor(n / 2), U_k = X_{2k}, V_k = X_{2k-1} (k <= m) and the
    centered walks u_k = U_k - k mu, v_k = V_k - k mu, returns::

        u_m / m^(1/2),           v_m / m^(1/2),
        sum k u_k / m^(5/2),     sum k v_k / m^(5/2),
        sum u_k^2 / m^2,         sum v_k^2 / m^2,
        sum u_k / m^(3/2),       sum v_k / m^(3/2),
        sum u_k v_k / m^2
    """
    u, v = split_even_odd(path)
    m = u.size
    if m == 0:
        raise ValueError("need at least two observations to form both walks")
    k = np.arange(1, m + 1, dtype=float)
    uc = u[:m] - k * mu
    vc = v[:m] - k * mu
    return np.array([
        uc[-1] / m**0.5,
        vc[-1] / m**0.5,
        np.dot(k, uc) / m**2.5,
        np.dot(k, vc) / m**2.5,
        np.dot(uc, uc) / m**2,
        np.dot(vc, vc) / m**2,
        uc.sum() / m**1.5,
        vc.sum() / m**1.5,
        np.dot(uc, vc) / m**2,
    ])
