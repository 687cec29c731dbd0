"""Innovation laws, seeded random streams and binomial thinning."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class Law(str, enum.Enum):
    POISSON = "poisson"
    BERNOULLI = "bernoulli"
    GEOMETRIC = "geometric"
    DETERMINISTIC = "det"


def stream(seed: int | Sequence[int], *key: int) -> np.random.Generator:
    """Return an independent generator for the stream ``(seed, *key)``.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys, so
    replication ``r`` of an experiment seeded with ``s`` always sees the same
    draws no matter how replications are scheduled.
    """
    if isinstance(seed, (tuple, list)):
        seed, key = seed[0], tuple(seed[1:]) + key
    if seed < 0 or any(k < 0 for k in key):
        raise ValueError("seeds and stream keys must be non-negative")
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


@dataclass(frozen=True)
class InnovationSpec:
    """Distribution of the i.i.d. arrivals added at every step.

    Parameters
    ----------
    law : Law
        One of the four built-in families.
    param : float
        Poisson rate, Bernoulli/Geometric success probability, or the point
        mass location for the deterministic law.
    """

    law: Law
    param: float

    def __post_init__(self):
        law = Law(self.law)
        object.__setattr__(self, "law", law)
        p = self.param
        if not np.isfinite(p):
            raise ValueError(f"non-finite parameter {p!r}")
        if law is Law.POISSON and not p > 0:
            raise ValueError("poisson rate must be positive")
        if law is Law.BERNOULLI and not 0 <= p <= 1:
            raise ValueError("bernoulli probability must lie in [0, 1]")
        if law is Law.GEOMETRIC and not 0 < p <= 1:
            raise ValueError("geometric success probability must lie in (0, 1]")
        if law is Law.DETERMINISTIC:
            if p < 0 or int(p) != p:
                raise ValueError("deterministic innovation must be a non-negative integer")
            object.__setattr__(self, "param", int(p))

    @classmethod
    def poisson(cls, lam: float) -> "InnovationSpec":
        return cls(Law.POISSON, float(lam))

    @classmethod
    def bernoulli(cls, p: float) -> "InnovationSpec":
        return cls(Law.BERNOULLI, float(p))

    @classmethod
    def geometric(cls, p: float) -> "InnovationSpec":
        return cls(Law.GEOMETRIC, float(p))

    @classmethod
    def deterministic(cls, c: int) -> "InnovationSpec":
        return cls(Law.DETERMINISTIC, c)

    @classmethod
    def parse(cls, text: str) -> "InnovationSpec":
        """Parse ``poisson:1.0``, ``bernoulli:0.5``, ``geometric:0.5`` or ``det:3``."""
        name, sep, value = text.strip().partition(":")
        if not sep:
            raise ValueError(f"expected '<law>:<value>', got {text!r}")
        try:
            law = Law(name.strip().lower())
            number = float(value)
        except ValueError:
            raise ValueError(f"unrecognised innovation spec {text!r}") from None
        return cls(law, number)

    def __str__(self) -> str:
        return f"{self.law.value}:{self.param}"

    @property
    def mean(self) -> float:
        p = self.param
        if self.law is Law.GEOMETRIC:
            return (1 - p) / p
        return float(p)

    @property
    def variance(self) -> float:
        p = self.param
        if self.law is Law.POISSON:
            return float(p)
        if self.law is Law.BERNOULLI:
            return p * (1 - p)
        if self.law is Law.GEOMETRIC:
            return (1 - p) / p**2
        return 0.0

    @property
    def has_finite_fourth_moment(self) -> bool:
        return True

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw ``size`` innovations (a scalar when ``size`` is None)."""
        p = self.param
        if self.law is Law.POISSON:
            out = rng.poisson(p, size)
        elif self.law is Law.BERNOULLI:
            out = rng.binomial(1, p, size)
        elif self.law is Law.GEOMETRIC:
            # numpy counts trials (support 1, 2, ...); shift to failures
            out = rng.geometric(p, size) - 1
        else:
            out = p if size is None else np.full(size, p)
        if size is None:
            return int(out)
        return np.asarray(out, dtype=np.int64)


def sample_innovation(spec: InnovationSpec, rng: np.random.Generator) -> int:
    return spec.sample(rng)


def moments(spec: InnovationSpec) -> tuple[float, float, bool]:
    """Return ``(mean, variance, has_finite_fourth_moment)`` of ``spec``."""
    return spec.mean, spec.variance, spec.has_finite_fourth_moment


def thin(x: int, prob: float, rng: np.random.Generator) -> int:
    """Binomial thinning ``prob ∘ x``: the number of survivors among ``x``
    independent Bernoulli(``prob``) trials, drawn as one binomial variate.

    The boundary probabilities 0 and 1 are exact and consume no randomness.
    """
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"thinning probability {prob!r} outside [0, 1]")
    if x < 0:
        raise ValueError("can only thin a non-negative count")
    if x == 0 or prob == 0.0:
        return 0
    if prob == 1.0:
        return int(x)
    return int(rng.binomial(x, prob))
