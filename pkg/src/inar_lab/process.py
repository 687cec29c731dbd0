"""INAR(2) parameters, classification and zero-start path simulation.

The recursion is

    X_k = alpha o X_{k-1} + beta o X_{k-2} + eps_k,   k = 1, ..., n,

with ``o`` the binomial thinning operator and X_0 = X_{-1} = 0.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .innovations import InnovationSpec, stream, thin


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    EXPLOSIVE = "explosive"


@dataclass(frozen=True)
class InarParams:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v!r} outside [0, 1]")


def classify(params: InarParams) -> Stability:
    s = params.alpha + params.beta
    if s < 1:
        return Stability.STABLE
    if s == 1:
        return Stability.UNSTABLE
    return Stability.EXPLOSIVE


def is_primitive(params: InarParams) -> bool:
    return params.alpha > 0 and params.beta > 0


@dataclass
class SamplePath:
    """Observations X_1..X_n; the two zero start values are implicit."""

    values: np.ndarray
    origin: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1:
            raise ValueError("a path is one-dimensional")
        if v.size and not np.issubdtype(v.dtype, np.integer):
            if not np.all(np.isfinite(v)) or np.any(v != np.round(v)):
                raise ValueError("path entries must be integers")
        v = v.astype(np.int64)
        if np.any(v < 0):
            raise ValueError("path entries must be non-negative")
        self.values = v

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def lagged(self, lag: int) -> np.ndarray:
        """The regressor X_{k-lag}, k = 1..n, with the zero-start padding."""
        return np.concatenate([np.zeros(lag, dtype=np.int64), self.values[: self.n - lag]])[: self.n]


def as_path(path) -> SamplePath:
    return path if isinstance(path, SamplePath) else SamplePath(np.asarray(path))


def simulate(params: InarParams, spec: InnovationSpec, n: int, seed: int | Sequence[int]) -> SamplePath:
    """Simulate a zero-start INAR(2) path of length ``n``.

    ``seed`` is an integer or a stream key such as ``(master_seed, rep)``.
    Innovations come from child stream 0 and thinning variates from child
    stream 1, and within a step lag 1 is thinned before lag 2.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not spec.mean > 0:
        raise ValueError("innovation mean must be positive, otherwise the path is identically zero")
    key = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)
    eps = spec.sample(stream(*key, 0), n).tolist()
    rng = stream(*key, 1)
    a, b = params.alpha, params.beta
    x = [0] * n
    x1 = x2 = 0
    for k in range(n):
        xk = thin(x1, a, rng) + thin(x2, b, rng) + eps[k]
        x[k] = xk
        x1, x2 = xk, x1
    origin = {"alpha": a, "beta": b, "innov": str(spec), "n": n, "seed": list(key)}
    return SamplePath(np.array(x, dtype=np.int64), origin)


def residuals(path, params: InarParams, mu: float) -> np.ndarray:
    """Martingale differences X_k - alpha X_{k-1} - beta X_{k-2} - mu."""
    p = as_path(path)
    return p.values - params.alpha * p.lagged(1) - params.beta * p.lagged(2) - mu


def split_even_odd(path) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(U, V)`` with U_k = X_{2k} and V_k = X_{2k-1}."""
    v = as_path(path).values
    return v[1::2].copy(), v[0::2].copy()


# -- serialization ---------------------------------------------------------

def path_to_csv(path: SamplePath, header: dict[str, Any] | None = None) -> str:
    buf = io.StringIO()
    meta = header if header is not None else path.origin
    if meta:
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "x"])
    for k, x in enumerate(path.values.tolist(), start=1):
        w.writerow([k, x])
    return buf.getvalue()


def path_from_csv(text: str) -> SamplePath:
    """Read a ``k,x`` CSV; ``#`` lines before the header carry metadata."""
    meta: dict[str, Any] = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            try:
                meta.update(json.loads(line[1:]))
            except json.JSONDecodeError:
                pass
            continue
        if line.strip():
            rows.append(line)
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["k", "x"]:
        raise ValueError("path CSV must have header 'k,x'")
    ks, xs = [], []
    for rec in reader:
        ks.append(int(rec["k"]))
        xs.append(int(rec["x"]))
    if ks != list(range(1, len(ks) + 1)):
        raise ValueError("path CSV rows must be numbered 1..n in order")
    return SamplePath(np.array(xs, dtype=np.int64), meta)


def path_to_json(path: SamplePath) -> str:
    return json.dumps({"origin": path.origin, "n": path.n, "values": path.values.tolist()})


def path_from_json(text: str) -> SamplePath:
    doc = json.loads(text)
    return SamplePath(np.array(doc["values"], dtype=np.int64), doc.get("origin", {}))
