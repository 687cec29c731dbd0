"""Replication engine and Kolmogorov-Smirnov comparisons.

Replication ``r`` of an experiment with master seed ``s`` draws from the
stream ``(s, r)``.  Work is split into contiguous chunks that may run in
worker processes; results are always folded back in replication order, so
the report does not depend on the number of workers.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cls import Branch, Rate, estimate, scaled_error
from .innovations import InnovationSpec
from .limit_laws import DEFAULT_DF_STEPS, clt_limit, df_oracle
from .process import InarParams, simulate

KS_C05 = 1.358
DF_SEED_TAG = 0x5EED_DF01
CLT_ALLOWANCE = 0.017
DF_ALLOWANCE = 0.035
LINE_BOUND = 0.2


class Case(str, enum.Enum):
    CASE10 = "10"
    CASE01 = "01"

    @property
    def params(self) -> InarParams:
        return InarParams(1.0, 0.0) if self is Case.CASE10 else InarParams(0.0, 1.0)

    @property
    def rate(self) -> Rate:
        return Rate.SQRT_N if self is Case.CASE10 else Rate.N


@dataclass(frozen=True)
class McConfig:
    case: Case
    spec: InnovationSpec
    n: int
    reps: int
    master_seed: int = 0
    df_steps: int = DEFAULT_DF_STEPS
    df_oracle_size: int = 10_000
    ks_allowance: float | None = None
    line_bound: float = LINE_BOUND

    def __post_init__(self):
        object.__setattr__(self, "case", Case(self.case))
        if self.reps < 2:
            raise ValueError("reps must be at least 2")
        if self.n < 10:
            raise ValueError("n must be at least 10")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")
        if not self.spec.mean > 0:
            raise ValueError("innovation mean must be positive")
        if self.case is Case.CASE10:
            if not self.spec.has_finite_fourth_moment:
                raise ValueError("case (1,0) needs innovations with a finite fourth moment")
            if not self.spec.variance > 0:
                raise ValueError("case (1,0) needs a non-degenerate innovation law")
        else:
            if self.df_steps < 100:
                raise ValueError("df_steps must be at least 100")
            if self.df_oracle_size < 1:
                raise ValueError("df_oracle_size must be positive")

    @property
    def allowance(self) -> float:
        if self.ks_allowance is not None:
            return self.ks_allowance
        return CLT_ALLOWANCE if self.case is Case.CASE10 else DF_ALLOWANCE

    def to_dict(self) -> dict:
        d = {
            "case": self.case.value,
            "innov": str(self.spec),
            "n": self.n,
            "reps": self.reps,
            "master_seed": self.master_seed,
            "ks_allowance": self.allowance,
            "line_bound": self.line_bound,
        }
        if self.case is Case.CASE01:
            d.update(df_steps=self.df_steps, df_oracle_size=self.df_oracle_size)
        return d


@dataclass
class McReport:
    config: dict
    rep_ids: np.ndarray
    samples: np.ndarray
    skipped: int
    branches: dict
    ks_stat: float
    ks_threshold: float
    line_concentration: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "skipped": self.skipped,
            "branches": self.branches,
            "ks_stat": self.ks_stat,
            "ks_threshold": self.ks_threshold,
            "line_concentration": self.line_concentration,
            "checks": self.checks,
            "passed": self.passed,
            "samples": [
                {"rep": int(r), "coord1": float(a), "coord2": float(b)}
                for r, (a, b) in zip(self.rep_ids, self.samples)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def samples_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rep", "coord1", "coord2"])
        for r, (a, b) in zip(self.rep_ids.tolist(), self.samples.tolist()):
            w.writerow([r, repr(a), repr(b)])
        return buf.getvalue()


# -- KS statistics -----------------------------------------------------------

def kolmogorov_sf(lam: float) -> float:
    """Q(lam) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lam^2)."""
    if lam <= 0:
        return 1.0
    total = 0.0
    k = 1
    while True:
        term = 2.0 * math.exp(-2.0 * k * k * lam * lam)
        if term < 1e-10:
            break
        total += term if k % 2 else -term
        k += 1
        if k > 100_000:
            break
    return min(1.0, max(0.0, total))


def ks_one_sample(samples: Sequence[float], cdf: Callable) -> tuple[float, float]:
    """Supremum distance between the ECDF of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    m = x.size
    if m == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, m + 1)
    stat = float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))
    return stat, kolmogorov_sf(math.sqrt(m) * stat)


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sample KS distance and its 5% critical value."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    m, n = a.size, b.size
    if m == 0 or n == 0:
        raise ValueError("empty sample")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / m
    fb = np.searchsorted(b, grid, side="right") / n
    stat = float(np.max(np.abs(fa - fb)))
    return stat, KS_C05 * math.sqrt((m + n) / (m * n))


# -- replications -------------------------------------------------------------

def _replicate(case: Case, spec: InnovationSpec, n: int, master_seed: int, start: int, stop: int):
    params = case.params
    out = []
    for r in range(start, stop):
        try:
            est = estimate(simulate(params, spec, n, (master_seed, r)), spec.mean)
        except Exception as exc:
            raise RuntimeError(f"replication {r} failed: {exc}") from exc
        if est.branch is Branch.FULL_RANK:
            out.append((r, est.branch.value, *scaled_error(est, params, n, case.rate)))
        else:
            out.append((r, est.branch.value, math.nan, math.nan))
    return out


def _chunks(reps: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(reps / (4 * workers)))
    return [(s, min(s + size, reps)) for s in range(0, reps, size)]


def run_replications(config: McConfig, threads: int = 1) -> list[tuple]:
    """Per-replication ``(rep, branch, coord1, coord2)`` in replication order."""
    args = (config.case, config.spec, config.n, config.master_seed)
    if threads <= 1:
        return _replicate(*args, 0, config.reps)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_replicate, *args, s, e) for s, e in _chunks(config.reps, threads)]
        rows = []
        for fut in futures:
            rows.extend(fut.result())
    return rows


def _collect(config: McConfig, rows) -> tuple[np.ndarray, np.ndarray, int, dict]:
    kept = [row for row in rows if row[1] == Branch.FULL_RANK.value]
    branches = {b.value: 0 for b in Branch}
    for row in rows:
        branches[row[1]] += 1
    rep_ids = np.array([row[0] for row in kept], dtype=np.int64)
    samples = np.array([row[2:] for row in kept], dtype=float).reshape(-1, 2)
    return rep_ids, samples, config.reps - len(kept), branches


def _line_concentration(samples: np.ndarray, ref: int) -> float:
    if samples.shape[0] < 2:
        return math.nan
    spread = np.var(samples[:, ref], ddof=1)
    if spread == 0:
        return math.nan
    return float(np.mean(samples.sum(axis=1) ** 2) / spread)


def _check(value: float, bound: float) -> dict:
    return {"value": value, "bound": bound, "passed": bool(value <= bound)}


def _empty_check(reason: str) -> dict:
    return {"value": None, "bound": None, "passed": False, "reason": reason}


def run_clt_experiment(config: McConfig, threads: int = 1) -> McReport:
    """Compare sqrt(n)-scaled errors in case (1,0) with their normal limit."""
    if config.case is not Case.CASE10:
        raise ValueError("run_clt_experiment needs case (1,0)")
    rep_ids, samples, skipped, branches = _collect(config, run_replications(config, threads))
    law = clt_limit(config.spec.mean, config.spec.variance)
    checks = {}
    m = samples.shape[0]
    if m == 0:
        checks["samples"] = _empty_check("no FullRank replication")
        return McReport(config.to_dict(), rep_ids, samples, skipped, branches, math.nan, math.nan, math.nan, checks)
    threshold = KS_C05 / math.sqrt(m) + config.allowance
    ks1, p1 = ks_one_sample(samples[:, 0], law.cdf)
    ks2, p2 = ks_one_sample(samples[:, 1], law.cdf)
    line = _line_concentration(samples, 0)
    checks["ks_coord1_vs_normal"] = {**_check(ks1, threshold), "p_value": p1}
    checks["ks_coord2_vs_normal"] = {**_check(ks2, threshold), "p_value": p2}
    checks["line_concentration"] = _check(line, config.line_bound)
    return McReport(config.to_dict(), rep_ids, samples, skipped, branches, ks1, threshold, line, checks)


def run_df_experiment(config: McConfig, threads: int = 1) -> McReport:
    """Compare n-scaled errors in case (0,1) with Dickey-Fuller oracle draws."""
    if config.case is not Case.CASE01:
        raise ValueError("run_df_experiment needs case (0,1)")
    rep_ids, samples, skipped, branches = _collect(config, run_replications(config, threads))
    checks = {}
    m = samples.shape[0]
    if m == 0:
        checks["samples"] = _empty_check("no FullRank replication")
        return McReport(config.to_dict(), rep_ids, samples, skipped, branches, math.nan, math.nan, math.nan, checks)
    oracle = df_oracle(config.df_oracle_size, config.df_steps, config.master_seed ^ DF_SEED_TAG)
    ks, base = ks_two_sample(samples[:, 1], oracle)
    threshold = base + config.allowance
    ks_line, _ = ks_two_sample(samples[:, 0], -samples[:, 1])
    line = _line_concentration(samples, 1)
    checks["ks_coord2_vs_df"] = _check(ks, threshold)
    checks["ks_coord1_vs_neg_coord2"] = _check(ks_line, threshold)
    return McReport(config.to_dict(), rep_ids, samples, skipped, branches, ks, threshold, line, checks)
