"""Exit criteria, one test each; a PASS/FAIL line per criterion is printed in
the terminal summary."""

import math
import time

import numpy as np
import pytest

from inar_lab.cls import Branch, accumulate, det_scaling, estimate, objective, sum_sq_scaling
from inar_lab.innovations import InnovationSpec, stream
from inar_lab.limit_laws import df_oracle, sample_df_parts
from inar_lab.montecarlo import Case, McConfig, ks_two_sample, run_clt_experiment, run_df_experiment
from inar_lab.process import InarParams, simulate

POIS1 = InnovationSpec.poisson(1.0)
GRID = np.linspace(-3.0, 3.0, 201)
WORKERS = 4

SEED_ORACLE = 101
SEED_AS10 = 2024
SEED_AS01 = 2025
SEED_CLT = 1
SEED_DF = 1
SEED_DET = 303
SEED_DF_LO, SEED_DF_HI, SEED_NUM = 404, 405, 406

_first_run: dict[int, object] = {}


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


@pytest.fixture(scope="module", autouse=True)
def warm_up_jit():
    # compile the Dickey-Fuller kernel before any timed section
    sample_df_parts(1, 100, stream(0))


# -- computations (deterministic given their seeds) --------------------------

def _grid_min(x, mu):
    x = x.astype(float)
    x1 = np.concatenate([[0.0], x[:-1]])
    x2 = np.concatenate([[0.0, 0.0], x[:-2]])[: x.size]
    r = x - GRID[:, None, None] * x1 - GRID[None, :, None] * x2 - mu
    return float((r * r).sum(axis=-1).min())


def compute_1():
    rng = stream(SEED_ORACLE)
    worst_gap, worst_resid, count = -math.inf, 0.0, 0
    while count < 100:
        n = int(rng.integers(3, 11))
        x = rng.integers(0, 21, n)
        mu = float(rng.choice([0.5, 1.0, 2.0]))
        est = estimate(x, mu)
        if est.branch is not Branch.FULL_RANK:
            continue
        count += 1
        theta = np.array([est.alpha_hat, est.beta_hat])
        worst_gap = max(worst_gap, objective(x, mu, *theta) - _grid_min(x, mu))
        neq = accumulate(x, mu)
        resid = np.abs(neq.matrix @ theta - neq.rhs)
        scale = np.abs(neq.matrix) @ np.abs(theta) + np.abs(neq.rhs)
        worst_resid = max(worst_resid, float(np.max(resid / scale)))
    return {"gap": worst_gap, "resid": worst_resid}


def compute_2():
    return {x: estimate(list(x), 1.0) for x in [(1, 2, 5), (0, 2, 5), (0, 0, 5)]}


def compute_3():
    path = simulate(InarParams(1, 0), POIS1, 100_000, SEED_AS10)
    return {"sumsq": sum_sq_scaling(path, 2, 3), "det": det_scaling(accumulate(path, 1.0), 4)}


def compute_4():
    path = simulate(InarParams(0, 1), POIS1, 100_000, SEED_AS01)
    return {"sumsq": sum_sq_scaling(path, 2, 3)}


def compute_5(threads=WORKERS):
    return run_clt_experiment(McConfig(Case.CASE10, POIS1, 2000, 1000, SEED_CLT), threads=threads)


def compute_6(threads=WORKERS):
    cfg = McConfig(Case.CASE01, POIS1, 2000, 1000, SEED_DF, df_steps=10_000, df_oracle_size=10_000)
    return run_df_experiment(cfg, threads=threads)


def compute_7():
    failures = 0
    for r in range(50):
        x = [0, 0] + simulate(InarParams(1, 0), POIS1, 1000, (SEED_DET, r)).values.tolist()
        n = len(x) - 2
        eps = [0] + [x[i] - x[i - 1] for i in range(2, len(x))]  # eps_0 = 0
        sxx = sum(x[k] ** 2 for k in range(1, n + 1))
        see = sum(eps[k - 1] ** 2 for k in range(1, n + 1))
        sxe = sum(x[k] * eps[k - 1] for k in range(1, n + 1))
        failures += accumulate(x[2:], 1.0).det != sxx * see - sxe * sxe
    return {"failures": failures}


def compute_8():
    fine = df_oracle(100_000, 10_000, SEED_DF_HI)
    coarse = df_oracle(100_000, 1_000, SEED_DF_LO)
    numer = df_oracle(100_000, 100, SEED_NUM, with_parts=True)[:, 1]
    return {"ks": ks_two_sample(fine, coarse)[0], "num_mean": float(numer.mean())}


COMPUTE = {1: compute_1, 2: compute_2, 3: compute_3, 4: compute_4, 5: compute_5, 6: compute_6, 7: compute_7, 8: compute_8}


def run_criterion(number):
    result, elapsed = timed(COMPUTE[number])
    _first_run[number] = result
    return result, elapsed


# -- criteria ---------------------------------------------------------------

def test_criterion_1_estimator_oracle(record_criterion):
    res, dt = run_criterion(1)
    ok = res["gap"] <= 1e-8 and res["resid"] <= 1e-9 and dt < 5
    record_criterion(1, "closed form vs 201x201 grid", ok,
                     f"max(Q_hat - grid_min)={res['gap']:.3g} resid={res['resid']:.2g} t={dt:.2f}s")
    assert res["gap"] <= 1e-8
    assert res["resid"] <= 1e-9
    assert dt < 5


def test_criterion_2_branch_logic(record_criterion):
    res, dt = run_criterion(2)
    full, lag1, deg = res[(1, 2, 5)], res[(0, 2, 5)], res[(0, 0, 5)]
    ok = (
        full.branch is Branch.FULL_RANK and (full.alpha_hat, full.beta_hat) == (1.0, 2.0)
        and lag1.branch is Branch.LAG1_ONLY and lag1.alpha_hat == 2.0
        and deg.branch is Branch.DEGENERATE and dt < 1
    )
    record_criterion(2, "three-branch estimator", ok, f"{full.branch.value} {lag1.branch.value} {deg.branch.value} t={dt:.3f}s")
    assert full.branch is Branch.FULL_RANK and (full.alpha_hat, full.beta_hat) == (1.0, 2.0)
    assert lag1.branch is Branch.LAG1_ONLY and lag1.alpha_hat == 2.0 and lag1.beta_hat is None
    assert deg.branch is Branch.DEGENERATE and deg.alpha_hat is None
    assert dt < 1


def test_criterion_3_as_scalings_case10(record_criterion):
    res, dt = run_criterion(3)
    e1 = abs(res["sumsq"] - 1 / 3) / (1 / 3)
    e2 = abs(res["det"] - 5 / 12) / (5 / 12)
    ok = e1 <= 0.05 and e2 <= 0.05 and dt < 5
    record_criterion(3, "case (1,0) a.s. scalings", ok,
                     f"n^-3 sumX^2={res['sumsq']:.4f} (1/3) n^-4 det={res['det']:.4f} (5/12) t={dt:.2f}s")
    assert e1 <= 0.05 and e2 <= 0.05
    assert dt < 5


def test_criterion_4_as_scaling_case01(record_criterion):
    res, dt = run_criterion(4)
    e = abs(res["sumsq"] - 1 / 12) / (1 / 12)
    ok = e <= 0.05 and dt < 5
    record_criterion(4, "case (0,1) a.s. scaling", ok, f"n^-3 sumX^2={res['sumsq']:.5f} (1/12) t={dt:.2f}s")
    assert e <= 0.05
    assert dt < 5


def test_criterion_5_clt(record_criterion):
    rep, dt = run_criterion(5)
    ks1 = rep.checks["ks_coord1_vs_normal"]["value"]
    ks2 = rep.checks["ks_coord2_vs_normal"]["value"]
    ok = ks1 <= 0.06 and ks2 <= 0.06 and rep.line_concentration <= 0.2 and rep.passed and dt < 60
    record_criterion(5, "sqrt(n) errors vs N(0, 0.8)", ok,
                     f"KS1={ks1:.4f} KS2={ks2:.4f} (<=0.06) line={rep.line_concentration:.3g} skipped={rep.skipped} t={dt:.1f}s")
    assert ks1 <= 0.06 and ks2 <= 0.06
    assert rep.line_concentration <= 0.2
    assert rep.passed
    assert dt < 60


def test_criterion_6_dickey_fuller(record_criterion):
    rep, dt = run_criterion(6)
    ks = rep.checks["ks_coord2_vs_df"]["value"]
    ks_line = rep.checks["ks_coord1_vs_neg_coord2"]["value"]
    ok = ks <= 0.08 and ks_line <= 0.08 and dt < 90
    record_criterion(6, "n errors vs Dickey-Fuller oracle", ok,
                     f"KS(n(b-1), DF)={ks:.4f} KS(n a, -n(b-1))={ks_line:.4f} (<=0.08) skipped={rep.skipped} t={dt:.1f}s")
    assert ks <= 0.08
    assert ks_line <= 0.08
    assert dt < 90


def test_criterion_7_determinant_identity(record_criterion):
    res, dt = run_criterion(7)
    ok = res["failures"] == 0 and dt < 1
    record_criterion(7, "exact determinant identity", ok, f"mismatches={res['failures']}/50 t={dt:.2f}s")
    assert res["failures"] == 0
    assert dt < 1


def test_criterion_8_df_sampler(record_criterion):
    res, dt = run_criterion(8)
    ok = res["ks"] <= 0.01 and abs(res["num_mean"]) <= 0.02 and dt < 10
    record_criterion(8, "DF sampler self-consistency", ok,
                     f"KS(1e3 vs 1e4 steps)={res['ks']:.4f} numerator mean={res['num_mean']:+.4f} t={dt:.1f}s")
    assert res["ks"] <= 0.01
    assert abs(res["num_mean"]) <= 0.02
    assert dt < 10


def _same(a, b):
    if hasattr(a, "to_json"):
        return a.to_json() == b.to_json()
    return a == b


def test_criterion_9_reproducibility(record_criterion):
    mismatched = []
    for number, fn in COMPUTE.items():
        first = _first_run.get(number)
        if first is None:
            first = fn()
        if not _same(first, fn()):
            mismatched.append(number)
    for number, fn in ((5, compute_5), (6, compute_6)):
        if not _same(fn(threads=1), fn(threads=WORKERS)):
            mismatched.append(f"{number}/threads")
    ok = not mismatched
    record_criterion(9, "bit-identical reruns (threads 1 vs 4)", ok, f"mismatches={mismatched or 'none'}")
    assert not mismatched
