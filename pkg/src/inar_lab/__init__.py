"""Simulation and CLS estimation for nonprimitive unstable INAR(2) processes."""

from .cls import (
    AccumulatorOverflow,
    Branch,
    ClsEstimate,
    CollinearRegressors,
    NormalEquations,
    Rate,
    accumulate,
    building_blocks,
    det_scaling,
    estimate,
    objective,
    scaled_error,
    sum_sq_scaling,
)
from .innovations import InnovationSpec, Law, moments, sample_innovation, stream, thin
from .limit_laws import CltLimit, DfSample, clt_limit, df_oracle, normal_cdf, sample_df
from .montecarlo import (
    Case,
    McConfig,
    McReport,
    ks_one_sample,
    ks_two_sample,
    run_clt_experiment,
    run_df_experiment,
)
from .process import (
    InarParams,
    SamplePath,
    Stability,
    classify,
    is_primitive,
    residuals,
    simulate,
    split_even_odd,
)

__version__ = "0.1.0"
