"""Dual-systems (capture-recapture) estimation of an unknown event count.

Two overlapping record systems each observe a subset of the same events.
This package evaluates integrated likelihoods for the unknown total under
three observation models -- a 2 x 2 contingency model, an
independent-survival binomial model for per-event document counts, and a
correlated-survival (Conway-Maxwell-binomial) generalization -- then turns
them into discrete posterior distributions and quantile reports under a
uniform prior on the total.
"""

from .capture_data import (
    CaptureDataError,
    CaptureTable,
    ReducedTable,
    SummaryStats,
    bundled_data_path,
    load_capture_table,
    reduce,
    summarize,
)
from .combinomial import ComBinomialParams, log_Z, log_pmf, pmf_row
from .lognum import log_binomial, log_factorial, log_sum_exp
from .models import (
    DEFAULT_DEMOGRAPHICS,
    DemographicInputs,
    DemographicRange,
    GridError,
    NuisanceGrid,
    demographic_range,
    loglik_binomial,
    loglik_binomial_batch,
    loglik_combinomial,
    loglik_combinomial_batch,
    loglik_simple,
    loglik_simple_batch,
)
from .posterior import (
    DECILE_PROBS,
    NumericError,
    PosteriorDistribution,
    PriorSpec,
    QuantileReport,
    compute_posterior,
    decile_report,
    quantile,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # numeric primitives
    "log_factorial",
    "log_binomial",
    "log_sum_exp",
    # data layer
    "CaptureDataError",
    "CaptureTable",
    "ReducedTable",
    "SummaryStats",
    "load_capture_table",
    "reduce",
    "summarize",
    "bundled_data_path",
    # correlated-survival family
    "ComBinomialParams",
    "log_Z",
    "log_pmf",
    "pmf_row",
    # integrated likelihoods
    "GridError",
    "NuisanceGrid",
    "loglik_simple",
    "loglik_simple_batch",
    "loglik_binomial",
    "loglik_binomial_batch",
    "loglik_combinomial",
    "loglik_combinomial_batch",
    # demographics
    "DemographicInputs",
    "DemographicRange",
    "demographic_range",
    "DEFAULT_DEMOGRAPHICS",
    # posterior layer
    "NumericError",
    "PriorSpec",
    "PosteriorDistribution",
    "QuantileReport",
    "compute_posterior",
    "quantile",
    "decile_report",
    "DECILE_PROBS",
]
