"""Weighted sums of exponential order-statistic spacings.

Exact simulation of C_n(w) = sum_k w(k/n) (X_{k+1:n} - X_{k:n}) for i.i.d.
exponential samples, the limiting cumulant function and its Legendre
transform (large-deviation rate), moderate-deviation and central-limit
verification harnesses, score-function (L-statistic) bridges, and empirical
cumulative-entropy estimators built on the same statistic.
"""

__version__ = "0.1.0"

from .asymptotics import (
    BridgeReport,
    CltReport,
    LdpReport,
    MdpConfig,
    MdpReport,
    clt_check,
    gz_equivalence_check,
    gz_mean,
    gz_variance,
    verify_ldp,
    verify_mdp,
)
from .entropy import (
    EntropySpec,
    empirical_entropy,
    entropy_direct,
    exact_ce_exponential,
    read_sample,
)
from .errors import (
    ConditionError,
    DivergenceError,
    DomainError,
    ExspacingsError,
    PositivityError,
    QuadratureError,
    SingularityError,
    ValidationError,
)
from .rate import (
    MomentSummary,
    RateEngine,
    SteepnessReport,
    build_engine,
    check_steepness,
    jensen_lower_bound,
    lambda_w,
    lambda_w_prime,
    lambda_w_second,
    legendre,
    legendre_solve,
    lyapunov_integral,
    m_minimizer,
    m_upper_bound,
    moment_summary,
    mu_w,
    relative_entropy_exp,
    sigma2_w,
)
from .sampler import (
    SimConfig,
    TiltedSample,
    empirical_cn,
    exact_mean_var,
    log_mgf,
    sample_cn,
    sample_cn_tilted,
)
from .weights import (
    ScoreFunction,
    WeightFunction,
    box_score,
    check_condition1,
    check_condition2,
    custom_weight,
    eval_h,
    eval_w,
    frac_cre,
    frac_gce,
    from_score,
    jtilde_score,
    parse_weight,
    poly_beta,
    w1,
    w2,
    w3,
)
