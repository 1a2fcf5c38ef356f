"""Exact-arithmetic toolkit for deformed Perelomov-Popov measures.

Builds the atomic measures attached to signatures, computes their limiting
moments, free cumulants and 1/N corrections from log Schur-generating-
function Taylor data, transfers limits between deformation parameters
(Markov-Krein style), and cross-checks everything against closed-form
densities by double-exponential quadrature.
"""

from .errors import (
    BadConstantTerm,
    BadParams,
    DegenerateInput,
    InsufficientOrder,
    NotInvertible,
    NotRevertible,
    OrderMismatch,
    OutOfDomain,
    QppError,
    QuadratureFailure,
    QZeroBranch,
    TooCloseToSupport,
    TooLarge,
    UnknownPreset,
)
from .series import Series, as_rational, binomial_series, rational_str
from .signatures import (
    AtomicMeasure,
    Signature,
    gf_moment_series,
    newton_partition_sum,
    pp_measure,
    pp_moment_direct,
    supersym_check,
)
from .partitions import NCPartition, is_noncrossing, nc_partitions, set_partitions
from .freeprob import (
    CumulantSeq,
    InfPair,
    MomentSeq,
    beta_data,
    beta_moments,
    beta_r_series,
    corr_moments_from_cumulants_nc,
    cumulants_to_moments,
    eq_series,
    free_convolve,
    inf_cumulants_from_moments,
    inf_free_convolve,
    inf_moments_from_cumulants,
    moments_from_cumulants_nc,
    moments_to_cumulants,
    nc_enumerate,
    otimes_q,
    r_quant,
)
from .limits import (
    PhiSpec,
    PsiSpec,
    char_presets,
    inf_correction_moments,
    inf_cumulants,
    inf_pair_from_profiles,
    inf_transfer,
    limit_cumulants,
    limit_moments,
    limit_moments_alt,
    p_map,
    psi_invert_argument,
    q_map,
    q_transfer,
    reflect_moments,
)
from .densities import (
    DensityModel,
    eval_density,
    make_model,
    mk_dense_stieltjes_closed,
    quadrature,
    stieltjes_numeric,
    verify_p_relation,
)

__version__ = "0.1.0"
