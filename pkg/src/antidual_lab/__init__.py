"""Antifunctionals on weighted sequence spaces: Riesz restriction, approximant limits along chains, witnesses."""

from .errors import (
    AntidualError,
    BudgetExhausted,
    ChainNeverContains,
    ChainNotNested,
    IncrementalDrift,
    NotBounded,
    NotOrthogonal,
    NotReal,
    NotUnit,
    PairingMismatch,
)
from .indexsets import IndexSet
from .space import (
    TAU_ONB,
    TAU_RANK,
    Subspace,
    Vector,
    WeightedSpace,
    direct_sum,
    extend,
    inner_product,
    norm,
    orthonormalize,
    project,
)
from .functionals import (
    Alternating,
    Antifunctional,
    Constant,
    FiniteSupport,
    Indicator,
    Masked,
    NormEstimate,
    NormVerdict,
    PowerLaw,
    Sum,
    embed,
    evaluate,
    hyperplane_update,
    mask,
    operator_norm_estimate,
    power_law_tail,
    riesz_restrict,
)
from .chains import (
    EvaluationOutcome,
    SubspaceChain,
    Trace,
    Verdict,
    approximant_trace,
    pairing_check,
    partial_inner_product,
    pointwise_limit_check,
    polarization_reconstruct,
    split_partial_inner_product,
)
from .witnesses import (
    DivergenceCertificate,
    check_certificate,
    divergence_certificate,
    divergence_step,
    numerical_radius_witness,
    real_range_extremes,
    real_range_interval,
    sample_real_range,
)

__version__ = "0.1.0"

__all__ = [
    "IndexSet",
    "AntidualError",
    "BudgetExhausted",
    "ChainNeverContains",
    "ChainNotNested",
    "IncrementalDrift",
    "NotBounded",
    "NotOrthogonal",
    "NotReal",
    "NotUnit",
    "PairingMismatch",
    "TAU_ONB",
    "TAU_RANK",
    "Subspace",
    "Vector",
    "WeightedSpace",
    "direct_sum",
    "extend",
    "inner_product",
    "norm",
    "orthonormalize",
    "project",
    "Alternating",
    "Antifunctional",
    "Constant",
    "FiniteSupport",
    "Indicator",
    "Masked",
    "NormEstimate",
    "NormVerdict",
    "PowerLaw",
    "Sum",
    "embed",
    "evaluate",
    "hyperplane_update",
    "mask",
    "operator_norm_estimate",
    "power_law_tail",
    "riesz_restrict",
    "EvaluationOutcome",
    "SubspaceChain",
    "Trace",
    "Verdict",
    "approximant_trace",
    "pairing_check",
    "partial_inner_product",
    "pointwise_limit_check",
    "polarization_reconstruct",
    "split_partial_inner_product",
    "DivergenceCertificate",
    "check_certificate",
    "divergence_certificate",
    "divergence_step",
    "numerical_radius_witness",
    "real_range_extremes",
    "real_range_interval",
    "sample_real_range",
]
