"""
crossnorm
=========

Injective, projective and uniform crossnorms on finite-dimensional
``l_p (x) l_p`` tensor products, induced norms of operator tensors, and
direction-aware numerical checks of the inequalities relating them.

Every computed norm is a :class:`NormEstimate` that says whether its value
is exact, a certified lower bound, a certified upper bound or a heuristic.
"""

from .crossnorms import (
    HILBERTIAN,
    INJECTIVE,
    PROJECTIVE,
    CrossnormKind,
    CrossnormTag,
    alpha_norm,
    entrywise,
    entrywise_norm,
    injective_norm,
    projective_norm,
)
from .estimates import Budget, Direction, NormEstimate
from .exceptions import BudgetError, CapabilityError, CrossnormError, DimensionError
from .operator_norms import (
    InducedNormSpec,
    functional_operator_dual_norm,
    functional_tensor_norm,
    induced_crossnorm,
    operator_norm,
    operator_tensor_injective_norm,
    operator_tensor_projective_norm,
)
from .spaces import INF, Functional, LpSpace, dual_exponent, dual_norm, sample_unit_sphere, unit_ball_extreme_points, vector_norm
from .tensor_core import (
    Decomposition,
    OperatorFunctionalTensor,
    OperatorTensor,
    Tensor,
    apply,
    apply_adjoint,
    compose,
    pair,
    single_tensor,
)
from .verify import (
    CheckRecord,
    Verdict,
    check_corollary_44,
    check_gamma,
    check_prop_32_dual_bound,
    check_question4,
    check_remark_chain,
    check_sandwich,
    check_theorem_41,
    check_uniform_identity,
    equivalence_ratio,
    equivalence_ratio_inf,
    gamma_constant,
)

__version__ = "0.1.0"
