"""Symmetric-subspace numerics.

Exact combinatorics, dense tensor-space operators, the cloning and
measure-and-prepare channel families with their exchange identities, de Finetti
coefficient recursions, seeded Monte Carlo moment checks, and moment-method
concentration bounds.
"""

from .exactcomb import (
    TypeVector,
    binomial,
    enumerate_types,
    jacobi_polynomial,
    mp_clone_coefficient,
    mp_clone_polynomial,
    mp_polynomial_jacobi_identity,
    multinomial,
    real_moment_ratio,
    sym_dim,
)
from .guards import DimensionGuardError, max_dim, set_max_dim
from .tensorspace import (
    Matching,
    Operator,
    Permutation,
    conjugation_fixed_dimension,
    enumerate_matchings,
    matching_from_permutation,
    matching_operator,
    operator_from_json,
    operator_tensor,
    operator_to_json,
    partial_trace,
    permutation_operator,
    sym_projector_group,
    tensor_power_span_rank,
    type_isometry,
)
from .channels import (
    Superoperator,
    apply,
    choi_matrix,
    clone_channel,
    clone_channel_sym,
    compose,
    estimation_fidelity,
    f_overlap,
    mp_channel,
    mp_channel_sym,
    trace_channel,
    trace_channel_sym,
    verify_chiribella,
)
from .definetti import (
    DeFinettiCoefficients,
    check_coefficient_bounds,
    definetti_epsilon,
    exp_definetti_coefficients,
    exp_definetti_full_coefficients,
    verify_exp_definetti,
)
from .randomness import (
    RngStream,
    gaussian_vector,
    haar_state,
    haar_unitary,
    mc_projector_moment,
    mc_real_unit_moment,
    mc_tensor_power_mean,
    random_projector,
)
from .concentration import (
    MultiPartition,
    TailBoundResult,
    experiment_product_free,
    experiment_schmidt_tail,
    mu_exact,
    nu_max,
    product_state_threshold,
    smooth_gap_bound,
    tail_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
