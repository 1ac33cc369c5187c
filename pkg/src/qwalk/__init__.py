"""qwalk: a numerical laboratory for classical lattice random walks, their
coin-plus-walker quantum counterparts, and truncated-Fock-space limits.

All values are immutable after construction and every operation is a pure
function, so independent computations parallelize freely.
"""

__version__ = "0.1.0"

from .classical import (
    Boundary,
    StochKind,
    StochMatrix,
    WalkLattice,
    check_pd,
    cyclic_convolve,
    delta_matrix,
    evolve_pd,
    gillis,
    gillis2d,
    gillis_general,
    ls_walk,
    point_mass,
    polya,
    random_pd,
    shift_operators,
    step,
    uniform_pd,
)
from .crt import (
    CoassocReport,
    CrtSplit,
    FactorizationReport,
    coassoc_check,
    compose_pd,
    crt_delta,
    crt_mu,
    crt_split,
    factorization_check,
    factorize_pd,
    v_delta,
)
from .errors import (
    ConfigError,
    DimensionBudgetError,
    DimensionMismatchError,
    NonUnitaryInputError,
    NormalizationLostError,
    NotFactorizableError,
    NotMajorizedError,
    OverflowGuardError,
    QwalkError,
    ScalingInvalidError,
    StabilityBoundError,
    TruncationInadequateError,
)
from .fock import (
    AdjointActionReport,
    DiffusionLimitReport,
    FockSpace,
    MasterEqParams,
    adjoint_action_check,
    coherent_state,
    cs_qrw_step,
    cs_step_unitary,
    coin_trace_channel,
    diffusion_limit_check,
    displacement,
    hw_functional,
    hw_transition_monomial,
    integrate_dual,
    integrate_master_eq,
    master_eq_rhs,
    trace_norm,
)
from .linalg import (
    DensityMatrix,
    dagger,
    expm,
    hadamard_product,
    kron,
    kron_all,
    partial_trace_first,
    symmetrize,
)
from .majorization import (
    MajorizationVerdict,
    Relation,
    is_bistochastic,
    majorizes,
    product_functional,
    schur_functional,
    shannon_entropy,
    t_transform_chain,
    t_transform_sequence,
)
from .quantum import (
    CoinSpec,
    KrausSet,
    Scheme,
    WalkState,
    build_step_unitary,
    coin_probabilities,
    cptp_apply,
    delayed_trace_pd_report,
    delta_q_coefficients,
    delta_q_matrix,
    dft_matrix,
    evolve,
    distance_moment,
    fourier_conjugate_walk,
    hadamard_coin,
    kraus_from_unitary,
    kraus_pd_matrix,
    point_mass_density,
    position_pd,
    pq_coin,
    sigma,
    unitarize_k,
    walk_densities,
)
