"""One-dimensional N-body quantum models with spin-dependent contact interactions.

Construction and numerical verification of exactly solvable multi-particle
models where the interaction lives entirely in boundary conditions at
coincidence points: exchange-operator (Yang-Baxter) consistency checks,
Bethe-ansatz wavefunctions against the contact conditions, bound-state
spectra for delta-type and separated couplings, and factorized scattering
matrices.
"""

from .bethe import (
    BetheCoefficients,
    BoundaryReport,
    WavefunctionSample,
    boundary_residual,
    energy,
    evaluate,
    hyperplane_samples,
    propagate_coefficients,
)
from .errors import (
    HyperplaneError,
    ModelFileError,
    PropagationError,
    SingularExchangeError,
    ValidationError,
)
from .models import (
    BlockBC,
    BlockBCReport,
    CouplingMatrix,
    CouplingReport,
    ScalarBC,
    SeparatedModel,
    SpinHalfParams,
    bound1_bc,
    bound2_bc,
    consistent_coupling,
    delta_bc,
    project_to_commutant,
    random_consistent_coupling,
    spin_half_coupling,
    swap_matrix,
    validate_block_bc,
    validate_coupling,
    validate_scalar_bc,
)
from .rng import Xoshiro256StarStar
from .spectra import (
    BoundStateMode,
    ScatteringMatrix,
    SeparatedBoundState,
    bound_state_boundary_residual,
    cluster_scattering_matrix,
    n_body_bound_states,
    s_element,
    scattering_matrix,
    separated_bound_states,
    separated_boundary_residual,
    symmetry_residual,
    two_body_bound_states,
    unitarity_residual,
)
from .tensor_algebra import (
    MultiIndex,
    SpinConfig,
    Statistics,
    apply_site_permutation,
    apply_two_site,
    decode,
    embed_two_site,
    encode,
    permutation_operator,
    permutation_parity,
    site_permutation_operator,
    statistics_permutation,
)
from .yang_baxter import (
    MomentumSet,
    YOperator,
    constant_ybe_residual,
    pair_exchange_matrix,
    pair_momentum,
    separated_y,
    y_operator,
    ybe_disjoint_residual,
    ybe_residual,
)

__version__ = "0.1.0"
