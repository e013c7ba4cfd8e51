"""fracstable: inverse stable subordinators, reflected stable processes, and
time-fractional Cauchy problem solvers with cross-validated numerics."""

from .cauchy import (
    BaseSemigroup,
    FracCauchyConfig,
    decay_semigroup,
    drift_diffusion_semigroup,
    fractional_diffusion_profile,
    heat_gaussian_semigroup,
    heat_indicator_semigroup,
    mc_time_change_solve,
    subordination_solve,
)
from .errors import DomainError, NumericsError
from .gruenwald import (
    GrunwaldWeights,
    SampledFunction,
    caputo_derivative,
    grunwald_weights,
    rl_derivative_neg,
    rl_derivative_order_minus_one_at_zero,
    rl_integral,
)
from .params import GridSpec, StableParams
from .rng import RngStream
from .solver import (
    ForwardSolution,
    RateMatrix,
    SolverConfig,
    build_rate_matrix,
    convergence_study,
    initial_delta,
    integrate,
    l1_error_vs_analytic,
    transition_density,
)
from .special import (
    gamma_fn,
    inverse_subordinator_density,
    mittag_leffler,
    reflected_density_from_zero,
    spectrally_negative_density_pos,
    stable_subordinator_density,
)
from .stochastic import (
    KsResult,
    PathSample,
    ReflectionCheck,
    ks_two_sample,
    reflected_terminal_ensemble,
    reflection_identity_check,
    sample_spectrally_negative_increment,
    sample_subordinator_increment,
    simulate_inverse_subordinator,
    simulate_path,
    simulate_reflected_path,
)
from .tables import DensityTable

__version__ = "0.1.0"
