"""Spectral laboratory for quasi-periodic dispersive flows on the 2-torus."""

__version__ = "0.1.0"

from .fields import (
    FrequencyVector,
    Lattice,
    SpectralField,
    golden_omega,
    make_field_from_modes,
    pointwise_multiply,
    random_field,
    smooth_random_field,
    to_physical,
    to_spectral,
)
from .multipliers import (
    CutoffProfile,
    SymbolTable,
    apply_multiplier,
    bracket_dx,
    bracket_dy,
    bracket_nabla,
    d_x,
    d_x_inverse,
    d_y,
    dispersion_propagator,
    hilbert,
    project,
    project_box,
    schrodinger_propagator,
)
from .norms import (
    NormSpec,
    anisotropic_norm,
    lp_norm,
    mixed_spacetime_norm,
    strichartz_norm,
    x_norm,
    y_norm,
)
from .dynamics import (
    DivergedError,
    SimulationConfig,
    Trajectory,
    cauchy_study,
    convergence_study,
    galilean_compare,
    galilean_normalize,
    integrate,
    norm_growth_check,
    observable_series,
    observables,
    regularize_initial_data,
    rhs,
)
from .gauge import (
    GaugeState,
    bootstrap_quantities,
    build_F,
    exp_of_F,
    gauge_residual,
    gauge_rhs_terms,
    gauge_transform,
    reconstruct_Fx,
    reconstruct_Fxx,
)
from .estimates import EnsembleSpec, RatioReport
from .diophantine import (
    ContinuedFraction,
    continued_fraction,
    embedding_constant_scan,
    embedding_threshold,
    is_badly_approximable,
    small_divisor_scan,
)
