"""Photon-added amplified coherent states a^dag^m |g alpha>: Fock statistics,
Wigner functions and amplifier figures of merit, each cross-checked by an
independent route."""
from .special import DerivativeOrder, QuadraticExponent, extract_derivative, laguerre, log_factorial
from .state import (
    DensityMatrix,
    FockVector,
    MpaacsParams,
    NormalizationTriple,
    StateClass,
    build_adamcs,
    build_amadcs,
    classify_special_case,
    density_matrix,
    fock_coefficients,
    normalization,
    pnd,
)
from .phase_space import (
    PhaseSpaceGrid,
    WignerField,
    marginal_x,
    section_y0,
    wigner_analytic,
    wigner_fock_sum,
    wigner_generating,
    wigner_grid,
)
from .metrics import (
    AmplifierReport,
    MomentTable,
    QuadratureStats,
    effective_gain,
    equivalent_input_noise,
    moment,
    quadrature_stats,
    squeezing_threshold,
    sweep,
)

__version__ = "0.1.0"
