"""Stationary-phase toolkit for non-scattering wave numbers of star-shaped scatterers."""

from .asymptotics import (
    AsymptoticTerm,
    DecayTable,
    LambdaSet,
    MatchingReport,
    VandermondeVerdict,
    decay_probe,
    f_values,
    g_ratio,
    lambda_set,
    leading_order,
    matching_conditions_at_axis,
    vandermonde_classify,
)
from .density import HerglotzDensity, eval_density, helmholtz_residual, herglotz_wave
from .disk import (
    WaveNumberRoot,
    bessel_j,
    bessel_j_prime,
    nonscattering_determinant,
    transmission_residual,
    wavenumber_sequence,
)
from .errors import DiagnosticError, NonScatterError, ValidationError
from .geometry import (
    BoundaryJet,
    HypothesisReport,
    RadiusFunction,
    boundary_jet,
    check_hypotheses,
    max_log_second_derivative,
    sign_profile,
)
from .oracle import QuadratureSpec, integral_area, integral_I, integral_I_N
from .stationary import (
    StationaryPoint,
    T_derivative,
    compose_iterate,
    ellipse_stationary_set,
    ellipse_T,
    h_function,
    inverse_T,
    solve_T,
    stationary_set,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
