"""Symmetrized zeta-regularized determinants and traces for odd-class operators.

Spectral side: diagonal model operators with polynomial eigenvalue laws,
continued zeta functions, weighted and symmetrized traces, determinants.
Symbol side: scalar pseudo-differential symbols on the circle, complex powers,
logarithms, residues and the multiplicative-anomaly integrand.
"""
from .complexcut import (
    SolidAngle,
    SpectralCut,
    angular_distance,
    branch_log,
    complex_power,
    in_solid_angle,
    is_agmon,
    nudge_agmon,
)
from .errors import OddZetaError
from .regdet import (
    DetResult,
    check_angle_dependence,
    check_det_square,
    log_det,
    log_det_sym,
    multiplicativity_check,
    sign_symmetric,
    sufficiently_close,
)
from .spectralmodel import (
    SpectralLaw,
    SpectralOperator,
    count_imaginary_axis,
    d_c,
    is_symmetric_spectrum,
    laplace_type,
    log_op,
    multiply_commuting,
    power_op,
    spectral_projection,
    square_op,
)
from .symbolcalc import (
    Symbol,
    anomaly_integrand,
    compose,
    differential_symbol,
    is_odd_class,
    is_odd_pair,
    log_symbol,
    power_symbol,
    residue_coboundary,
    residue_coboundary_sym,
    resolvent_symbols,
    wodzicki_res,
)
from .zetacontinuation import ZetaFunction, continue_at, hurwitz_zeta, laurent_at_0, tr_sym, weighted_trace

__version__ = "0.1.0"
