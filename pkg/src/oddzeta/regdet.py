"""Zeta-regularized and symmetrized determinants of model operators."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .complexcut import SolidAngle, SpectralCut, angular_distance, branch_log, in_solid_angle, nudge_above
from .errors import (
    HypothesisViolated,
    InfiniteBothSides,
    NotAgmon,
    NotSymmetric,
    OddOrderRequired,
    PoleAtZero,
)
from .spectralmodel import (
    SpectralOperator,
    count_imaginary_axis,
    is_symmetric_spectrum,
    multiply_commuting,
    spectral_projection,
    square_op,
)
from .zetacontinuation import ZetaFunction, laurent_at_0

EPS_DET = 1e-8
EPS_ANGLE = 1e-6
EPS_MULT = 1e-5
POLE_TOL = 1e-8


@dataclass(frozen=True)
class DetResult:
    log_det: complex
    angle_used: float
    partner_angle: float | None = None
    branch_provenance: dict = field(default_factory=dict, compare=False)

    @property
    def det(self) -> complex:
        return cmath.exp(self.log_det)


def _cut(theta) -> SpectralCut:
    return theta if isinstance(theta, SpectralCut) else SpectralCut(float(theta))


def log_det(A: SpectralOperator, cut, k_expand: int = 6, n_tail: int = 10_000,
            radius: float = 0.1, samples: int = 32) -> DetResult:
    """``d/ds`` at ``s = 0`` of the continued ``sum_n mult_n (lambda_n)^s_(theta)``."""
    cut = _cut(cut)
    Z = ZetaFunction(A, cut, None, k_expand, n_tail)
    L = laurent_at_0(Z, radius=radius, samples=samples)
    if abs(L.pole_coefficient) > POLE_TOL:
        raise PoleAtZero(f"zeta function has a pole at s = 0 (residue {L.pole_coefficient:.3g})")
    prov = dict(L.diagnostics, zeta_at_0=L.finite_part, pole=L.pole_coefficient)
    return DetResult(L.derivative_at_0, cut.theta, None, prov)


def log_det_sym(A: SpectralOperator, theta, **params) -> DetResult:
    """Average of the log-determinants at ``theta`` and ``theta - m pi``."""
    cut = _cut(theta)
    partner = cut.partner(A.order)
    for c in (cut, partner):
        if not A.is_agmon(c):
            raise NotAgmon(f"theta = {c.theta!r} is not an Agmon angle for this operator")
    d1 = log_det(A, cut, **params)
    d2 = log_det(A, partner, **params)
    prov = {"theta": d1.branch_provenance, "partner": d2.branch_provenance,
            "log_det_theta": d1.log_det, "log_det_partner": d2.log_det}
    return DetResult(0.5 * (d1.log_det + d2.log_det), cut.theta, partner.theta, prov)


def sufficiently_close(A: SpectralOperator, theta: float) -> SpectralCut:
    """``theta`` itself if it and its ``theta - m pi`` partner are Agmon,
    otherwise a slightly larger angle with no eigenvalue crossed."""
    cut = _cut(theta)
    if A.is_agmon(cut) and A.is_agmon(cut.partner(A.order)):
        return cut
    return nudge_above(A.eigen_arguments(), cut.theta, A.order)


def check_det_square(A: SpectralOperator, theta: float, tol: float = EPS_DET, **params):
    """``Det^sym_(2 theta)(A^2)`` against ``(Det^sym_(theta) A)^2`` for odd order."""
    if A.order % 2 == 0:
        raise OddOrderRequired("the square identity is stated for odd order")
    rhs = cmath.exp(2 * log_det_sym(A, theta, **params).log_det)
    lhs = cmath.exp(log_det_sym(square_op(A), 2 * float(theta), **params).log_det)
    return lhs, rhs, abs(lhs - rhs) < tol * abs(rhs)


def _finite_between(A: SpectralOperator, lo: float, hi: float) -> bool:
    if hi - lo <= 0:
        return True
    try:
        return spectral_projection(A, SolidAngle(lo, hi)).kind == "finite"
    except InfiniteBothSides:
        return False


def angle_hypothesis(A: SpectralOperator, theta1: float, theta2: float) -> str | None:
    """Which form of the angle-dependence hypothesis holds, if any.

    ``"between"``: finitely many eigenvalues in both sectors
    ``(theta1, theta2)`` and ``(theta1 - m pi, theta2 - m pi)``.
    ``"union"``: all but finitely many eigenvalues lie in the union of the
    two sectors.
    """
    lo, hi = sorted((float(theta1), float(theta2)))
    m = A.order
    if _finite_between(A, lo, hi) and _finite_between(A, lo - m * math.pi, hi - m * math.pi):
        return "between"
    try:
        p1 = spectral_projection(A, SolidAngle(lo, hi))
        p2 = spectral_projection(A, SolidAngle(lo - m * math.pi, hi - m * math.pi))
    except InfiniteBothSides:
        return None
    if set(p1.branches) | set(p2.branches) == {1, -1}:
        return "union"
    return None


def _pi_residual(x: float) -> float:
    r = math.fmod(x, math.pi)
    r = abs(r)
    return min(r, math.pi - r)


def check_angle_dependence(A: SpectralOperator, theta1: float, theta2: float,
                           tol: float = EPS_ANGLE, **params):
    """``log Det^sym_(theta1) - log Det^sym_(theta2)`` and whether it lies in ``i pi Z``."""
    if angle_hypothesis(A, theta1, theta2) is None:
        raise HypothesisViolated("neither finitely many eigenvalues between the cuts nor cofinitely many")
    d = log_det_sym(A, theta1, **params).log_det - log_det_sym(A, theta2, **params).log_det
    return d, abs(d.real) < tol and _pi_residual(d.imag) < tol


def _eigenvalues_in_open_sector(A: SpectralOperator, lo: float, hi: float) -> list[int]:
    # eigenvalues on the boundary rays are allowed here
    sector = SolidAngle(lo, hi)
    k0 = 1
    for sigma in (1, -1):
        d = A.leading_direction(sigma)
        if in_solid_angle(cmath.exp(1j * d), sector):
            raise HypothesisViolated("a spectral branch accumulates inside the sector")
        margin = min(angular_distance(d, lo), angular_distance(d, hi))
        if margin <= 1e-9:
            raise HypothesisViolated("a spectral branch accumulates on a sector boundary")
        k0 = max(k0, A.law.tail_start(sigma, margin))
    return [n for n in A.explicit_indices(k0) if in_solid_angle(A.eigenvalue(n)[0], sector)]


def _real_leading(A: SpectralOperator) -> bool:
    return all(A.law.leading(s).imag == 0 for s in (1, -1)) and A.law.leading(1) * A.law.leading(-1).conjugate() != 0


def sign_symmetric(A: SpectralOperator, theta: float, **params):
    """(predicted sign, measured sign, |Im log Det^sym + m_+ pi| mod 2 pi)."""
    if A.order % 2 == 0:
        raise OddOrderRequired("the sign law is stated for odd order")
    if not is_symmetric_spectrum(A):
        raise NotSymmetric("eigenvalue multiset is not conjugation invariant")
    if not (math.pi / 2 < theta < math.pi):
        raise HypothesisViolated("theta must lie in (pi/2, pi)")
    if not _real_leading(A):
        raise HypothesisViolated("leading behaviour must be real")
    # no eigenvalues strictly between the cuts and the imaginary axis
    for lo, hi in ((math.pi / 2, theta), (-math.pi / 2, theta - math.pi)):
        if _eigenvalues_in_open_sector(A, lo, hi):
            raise HypothesisViolated(f"eigenvalues in the sector ({lo:.4g}, {hi:.4g})")
    m_plus, _ = count_imaginary_axis(A)
    L = log_det_sym(A, theta, **params).log_det
    predicted = (-1) ** m_plus
    value = cmath.exp(L)
    measured = 1 if value.real > 0 else -1
    r = math.fmod(L.imag + m_plus * math.pi, 2 * math.pi)
    residual = min(abs(r), 2 * math.pi - abs(r))
    return predicted, measured, residual


def finite_modification_shift(A: SpectralOperator, modified: SpectralOperator, cut) -> complex:
    """Exact change of ``log Det_(theta)`` when finitely many eigenvalues change:
    ``sum_n [mult' log(lambda'_n) - mult log(lambda_n)]`` over differing indices."""
    if A.law != modified.law or A.index_set != modified.index_set:
        raise ValueError("operators must share the law and index set")
    total = 0j
    for n in sorted(set(A.exceptions) | set(modified.exceptions)):
        lam, m = A.eigenvalue(n)
        lam2, m2 = modified.eigenvalue(n)
        total += m2 * branch_log(lam2, cut) - m * branch_log(lam, cut)
    return total


def multiplicativity_check(A: SpectralOperator, B: SpectralOperator, theta_A: float, theta_B: float,
                           theta_AB: float | None = None, tol: float = EPS_MULT, **params):
    """Ratio ``Det^sym(AB) / (Det^sym A Det^sym B)`` for commuting models.

    Angles are replaced by sufficiently close Agmon angles when needed.  The
    default ``theta_AB`` is ``theta_B + eps theta_A`` with ``eps = 1`` for
    ``theta_A in (0, pi)`` and ``-1`` for ``theta_A in (pi, 2 pi)``.
    """
    if theta_AB is None:
        eps = 1 if 0 < theta_A < math.pi else -1
        theta_AB = theta_B + eps * theta_A
    AB = multiply_commuting(A, B)
    dA = log_det_sym(A, sufficiently_close(A, theta_A), **params).log_det
    dB = log_det_sym(B, sufficiently_close(B, theta_B), **params).log_det
    dAB = log_det_sym(AB, sufficiently_close(AB, theta_AB), **params).log_det
    ratio = cmath.exp(dAB - dA - dB)
    sign = 1 if ratio.real >= 0 else -1
    return ratio, sign, abs(ratio - sign) < tol
