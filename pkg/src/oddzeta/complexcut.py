"""Branch-cut complex arithmetic.

A spectral cut is a ray ``R_theta = {r e^{i theta}}``.  The logarithm attached
to it takes imaginary parts in the half-open window ``(theta - 2pi, theta]``,
so ``theta`` and ``theta - 2 pi`` define *different* logarithms.  Angles are
therefore stored raw and only reduced mod 2pi inside membership tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import NotPrincipal, ZeroArgument

TWO_PI = 2.0 * math.pi
EPS_RAY = 1e-12
DEFAULT_NUDGE = math.pi / 8


@dataclass(frozen=True)
class SpectralCut:
    """The ray at angle ``theta`` (radians, never normalized)."""

    theta: float

    def partner(self, order) -> "SpectralCut":
        """The cut ``theta - order*pi`` used by symmetrized constructions."""
        return SpectralCut(self.theta - order * math.pi)

    def log(self, lam):
        return branch_log(lam, self)

    def power(self, lam, s):
        return complex_power(lam, s, self)


@dataclass(frozen=True)
class SolidAngle:
    """Open sector ``{r e^{i a}: theta1 < a < theta2}``."""

    theta1: float
    theta2: float

    def __post_init__(self):
        if self.theta1 > self.theta2:
            raise ValueError("SolidAngle needs theta1 <= theta2")

    @property
    def full(self) -> bool:
        return self.theta2 - self.theta1 >= TWO_PI


CutLike = Union[SpectralCut, float, int]


def _theta(cut: CutLike):
    if isinstance(cut, SpectralCut):
        return cut.theta
    arr = np.asarray(cut, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def _tol(theta: float) -> float:
    return EPS_RAY * max(1.0, abs(theta))


def branch_log(lam, cut: CutLike):
    """Logarithm with ``Im`` in ``(theta - 2pi, theta]``.

    Works elementwise on numpy arrays (``lam`` and ``theta`` broadcast); raises :class:`ZeroArgument` on any
    zero entry.
    """
    theta = _theta(cut)
    arr = np.asarray(lam, dtype=complex)
    if np.any(arr == 0):
        raise ZeroArgument("branch_log of 0")
    phase = theta - np.mod(theta - np.angle(arr), TWO_PI)
    out = np.log(np.abs(arr)) + 1j * phase
    if np.ndim(out) == 0:
        return complex(out)
    return out


def complex_power(lam, s, cut: CutLike):
    """``lam**s`` defined as ``exp(s * branch_log(lam, cut))``."""
    logs = branch_log(lam, cut)
    out = np.exp(s * np.asarray(logs))
    if np.ndim(out) == 0:
        return complex(out)
    return out


def angular_distance(a: float, b: float) -> float:
    """Distance between two directions on the circle, in [0, pi]."""
    d = math.fmod(a - b, TWO_PI)
    d = abs(d)
    return min(d, TWO_PI - d)


def in_solid_angle(lam: complex, angle: SolidAngle) -> bool:
    if lam == 0:
        raise ZeroArgument("in_solid_angle of 0")
    if angle.full:
        return True
    arg = math.atan2(complex(lam).imag, complex(lam).real)
    alpha = angle.theta1 + (arg - angle.theta1) % TWO_PI
    tol = _tol(angle.theta2)
    if TWO_PI - (alpha - angle.theta1) <= tol:
        # representative sits on theta1 + 2pi, i.e. on the lower boundary
        return False
    return angle.theta1 + tol < alpha < angle.theta2 - tol


def is_agmon(eigen_args: Iterable[float], cut: CutLike) -> bool:
    """True iff the ray avoids every listed eigenvalue direction."""
    theta = _theta(cut)
    tol = _tol(theta)
    return all(angular_distance(theta, a) > tol for a in eigen_args)


def _gap_above(theta: float, eigen_args) -> float | None:
    # directions sitting on the ray itself are left behind by an upward move
    tol = _tol(theta)
    gaps = [g for g in ((a - theta) % TWO_PI for a in eigen_args) if tol < g < TWO_PI - tol]
    return min(gaps) if gaps else None


def nudge_agmon(eigen_args, theta: float, order: int) -> SpectralCut:
    """Move ``theta`` slightly upward, keeping both ``theta`` and its
    ``theta - order*pi`` partner clear of eigenvalue directions.

    The step is half the smaller free gap above the two rays; with no
    eigenvalue directions at all it defaults to pi/8.
    """
    args = list(eigen_args)
    if not is_agmon(args, theta):
        raise NotPrincipal(f"theta={theta!r} lies on an eigenvalue ray")
    return nudge_above(args, theta, order)


def nudge_above(eigen_args, theta: float, order: int) -> SpectralCut:
    """As :func:`nudge_agmon` but without the principal check: directions
    sitting exactly on either ray are left behind by the upward move."""
    args = list(eigen_args)
    partner = theta - order * math.pi
    gaps = [g for g in (_gap_above(theta, args), _gap_above(partner, args)) if g is not None]
    if not gaps:
        return SpectralCut(theta + DEFAULT_NUDGE)
    return SpectralCut(theta + 0.5 * min(gaps))
