import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddzeta.complexcut import (
    DEFAULT_NUDGE,
    SolidAngle,
    SpectralCut,
    angular_distance,
    branch_log,
    complex_power,
    in_solid_angle,
    is_agmon,
    nudge_agmon,
)
from oddzeta.errors import NotPrincipal, ZeroArgument

PI = math.pi

nonzero = st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False)
angles = st.floats(-20, 20, allow_nan=False)


@pytest.mark.parametrize("lam, theta, expected", [
    (1, PI, 0),
    (-1, PI, 1j * PI),
    (-1, PI / 2, -1j * PI),
    (1j, PI / 4, -1.5j * PI),
])
def test_branch_log_examples(lam, theta, expected):
    assert branch_log(lam, theta) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("lam, s, theta, expected", [
    (4, 0.5, PI, 2),
    (-1, 0.5, PI, 1j),
    (-1, 0.5, 0.0, -1j),
])
def test_complex_power_examples(lam, s, theta, expected):
    assert complex_power(lam, s, theta) == pytest.approx(expected, abs=1e-15)


def test_zero_argument_rejected():
    with pytest.raises(ZeroArgument):
        branch_log(0, 1.0)
    with pytest.raises(ZeroArgument):
        branch_log(np.array([1.0, 0.0]), 1.0)
    with pytest.raises(ZeroArgument):
        in_solid_angle(0, SolidAngle(0, 1))


def test_cut_is_not_normalized():
    # theta and theta - 2 pi are different logarithms
    assert SpectralCut(PI).log(-1) == pytest.approx(1j * PI)
    assert SpectralCut(-PI).log(-1) == pytest.approx(-1j * PI)
    assert SpectralCut(3 * PI / 4).partner(1).theta == pytest.approx(-PI / 4)


def test_vectorized_matches_scalar():
    lam = np.array([1, -1, 1j, -2 - 3j, 0.5 + 1e-9j])
    vec = branch_log(lam, 0.3)
    assert np.allclose(vec, [branch_log(complex(z), 0.3) for z in lam], atol=0)


@given(nonzero, angles)
def test_branch_log_window_and_exponential(lam, theta):
    val = branch_log(lam, theta)
    assert theta - 2 * PI - 1e-12 < val.imag <= theta + 1e-12
    assert cmath.exp(val) == pytest.approx(lam, rel=1e-12)


def _off_ray(lam, theta) -> bool:
    # within rounding of the cut ray the half-open window is not resolvable
    return angular_distance(math.atan2(lam.imag, lam.real), theta) > 1e-12 * max(1.0, abs(theta) + 40)


@given(nonzero, angles, st.integers(-5, 5))
def test_branch_shift_law(lam, theta, k):
    if not _off_ray(lam, theta):
        return
    shifted = branch_log(lam, theta + 2 * k * PI)
    assert abs(shifted - (branch_log(lam, theta) + 2j * k * PI)) < 1e-12 * max(1, abs(theta) + abs(k) * 7)


@settings(max_examples=200)
@given(nonzero, angles,
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_power_group_law(lam, theta, s, t):
    lhs = complex_power(lam, s + t, theta)
    rhs = complex_power(lam, s, theta) * complex_power(lam, t, theta)
    assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(lhs))


@pytest.mark.parametrize("lam, angle, expected", [
    (1j, SolidAngle(0, PI), True),
    (1, SolidAngle(0, PI), False),
    (-5, SolidAngle(0, 4 * PI), True),
    (-1, SolidAngle(PI / 2, 3 * PI / 2), True),
    (-1j, SolidAngle(-PI, 0), True),
    (1, SolidAngle(-0.1, 0.1), True),
])
def test_in_solid_angle(lam, angle, expected):
    assert in_solid_angle(lam, angle) is expected


def test_solid_angle_ordering():
    with pytest.raises(ValueError):
        SolidAngle(1.0, 0.0)
    assert SolidAngle(0, 2 * PI).full


@pytest.mark.parametrize("args, theta, expected", [
    ([0, PI], PI / 2, True),
    ([PI / 2], PI / 2, False),
    ([0], 2 * PI, False),
    ([0], -2 * PI, False),
    ([], 1.0, True),
])
def test_is_agmon(args, theta, expected):
    assert is_agmon(args, theta) is expected


def test_nudge_examples():
    assert nudge_agmon([0, PI], PI / 2, 1).theta == pytest.approx(3 * PI / 4)
    # empty spectrum: the step falls back to the default
    assert nudge_agmon([], 1.0, 2).theta == pytest.approx(1.0 + DEFAULT_NUDGE)
    with pytest.raises(NotPrincipal):
        nudge_agmon([PI / 2], PI / 2, 1)


@given(st.lists(st.floats(-PI, PI), min_size=1, max_size=6), st.floats(-PI, PI), st.integers(1, 3))
def test_nudge_crosses_no_direction(args, theta, order):
    if not (is_agmon(args, theta) and is_agmon(args, theta - order * PI)):
        return
    new = nudge_agmon(args, theta, order).theta
    assert new > theta
    for base in (theta, theta - order * PI):
        moved = base + (new - theta)
        assert is_agmon(args, moved)
        for a in args:
            gap = (a - base) % (2 * PI)
            assert not (0 < gap < new - theta)


@given(angles, angles)
def test_angular_distance_symmetric(a, b):
    d = angular_distance(a, b)
    assert 0 <= d <= PI + 1e-12
    assert d == pytest.approx(angular_distance(b, a), abs=1e-12)
