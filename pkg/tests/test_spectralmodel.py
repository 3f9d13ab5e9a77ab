import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oddzeta.complexcut import SolidAngle, SpectralCut
from oddzeta.errors import (
    BoundaryEigenvalue,
    IndexOutOfSet,
    IndexSetMismatch,
    InfiniteBothSides,
    NotAgmon,
    NotElliptic,
    SchemaError,
)
from oddzeta.spectralmodel import (
    Exact,
    SpectralLaw,
    SpectralOperator,
    count_imaginary_axis,
    d_c,
    is_symmetric_spectrum,
    laplace_type,
    log_op,
    multiply_commuting,
    power_op,
    series_log,
    series_pow,
    spectral_projection,
    square_op,
)

PI = math.pi


def test_eigenvalue_examples():
    assert d_c("1/3").exact_eigenvalue(2) == (Exact(Fraction(7, 3)), 1)
    assert d_c("1/3", {1: (1j, 1)}).eigenvalue(1) == (1j, 1)
    assert laplace_type(1).eigenvalue(-3) == (10, 1)


def test_vectorized_eigenvalues_match_exact():
    A = d_c("2/7", {3: ((0, 5), 2), -2: (("1/2", "-1"), 1)})
    ns = np.arange(-10, 11)
    assert np.allclose(A.eigenvalues(ns), [complex(A.exact_eigenvalue(int(n))[0]) for n in ns], atol=0)


def test_power_and_log_families():
    D = d_c("1/2")
    ns = np.arange(-6, 7)
    assert np.allclose(power_op(D, 1, PI / 2).values(ns), D.eigenvalues(ns))
    assert np.allclose(power_op(D, 0, PI / 2).values(ns), 1)
    # lambda_{-1} = -1/2 and branch_log(-1/2, pi/2) = ln(1/2) - i pi
    assert power_op(D, 0.5, PI / 2).value(-1) == pytest.approx(-1j / math.sqrt(2))
    assert log_op(laplace_type(0, {0: (1, 1)}), PI).value(1) == pytest.approx(0)


def test_square_law_and_exception():
    D = d_c("1/3", {1: (1j, 1)})
    S = square_op(D)
    b = S.law.branch_coeffs(1)
    assert b == {2: 1, 1: pytest.approx(2 / 3), 0: pytest.approx(1 / 9)}
    assert S.law.branch_coeffs(-1)[1] == pytest.approx(-2 / 3)
    assert S.eigenvalue(1)[0] == pytest.approx(-1)
    ns = np.arange(-5, 6)
    assert np.allclose(S.eigenvalues(ns), D.eigenvalues(ns) ** 2)


def test_product_law_leading_term():
    P = multiply_commuting(d_c("1/3"), laplace_type(2))
    assert P.order == 3
    assert P.law.leading(1) == 1 and P.law.leading(-1) == -1
    ns = np.arange(-7, 8)
    assert np.allclose(P.eigenvalues(ns), (ns + 1 / 3) * (ns ** 2 + 2))


def test_projection_examples():
    D = d_c("1/3")
    p = spectral_projection(D, SolidAngle(PI / 4, 3 * PI / 4))
    assert p.kind == "finite" and p.indices == ()
    p = spectral_projection(d_c("1/3", {1: (1j, 1)}), SolidAngle(PI / 4, 3 * PI / 4))
    assert p.kind == "finite" and p.indices == (1,) and p.rank == 1
    p = spectral_projection(D, SolidAngle(-PI / 2, PI / 2))
    assert p.kind == "cofinite"
    # oracle: the sign of n + 1/3 decides membership
    for n in range(-50, 51):
        assert p.contains(n) == (n + 1 / 3 > 0)
    with pytest.raises(InfiniteBothSides):
        _ = p.rank


def test_projection_boundary_errors():
    with pytest.raises(BoundaryEigenvalue):
        spectral_projection(d_c("1/3", {1: (1j, 1)}), SolidAngle(PI / 4, PI / 2))
    with pytest.raises(InfiniteBothSides):
        spectral_projection(d_c("1/3"), SolidAngle(0, PI / 2))


def test_imaginary_axis_counts():
    assert count_imaginary_axis(d_c("1/3")) == (0, 0)
    assert count_imaginary_axis(d_c("1/3", {1: (1j, 1), -1: (-1j, 1)})) == (1, 1)
    assert count_imaginary_axis(d_c("1/3", {2: ((0, 3), 2)})) == (2, 0)
    # lambda_n = n + i puts the n = 0 eigenvalue on the positive axis
    law = SpectralLaw.from_terms(1, [(1, 1, 1), ((0, 1), 0, 0)])
    assert count_imaginary_axis(SpectralOperator(law, {}, "Z")) == (1, 0)


def test_symmetric_spectrum():
    assert is_symmetric_spectrum(d_c("1/3"))
    assert not is_symmetric_spectrum(d_c("1/3", {1: (1j, 1)}))
    assert is_symmetric_spectrum(d_c("1/3", {1: (1j, 1), -1: (-1j, 1)}))
    assert not is_symmetric_spectrum(d_c("1/3", {1: (1j, 2), -1: (-1j, 1)}))
    law = SpectralLaw.from_terms(1, [((0, 1), 1, 1), (1, 0, 0)])  # lambda_n = i n + 1
    assert is_symmetric_spectrum(SpectralOperator(law, {}, "Z"))


def test_agmon_detection():
    D = d_c("1/3", {1: (1j, 1)})
    assert D.is_agmon(3 * PI / 4)
    assert not D.is_agmon(PI / 2)
    assert not D.is_agmon(0.0)       # leading direction of the +1 branch
    assert D.ray_report(PI / 2) == (True, False)
    with pytest.raises(NotAgmon):
        D.require_agmon(PI / 2)
    with pytest.raises(NotAgmon):
        log_op(D, PI / 2)


def test_construction_errors():
    with pytest.raises(NotAgmon):
        d_c("0")                       # zero eigenvalue at n = 0
    with pytest.raises(NotAgmon):
        d_c("1/3", {2: (0, 1)})
    with pytest.raises(IndexOutOfSet):
        SpectralOperator(SpectralLaw.from_terms(1, [(1, 1, 1)]), {0: (1, 1)}, "Z_nonzero")
    with pytest.raises(NotElliptic):
        SpectralLaw.from_terms(2, [(1, 0, 2), (1, 1, 2)])  # |n|^2 + n|n| vanishes to leading order for n < 0
    with pytest.raises(SchemaError):
        SpectralLaw.from_terms(1, [(1, 0, 2)])
    with pytest.raises(IndexSetMismatch):
        multiply_commuting(d_c("1/3"), SpectralOperator(SpectralLaw.from_terms(1, [(1, 1, 1)]), {}, "Z_nonzero"))


def test_json_roundtrip_is_exact():
    A = d_c("2/7", {3: ((0, "5/2"), 2), -2: (("1/2", "-1"), 1)})
    data = json.loads(json.dumps(A.to_json()))
    B = SpectralOperator.from_json(data)
    assert B == A
    assert B.exceptions[3] == (Exact(Fraction(0), Fraction(5, 2)), 2)


@pytest.mark.parametrize("bad", [
    {"kind": "symbol"},
    {"kind": "spectral", "order": 1},
    {"kind": "spectral", "order": 1, "law": [{"c": ["x", "0"], "sgn": 1, "pow": 1}]},
    {"kind": "spectral", "order": 1, "index_set": "N", "law": [{"c": [1, 0], "sgn": 1, "pow": 1}]},
])
def test_bad_schema(bad):
    with pytest.raises(SchemaError):
        SpectralOperator.from_json(bad)


@given(st.lists(st.complex_numbers(max_magnitude=0.3, allow_nan=False, allow_infinity=False), min_size=1, max_size=4),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.integers(5, 30))
def test_series_pow_and_log_match_direct(tail, s, k):
    u = np.zeros(len(tail) + 1, dtype=complex)
    u[1:] = tail
    depth = 12
    x = 1.0 / k
    ux = sum(u[t] * x ** t for t in range(len(u)))
    p = series_pow(u, s, depth)
    approx = sum(p[t] * x ** t for t in range(depth + 1))
    assert abs(approx - (1 + ux) ** s) < 1e-9
    lg = series_log(u, depth)
    approx = sum(lg[t] * x ** t for t in range(depth + 1))
    assert abs(approx - np.log(1 + ux)) < 1e-9


def test_tail_start_bounds_angle():
    A = d_c("5/2")
    for margin in (0.5, 0.1, 0.01):
        for sigma in (1, -1):
            k0 = A.law.tail_start(sigma, margin)
            ks = np.arange(k0, k0 + 200)
            u = A.eigenvalues(sigma * ks) / (A.law.leading(sigma) * ks) - 1
            assert np.all(np.abs(u) < min(0.5, math.sin(margin)))


def test_cut_objects_accepted():
    D = d_c("1/3")
    assert D.is_agmon(SpectralCut(3 * PI / 4))
    assert log_op(D, SpectralCut(3 * PI / 4)).cut.theta == pytest.approx(3 * PI / 4)
