"""Built-in fixtures and property suites shared by the CLI and the tests.

Every suite returns a list of :class:`Row`; a row passes when its measured
deviation is below its tolerance.  With ``double=True`` each numeric check is
repeated with doubled expansion depth, tail length, symbol depth and
bandwidth, and an extra stability row is emitted.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .complexcut import SpectralCut
from .regdet import (
    EPS_ANGLE,
    EPS_MULT,
    check_angle_dependence,
    check_det_square,
    finite_modification_shift,
    log_det,
    log_det_sym,
    multiplicativity_check,
    sign_symmetric,
)
from .spectralmodel import count_imaginary_axis, d_c, laplace_type, log_op
from .symbolcalc import (
    anomaly_integrand,
    check_asodd,
    compose,
    differential_symbol,
    odd_class_deviation,
    odd_pair_deviation,
    reslog_difference,
    residue_coboundary_sym,
    resolvent_symbols,
    rodd_deviation,
    symbol_from_components,
    log_symbol,
    trig_poly,
    wodzicki_res,
)
from .zetacontinuation import tr_sym

SUITES = ("trace", "det", "sign", "mult", "symbols")
EPS_SUITE_SYM = 1e-8
EPS_TRACE_Q = 1e-6
EPS_DET_SUITE = 1e-6
NOISE_FLOOR = 1e-13


@dataclass(frozen=True)
class Params:
    k_expand: int = 6
    n_tail: int = 10_000
    radius: float = 0.1
    depth: int = 6
    bandwidth: int = 32
    seed: int = 0

    def doubled(self) -> "Params":
        return replace(self, k_expand=2 * self.k_expand, n_tail=2 * self.n_tail,
                       depth=2 * self.depth, bandwidth=2 * self.bandwidth)

    @property
    def det_kw(self) -> dict:
        return {"k_expand": self.k_expand, "n_tail": self.n_tail, "radius": self.radius}


@dataclass
class Row:
    suite: str
    fixture: str
    check: str
    measured: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)


def seed_from_env(default: int = 0) -> int:
    raw = os.environ.get("ODDZETA_SEED")
    return int(raw) if raw not in (None, "") else default


def _row(suite, fixture, check, dev, tol, **details) -> Row:
    dev = float(dev)
    return Row(suite, fixture, check, dev, tol, bool(dev < tol), details)


def _stability(suite, fixture, check, v1, v2, tol) -> Row:
    """A value recomputed at doubled resolution must move by less than ``tol``."""
    return _row(suite, fixture, check + ":doubling", abs(v2 - v1), tol)


def _deviation_stability(suite, fixture, check, d1, d2) -> Row:
    """A deviation must not grow by 2x or more when resolution doubles."""
    bound = 2 * d1 + NOISE_FLOOR
    return Row(suite, fixture, check + ":doubling", float(d2), bound, bool(d2 < bound),
               {"default": float(d1)})


# ---------------------------------------------------------------------------
# spectral fixtures
# ---------------------------------------------------------------------------

LAPLACE_A = (Fraction(1, 2), Fraction(1), Fraction(2))
DC_VALUES = ("1/5", "1/3", "2/5")
PAIRED = {1: (1j, 1), -1: (-1j, 1)}


def laplace_closed_form(a) -> float:
    """``prod_n (n^2 + a^2)`` regularized: ``4 sinh^2(pi a)``."""
    return 4 * math.sinh(math.pi * float(a)) ** 2


def det_suite(p: Params, double: bool = False) -> list[Row]:
    rows = []
    for a in LAPLACE_A:
        A = laplace_type(a * a)
        name = f"laplace(a={a})"
        oracle = math.log(laplace_closed_form(a))
        d = log_det(A, math.pi, **p.det_kw)
        rows.append(_row("det", name, "log_det vs 4sinh^2", abs(d.log_det - oracle) / abs(oracle), EPS_DET_SUITE,
                         log_det=d.log_det, oracle=oracle))
        ds = log_det_sym(A, math.pi, **p.det_kw).log_det
        rows.append(_row("det", name, "log_det_sym vs 4sinh^2", abs(ds - oracle) / abs(oracle), EPS_DET_SUITE))
        z0 = d.branch_provenance["zeta_at_0"]
        rows.append(_row("det", name, "zeta(0)", abs(z0), 1e-7, zeta_at_0=z0))
        if double:
            d2 = log_det(A, math.pi, **p.doubled().det_kw).log_det
            rows.append(_stability("det", name, "log_det", d.log_det, d2, EPS_DET_SUITE))
    theta = 3 * math.pi / 4
    fixtures = [(f"D_{c}", d_c(c)) for c in DC_VALUES]
    fixtures.append(("D_1/3+pair(i)", d_c("1/3", PAIRED)))
    fixtures.append(("D_1/3+pair(2+-i)", d_c("1/3", {2: (("2", "1"), 1), -3: (("2", "-1"), 1)})))
    for name, A in fixtures:
        lhs, rhs, _ = check_det_square(A, theta, **p.det_kw)
        rows.append(_row("det", name, "Det^sym(A^2) vs (Det^sym A)^2", abs(lhs - rhs) / abs(rhs), EPS_DET_SUITE,
                         lhs=lhs, rhs=rhs))
        if double:
            lhs2, _, _ = check_det_square(A, theta, **p.doubled().det_kw)
            rows.append(_stability("det", name, "Det^sym(A^2)", lhs, lhs2, EPS_DET_SUITE * abs(rhs)))
    return rows


def sign_fixtures(seed: int, count: int = 10):
    """``D_c`` with ``k`` conjugate exception pairs moved onto the imaginary axis."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        q = int(rng.integers(3, 12))
        c = Fraction(int(rng.integers(1, q)), q)
        k = i % 4
        idx = rng.choice(np.r_[-8:0, 1:9], size=2 * k, replace=False)
        exc = {}
        for j in range(k):
            r = Fraction(int(rng.integers(1, 40)), 4)
            mult = int(rng.integers(1, 3))
            exc[int(idx[2 * j])] = ((0, r), mult)
            exc[int(idx[2 * j + 1])] = ((0, -r), mult)
        out.append((f"D_{c}+{k}pairs", d_c(str(c)), d_c(str(c), exc)))
    return out


def sign_suite(p: Params, double: bool = False, count: int = 10) -> list[Row]:
    theta = 3 * math.pi / 4
    rows = []
    for name, base, A in sign_fixtures(p.seed, count):
        m_plus, _ = count_imaginary_axis(A)
        pred, meas, resid = sign_symmetric(A, theta, **p.det_kw)
        rows.append(Row("sign", name, "sign law", float(resid), EPS_ANGLE, bool(pred == meas and resid < EPS_ANGLE),
                        {"m_plus": m_plus, "predicted": pred, "measured": meas, "residual": resid}))
        # finite-modification oracle: exact eigenvalue-factor bookkeeping
        cut = SpectralCut(theta)
        shift = 0.5 * (finite_modification_shift(base, A, cut) + finite_modification_shift(base, A, cut.partner(1)))
        diff = log_det_sym(A, theta, **p.det_kw).log_det - log_det_sym(base, theta, **p.det_kw).log_det
        rows.append(_row("sign", name, "finite modification", abs(diff - shift), EPS_ANGLE))
        if double:
            _, _, r2 = sign_symmetric(A, theta, **p.doubled().det_kw)
            rows.append(_stability("sign", name, "residual", resid, r2, EPS_ANGLE))
    return rows


def trace_suite(p: Params, double: bool = False) -> list[Row]:
    """Independence of the symmetrized trace of the odd-class log from the weight."""
    D = d_c("1/3")
    theta = 3 * math.pi / 4
    odd_log = 0.5 * (log_op(D, theta) + log_op(D, theta - math.pi))
    kw = p.det_kw
    weights = [("D_1/3", D), ("laplace(1)", laplace_type(1))]
    values = {name: tr_sym(odd_log, Q, theta, **kw) for name, Q in weights}
    (n1, v1), (n2, v2) = values.items()
    rows = [_row("trace", f"{n1} vs {n2}", "tr_sym odd log", abs(v1 - v2), EPS_TRACE_Q, **{n1: v1, n2: v2})]
    # single-angle log: the weight dependence is the predicted -i pi c_Q
    single = log_op(D, theta)
    s1 = tr_sym(single, D, theta, **kw)
    s2 = tr_sym(single, laplace_type(1), theta, **kw)
    predicted = -1j * math.pi / 3
    rows.append(_row("trace", f"{n1} vs {n2}", "tr_sym single-angle log shift", abs((s1 - s2) - predicted),
                     EPS_TRACE_Q, shift=s1 - s2, predicted=predicted))
    if double:
        w = tr_sym(odd_log, D, theta, **p.doubled().det_kw)
        rows.append(_stability("trace", n1, "tr_sym odd log", v1, w, EPS_TRACE_Q))
    return rows


MULT_FIXTURES = (
    ("D_1/3 x laplace(1)", lambda: (d_c("1/3"), laplace_type(1), 3 * math.pi / 4, math.pi)),
    ("D_1/3 x D_1/3", lambda: (d_c("1/3"), d_c("1/3"), 3 * math.pi / 4, 3 * math.pi / 4)),
    ("D_1/5 x D_2/5", lambda: (d_c("1/5"), d_c("2/5"), 3 * math.pi / 4, 3 * math.pi / 4)),
)

ANGLE_FIXTURES = (
    ("D_1/3", lambda: d_c("1/3"), 3 * math.pi / 4, 5 * math.pi / 4),
    ("D_1/5", lambda: d_c("1/5"), 3 * math.pi / 4, 5 * math.pi / 4),
    ("D_2/5", lambda: d_c("2/5"), 2 * math.pi / 3, 4 * math.pi / 3),
    ("D_1/3+pair(i)", lambda: d_c("1/3", PAIRED), 3 * math.pi / 4, 5 * math.pi / 4),
    ("laplace(1)", lambda: laplace_type(1), math.pi / 2, 3 * math.pi / 2),
    ("laplace(1/4)", lambda: laplace_type("1/4"), 3 * math.pi / 4, 5 * math.pi / 4),
)


def mult_suite(p: Params, double: bool = False) -> list[Row]:
    rows = []
    for name, make in MULT_FIXTURES:
        A, B, tA, tB = make()
        ratio, sign, _ = multiplicativity_check(A, B, tA, tB, **p.det_kw)
        dev = abs(ratio - sign)
        rows.append(_row("mult", name, "Det^sym(AB)/(Det^sym A Det^sym B)", dev, EPS_MULT, ratio=ratio, sign=sign))
        if double:
            r2, _, _ = multiplicativity_check(A, B, tA, tB, **p.doubled().det_kw)
            rows.append(_stability("mult", name, "ratio", ratio, r2, EPS_MULT))
    for name, make, t1, t2 in ANGLE_FIXTURES:
        d, _ = check_angle_dependence(make(), t1, t2, **p.det_kw)
        r = math.fmod(d.imag, math.pi)
        resid = math.hypot(d.real, min(abs(r), math.pi - abs(r)))
        rows.append(_row("mult", name, "angle change in i pi Z", resid, EPS_ANGLE,
                         difference=d, multiple_of_pi=round(d.imag / math.pi)))
    return rows


# ---------------------------------------------------------------------------
# symbol fixtures
# ---------------------------------------------------------------------------

def _random_poly(rng, degree: int = 3, scale: float = 0.3, const: complex = 0):
    c = {n: scale * complex(rng.normal(), rng.normal()) / (1 + abs(n)) ** 2 for n in range(-degree, degree + 1)}
    c[0] += const
    return trig_poly(c)


def random_odd_class(rng, order: int, bandwidth: int, J: int = 3, leading: complex = 0):
    """Odd-class symbol: ``minus = (-1)^(order - j) plus`` in every component."""
    M = 2 * bandwidth + 1
    x = 2 * np.pi * np.arange(M) / M
    comps = {}
    for j in range(J + 1):
        plus = _random_poly(rng, const=leading if j == 0 else 0)(x)
        comps[j] = (plus, (-1) ** (order - j) * plus)
    return symbol_from_components(order, comps, bandwidth)


def elliptic_weight(rng, order: int, bandwidth: int):
    """Odd-class weight with leading part near ``1.5 xi^order``; principal angle
    ``pi/2`` for odd order and ``pi`` for even order."""
    return random_odd_class(rng, order, bandwidth, J=2, leading=1.5), (math.pi / 2 if order % 2 else math.pi)


def coboundary_fixtures(seed: int, count: int = 20, bandwidth: int = 8):
    rng = np.random.default_rng(seed + 1)
    out = []
    for i in range(count):
        qo = 1 + i % 2
        Q, theta = elliptic_weight(rng, qo, bandwidth)
        ao, bo = int(rng.integers(0, 3)), int(rng.integers(0, 3))
        A = random_odd_class(rng, ao, bandwidth)
        B = random_odd_class(rng, bo, bandwidth)
        out.append((f"triple{i}(Q{qo},A{ao},B{bo})", Q, theta, A, B))
    return out


def _base_symbols(bandwidth: int):
    """Differential fixtures: ``A`` of order 1 (principal angle pi/2) and
    ``B`` of order 2 (principal angle pi)."""
    A = _diff([{0: 0.2, 1: 0.1}, {0: 1, 1: 0.2j}], bandwidth)
    B = _diff([{0: 1.0, 2: 0.1}, {0: 0.1j, -1: 0.2}, {0: 1, 1: 0.1}], bandwidth)
    return A, B


def _diff(coeffs, bandwidth):
    return differential_symbol([trig_poly(c) for c in coeffs], bandwidth)


def _symbol_identities(p: Params, report: int | None = None) -> dict[str, float]:
    """Deviations of the symbol identities, measured on components ``j <= report``."""
    J, N = p.depth, p.bandwidth
    report = J if report is None else report
    A, B = _base_symbols(N)
    half = math.pi / 2
    out = {}
    out["Asodd A^(1/2)"] = check_asodd(A, half, 0.5, J, report)
    out["Asodd A^(1.3+0.2i)"] = check_asodd(A, half, 1.3 + 0.2j, J, report)
    out["Asodd B^(-0.7)"] = check_asodd(B, math.pi, -0.7, J, report)
    L1, L2 = log_symbol(A, half, J).truncate(report), log_symbol(A, -half, J).truncate(report)
    out["logAoddeven"] = odd_pair_deviation(L1, L2.plus_scalar(1j * math.pi))
    out["logAoddodd"] = odd_class_deviation(L1 + L2)
    out["oddtimesodd"] = odd_class_deviation(compose(A, B, J).truncate(report))
    lam = 0.3 + 2j
    out["rodd"] = rodd_deviation(A, resolvent_symbols(A, J), lam, report)
    out["reslog A(pi/2) vs A(-pi/2)"] = abs(reslog_difference(A, half, A, -half, J))
    out["reslog A vs B"] = abs(reslog_difference(A, half, B, math.pi, J))
    out["residue odd class"] = abs(wodzicki_res(compose(A, B, J)))
    return out


def symbols_suite(p: Params, double: bool = False, count: int = 20) -> list[Row]:
    rows = []
    base = _symbol_identities(p)
    for name, dev in base.items():
        rows.append(_row("symbols", "A1,B2", name, dev, EPS_SUITE_SYM))
    if double:
        # doubled J and N, measured on the default component range
        for name, dev in _symbol_identities(p.doubled(), p.depth).items():
            rows.append(_deviation_stability("symbols", "A1,B2", name, base[name], dev))
    for name, Q, theta, A, B in coboundary_fixtures(p.seed, count):
        val = residue_coboundary_sym(Q, theta, A, B)
        rows.append(_row("symbols", name, "symmetrized coboundary", abs(val), EPS_SUITE_SYM))
    A, B = _base_symbols(p.bandwidth)
    for t in (0, 0.25, 0.5, 0.75, 1):
        val = anomaly_integrand(A, B, math.pi / 2, t, p.depth, theta_B=math.pi)
        rows.append(_row("symbols", "A1,B2", f"anomaly Res(U^2+V^2) t={t}", abs(val), EPS_SUITE_SYM))
    return rows


SUITE_FUNCS = {
    "trace": trace_suite,
    "det": det_suite,
    "sign": sign_suite,
    "mult": mult_suite,
    "symbols": symbols_suite,
}


def run_suite(name: str, p: Params, double: bool = False) -> list[Row]:
    if name == "all":
        return [r for s in SUITES for r in SUITE_FUNCS[s](p, double)]
    return SUITE_FUNCS[name](p, double)
