"""Symbol calculus for scalar pseudo-differential operators on the circle.

A homogeneous component of degree ``h`` is stored through its values at the
two cosphere points ``xi = +1`` and ``xi = -1``; the full function is
``plus(x) |xi|^h`` for ``xi > 0`` and ``minus(x) |xi|^h`` for ``xi < 0``.
The ``x``-dependence lives on an equispaced grid of ``M = 2N + 1`` points
(bandwidth ``N``); products are pointwise and ``D_x = -i d/dx`` acts by FFT.
Fourier coefficients appear only at the JSON boundary.

Logarithmic symbols carry an extra ``gamma * log|xi|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .complexcut import SpectralCut, angular_distance, branch_log, complex_power
from .errors import (
    DegreeMismatch,
    DepthInsufficient,
    NotClassical,
    NotElliptic,
    NotPrincipal,
    NotRepresentable,
    NotScalarSupported,
    SchemaError,
)

DEFAULT_BANDWIDTH = 32
DEFAULT_DEPTH = 6
EPS_SYM = 1e-8
H_S = 1e-5
SIGNS = (1, -1)


# ---------------------------------------------------------------------------
# grid helpers
# ---------------------------------------------------------------------------

def grid(bandwidth: int = DEFAULT_BANDWIDTH) -> np.ndarray:
    M = 2 * bandwidth + 1
    return 2 * np.pi * np.arange(M) / M


@lru_cache(maxsize=None)
def _modes(M: int) -> np.ndarray:
    return np.fft.fftfreq(M, 1.0 / M)


ROUNDOFF_FILTER = 8 * np.finfo(float).eps


def dx(values: np.ndarray, k: int = 1) -> np.ndarray:
    """``D_x^k`` with ``D_x = -i d/dx`` (so ``D_x e^{inx} = n e^{inx}``).

    Coefficients at round-off level are dropped first; otherwise ``n^k``
    amplifies them into the deep components of compositions.
    """
    if k == 0:
        return values
    c = np.fft.fft(values)
    c[np.abs(c) <= ROUNDOFF_FILTER * np.max(np.abs(c))] = 0
    return np.fft.ifft(c * _modes(len(values)) ** k)


def to_fourier(values: np.ndarray, bandwidth: int | None = None) -> np.ndarray:
    """Centered coefficients ``c_{-B..B}`` of ``sum c_n e^{inx}``."""
    M = len(values)
    N = (M - 1) // 2
    B = N if bandwidth is None else bandwidth
    c = np.fft.fft(values) / M
    out = np.zeros(2 * B + 1, dtype=complex)
    for n in range(-min(B, N), min(B, N) + 1):
        out[n + B] = c[n % M]
    return out


def from_fourier(coeffs: Sequence, bandwidth: int = DEFAULT_BANDWIDTH) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    B = (len(coeffs) - 1) // 2
    if len(coeffs) != 2 * B + 1:
        raise SchemaError("Fourier list must have odd length 2B + 1")
    if B > bandwidth:
        raise SchemaError(f"input bandwidth {B} exceeds grid bandwidth {bandwidth}")
    M = 2 * bandwidth + 1
    c = np.zeros(M, dtype=complex)
    for n in range(-B, B + 1):
        c[n % M] = coeffs[n + B]
    return np.fft.ifft(c) * M


def fourier_norm(values: np.ndarray) -> float:
    """l2 norm of the Fourier coefficients (Parseval: RMS of grid values)."""
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))


def _as_grid(f, M: int) -> np.ndarray:
    x = 2 * np.pi * np.arange(M) / M
    if callable(f):
        return np.asarray(f(x), dtype=complex) * np.ones(M)
    arr = np.asarray(f, dtype=complex)
    if arr.ndim == 0:
        return np.full(M, complex(arr))
    if arr.shape != (M,):
        raise SchemaError(f"grid of length {M} expected")
    return arr


def _is_integer(z) -> bool:
    z = complex(z)
    return z.imag == 0 and float(z.real).is_integer()


def _falling(h: complex, k: int) -> complex:
    out = 1.0 + 0j
    for i in range(k):
        out *= h - i
    return out


def binom(s: complex, n: int) -> complex:
    out = 1.0 + 0j
    for i in range(n):
        out *= (s - i) / (i + 1)
    return out


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomogComponent:
    degree: complex
    plus: np.ndarray
    minus: np.ndarray

    def side(self, sign: int) -> np.ndarray:
        return self.plus if sign > 0 else self.minus

    def d_xi(self, k: int, sign: int) -> np.ndarray:
        """Value at ``xi = sign`` of the ``k``-th ``xi``-derivative."""
        return _falling(self.degree, k) * sign ** k * self.side(sign)


@dataclass(frozen=True, eq=False)
class Symbol:
    """Truncated expansion ``gamma log|xi| + sum_j sigma_{order-j}``.

    ``exact`` marks symbols whose omitted components are identically zero
    (differential operators); otherwise only ``len(components)`` terms are
    trustworthy.
    """

    order: complex
    components: tuple[HomogComponent, ...]
    gamma: complex = 0j
    exact: bool = False
    _meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.components:
            raise SchemaError("a symbol needs at least its leading component")
        Ms = {len(c.plus) for c in self.components} | {len(c.minus) for c in self.components}
        if len(Ms) != 1:
            raise SchemaError("components live on different grids")
        for j, c in enumerate(self.components):
            if abs(complex(c.degree) - (complex(self.order) - j)) > 1e-12:
                raise SchemaError("component degrees must decrease by one from the order")

    # -- basic data ---------------------------------------------------------
    @property
    def M(self) -> int:
        return len(self.components[0].plus)

    @property
    def bandwidth(self) -> int:
        return (self.M - 1) // 2

    @property
    def depth(self) -> int:
        return len(self.components) - 1

    @property
    def valid_depth(self) -> float:
        return math.inf if self.exact else self.depth

    @property
    def is_log(self) -> bool:
        return self.gamma != 0

    def component(self, j: int) -> HomogComponent:
        if j < len(self.components):
            return self.components[j]
        if not self.exact:
            raise DepthInsufficient(f"component {j} requested from a symbol truncated at depth {self.depth}")
        z = np.zeros(self.M, dtype=complex)
        return HomogComponent(complex(self.order) - j, z, z)

    def truncate(self, J: int) -> "Symbol":
        comps = tuple(self.component(j) for j in range(J + 1))
        return Symbol(self.order, comps, self.gamma, False)

    def is_scalar(self, tol: float = 0.0) -> complex | None:
        """The constant ``c`` if this symbol is ``c * Id`` exactly, else None."""
        if self.gamma != 0 or not self.exact or not _is_integer(self.order):
            return None
        m = int(complex(self.order).real)
        if m < 0 or m >= len(self.components):
            return 0j if m < 0 and all(fourier_norm(c.plus) + fourier_norm(c.minus) <= tol
                                       for c in self.components) else None
        c0 = self.components[m].plus[0]
        for j, c in enumerate(self.components):
            target = c0 if j == m else 0
            if np.max(np.abs(c.plus - target)) > tol or np.max(np.abs(c.minus - target)) > tol:
                return None
        return complex(c0)

    # -- arithmetic -----------------------------------------------------------
    def _aligned(self, other: "Symbol"):
        if self.M != other.M:
            raise SchemaError("symbols live on different grids")
        shift = complex(self.order) - complex(other.order)
        if not _is_integer(shift):
            raise DegreeMismatch("orders differ by a non-integer")
        shift = int(shift.real)
        order = self.order if shift >= 0 else other.order
        offs = (0, shift) if shift >= 0 else (-shift, 0)
        deps = [s.valid_depth + o for s, o in zip((self, other), offs)]
        exact = self.exact and other.exact
        depth = max(s.depth + o for s, o in zip((self, other), offs)) if exact else int(min(deps))
        return order, offs, depth, exact

    def combine(self, other: "Symbol", a: complex = 1.0, b: complex = 1.0) -> "Symbol":
        """``a * self + b * other``."""
        order, (o1, o2), depth, exact = self._aligned(other)
        comps = []
        for j in range(depth + 1):
            p = np.zeros(self.M, dtype=complex)
            m = np.zeros(self.M, dtype=complex)
            for sym, off, c in ((self, o1, a), (other, o2, b)):
                if j >= off and (j - off < len(sym.components) or sym.exact):
                    comp = sym.component(j - off)
                    p = p + c * comp.plus
                    m = m + c * comp.minus
            comps.append(HomogComponent(complex(order) - j, p, m))
        gamma = a * self.gamma + b * other.gamma
        if abs(gamma) <= 1e-12 * max(abs(a * self.gamma), abs(b * other.gamma)):
            gamma = 0j  # log parts cancelled up to rounding
        return Symbol(order, tuple(comps), gamma, exact)

    def __add__(self, other):
        return self.combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self.combine(other, 1.0, -1.0)

    def scale(self, c) -> "Symbol":
        c = complex(c)
        comps = tuple(HomogComponent(x.degree, c * x.plus, c * x.minus) for x in self.components)
        return Symbol(self.order, comps, c * self.gamma, self.exact)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def __truediv__(self, c):
        return self.scale(1.0 / complex(c))

    def plus_scalar(self, c) -> "Symbol":
        """``self + c * Id``."""
        return self + identity(self.bandwidth).scale(c)

    # -- schema -----------------------------------------------------------
    def to_json(self, bandwidth: int | None = None) -> dict:
        def enc(v):
            return {"fourier": [[float(z.real), float(z.imag)] for z in to_fourier(v, bandwidth)]}
        out = {
            "kind": "symbol",
            "order": _num_json(self.order),
            "components": [{"deg": _num_json(c.degree), "plus": enc(c.plus), "minus": enc(c.minus)}
                           for c in self.components],
            "exact": self.exact,
        }
        if self.gamma != 0:
            out["gamma"] = [float(complex(self.gamma).real), float(complex(self.gamma).imag)]
        return out

    @classmethod
    def from_json(cls, data: Mapping, bandwidth: int = DEFAULT_BANDWIDTH) -> "Symbol":
        try:
            if data.get("kind") != "symbol":
                raise SchemaError("symbol schema needs kind = 'symbol'")
            order = _num_parse(data["order"])
            gamma = _num_parse(data.get("gamma", 0))
            by_deg = {}
            for c in data["components"]:
                if "matrix" in c or isinstance(c["plus"].get("fourier", [[0, 0]])[0][0], list):
                    raise NotScalarSupported("matrix-valued symbols are not supported")
                by_deg[_num_parse(c["deg"])] = (from_fourier([complex(*z) for z in c["plus"]["fourier"]], bandwidth),
                                                from_fourier([complex(*z) for z in c["minus"]["fourier"]], bandwidth))
            J = 0
            for d in by_deg:
                j = order - d
                if not _is_integer(j) or j.real < 0:
                    raise SchemaError(f"component degree {d} incompatible with order {order}")
                J = max(J, int(j.real))
            M = 2 * bandwidth + 1
            zero = np.zeros(M, dtype=complex)
            comps = []
            for j in range(J + 1):
                deg = order - j
                match = [v for d, v in by_deg.items() if abs(d - deg) < 1e-12]
                p, m = match[0] if match else (zero, zero)
                comps.append(HomogComponent(deg, p, m))
            return cls(order, tuple(comps), gamma, bool(data.get("exact", True)))
        except (KeyError, TypeError, IndexError) as exc:
            raise SchemaError(f"malformed symbol schema: {exc}") from exc


def _num_json(z):
    z = complex(z)
    if z.imag == 0:
        return int(z.real) if float(z.real).is_integer() else float(z.real)
    return [float(z.real), float(z.imag)]


def _num_parse(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


ClassicalSymbol = Symbol
LogSymbol = Symbol


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def symbol_from_components(order, comps: Mapping[int, tuple], bandwidth: int = DEFAULT_BANDWIDTH,
                           gamma=0, exact: bool = True) -> Symbol:
    """``comps[j] = (plus, minus)`` as scalars, callables of ``x`` or grids."""
    M = 2 * bandwidth + 1
    J = max(comps) if comps else 0
    out = []
    for j in range(J + 1):
        p, m = comps.get(j, (0, 0))
        out.append(HomogComponent(complex(order) - j, _as_grid(p, M), _as_grid(m, M)))
    return Symbol(complex(order), tuple(out), complex(gamma), exact)


def differential_symbol(coeffs: Sequence, bandwidth: int = DEFAULT_BANDWIDTH) -> Symbol:
    """Symbol ``sum_k c_k(x) xi^k`` of a differential operator (``coeffs[k] = c_k``)."""
    m = len(coeffs) - 1
    M = 2 * bandwidth + 1
    comps = {}
    for k, c in enumerate(coeffs):
        g = _as_grid(c, M)
        comps[m - k] = (g, (-1) ** k * g)
    return symbol_from_components(m, comps, bandwidth)


def identity(bandwidth: int = DEFAULT_BANDWIDTH) -> Symbol:
    return symbol_from_components(0, {0: (1, 1)}, bandwidth)


def trig_poly(coeffs: Mapping[int, complex]) -> Callable:
    """``x -> sum c_n e^{inx}``."""
    items = [(int(n), complex(c)) for n, c in coeffs.items()]
    return lambda x: sum(c * np.exp(1j * n * x) for n, c in items)


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------

def _default_depth(*syms: Symbol) -> int:
    valid = min(s.valid_depth for s in syms)
    return int(min(valid, DEFAULT_DEPTH))


def _log_derivative(gamma: complex, k: int, sign: int) -> complex:
    """``d^k/dxi^k (gamma log|xi|)`` at ``xi = sign`` (degree ``-k``)."""
    plus = gamma * (-1) ** (k - 1) * math.factorial(k - 1)
    return plus if sign > 0 else plus * (-1) ** k


def _product_terms(A: Symbol, B: Symbol, J: int, leading: bool) -> list[list[np.ndarray]]:
    """Components (per sign) of ``sum_k 1/k! d_xi^k A . D_x^k B``; ``leading``
    toggles the ``k = 0`` term."""
    M = A.M
    order = complex(A.order) + complex(B.order)
    out = {s: [np.zeros(M, dtype=complex) for _ in range(J + 1)] for s in SIGNS}
    Bcomps = [B.component(j) if (j < len(B.components) or B.exact) else None for j in range(J + 1)]
    for k in range(0 if leading else 1, J + 1):
        DB = {}
        for jb in range(J + 1 - k):
            cb = Bcomps[jb]
            DB[jb] = {s: dx(cb.side(s), k) for s in SIGNS}
        for ja in range(J + 1 - k):
            ca = A.component(ja)
            for s in SIGNS:
                da = ca.d_xi(k, s) / math.factorial(k)
                if not np.any(da):
                    continue
                for jb in range(J + 1 - k - ja):
                    out[s][ja + jb + k] += da * DB[jb][s]
        if k >= 1 and A.gamma != 0:
            if not _is_integer(A.order):
                raise NotRepresentable("log symbol with non-integer degree")
            mA = int(complex(A.order).real)
            for jb in range(J + 1):
                j = mA + k + jb
                if j < 0:
                    raise NotRepresentable("log derivative lands above the product order")
                if j > J:
                    continue
                for s in SIGNS:
                    out[s][j] += _log_derivative(A.gamma, k, s) / math.factorial(k) * DB[jb][s]
    del order
    return [out[1], out[-1]]


def compose(A: Symbol, B: Symbol, J_out: int | None = None) -> Symbol:
    """Symbol of the product ``AB`` to ``J_out`` homogeneous terms."""
    if A.M != B.M:
        raise SchemaError("symbols live on different grids")
    exact_out = A.exact and B.exact and A.gamma == 0
    if J_out is None:
        J_out = A.depth + B.depth if exact_out else _default_depth(A, B)
    valid = min(A.valid_depth, B.valid_depth)
    if J_out > valid:
        raise DepthInsufficient(f"J_out = {J_out} exceeds the valid depth {valid} of the factors")
    gamma = 0j
    if A.gamma != 0 or B.gamma != 0:
        if A.gamma != 0 and B.gamma != 0:
            raise NotRepresentable("product of two logarithmic symbols contains log^2|xi|")
        other, g, log_sym = (B, A.gamma, A) if A.gamma != 0 else (A, B.gamma, B)
        c = other.is_scalar(1e-14)
        if c is None:
            raise NotRepresentable("log|xi| times a non-scalar symbol is not of the form gamma log|xi| + classical")
        gamma = g * c
        del log_sym
    plus, minus = _product_terms(A, B, J_out, leading=True)
    order = complex(A.order) + complex(B.order)
    comps = tuple(HomogComponent(order - j, plus[j], minus[j]) for j in range(J_out + 1))
    return Symbol(order, comps, gamma, exact_out and J_out >= A.depth + B.depth)


def commutator_symbol(A: Symbol, B: Symbol, J_out: int | None = None) -> Symbol:
    """``[A, B]``; the ``k = 0`` terms (including all ``log|xi|`` factors) cancel."""
    if A.M != B.M:
        raise SchemaError("symbols live on different grids")
    exact_out = A.exact and B.exact and A.gamma == 0 and B.gamma == 0
    if J_out is None:
        J_out = A.depth + B.depth if exact_out else _default_depth(A, B)
    valid = min(A.valid_depth, B.valid_depth)
    if J_out > valid:
        raise DepthInsufficient(f"J_out = {J_out} exceeds the valid depth {valid} of the factors")
    ab = _product_terms(A, B, J_out, leading=False)
    ba = _product_terms(B, A, J_out, leading=False)
    order = complex(A.order) + complex(B.order)
    comps = tuple(HomogComponent(order - j, ab[0][j] - ba[0][j], ab[1][j] - ba[1][j])
                  for j in range(J_out + 1))
    return Symbol(order, comps, 0j, exact_out and J_out >= A.depth + B.depth)


# ---------------------------------------------------------------------------
# predicates and residue
# ---------------------------------------------------------------------------

def odd_class_deviation(A: Symbol) -> float:
    if not _is_integer(A.order):
        return math.inf
    m = int(complex(A.order).real)
    return max(fourier_norm(c.minus - (-1) ** (m - j) * c.plus) for j, c in enumerate(A.components))


def is_odd_class(A: Symbol, tol: float = EPS_SYM) -> bool:
    """``sigma_{m-j}(x, -xi) = (-1)^{m-j} sigma_{m-j}(x, xi)`` for every stored term."""
    return odd_class_deviation(A) <= tol


def odd_pair_deviation(A: Symbol, B: Symbol) -> float:
    if abs(complex(A.order) - complex(B.order)) > 1e-12:
        raise DegreeMismatch(f"degrees {A.order} and {B.order} differ")
    if not _is_integer(A.order):
        return math.inf
    m = int(complex(A.order).real)
    J = min(len(A.components), len(B.components))
    return max(fourier_norm(A.components[j].minus - (-1) ** (m - j) * B.components[j].plus)
               for j in range(J))


def is_odd_pair(A: Symbol, B: Symbol, tol: float = EPS_SYM) -> bool:
    return odd_pair_deviation(A, B) <= tol


def wodzicki_res(A: Symbol, tol: float = 1e-12) -> complex:
    """``(1/2pi) int (sigma_{-1}(x, 1) + sigma_{-1}(x, -1)) dx``."""
    if abs(A.gamma) > tol:
        raise NotClassical("the residue is defined on classical symbols (gamma = 0)")
    j = complex(A.order) + 1
    if not _is_integer(j) or j.real < 0:
        return 0j
    c = A.component(int(j.real))
    return complex(np.mean(c.plus) + np.mean(c.minus))


# ---------------------------------------------------------------------------
# resolvent parametrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ResolventSymbolFamily:
    """``r_{-m-j}(x, sign; lam) = sum_p coeffs[sign][j][p](x) (a_sign(x) - lam)^-p``."""

    order: complex
    leading: Mapping[int, np.ndarray]
    coeffs: Mapping[int, list[dict[int, np.ndarray]]]

    @property
    def depth(self) -> int:
        return len(self.coeffs[1]) - 1

    def evaluate(self, j: int, sign: int, lam: complex) -> np.ndarray:
        inv = 1.0 / (self.leading[sign] - lam)
        out = np.zeros(len(inv), dtype=complex)
        for p, c in self.coeffs[sign][j].items():
            out += c * inv ** p
        return out


def _dx_rational(terms: dict[int, np.ndarray], Da: np.ndarray) -> dict[int, np.ndarray]:
    # D_x [c (a - lam)^-p] = (D_x c)(a - lam)^-p - p c (D_x a)(a - lam)^-(p+1)
    out: dict[int, np.ndarray] = {}
    for p, c in terms.items():
        out[p] = out.get(p, 0) + dx(c)
        out[p + 1] = out.get(p + 1, 0) - p * c * Da
    return out


def _check_elliptic(A: Symbol) -> None:
    if A.gamma != 0:
        raise NotClassical("parametrix needs a classical symbol")
    if complex(A.order).real <= 0:
        raise NotElliptic("positive order required")
    lead = A.components[0]
    for s in SIGNS:
        v = lead.side(s)
        if np.min(np.abs(v)) <= 1e-12 * max(1.0, float(np.max(np.abs(v)))):
            raise NotElliptic(f"principal symbol vanishes at xi = {s:+d}")


def resolvent_symbols(A: Symbol, J: int = DEFAULT_DEPTH) -> ResolventSymbolFamily:
    """Homogeneous terms of the symbol of ``(A - lam)^-1`` in partial fractions."""
    _check_elliptic(A)
    if J > A.valid_depth:
        raise DepthInsufficient(f"depth {J} exceeds the valid depth {A.depth} of the symbol")
    coeffs = {}
    M = A.M
    for s in SIGNS:
        a = A.components[0].side(s)
        Da = dx(a)
        r = [{1: np.ones(M, dtype=complex)}]
        # D_x^k r_l cached as r_deriv[l][k]
        r_deriv = [[r[0]]]
        for j in range(1, J + 1):
            acc: dict[int, np.ndarray] = {}
            for k in range(j + 1):
                for i in range(j - k + 1):
                    l = j - k - i
                    if l >= j:
                        continue
                    g = A.component(i).d_xi(k, s) / math.factorial(k)
                    if not np.any(g):
                        continue
                    while len(r_deriv[l]) <= k:
                        r_deriv[l].append(_dx_rational(r_deriv[l][-1], Da))
                    for p, c in r_deriv[l][k].items():
                        acc[p] = acc.get(p, 0) + g * c
            rj = {p + 1: -c for p, c in acc.items() if np.any(c)}
            r.append(rj)
            r_deriv.append([rj])
        coeffs[s] = r
    return ResolventSymbolFamily(A.order, {s: A.components[0].side(s) for s in SIGNS}, coeffs)


def parametrix_defect(A: Symbol, R: ResolventSymbolFamily, lam: complex, J: int | None = None) -> float:
    """Max over ``j <= J`` of the degree ``-j`` part of ``sigma(A - lam) o r - 1``,
    with ``r`` evaluated numerically at ``lam`` and ``D_x`` applied by FFT."""
    J = R.depth if J is None else J
    worst = 0.0
    for s in SIGNS:
        rv = [R.evaluate(l, s, lam) for l in range(J + 1)]
        for j in range(J + 1):
            tot = np.zeros(A.M, dtype=complex)
            for k in range(j + 1):
                for i in range(j - k + 1):
                    l = j - k - i
                    g = A.component(i).d_xi(k, s) / math.factorial(k)
                    if i == 0 and k == 0:
                        g = g - lam
                    tot += g * dx(rv[l], k)
            target = 1.0 if j == 0 else 0.0
            worst = max(worst, float(np.max(np.abs(tot - target))))
    return worst


def rodd_deviation(A: Symbol, R: ResolventSymbolFamily, lam: complex, report_depth: int | None = None) -> float:
    """``|r_{-m-j}(x, -1; (-1)^m lam) - (-1)^{m+j} r_{-m-j}(x, 1; lam)|`` maximized
    over ``j <= report_depth`` (default: all computed components)."""
    m = int(complex(A.order).real)
    worst = 0.0
    for j in range(min(R.depth, R.depth if report_depth is None else report_depth) + 1):
        lhs = R.evaluate(j, -1, (-1) ** m * lam)
        rhs = (-1) ** (m + j) * R.evaluate(j, 1, lam)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# ---------------------------------------------------------------------------
# complex powers and logarithms
# ---------------------------------------------------------------------------

def _require_principal(A: Symbol, cut: SpectralCut) -> None:
    lead = A.components[0]
    for s in SIGNS:
        args = np.angle(lead.side(s))
        for a in args:
            if angular_distance(float(a), cut.theta) <= 1e-9:
                raise NotPrincipal(f"principal symbol at xi = {s:+d} meets the ray theta = {cut.theta}")


def _residue_components(R: ResolventSymbolFamily, s: complex, cut: SpectralCut,
                        orientation: float) -> dict[int, list[np.ndarray]]:
    # sigma_{sm-j} = (i/2pi) oint lam^s r_{-m-j} dlam around lam = a, and
    # Res_{lam=a} lam^s (a - lam)^-p = (-1)^p binom(s, p-1) a^(s-p+1).
    out = {}
    for sign in SIGNS:
        a = R.leading[sign]
        a_s = complex_power(a, s, cut)
        comps = []
        for terms in R.coeffs[sign]:
            val = np.zeros(len(a), dtype=complex)
            for p, c in terms.items():
                val += (-1) ** (p + 1) * binom(s, p - 1) * c * a_s * a ** (1 - p)
            comps.append(orientation * val)
        out[sign] = comps
    return out


@lru_cache(maxsize=None)
def contour_orientation() -> float:
    """Fix the sign of the contour integral by requiring ``A^1 = A`` and
    ``A^0 = Id`` on a variable-coefficient fixture; fails loudly otherwise."""
    N = 8
    A = differential_symbol([trig_poly({0: 0.3, 1: 0.1j, -2: 0.05}), trig_poly({0: 1.0, 1: 0.2, -1: 0.2})], N)
    R = resolvent_symbols(A, 3)
    cut = SpectralCut(math.pi / 2)
    for orientation in (1.0, -1.0):
        one = _residue_components(R, 1.0, cut, orientation)
        zero = _residue_components(R, 0.0, cut, orientation)
        ok = True
        for sign in SIGNS:
            for j in range(4):
                target = A.component(j).side(sign)
                ident = 1.0 if j == 0 else 0.0
                if np.max(np.abs(one[sign][j] - target)) > 1e-10 or np.max(np.abs(zero[sign][j] - ident)) > 1e-12:
                    ok = False
        if ok:
            return orientation
    raise RuntimeError("contour calibration failed: neither orientation reproduces A^1 = A and A^0 = Id")


def power_symbol(A: Symbol, s, cut, J: int = DEFAULT_DEPTH, resolvent: ResolventSymbolFamily | None = None) -> Symbol:
    """Homogeneous terms of ``A^s_(theta)`` by residue calculus on the parametrix."""
    cut = cut if isinstance(cut, SpectralCut) else SpectralCut(float(cut))
    s = complex(s)
    _require_principal(A, cut)
    R = resolvent if resolvent is not None else resolvent_symbols(A, J)
    vals = _residue_components(R, s, cut, contour_orientation())
    order = s * complex(A.order)
    comps = tuple(HomogComponent(order - j, vals[1][j], vals[-1][j]) for j in range(J + 1))
    return Symbol(order, comps, 0j, False)


def log_symbol(A: Symbol, cut, J: int = DEFAULT_DEPTH, h: float = H_S) -> Symbol:
    """``log_(theta) A``: type ``gamma = order``, degree 0, components from a
    central difference in ``s`` of the power symbol with one Richardson step."""
    cut = cut if isinstance(cut, SpectralCut) else SpectralCut(float(cut))
    _require_principal(A, cut)
    R = resolvent_symbols(A, J)
    orient = contour_orientation()
    v = {t: _residue_components(R, t, cut, orient) for t in (h, -h, 2 * h, -2 * h)}
    comps = []
    for j in range(J + 1):
        sides = []
        for sign in SIGNS:
            d1 = (v[h][sign][j] - v[-h][sign][j]) / (2 * h)
            d2 = (v[2 * h][sign][j] - v[-2 * h][sign][j]) / (4 * h)
            sides.append((4 * d1 - d2) / 3)
        comps.append(HomogComponent(-j + 0j, sides[0], sides[1]))
    return Symbol(0j, tuple(comps), complex(A.order), False)


def log_symbol_exact(A: Symbol, cut, J: int = DEFAULT_DEPTH) -> Symbol:
    """Closed-form ``d/ds`` of the residue formula at ``s = 0``:
    ``c_1 log a - sum_{p>=2} c_p a^(1-p) / (p - 1)``.  Used as an oracle."""
    cut = cut if isinstance(cut, SpectralCut) else SpectralCut(float(cut))
    _require_principal(A, cut)
    R = resolvent_symbols(A, J)
    comps = []
    for j in range(J + 1):
        sides = []
        for sign in SIGNS:
            a = R.leading[sign]
            val = np.zeros(len(a), dtype=complex)
            for p, c in R.coeffs[sign][j].items():
                val += c * branch_log(a, cut) if p == 1 else -c * a ** (1 - p) / (p - 1)
            sides.append(val)
        comps.append(HomogComponent(-j + 0j, sides[0], sides[1]))
    return Symbol(0j, tuple(comps), complex(A.order), False)


def check_asodd(A: Symbol, cut, s, J: int = DEFAULT_DEPTH, report_depth: int | None = None) -> float:
    """Max deviation in ``sigma_{sm-j}(A^s_(theta))(x, -1) =
    (-1)^j e^{i m s pi} sigma_{sm-j}(A^s_(theta - m pi))(x, 1)`` over
    ``j <= report_depth`` (default ``J``)."""
    cut = cut if isinstance(cut, SpectralCut) else SpectralCut(float(cut))
    m = complex(A.order)
    R = resolvent_symbols(A, J)
    P1 = power_symbol(A, s, cut, J, R)
    P2 = power_symbol(A, s, cut.partner(m.real), J, R)
    phase = np.exp(1j * m * complex(s) * np.pi)
    return max(float(np.max(np.abs(P1.components[j].minus - (-1) ** j * phase * P2.components[j].plus)))
               for j in range(min(J, J if report_depth is None else report_depth) + 1))


# ---------------------------------------------------------------------------
# residue identities
# ---------------------------------------------------------------------------

def residue_coboundary(Q: Symbol, cut, A: Symbol, B: Symbol, J: int | None = None) -> complex:
    """``-(1/m) Res([log_(theta) Q, A] B)``: the weighted trace of ``[A, B]``."""
    m = complex(Q.order)
    need = complex(A.order) + complex(B.order) + 1
    if not _is_integer(need):
        return 0j
    need = max(int(need.real), 0)
    J = max(need, 1) if J is None else J
    if J < need:
        raise DepthInsufficient(f"depth {J} below the {need} terms the residue needs")
    L = log_symbol(Q, cut, J)
    C = commutator_symbol(L, A, J)
    return -wodzicki_res(compose(C, B, J)) / m


def residue_coboundary_sym(Q: Symbol, theta: float, A: Symbol, B: Symbol, J: int | None = None) -> complex:
    cut = SpectralCut(float(theta))
    partner = cut.partner(complex(Q.order).real)
    return 0.5 * (residue_coboundary(Q, cut, A, B, J) + residue_coboundary(Q, partner, A, B, J))


def reslog_difference(A1: Symbol, theta1: float, A2: Symbol, theta2: float, J: int = DEFAULT_DEPTH) -> complex:
    """``Res(log_(theta1) A1 / m1 - log_(theta2) A2 / m2)``."""
    L1 = log_symbol(A1, theta1, J) / complex(A1.order)
    L2 = log_symbol(A2, theta2, J) / complex(A2.order)
    return wodzicki_res(L1 - L2, tol=1e-9)


# ---------------------------------------------------------------------------
# multiplicative anomaly integrand
# ---------------------------------------------------------------------------

def _gap_around(args: np.ndarray, alpha: float) -> tuple[float, float]:
    rel = np.sort(np.mod(args - alpha, 2 * np.pi))
    if rel.size == 0:
        return alpha - np.pi, alpha + np.pi
    if rel[0] <= 1e-9 or rel[-1] >= 2 * np.pi - 1e-9:
        raise NotPrincipal(f"angle {alpha} meets the principal symbol")
    return alpha + rel[-1] - 2 * np.pi, alpha + rel[0]


def _leading_AtB(A: Symbol, B: Symbol, t: float, theta_A: float) -> np.ndarray:
    vals = []
    for s in SIGNS:
        a = A.components[0].side(s)
        b = B.components[0].side(s)
        vals.append(complex_power(a, t, theta_A) * b)
    return np.concatenate(vals)


def track_alpha(A: Symbol, B: Symbol, theta_A: float, theta_B: float, t: float, steps_per_unit: int = 128) -> float:
    """A continuous principal angle ``alpha(t)`` for ``A^t_(theta_A) B`` with
    ``alpha(0) = theta_B``: follow the gap of the principal symbol that
    contains the current angle, re-centering when the spectrum comes close."""
    alpha = float(theta_B)
    _gap_around(np.angle(_leading_AtB(A, B, 0.0, theta_A)), alpha)
    n = max(1, math.ceil(steps_per_unit * t))
    for i in range(1, n + 1):
        lo, hi = _gap_around(np.angle(_leading_AtB(A, B, t * i / n, theta_A)), alpha)
        width = hi - lo
        if min(alpha - lo, hi - alpha) < 0.25 * width:
            alpha = 0.5 * (lo + hi)
    return alpha


def anomaly_integrand(A: Symbol, B: Symbol, theta_A: float, t: float, J: int = DEFAULT_DEPTH,
                      alpha: float | None = None, theta_B: float | None = None) -> complex:
    """``Res(U(t)^2 + V(t)^2)`` with

    ``U = log_alpha(A^t_(theta_A) B)/(m_A t + m_B) - log_(theta_A) A / m_A``,
    ``V`` the same at ``theta_A - m_A pi`` and ``beta = alpha - (m_A t + m_B) pi``.
    """
    mA, mB = complex(A.order).real, complex(B.order).real
    if alpha is None:
        if theta_B is None:
            raise ValueError("give either alpha or theta_B")
        alpha = track_alpha(A, B, theta_A, theta_B, t)
    m = mA * t + mB
    beta = alpha - m * np.pi
    thA = SpectralCut(float(theta_A))
    thA2 = thA.partner(mA)
    C = compose(power_symbol(A, t, thA, J), B, J)
    C2 = compose(power_symbol(A, t, thA2, J), B, J)
    U = log_symbol(C, alpha, J) / m - log_symbol(A, thA, J) / mA
    V = log_symbol(C2, beta, J) / m - log_symbol(A, thA2, J) / mA
    W = compose(U, U, J) + compose(V, V, J)
    return wodzicki_res(W, tol=1e-9)
