"""Eigenvalue-model operators on the circle.

An operator is diagonal in the Fourier basis ``e^{inx}`` with eigenvalue

    lambda_n = sum_j c_j * sgn(n)**e_j * |n|**p_j        (sgn(0) = 0, 0**0 = 1)

except at finitely many *exceptional* indices, where an explicit value and a
multiplicity are given.  Coefficients and exceptions are stored as exact
Gaussian rationals so that "on the imaginary axis" and "conjugation
symmetric" are decided exactly.

Each lattice branch ``n = sigma*k`` (``sigma = +-1``, ``k >= 1``) is written
``lambda = L_sigma k**m (1 + u(k))`` with ``u`` a polynomial in ``1/k``; the
zeta-function continuation expands in ``u``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .complexcut import (
    SolidAngle,
    SpectralCut,
    angular_distance,
    branch_log,
    complex_power,
    in_solid_angle,
)
from .errors import (
    BoundaryEigenvalue,
    IndexOutOfSet,
    IndexSetMismatch,
    InfiniteBothSides,
    InfiniteOnAxis,
    NotAgmon,
    NotElliptic,
    SchemaError,
)

BRANCHES = (1, -1)
INDEX_SETS = ("Z", "Z_nonzero")


# ---------------------------------------------------------------------------
# exact Gaussian rationals
# ---------------------------------------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # shortest repr, so 0.1 means one tenth
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not an exact number: {x!r}") from exc
    raise SchemaError(f"not an exact number: {x!r}")


@dataclass(frozen=True)
class Exact:
    """Complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> "Exact":
        if isinstance(value, Exact):
            return value
        if isinstance(value, complex):
            return cls(_frac(value.real), _frac(value.imag))
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise SchemaError(f"complex pair expected, got {value!r}")
            return cls(_frac(value[0]), _frac(value[1]))
        return cls(_frac(value), Fraction(0))

    def __add__(self, other):
        other = Exact.of(other)
        return Exact(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return Exact(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-Exact.of(other))

    def __mul__(self, other):
        other = Exact.of(other)
        return Exact(self.re * other.re - self.im * other.im,
                     self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conj(self) -> "Exact":
        return Exact(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_json(self):
        return [str(self.re), str(self.im)]


# ---------------------------------------------------------------------------
# power series in 1/k
# ---------------------------------------------------------------------------

def series_pow(u: np.ndarray, s: complex, depth: int) -> np.ndarray:
    """Coefficients of ``(1 + u)**s`` up to ``k**-depth``; ``u[0]`` is ignored."""
    f = np.zeros(depth + 1, dtype=complex)
    f[0] = 1.0
    n = min(len(u), depth + 1)
    f[1:n] = u[1:n]
    g = np.zeros(depth + 1, dtype=complex)
    g[0] = 1.0
    for i in range(1, depth + 1):
        acc = 0j
        for k in range(1, i + 1):
            if f[k] != 0:
                acc += ((s + 1) * k - i) * f[k] * g[i - k]
        g[i] = acc / i
    return g


def series_log(u: np.ndarray, depth: int) -> np.ndarray:
    """Coefficients of ``log(1 + u)`` up to ``k**-depth``."""
    f = np.zeros(depth + 1, dtype=complex)
    f[0] = 1.0
    n = min(len(u), depth + 1)
    f[1:n] = u[1:n]
    h = np.zeros(depth + 1, dtype=complex)
    for i in range(1, depth + 1):
        acc = f[i]
        for k in range(1, i):
            acc -= k * h[k] * f[i - k] / i
        h[i] = acc
    return h


def _positive_integer_roots(coeffs: Mapping[int, Fraction]) -> list[int] | None:
    """Integers k >= 1 with sum c_p k**p == 0 (exact); None if all c_p vanish."""
    coeffs = {p: c for p, c in coeffs.items() if c != 0}
    if not coeffs:
        return None
    top = max(coeffs)
    lead = abs(coeffs[top])
    bound = 1 + max((abs(c) / lead for p, c in coeffs.items() if p != top), default=0)
    roots = []
    for k in range(1, int(math.floor(bound)) + 1):
        kk = Fraction(k)
        if sum(c * kk ** p for p, c in coeffs.items()) == 0:
            roots.append(k)
    return roots


# ---------------------------------------------------------------------------
# laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LawTerm:
    coeff: Exact
    sgn: int
    power: int


@dataclass(frozen=True)
class SpectralLaw:
    """Bilateral power law ``n -> sum c sgn(n)^e |n|^p`` of order ``m``."""

    order: int
    terms: tuple[LawTerm, ...]

    def __post_init__(self):
        merged: dict[tuple[int, int], Exact] = {}
        for t in self.terms:
            if t.sgn not in (0, 1):
                raise SchemaError("sign exponent must be 0 or 1")
            if t.power > self.order:
                raise SchemaError(f"power {t.power} exceeds order {self.order}")
            key = (t.sgn, t.power)
            merged[key] = merged.get(key, Exact(Fraction(0))) + t.coeff
        terms = tuple(LawTerm(c, e, p) for (e, p), c in sorted(merged.items(), key=lambda kv: (-kv[0][1], kv[0][0]))
                      if not c.is_zero())
        object.__setattr__(self, "terms", terms)
        if self.order < 1:
            raise SchemaError("law order must be a positive integer")
        for sigma in BRANCHES:
            if self.branch_coeffs_exact(sigma).get(self.order, Exact(Fraction(0))).is_zero():
                raise NotElliptic(f"leading coefficient vanishes on branch {sigma:+d}")

    @classmethod
    def from_terms(cls, order: int, terms: Iterable) -> "SpectralLaw":
        """Build from ``(coeff, sgn, power)`` triples with exact-parsable coefficients."""
        return cls(order, tuple(LawTerm(Exact.of(c), int(e), int(p)) for c, e, p in terms))

    def branch_coeffs_exact(self, sigma: int) -> dict[int, Exact]:
        out: dict[int, Exact] = {}
        for t in self.terms:
            c = t.coeff if (t.sgn == 0 or sigma > 0) else -t.coeff
            out[t.power] = out.get(t.power, Exact(Fraction(0))) + c
        return out

    def branch_coeffs(self, sigma: int) -> dict[int, complex]:
        return {p: complex(c) for p, c in self.branch_coeffs_exact(sigma).items()}

    def leading(self, sigma: int) -> complex:
        return self.branch_coeffs(sigma)[self.order]

    def exact_value(self, n: int) -> Exact:
        total = Exact(Fraction(0))
        for t in self.terms:
            if n == 0:
                if t.sgn == 1 or t.power > 0:
                    continue
                if t.power < 0:
                    raise IndexOutOfSet("law has a negative power and is undefined at n = 0")
                total = total + t.coeff
                continue
            factor = Fraction(abs(n)) ** t.power
            if t.sgn == 1 and n < 0:
                factor = -factor
            total = total + t.coeff * Exact(factor)
        return total

    def values(self, ns) -> np.ndarray:
        ns = np.asarray(ns)
        out = np.zeros(ns.shape, dtype=complex)
        absn = np.abs(ns).astype(float)
        sg = np.sign(ns).astype(float)
        nz = ns != 0
        for t in self.terms:
            c = complex(t.coeff)
            term = np.zeros(ns.shape, dtype=complex)
            term[nz] = c * absn[nz] ** t.power * (sg[nz] if t.sgn else 1.0)
            if t.sgn == 0 and t.power == 0:
                term[~nz] = c
            out += term
        return out

    def u_coeffs(self, sigma: int) -> np.ndarray:
        """``u[t]`` with ``lambda_{sigma k} = L k^m (1 + sum_t u[t] k^-t)``."""
        b = self.branch_coeffs(sigma)
        lead = b[self.order]
        depth = self.order - min(b)
        u = np.zeros(depth + 1, dtype=complex)
        for p, c in b.items():
            if p != self.order:
                u[self.order - p] = c / lead
        return u

    def u_bound(self, sigma: int, k: float) -> float:
        u = self.u_coeffs(sigma)
        return float(sum(abs(u[t]) * k ** (-t) for t in range(1, len(u))))

    def tail_start(self, sigma: int, margin: float) -> int:
        """Smallest ``k0`` with ``|u(k)| < min(1/2, sin(margin))`` for all ``k >= k0``.

        Past ``k0`` every eigenvalue lies within angle ``margin`` of the
        leading direction, and ``log(1 + u)`` is given by its principal series.
        """
        target = min(0.5, math.sin(min(margin, math.pi / 2)))
        if target <= 0:
            raise ValueError("margin must be positive")
        k = 1
        while self.u_bound(sigma, k) >= target:
            k *= 2
        lo = k // 2 if k > 1 else 1
        while lo < k:
            mid = (lo + k) // 2
            if self.u_bound(sigma, mid) < target:
                k = mid
            else:
                lo = mid + 1
        return max(k, 1)

    def times(self, other: "SpectralLaw") -> "SpectralLaw":
        terms = []
        for a in self.terms:
            for b in other.terms:
                terms.append(LawTerm(a.coeff * b.coeff, (a.sgn + b.sgn) % 2, a.power + b.power))
        return SpectralLaw(self.order + other.order, tuple(terms))

    def to_json(self):
        return [{"c": t.coeff.to_json(), "sgn": t.sgn, "pow": t.power} for t in self.terms]


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralOperator:
    law: SpectralLaw
    exceptions: Mapping[int, tuple[Exact, int]] = field(default_factory=dict)
    index_set: str = "Z"

    def __post_init__(self):
        if self.index_set not in INDEX_SETS:
            raise SchemaError(f"index_set must be one of {INDEX_SETS}")
        exc = {}
        for n, (v, mult) in dict(self.exceptions).items():
            n = int(n)
            if self.index_set == "Z_nonzero" and n == 0:
                raise IndexOutOfSet("exception at n = 0 outside Z_nonzero")
            v = Exact.of(v)
            if v.is_zero():
                raise NotAgmon(f"exception at n = {n} is a zero eigenvalue")
            if int(mult) < 1:
                raise SchemaError("multiplicity must be positive")
            exc[n] = (v, int(mult))
        object.__setattr__(self, "exceptions", dict(sorted(exc.items())))
        for n in self._law_zeros():
            if n not in self.exceptions:
                raise NotAgmon(f"zero eigenvalue at n = {n}; operator is not invertible")

    # -- basic data ---------------------------------------------------------
    @property
    def order(self) -> int:
        return self.law.order

    def contains(self, n: int) -> bool:
        return self.index_set == "Z" or n != 0

    def _law_zeros(self) -> list[int]:
        zeros = []
        if self.contains(0):
            try:
                if self.law.exact_value(0).is_zero():
                    zeros.append(0)
            except IndexOutOfSet:
                if 0 not in self.exceptions:
                    raise
        for sigma in BRANCHES:
            b = self.law.branch_coeffs_exact(sigma)
            re_roots = _positive_integer_roots({p: c.re for p, c in b.items()}) or []
            for k in re_roots:
                if self.law.exact_value(sigma * k).is_zero():
                    zeros.append(sigma * k)
        return zeros

    def exact_eigenvalue(self, n: int) -> tuple[Exact, int]:
        if not self.contains(n):
            raise IndexOutOfSet(f"n = {n} not in {self.index_set}")
        if n in self.exceptions:
            return self.exceptions[n]
        return self.law.exact_value(n), 1

    def eigenvalue(self, n: int) -> tuple[complex, int]:
        v, mult = self.exact_eigenvalue(n)
        return complex(v), mult

    def multiplicity(self, n: int) -> int:
        return self.exceptions[n][1] if n in self.exceptions else 1

    def eigenvalues(self, ns) -> np.ndarray:
        ns = np.asarray(ns)
        out = self.law.values(ns)
        for n, (v, _) in self.exceptions.items():
            out[ns == n] = complex(v)
        return out

    def leading_direction(self, sigma: int) -> float:
        lead = self.law.leading(sigma)
        return math.atan2(lead.imag, lead.real)

    def explicit_indices(self, k0: int) -> list[int]:
        """Index 0 (if present), every ``0 < |n| < k0`` and every exception."""
        idx = set(self.exceptions)
        if self.contains(0):
            idx.add(0)
        for k in range(1, k0):
            idx.update((k, -k))
        return sorted(idx)

    # -- cuts -----------------------------------------------------------------
    def ray_report(self, theta: float) -> tuple[bool, bool]:
        """(principal, agmon) for the ray at ``theta``."""
        dists = [angular_distance(theta, self.leading_direction(s)) for s in BRANCHES]
        if min(dists) <= 1e-9:
            return False, False
        k0 = max(self.law.tail_start(s, d / 2) for s, d in zip(BRANCHES, dists))
        for n in self.explicit_indices(k0):
            lam, _ = self.eigenvalue(n)
            if angular_distance(theta, math.atan2(lam.imag, lam.real)) <= 1e-12 * max(1.0, abs(theta)):
                return True, False
        return True, True

    def is_agmon(self, cut) -> bool:
        theta = cut.theta if isinstance(cut, SpectralCut) else float(cut)
        return self.ray_report(theta)[1]

    def require_agmon(self, cut) -> SpectralCut:
        cut = cut if isinstance(cut, SpectralCut) else SpectralCut(float(cut))
        if not self.is_agmon(cut):
            raise NotAgmon(f"theta = {cut.theta!r} is not an Agmon angle for this operator")
        return cut

    def eigen_arguments(self, spread: float = math.pi / 64) -> list[float]:
        """Directions to avoid when nudging a cut: finitely many explicit
        eigenvalue arguments plus a cone of half-width ``spread`` around
        each leading direction, which contains every later eigenvalue."""
        k0 = max(self.law.tail_start(s, spread) for s in BRANCHES)
        args = []
        for n in self.explicit_indices(k0):
            lam, _ = self.eigenvalue(n)
            args.append(math.atan2(lam.imag, lam.real))
        for s in BRANCHES:
            d = self.leading_direction(s)
            args.extend((d - spread, d, d + spread))
        return args

    # -- schema -----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "kind": "spectral",
            "order": self.order,
            "index_set": self.index_set,
            "law": self.law.to_json(),
            "exceptions": [{"n": n, "value": v.to_json(), "mult": m} for n, (v, m) in self.exceptions.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SpectralOperator":
        try:
            if data.get("kind") != "spectral":
                raise SchemaError("operator schema needs kind = 'spectral'")
            order = int(data["order"])
            law = SpectralLaw.from_terms(order, [(t["c"], t.get("sgn", 0), t["pow"]) for t in data["law"]])
            default_set = "Z_nonzero" if order % 2 else "Z"
            exc = {int(e["n"]): (Exact.of(e["value"]), int(e.get("mult", 1))) for e in data.get("exceptions", [])}
            return cls(law, exc, data.get("index_set", default_set))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed operator schema: {exc}") from exc


def d_c(c, exceptions: Mapping | None = None) -> SpectralOperator:
    """``lambda_n = n + c`` on all of Z (a first-order Dirac-type model)."""
    law = SpectralLaw.from_terms(1, [(1, 1, 1), (c, 0, 0)])
    return SpectralOperator(law, dict(exceptions or {}), "Z")


def laplace_type(a2, exceptions: Mapping | None = None) -> SpectralOperator:
    """``lambda_n = n**2 + a2`` on all of Z."""
    law = SpectralLaw.from_terms(2, [(1, 0, 2), (a2, 0, 0)])
    return SpectralOperator(law, dict(exceptions or {}), "Z")


# ---------------------------------------------------------------------------
# eigenvalue-wise families
# ---------------------------------------------------------------------------

class EigenFamily:
    """A sequence ``n -> f_n`` diagonal in the same basis as the operators.

    ``expansion(sigma, depth)`` returns groups ``(beta, P, Q)`` meaning

        f_{sigma k} = k**beta * sum_t (P[t] + Q[t] log k) k**-t + O(k**(beta-depth-1))

    valid for ``k >= tail_start(sigma)``.
    """

    index_set: str | None = None  # None: defined on every index
    operator: SpectralOperator | None = None
    finite = False

    def values(self, ns) -> np.ndarray:
        raise NotImplementedError

    def value(self, n: int) -> complex:
        return complex(self.values(np.array([n]))[0])

    def __call__(self, n: int) -> complex:
        return self.value(n)

    def explicit_indices(self) -> set[int]:
        return set(self.operator.exceptions) if self.operator is not None else set()

    def multiplicities(self) -> dict[int, int]:
        if self.operator is None:
            return {}
        return {n: m for n, (_, m) in self.operator.exceptions.items()}

    def tail_start(self, sigma: int) -> int:
        return 1

    def expansion(self, sigma: int, depth: int) -> list[tuple[complex, np.ndarray, np.ndarray]]:
        raise NotImplementedError

    def __add__(self, other: "EigenFamily") -> "EigenFamily":
        return CombinedFamily(((1.0, self), (1.0, other)))

    def __sub__(self, other: "EigenFamily") -> "EigenFamily":
        return CombinedFamily(((1.0, self), (-1.0, other)))

    def __mul__(self, c) -> "EigenFamily":
        return CombinedFamily(((complex(c), self),))

    __rmul__ = __mul__


class ConstantFamily(EigenFamily):
    def __init__(self, c=1.0, index_set: str | None = None):
        self.c = complex(c)
        self.index_set = index_set

    def values(self, ns):
        return np.full(np.shape(ns), self.c, dtype=complex)

    def expansion(self, sigma, depth):
        P = np.zeros(depth + 1, dtype=complex)
        P[0] = self.c
        return [(0j, P, np.zeros(depth + 1, dtype=complex))]


class FiniteFamily(EigenFamily):
    """Finitely supported (trace-class) family."""

    finite = True

    def __init__(self, entries: Mapping[int, complex], index_set: str | None = None):
        self.entries = {int(n): complex(v) for n, v in entries.items()}
        self.index_set = index_set

    def values(self, ns):
        ns = np.asarray(ns)
        out = np.zeros(ns.shape, dtype=complex)
        for n, v in self.entries.items():
            out[ns == n] = v
        return out

    def explicit_indices(self):
        return set(self.entries)

    def expansion(self, sigma, depth):
        return []


class _OperatorFamily(EigenFamily):
    def __init__(self, op: SpectralOperator, cut):
        self.operator = op
        self.index_set = op.index_set
        self.cut = op.require_agmon(cut)

    def tail_start(self, sigma):
        margin = angular_distance(self.cut.theta, self.operator.leading_direction(sigma))
        return self.operator.law.tail_start(sigma, margin)


class LogFamily(_OperatorFamily):
    """``n -> log_(theta) lambda_n``."""

    def values(self, ns):
        return branch_log(self.operator.eigenvalues(ns), self.cut)

    def expansion(self, sigma, depth):
        law = self.operator.law
        P = series_log(law.u_coeffs(sigma), depth)
        P[0] = branch_log(law.leading(sigma), self.cut)
        Q = np.zeros(depth + 1, dtype=complex)
        Q[0] = law.order
        return [(0j, P, Q)]


class PowerFamily(_OperatorFamily):
    """``n -> (lambda_n)^s_(theta)`` at fixed ``s``."""

    def __init__(self, op: SpectralOperator, s, cut):
        super().__init__(op, cut)
        self.s = complex(s)

    def values(self, ns):
        return complex_power(self.operator.eigenvalues(ns), self.s, self.cut)

    def expansion(self, sigma, depth):
        law = self.operator.law
        P = complex_power(law.leading(sigma), self.s, self.cut) * series_pow(law.u_coeffs(sigma), self.s, depth)
        return [(law.order * self.s, P, np.zeros(depth + 1, dtype=complex))]


class CombinedFamily(EigenFamily):
    def __init__(self, parts):
        flat = []
        for c, fam in parts:
            if isinstance(fam, CombinedFamily):
                flat.extend((c * c2, f2) for c2, f2 in fam.parts)
            else:
                flat.append((complex(c), fam))
        self.parts = tuple(flat)
        sets = {f.index_set for _, f in self.parts} - {None}
        if len(sets) > 1:
            raise IndexSetMismatch("families live on different index sets")
        self.index_set = sets.pop() if sets else None
        self.finite = all(f.finite for _, f in self.parts)

    def values(self, ns):
        return sum(c * f.values(ns) for c, f in self.parts)

    def explicit_indices(self):
        return set().union(*(f.explicit_indices() for _, f in self.parts))

    def multiplicities(self):
        out: dict[int, int] = {}
        for _, f in self.parts:
            for n, m in f.multiplicities().items():
                if out.get(n, m) != m:
                    raise IndexSetMismatch(f"conflicting multiplicities at n = {n}")
                out[n] = m
        return out

    def tail_start(self, sigma):
        return max(f.tail_start(sigma) for _, f in self.parts)

    def expansion(self, sigma, depth):
        groups = []
        for c, f in self.parts:
            groups.extend((b, c * P, c * Q) for b, P, Q in f.expansion(sigma, depth))
        return groups


def power_op(A: SpectralOperator, s, cut) -> PowerFamily:
    return PowerFamily(A, s, cut)


def log_op(A: SpectralOperator, cut) -> LogFamily:
    return LogFamily(A, cut)


# ---------------------------------------------------------------------------
# algebra of commuting operators
# ---------------------------------------------------------------------------

def multiply_commuting(A: SpectralOperator, B: SpectralOperator) -> SpectralOperator:
    if A.index_set != B.index_set:
        raise IndexSetMismatch("operators are not diagonal on the same index set")
    law = A.law.times(B.law)
    exc: dict[int, tuple[Exact, int]] = {}
    for n in sorted(set(A.exceptions) | set(B.exceptions)):
        va, ma = A.exact_eigenvalue(n)
        vb, mb = B.exact_eigenvalue(n)
        if n in A.exceptions and n in B.exceptions and ma != mb:
            raise IndexSetMismatch(f"multiplicities disagree at n = {n}")
        exc[n] = (va * vb, max(ma, mb))
    if A.contains(0) and 0 not in exc:
        true0 = A.exact_eigenvalue(0)[0] * B.exact_eigenvalue(0)[0]
        # sgn(0)**2 = 0 but the reduced law uses sgn**0 = 1
        if law.exact_value(0) != true0:
            exc[0] = (true0, 1)
    return SpectralOperator(law, exc, A.index_set)


def square_op(A: SpectralOperator) -> SpectralOperator:
    return multiply_commuting(A, A)


# ---------------------------------------------------------------------------
# projections and symmetry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionDescriptor:
    """Spectral projection onto eigenvalues inside a sector.

    ``finite``: exactly the listed ``indices``.  ``cofinite``: the tails of
    the lattice branches in ``branches`` (``n >= 1`` for +1, ``n <= -1`` for
    -1), minus ``excluded``, plus the extra ``indices``.
    """

    kind: str
    indices: tuple[int, ...] = ()
    branches: tuple[int, ...] = ()
    excluded: tuple[int, ...] = ()
    multiplicities: Mapping[int, int] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        if self.kind != "finite":
            raise InfiniteBothSides("cofinite projection has infinite rank")
        return sum(self.multiplicities.get(n, 1) for n in self.indices)

    def contains(self, n: int) -> bool:
        if n in self.indices:
            return True
        if n in self.excluded:
            return False
        return n != 0 and (1 if n > 0 else -1) in self.branches


def spectral_projection(A: SpectralOperator, angle: SolidAngle) -> ProjectionDescriptor:
    mults = {n: m for n, (_, m) in A.exceptions.items()}
    if angle.full:
        return ProjectionDescriptor("cofinite", (0,) if A.contains(0) else (), BRANCHES, (), mults)
    inside_tail = []
    k0 = 1
    for sigma in BRANCHES:
        d = A.leading_direction(sigma)
        margin = min(angular_distance(d, angle.theta1), angular_distance(d, angle.theta2))
        if margin <= 1e-9:
            raise InfiniteBothSides(f"branch {sigma:+d} accumulates on a boundary ray")
        if in_solid_angle(complex(math.cos(d), math.sin(d)), angle):
            inside_tail.append(sigma)
        k0 = max(k0, A.law.tail_start(sigma, margin))
    indices, excluded = [], []
    for n in A.explicit_indices(k0):
        lam, _ = A.eigenvalue(n)
        arg = math.atan2(lam.imag, lam.real)
        for edge in (angle.theta1, angle.theta2):
            if angular_distance(arg, edge) <= 1e-12 * max(1.0, abs(edge)):
                raise BoundaryEigenvalue(f"eigenvalue at n = {n} lies on a boundary ray")
        inside = in_solid_angle(lam, angle)
        on_tail = n != 0 and (1 if n > 0 else -1) in inside_tail
        if inside and not on_tail:
            indices.append(n)
        elif on_tail and not inside:
            excluded.append(n)
    kind = "cofinite" if inside_tail else "finite"
    return ProjectionDescriptor(kind, tuple(indices), tuple(inside_tail), tuple(excluded), mults)


def count_imaginary_axis(A: SpectralOperator) -> tuple[int, int]:
    """Eigenvalues on the positive / negative imaginary axis, with multiplicity."""
    candidates = set(A.exceptions)
    if A.contains(0):
        candidates.add(0)
    for sigma in BRANCHES:
        b = A.law.branch_coeffs_exact(sigma)
        roots = _positive_integer_roots({p: c.re for p, c in b.items()})
        if roots is None:
            raise InfiniteOnAxis(f"branch {sigma:+d} lies on the imaginary axis")
        candidates.update(sigma * k for k in roots)
    m_plus = m_minus = 0
    for n in candidates:
        try:
            v, mult = A.exact_eigenvalue(n)
        except IndexOutOfSet:
            continue
        if v.re == 0:
            if v.im > 0:
                m_plus += mult
            elif v.im < 0:
                m_minus += mult
    return m_plus, m_minus


def _law_conjugation(law: SpectralLaw):
    """Index involution carrying the law multiset to its conjugate, or None."""
    if all(t.coeff.im == 0 for t in law.terms):
        return lambda n: n
    if all(t.coeff.conj() == (t.coeff if t.sgn == 0 else -t.coeff) for t in law.terms):
        return lambda n: -n
    return None


def is_symmetric_spectrum(A: SpectralOperator) -> bool:
    """Is the eigenvalue multiset invariant under complex conjugation?"""
    if _law_conjugation(A.law) is None:
        return False
    # the law multiset is symmetric, so only the finite defect matters
    defect: Counter = Counter()
    for n, (v, mult) in A.exceptions.items():
        defect[v] += mult
        defect[A.law.exact_value(n)] -= 1
    defect = Counter({k: c for k, c in defect.items() if c})
    conj = Counter({k.conj(): c for k, c in defect.items()})
    return defect == conj
