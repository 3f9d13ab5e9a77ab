"""Analytic continuation of spectral sums.

``ZetaFunction`` packages ``s -> sum_n mult_n * w_n * (lambda_n)^s_(theta)``
for a model operator and an optional diagonal weight ``w``.  Continuation
splits the lattice into

* an explicit block (index 0, small ``|n|`` and every exception), summed
  term by term;
* two tails ``n = +-k``, ``k >= k0``, where ``lambda = L k^m (1 + u(k))`` is
  expanded binomially in ``u`` and each resulting power ``k^z`` summed by a
  Hurwitz zeta value;
* the remainder of that expansion, absolutely convergent and summed directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import gamma

from .complexcut import SpectralCut, angular_distance, branch_log, complex_power
from .errors import (
    ExpansionDepthInsufficient,
    FitUnstable,
    IndexOutOfSet,
    IndexSetMismatch,
    NotConvergent,
    PoleAtOne,
    PoleHit,
)
from .spectralmodel import BRANCHES, EigenFamily, SpectralOperator, series_pow

EPS_CONT = 1e-9
EPS_LAURENT = 1e-8
REFLECT_BELOW = -3.0
EXTRA_DEPTH = 24  # extra expansion terms used to sum the remainder without cancellation


# ---------------------------------------------------------------------------
# Hurwitz zeta
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_ratios(count: int) -> tuple[float, ...]:
    """``B_{2j} / (2j)!`` for ``j = 1..count``."""
    B = [Fraction(1)]
    for n in range(1, 2 * count + 1):
        acc = sum(math.comb(n + 1, k) * B[k] for k in range(n))
        B.append(-acc / (n + 1))
    return tuple(float(B[2 * j] / math.factorial(2 * j)) for j in range(1, count + 1))


def hurwitz_zeta(z, a: float = 1.0, derivative: int = 0, order: int = 40) -> complex:
    """Hurwitz zeta ``sum_{k>=0} (k + a)^-z`` (or its ``z``-derivative).

    Euler-Maclaurin with the head summed up to ``X = N + a``, ``X`` chosen
    so that the correction series reaches machine precision before it
    starts to diverge.  ``a`` may be any positive real.
    """
    z = complex(z)
    if derivative not in (0, 1):
        raise ValueError("only the value and the first derivative are supported")
    if a <= 0:
        raise ValueError("a must be positive")
    if abs(z - 1) < 1e-14:
        raise PoleAtOne("Hurwitz zeta has a pole at z = 1")
    if derivative == 0 and z.real <= REFLECT_BELOW:
        return _hurwitz_reflected(z, a)
    target = 7.0 + 0.25 * abs(z)
    N = max(0, math.ceil(target - a))
    X = N + a
    logX = math.log(X)
    if N:
        k = np.arange(N) + a
        logk = np.log(k)
        head = np.exp(-z * logk)
        total = head.sum() if derivative == 0 else -(logk * head).sum()
    else:
        total = 0j
    Xz = np.exp(-z * logX)
    if derivative == 0:
        total += X * Xz / (z - 1) + 0.5 * Xz
    else:
        total += X * Xz * (-logX / (z - 1) - 1.0 / (z - 1) ** 2) - 0.5 * logX * Xz
    # correction terms b_j * z(z+1)...(z+2j-2) * X^(-z-2j+1)
    poch, dpoch = z, 1.0 + 0j
    power = Xz / X
    prev = math.inf
    for j, b in enumerate(_bernoulli_ratios(order), start=1):
        if derivative == 0:
            term = b * poch * power
        else:
            term = b * (dpoch - logX * poch) * power
        size = abs(term)
        if size > prev and j > 3:
            break  # asymptotic series has turned
        total += term
        if size <= 1e-17 * abs(total):
            break
        prev = size
        for i in (2 * j - 1, 2 * j):
            dpoch = dpoch * (z + i) + poch
            poch = poch * (z + i)
        power = power / (X * X)
    return complex(total)


def _hurwitz_reflected(z: complex, a: float) -> complex:
    # Hurwitz's formula: zeta(1 - w, a) = Gamma(w) (2 pi)^-w
    #   * (e^{-i pi w/2} F(w, a) + e^{i pi w/2} F(w, -a)),  F(w, x) = sum e^{2 pi i n x} n^-w.
    # Avoids the head/tail cancellation Euler-Maclaurin suffers for Re z << 0.
    M = math.ceil(a) - 1
    a1 = a - M  # in (0, 1]
    w = 1 - z
    p = w.real - 1
    N = int(min(2e6, math.ceil((1e-17 * p) ** (-1 / p))))
    n = np.arange(N, 0, -1, dtype=float)
    decay = np.exp(-w * np.log(n))
    phase = 2j * np.pi * n * a1
    F_plus = np.sum(decay * np.exp(phase))
    F_minus = np.sum(decay * np.exp(-phase))
    out = gamma(w) * np.exp(-w * math.log(2 * math.pi)) * (
        np.exp(-0.5j * np.pi * w) * F_plus + np.exp(0.5j * np.pi * w) * F_minus)
    if M:
        out -= np.sum(np.exp(-z * np.log(np.arange(M) + a1)))
    return complex(out)


# ---------------------------------------------------------------------------
# zeta functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaFunction:
    """``s -> sum_n mult_n w_n (lambda_n)^s_(theta)``.

    ``k_expand`` is the binomial expansion depth, ``n_tail`` the last index
    of the directly summed remainder.
    """

    operator: SpectralOperator
    cut: SpectralCut
    weight: EigenFamily | None = None
    k_expand: int = 6
    n_tail: int = 10_000

    def __post_init__(self):
        cut = self.cut if isinstance(self.cut, SpectralCut) else SpectralCut(float(self.cut))
        object.__setattr__(self, "cut", self.operator.require_agmon(cut))
        w = self.weight
        if w is not None and w.index_set not in (None, self.operator.index_set):
            raise IndexSetMismatch("weight and operator live on different index sets")

    @property
    def order(self) -> int:
        return self.operator.order

    @property
    def finite(self) -> bool:
        return self.weight is not None and self.weight.finite

    def with_params(self, k_expand: int | None = None, n_tail: int | None = None) -> "ZetaFunction":
        return ZetaFunction(self.operator, self.cut, self.weight,
                            k_expand or self.k_expand, n_tail or self.n_tail)

    def weight_values(self, ns) -> np.ndarray:
        if self.weight is None:
            return np.ones(np.shape(ns), dtype=complex)
        return self.weight.values(ns)

    def multiplicity(self, n: int) -> int:
        m_op = self.operator.exceptions.get(n, (None, None))[1]
        m_w = self.weight.multiplicities().get(n) if self.weight is not None else None
        if m_op is not None and m_w is not None and m_op != m_w:
            raise IndexSetMismatch(f"weight and operator disagree on the multiplicity at n = {n}")
        return m_op or m_w or 1

    # -- splitting data -----------------------------------------------------
    @cached_property
    def k0(self) -> int:
        op = self.operator
        k0 = 2
        for sigma in BRANCHES:
            k0 = max(k0, self.tail_margin_start(sigma))
            if self.weight is not None:
                k0 = max(k0, self.weight.tail_start(sigma))
        special = set(op.exceptions)
        if self.weight is not None:
            special |= self.weight.explicit_indices()
        if special:
            k0 = max(k0, max(abs(n) for n in special) + 1)
        return k0

    def tail_margin_start(self, sigma: int) -> int:
        margin = angular_distance(self.cut.theta, self.operator.leading_direction(sigma))
        return self.operator.law.tail_start(sigma, margin)

    @cached_property
    def explicit_block(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indices, mult * weight, branch logs) for the explicit block."""
        if self.finite:
            ns = sorted(self.weight.explicit_indices())
            for n in ns:
                if not self.operator.contains(n):
                    raise IndexOutOfSet(f"weight index {n} outside {self.operator.index_set}")
        else:
            ns = [n for n in range(-self.k0 + 1, self.k0) if self.operator.contains(n)]
        ns = np.array(ns, dtype=int)
        if ns.size == 0:
            return ns, np.zeros(0, dtype=complex), np.zeros(0, dtype=complex)
        lam = self.operator.eigenvalues(ns)
        coef = self.weight_values(ns) * np.array([self.multiplicity(int(n)) for n in ns])
        return ns, coef, np.asarray(branch_log(lam, self.cut), dtype=complex)

    def explicit_sum(self, s) -> complex:
        _, coef, logs = self.explicit_block
        return complex(np.sum(coef * np.exp(complex(s) * logs)))

    @property
    def deep_depth(self) -> int:
        return self.k_expand + EXTRA_DEPTH

    @cached_property
    def _tails(self) -> dict:
        out = {}
        ks = np.arange(self.k0, self.n_tail + 1, dtype=float)
        logk = np.log(ks)
        D = self.deep_depth
        for sigma in BRANCHES:
            ns = sigma * np.arange(self.k0, self.n_tail + 1)
            lam = self.operator.eigenvalues(ns)
            out[sigma] = {
                "w": self.weight_values(ns),
                "loglam": branch_log(lam, self.cut),
                "groups": self.weight.expansion(sigma, D) if self.weight is not None
                else [(0j, _unit(D), np.zeros(D + 1, dtype=complex))],
            }
        out["logk"] = logk
        out["kpow"] = np.exp(-np.outer(np.arange(D + 1), logk))
        return out

    def branch_terms(self, sigma: int, s, depth: int | None = None) -> list[tuple[complex, np.ndarray, np.ndarray]]:
        """Groups ``(z0, c, d)``: tail summand ~ sum_t (c_t + d_t log k) k^(z0 - t),
        for ``t <= depth`` (default ``k_expand``)."""
        s = complex(s)
        K = self.k_expand if depth is None else depth
        law = self.operator.law
        g = complex_power(law.leading(sigma), s, self.cut) * series_pow(law.u_coeffs(sigma), s, K)
        out = []
        for beta, P, Q in self._tails[sigma]["groups"]:
            c = np.convolve(g, P[:K + 1])[:K + 1]
            d = np.convolve(g, Q[:K + 1])[:K + 1]
            out.append((self.order * s + beta, c, d))
        return out

    def depth_margin(self, s) -> float:
        """Exponent of the remainder summand (must be < -1)."""
        s = complex(s)
        worst = -math.inf
        for sigma in BRANCHES:
            for z0, _, _ in self.branch_terms(sigma, s):
                worst = max(worst, z0.real - self.k_expand - 1)
        return worst


def _unit(K: int) -> np.ndarray:
    P = np.zeros(K + 1, dtype=complex)
    P[0] = 1.0
    return P


def weight_degree(Z: ZetaFunction) -> float:
    if Z.weight is None:
        return 0.0
    betas = [b.real for sigma in BRANCHES for b, _, _ in Z.weight.expansion(sigma, 0)]
    return max(betas, default=-math.inf)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def direct_sum(Z: ZetaFunction, s, tol: float = EPS_CONT, n_max: int = 10_000_000) -> tuple[complex, float]:
    """Direct summation with a tail estimate; returns (value, tail estimate).

    The tail beyond the last index ``N`` is estimated by ``N |f_N| / |e + 1|``
    where ``e`` is the decay exponent of the summand.
    """
    s = complex(s)
    if Z.finite:
        return Z.explicit_sum(s), 0.0
    e = s.real * Z.order + weight_degree(Z)
    has_log = Z.weight is not None and any(
        np.any(Q != 0) for sigma in BRANCHES for _, _, Q in Z.weight.expansion(sigma, 0))
    if e >= -1:
        raise NotConvergent(f"Re(s)*m + deg(w) = {e:.3g} >= -1; the sum diverges")
    total = Z.explicit_sum(s)
    start, N = Z.k0, max(Z.k0, 1024)
    bound = math.inf
    while True:
        ks = np.arange(start, N + 1)
        last = 0.0
        for sigma in BRANCHES:
            ns = sigma * ks
            f = Z.weight_values(ns) * complex_power(Z.operator.eigenvalues(ns), s, Z.cut)
            total += complex(np.sum(f[::-1]))
            last = max(last, float(np.max(np.abs(f[-16:]))))
        log_factor = 1.0 + (1.0 / (abs(e + 1) * math.log(N)) if has_log else 0.0)
        bound = 2 * N * last / abs(e + 1) * log_factor
        if bound < tol or N >= n_max:
            return total, bound
        start, N = N + 1, min(n_max, 8 * N)


def zeta_direct(Z: ZetaFunction, s, tol: float = EPS_CONT) -> complex:
    """Absolutely convergent direct summation (``Re(s) m + deg w < -1``)."""
    return direct_sum(Z, s, tol)[0]


def continue_at(Z: ZetaFunction, s) -> complex:
    """Analytic continuation to ``s`` via binomial expansion and Hurwitz zeta.

    Points within 1e-12 of a pole of one Hurwitz term raise :class:`PoleHit`,
    including removable cases such as ``s = 0`` where the coefficient vanishes
    with the pole; :func:`laurent_at_0` handles that neighbourhood.
    """
    s = complex(s)
    if Z.finite:
        return Z.explicit_sum(s)
    if Z.depth_margin(s) >= -1:
        raise ExpansionDepthInsufficient(
            f"remainder decays like k^{Z.depth_margin(s):.3g}; raise k_expand above {Z.k_expand}")
    total = Z.explicit_sum(s)
    tails = Z._tails
    logk, kpow = tails["logk"], tails["kpow"]
    k0, K = Z.k0, Z.k_expand
    for sigma in BRANCHES:
        exact = tails[sigma]["w"] * np.exp(s * tails[sigma]["loglam"])
        approx = np.zeros_like(exact)
        series = np.zeros_like(exact)
        last = np.zeros(exact.shape)
        for z0, c, d in Z.branch_terms(sigma, s, Z.deep_depth):
            lead = np.exp(z0 * logk)
            approx += lead * ((c[:K + 1] @ kpow[:K + 1]) + (d[:K + 1] @ kpow[:K + 1]) * logk)
            series += lead * ((c[K + 1:] @ kpow[K + 1:]) + (d[K + 1:] @ kpow[K + 1:]) * logk)
            last += np.abs(lead) * (abs(c[-1]) + abs(d[-1]) * logk) * kpow[-1]
            for t in range(K + 1):
                z = t - z0
                if c[t] == 0 and d[t] == 0:
                    continue
                if abs(z - 1) < 1e-12:
                    raise PoleHit(f"s = {s} hits a pole of the continuation")
                if c[t] != 0:
                    total += c[t] * hurwitz_zeta(z, k0)
                if d[t] != 0:
                    total -= d[t] * hurwitz_zeta(z, k0, derivative=1)
        # the remainder exact - approx loses |k^z0| * eps to cancellation;
        # where the deeper series has converged it is summed term by term
        converged = last <= 1e-17 * np.abs(series)
        remainder = np.where(converged, series, exact - approx)
        total += complex(np.sum(remainder[::-1]))
    return complex(total)


# ---------------------------------------------------------------------------
# Laurent data at s = 0
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentAt0:
    pole_coefficient: complex
    finite_part: complex
    derivative_at_0: complex
    diagnostics: dict = field(default_factory=dict, compare=False)


FIT_POWERS = tuple(range(-2, 7))


def _fit(f, radius: float, samples: int) -> np.ndarray:
    s = radius * np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
    vals = np.array([f(x) for x in s])
    basis = np.stack([s ** p for p in FIT_POWERS], axis=1)
    coef, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    return coef


def laurent_fit(f, radius: float = 0.1, samples: int = 32, tol: float = EPS_LAURENT) -> LaurentAt0:
    """Laurent data of an arbitrary callable meromorphic near 0."""
    big = _fit(f, radius, samples)
    small = _fit(f, radius / 2, samples)
    i = FIT_POWERS.index
    keys = (-1, 0, 1)
    dev = max(abs(big[i(p)] - small[i(p)]) / max(1.0, abs(big[i(p)])) for p in keys)
    diag = {"radius": radius, "samples": samples, "cross_validation": float(dev),
            "double_pole": float(abs(big[i(-2)]))}
    if dev > tol:
        raise FitUnstable(f"Laurent fit disagrees between radii {radius} and {radius / 2}: {dev:.3g}")
    if abs(big[i(-2)]) > tol:
        raise FitUnstable(f"double pole at s = 0 detected (coefficient {abs(big[i(-2)]):.3g})")
    return LaurentAt0(complex(big[i(-1)]), complex(big[i(0)]), complex(big[i(1)]), diag)


def laurent_at_0(Z: ZetaFunction, radius: float = 0.1, samples: int = 32,
                 tol: float = EPS_LAURENT) -> LaurentAt0:
    if Z.finite:
        # entire function: read off exactly
        _, coef, logs = Z.explicit_block
        d = complex(np.sum(coef * logs))
        return LaurentAt0(0j, Z.explicit_sum(0), d, {"analytic": True})
    out = laurent_fit(lambda s: continue_at(Z, s), radius, samples, tol)
    out.diagnostics.update(k0=Z.k0, k_expand=Z.k_expand, n_tail=Z.n_tail)
    return out


def doubling_deviation(Z: ZetaFunction, **fit) -> float:
    """Change of the Laurent data when ``k_expand`` and ``n_tail`` double."""
    a = laurent_at_0(Z, **fit)
    b = laurent_at_0(Z.with_params(2 * Z.k_expand, 2 * Z.n_tail), **fit)
    return max(abs(a.pole_coefficient - b.pole_coefficient), abs(a.finite_part - b.finite_part),
               abs(a.derivative_at_0 - b.derivative_at_0))


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

def weighted_trace(A_family: EigenFamily, Q: SpectralOperator, cut, **params) -> complex:
    """Finite part at ``s = 0`` of ``sum_n mult_n A_n (q_n)^s``."""
    fit = {k: params.pop(k) for k in ("radius", "samples", "tol") if k in params}
    Z = ZetaFunction(Q, cut, A_family, **params)
    return laurent_at_0(Z, **fit).finite_part


def tr_sym(A_family: EigenFamily, Q: SpectralOperator, theta: float, **params) -> complex:
    """Average of the weighted traces at ``theta`` and ``theta - m pi``."""
    theta = theta.theta if isinstance(theta, SpectralCut) else float(theta)
    partner = theta - Q.order * math.pi
    return 0.5 * (weighted_trace(A_family, Q, theta, **dict(params))
                  + weighted_trace(A_family, Q, partner, **dict(params)))
