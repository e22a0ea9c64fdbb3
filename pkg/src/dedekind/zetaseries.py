"""Ideal counts and numerical evaluation of Dedekind zeta functions.

Every evaluator returns a :class:`ZetaValue` carrying an explicit upper bound
on what truncation left out, so cross-method comparisons are made against
bound sums rather than ad hoc tolerances.
"""

from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import bernoulli, loggamma, zeta as _hurwitz_zeta_real

from .numfield import NumberField
from .primes import primes_upto
from .splitting import SplittingType, Status, split_prime

MAX_TABLE = 10**7
C_SAFETY = 1.2
EPS_POLE = 1e-3
_EM_SHIFT = 40
_EM_TERMS = 12
_B2 = bernoulli(2 * _EM_TERMS)  # B_0..B_{2J}
_ULP = 2.0**-52


class Method(enum.Enum):
    DIRICHLET = "DirichletSeries"
    EULER = "EulerProduct"
    EXTENDED = "AlternatingExtension"


@dataclass(frozen=True)
class ZetaValue:
    s: complex
    value: complex
    truncation_bound: float
    method: Method
    # bound on |log(full) - log(truncated)| for product methods
    log_tail: float | None = field(default=None, compare=False)
    route: str | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {
            "s": [self.s.real, self.s.imag],
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "bound": self.truncation_bound,
            "method": self.method.value,
        }


@dataclass(frozen=True, eq=False)
class IdealCountTable:
    field: NumberField
    bound: int
    j: np.ndarray  # j[n] for 0 <= n <= bound; j[0] = 0
    bad_primes: tuple[int, ...] = ()

    @property
    def partial(self) -> bool:
        """True when some Euler factors are missing (their ideals are not counted)."""
        return bool(self.bad_primes)

    @functools.cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.j)

    @property
    def kappa_hat(self) -> float:
        return float(self.cumulative[-1]) / self.bound

    def i(self, t: int) -> int:
        return int(self.cumulative[int(t)])


@dataclass(frozen=True)
class CumulativeCount:
    t: tuple[int, ...]
    i: tuple[int, ...]
    kappa_hat: float
    error_exponent_hat: float


# ---------------------------------------------------------------------------
# local factors and the coefficient table


def local_euler_coeffs(st: SplittingType, p: int, B: int) -> list[int]:
    """Number of ideals of norm p^k built from the primes above p, p^k <= B.

    Each prime of residue degree f contributes the series 1 + T^f + T^2f + ...;
    ramification indices play no role in norms.
    """
    if st.status is not Status.EXACT:
        raise ValueError(f"splitting of {p} is not exact")
    K = 0
    pk = p
    while pk <= B:
        K += 1
        pk *= p
    c = [1] + [0] * K
    for _, f in st.pairs:
        # multiply by 1/(1 - T^f), truncated
        for k in range(f, K + 1):
            c[k] += c[k - f]
    return c


@functools.lru_cache(maxsize=64)
def _split_types(K: NumberField, P: int, seed: int = 0) -> tuple[SplittingType, ...]:
    return tuple(split_prime(K, int(p), seed) for p in primes_upto(P))


def ideal_counts(K: NumberField, B: int, seed: int = 0) -> IdealCountTable:
    """j[n] = number of ideals of norm n, assembled multiplicatively."""
    B = int(B)
    if B < 1:
        raise ValueError("bound must be >= 1")
    if B > MAX_TABLE:
        raise ValueError(f"bound {B} exceeds {MAX_TABLE}")
    j = np.ones(B + 1, dtype=np.int64)
    j[0] = 0
    bad = []
    if K.degree == 1:
        return IdealCountTable(K, B, j)
    for st in _split_types(K, B, seed):
        p = st.p
        if st.status is not Status.EXACT:
            bad.append(p)
            j[p::p] = 0
            continue
        c = local_euler_coeffs(st, p, B)
        if len(c) == 2:
            if c[1] != 1:
                j[p::p] *= c[1]
            continue
        idx = np.arange(p, B + 1, p)
        e = np.ones(idx.size, dtype=np.int64)
        pk = p * p
        k = 2
        while pk <= B:
            e[idx % pk == 0] = k
            pk *= p
            k += 1
        j[idx] *= np.asarray(c, dtype=np.int64)[e]
    return IdealCountTable(K, B, j, tuple(bad))


def cumulative_counts(tbl: IdealCountTable, sample_ts: Sequence[int]) -> CumulativeCount:
    """i(t) at the samples, kappa_hat = i(B)/B, and the fitted error exponent."""
    ts = [int(t) for t in sample_ts]
    if any(t < 1 or t > tbl.bound for t in ts):
        raise ValueError("sample points must lie in [1, B]")
    kap = tbl.kappa_hat
    iv = [tbl.i(t) for t in ts]
    xs, ys = [], []
    for t, it in zip(ts, iv):
        r = abs(it - kap * t)
        if r > 0:
            xs.append(math.log(t))
            ys.append(math.log(r))
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(xs) >= 2 else float("nan")
    return CumulativeCount(tuple(ts), tuple(iv), kap, slope)


def log_samples(lo: int, hi: int, count: int) -> list[int]:
    return sorted({int(round(x)) for x in np.geomspace(lo, hi, count)})


# ---------------------------------------------------------------------------
# Dirichlet series and Euler product


def _check_half_plane(s: complex) -> complex:
    s = complex(s)
    if s.real <= 1:
        raise ValueError(f"Re(s) = {s.real} must exceed 1 for this method")
    return s


def _dirichlet_sum(coeffs: np.ndarray, s: complex, start: int = 1) -> complex:
    n = np.arange(start, start + coeffs.size, dtype=np.float64)
    logn = np.log(n)
    if s.imag == 0:
        return complex(float(np.dot(coeffs, np.exp(-s.real * logn))), 0.0)
    return complex(np.dot(coeffs, np.exp(-s * logn)))


def zeta_dirichlet(tbl: IdealCountTable, s: complex, c_safety: float = C_SAFETY) -> ZetaValue:
    """sum_{n<=B} j_n n^-s; the tail bound assumes i(t) <= c_safety * kappa_hat * t."""
    s = _check_half_plane(s)
    sigma = s.real
    value = _dirichlet_sum(tbl.j[1:].astype(np.float64), s)
    bound = tbl.kappa_hat * sigma / (sigma - 1) * tbl.bound ** (1 - sigma) * c_safety
    return ZetaValue(s, value, bound, Method.DIRICHLET)


def _euler_log_tail(n: int, P: int, sigma: float) -> float:
    # |sum over primes above p > P of log(1 - N^-s)| <= n sum_{m>P} m^-sigma / (1 - (P+1)^-sigma)
    tail = P ** (1 - sigma) / (sigma - 1)
    return n * tail / (1 - (P + 1) ** (-sigma))


def _euler_product(
    K: NumberField, s: complex, P: int, keep: Callable[[int], bool] | None, seed: int
) -> tuple[complex, float]:
    logs = []
    if P >= 2:
        for st in _split_types(K, int(P), seed):
            if st.status is not Status.EXACT:
                continue
            if keep is not None and not keep(st.p):
                continue
            for _, f in st.pairs:
                logs.append(-cmath.log(1 - st.p ** (-f * s)))
    total = complex(math.fsum(z.real for z in logs), math.fsum(z.imag for z in logs))
    value = cmath.exp(total)
    if s.imag == 0:
        value = complex(value.real, 0.0)
    return value, _euler_log_tail(K.degree, max(int(P), 1), s.real)


def zeta_euler(K: NumberField, s: complex, P: int, seed: int = 0) -> ZetaValue:
    """Product of local factors (1 - p^(-f_i s))^-1 over primes p <= P."""
    s = _check_half_plane(s)
    value, delta = _euler_product(K, s, P, None, seed)
    bound = abs(value) * math.expm1(delta)
    return ZetaValue(s, value, bound, Method.EULER, log_tail=delta)


def partial_zeta(
    K: NumberField, predicate: Callable[[int], bool], s: complex, P: int, seed: int = 0
) -> ZetaValue:
    """Euler product restricted to rational primes p <= P with predicate(p)."""
    s = _check_half_plane(s)
    value, delta = _euler_product(K, s, P, predicate, seed)
    bound = abs(value) * math.expm1(delta)
    return ZetaValue(s, value, bound, Method.EULER, log_tail=delta)


# ---------------------------------------------------------------------------
# Riemann zeta on Re(s) > 0 through the two alternating-type series


def _eta_cvz(s: complex, derivative: bool = False) -> tuple[complex, float]:
    """f(s) = 1 - 2^-s + 3^-s - ... (or its s-derivative) by CVZ acceleration.

    Error of the n-term accelerated sum is at most
    2 Gamma(sigma) / |Gamma(s)| / (3 + sqrt 8)^n. For the derivative the
    same bound is applied on a circle of radius 1/2 (Cauchy estimate).
    """
    sigma = s.real

    def err(n: int) -> float:
        if derivative:
            r = min(0.5, sigma / 2)
            worst = max(
                _cvz_error(complex(sigma - r, abs(s.imag) + r * k / 4), n) for k in range(5)
            )
            return worst / r
        return _cvz_error(s, n)

    n = 20
    while err(n) > 1e-17 and n < 380:
        n += 10
    d = (3 + math.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b, c = -1.0, -d
    ks = np.arange(n, dtype=np.float64)
    terms = np.exp(-s * np.log(ks + 1))
    if derivative:
        terms = -np.log(ks + 1) * terms
    weights = np.empty(n)
    for k in range(n):
        c = b - c
        weights[k] = c
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1))
    total = complex(np.dot(weights, terms)) / d
    rounding = 8 * n * _ULP * float(np.max(np.abs(terms)))
    return total, err(n) + rounding


def _cvz_error(s: complex, n: int) -> float:
    lg = loggamma(s.real).real - loggamma(s).real
    return 2 * math.exp(lg) * (3 + math.sqrt(8)) ** (-n)


def periodic_series(coeffs: Sequence[float], s: complex) -> tuple[complex, float]:
    """sum_n c_n n^-s for coefficients periodic with zero mean, Re(s) > 0.

    Direct summation over the first few periods, then each residue class
    r mod q is a shifted Hurwitz series whose tail is taken by Euler-Maclaurin.
    Returns (value, bound on the Euler-Maclaurin remainder + rounding).
    """
    c = np.asarray(coeffs, dtype=np.float64)
    q = c.size
    if abs(c.sum()) > 1e-12:
        raise ValueError("coefficients must sum to zero over a period")
    M = _EM_SHIFT
    head_n = M * q
    head = _dirichlet_sum(np.tile(c, M), s)
    tail = 0j
    rem = 0.0
    for r in range(1, q + 1):
        if c[r - 1] == 0:
            continue
        a = M + r / q
        h, e = _hurwitz_em(s, a)
        w = c[r - 1] * q ** (-s)
        tail += w * h
        rem += abs(w) * e
    rounding = 16 * head_n * _ULP
    return head + tail, rem + rounding


def _hurwitz_em(s: complex, a: float) -> tuple[complex, float]:
    """sum_{k>=0} (a+k)^-s by Euler-Maclaurin at a (a large), and remainder bound."""
    J = _EM_TERMS
    sigma = s.real
    total = a ** (1 - s) / (s - 1) + 0.5 * a ** (-s)
    poch = s  # (s)_{2j-1}
    for jj in range(1, J + 1):
        total += _B2[2 * jj] / math.factorial(2 * jj) * poch * a ** (-s - 2 * jj + 1)
        poch *= (s + 2 * jj - 1) * (s + 2 * jj)
    # poch is now (s)_{2J+1}; remainder uses |(s)_{2J}|
    poch_2j = abs(poch / (s + 2 * J))
    zeta2j = float(_hurwitz_zeta_real(2 * J, 1))
    bound = 2 * zeta2j / (2 * math.pi) ** (2 * J) * poch_2j * a ** (1 - sigma - 2 * J) / (sigma + 2 * J - 1)
    return total, bound


def _g_series(s: complex) -> tuple[complex, float]:
    # g(s) = 1 + 2^-s - 2*3^-s + 4^-s + 5^-s - 2*6^-s + ...
    return periodic_series([1.0, 1.0, -2.0], s)


def riemann_extended(s: complex, route: str = "auto") -> ZetaValue:
    """Riemann zeta on Re(s) > 0, s != 1.

    route="f" divides f(s) = (1 - 2^(1-s)) zeta(s) by its factor; at the
    points where 1 - 2^(1-s) vanishes (s = 1 + 2k pi i / log 2) the ratio is
    taken as f'(s) / (2^(1-s) log 2). route="g" uses
    g(s) = (1 - 3^(1-s)) zeta(s). "auto" takes f unless |1 - 2^(1-s)| < 1e-3.
    """
    s = complex(s)
    if s.real <= 0:
        raise ValueError("extension is only built for Re(s) > 0")
    if s == 1:
        raise ValueError("s = 1 is the simple pole of zeta")
    den2 = 1 - 2 ** (1 - s)
    if route == "auto":
        route = "g" if abs(den2) < EPS_POLE else "f"
    if route == "f":
        if abs(den2) < EPS_POLE:
            k = round(s.imag * math.log(2) / (2 * math.pi))
            sk = complex(1, 2 * math.pi * k / math.log(2))
            if abs(s - sk) > 1e-12:
                raise ValueError("f-route is ill-conditioned this close to a removable point")
            dval, derr = _eta_cvz(s, derivative=True)
            scale = abs(2 ** (1 - s)) * math.log(2)
            value = dval / (2 ** (1 - s) * math.log(2))
            bound = derr / scale
        else:
            fval, ferr = _eta_cvz(s)
            value, bound = fval / den2, ferr / abs(den2)
    elif route == "g":
        den3 = 1 - 3 ** (1 - s)
        if abs(den3) < EPS_POLE:
            raise ValueError("g-route denominator vanishes here; use route='f'")
        gval, gerr = _g_series(s)
        value, bound = gval / den3, gerr / abs(den3)
    else:
        raise ValueError(f"unknown route {route!r}")
    if s.imag == 0:
        value = complex(value.real, 0.0)
    return ZetaValue(s, value, bound, Method.EXTENDED, route=route)


# ---------------------------------------------------------------------------
# residue at s = 1


@dataclass(frozen=True)
class ResidueEstimate:
    value: float
    kappa_hat: float
    samples: tuple[tuple[float, float], ...]  # (s_j, (s_j - 1) zeta_K(s_j))
    spread: float


def zeta_near_one(tbl: IdealCountTable, s: float) -> float:
    """zeta_K(s) for real s > 1 via sum (j_n - k)/n^s + k zeta(s), k = kappa_hat.

    The shifted coefficients have partial sums of lower order, so the
    truncated sum stays accurate as s approaches 1.
    """
    kap = tbl.kappa_hat
    shifted = tbl.j[1:].astype(np.float64) - kap
    head = _dirichlet_sum(shifted, complex(s)).real
    return head + kap * riemann_extended(s).value.real


def residue_estimate(K: NumberField, tbl: IdealCountTable) -> ResidueEstimate:
    """lim (s-1) zeta_K(s) by order-2 Richardson extrapolation at s = 1 + 2^-j."""
    if tbl.partial:
        raise ValueError("residue needs a complete table (no missing Euler factors)")
    if tbl.field != K:
        raise ValueError("table belongs to a different field")
    hs = [2.0**-j for j in range(2, 11)]
    vals = [h * zeta_near_one(tbl, 1 + h) for h in hs]
    # nodes halve each step: eliminate the O(h) then O(h^2) terms
    r1 = [2 * vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
    r2 = [(4 * r1[i + 1] - r1[i]) / 3 for i in range(len(r1) - 1)]
    return ResidueEstimate(
        value=r2[-1],
        kappa_hat=tbl.kappa_hat,
        samples=tuple(zip((1 + h for h in hs), vals)),
        spread=abs(r2[-1] - r2[-2]),
    )
