"""Quadratic Dirichlet characters and their L-series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .primes import factorize

MAX_TERMS = 10**7

# (2|n) for odd n, indexed by n mod 8
_TAB2 = (0, 1, 0, -1, 0, -1, 0, 1)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for n >= 1."""
    a, b = int(a), int(n)
    if b <= 0:
        raise ValueError(f"kronecker symbol needs n >= 1, got {n}")
    if a % 2 == 0 and b % 2 == 0:
        return 0
    k = 1
    while b % 2 == 0:
        b //= 2
        k *= _TAB2[a & 7]
    while True:
        if a == 0:
            return k if b == 1 else 0
        v = 0
        while a % 2 == 0:
            a //= 2
            v += 1
        if v % 2:
            k *= _TAB2[b & 7]
        if a & b & 2:  # two's complement makes this right for negative a too
            k = -k
        r = abs(a)
        a, b = b % r, r


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return all(e == 1 for e in factorize(D).values())
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and all(e == 1 for e in factorize(m).values())
    return False


@dataclass(frozen=True)
class QuadraticCharacter:
    """chi_D(n) = (D|n) for a fundamental discriminant D of a quadratic field."""

    D: int

    def __post_init__(self):
        if not is_fundamental_discriminant(self.D):
            raise ValueError(f"{self.D} is not the discriminant of a quadratic field")

    @property
    def modulus(self) -> int:
        return abs(self.D)

    def __call__(self, n: int) -> int:
        return kronecker(self.D, n)

    def period_table(self) -> np.ndarray:
        """chi(r) for r = 0..|D|-1 (chi(0) = 0)."""
        q = self.modulus
        return np.array([0] + [kronecker(self.D, r) for r in range(1, q)], dtype=np.int8)


@dataclass(frozen=True)
class LValue:
    D: int
    s: float
    value: float
    bound: float
    terms: int

    def to_dict(self) -> dict:
        return {"D": self.D, "s": self.s, "value": self.value, "bound": self.bound}


def default_terms(q: int, s: float, tol: float = 1e-10) -> int:
    n = math.ceil((q / tol) ** (1.0 / s))
    return min(n, MAX_TERMS)


def l_value(chi: QuadraticCharacter, s: float, N: int | None = None) -> LValue:
    """Truncated L(s, chi) summed over whole periods, with tail <= |D| N^-s.

    Partial sums of a non-principal character over any interval are at most
    |D| in size, so Abel summation bounds the omitted tail for every s > 0.
    """
    if s <= 0:
        raise ValueError("L-series evaluation needs s > 0")
    q = chi.modulus
    if N is None:
        N = default_terms(q, s)
    N = max(q, (int(N) // q) * q)
    table = chi.period_table().astype(np.float64)
    total = 0.0
    block = (10**6 // q) * q
    for lo in range(1, N + 1, block):
        n = np.arange(lo, min(lo + block, N + 1), dtype=np.float64)
        idx = (np.arange(lo, lo + n.size) % q)
        total += float(np.dot(table[idx], n ** (-s)))
    return LValue(chi.D, float(s), total, q * N ** (-s), N)


def factorization_check(field, s: float, bound: int = 10**6) -> dict:
    """|zeta_K(s) - zeta(s) L(s, chi_D)| against the combined truncation bounds."""
    from .numfield import FieldKind
    from .zetaseries import ideal_counts, riemann_extended, zeta_dirichlet

    if field.kind is not FieldKind.QUADRATIC:
        raise ValueError("factorization check needs a quadratic field")
    if s <= 1:
        raise ValueError("factorization check needs s > 1")
    zk = zeta_dirichlet(ideal_counts(field, bound), s)
    z = riemann_extended(s)
    lv = l_value(QuadraticCharacter(field.quadratic.D), s)
    product = z.value.real * lv.value
    delta = abs(zk.value.real - product)
    combined = (
        zk.truncation_bound
        + abs(lv.value) * z.truncation_bound
        + abs(z.value) * lv.bound
        + z.truncation_bound * lv.bound
    )
    return {
        "field": field.label,
        "s": float(s),
        "zeta_K": zk.value.real,
        "zeta_times_L": product,
        "delta": delta,
        "bound": combined,
        "ok": delta <= combined,
    }
