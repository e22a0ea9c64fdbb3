"""How a rational prime p factors in the ring of integers of a number field."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .characters import kronecker
from .ffpoly import (
    factor_mod_p,
    reduce_mod_p,
    splits_into_distinct_linear,
    x_pow_p_is_x,
)
from .numfield import FieldKind, NumberField
from .primes import require_prime, totient


class Status(enum.Enum):
    EXACT = "Exact"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SplittingType:
    p: int
    pairs: tuple[tuple[int, int], ...]  # (e_i, f_i) per prime above p
    status: Status
    degree: int

    @property
    def g(self) -> int:
        return len(self.pairs)

    @property
    def splits_completely(self) -> bool:
        return (
            self.status is Status.EXACT
            and self.g == self.degree
            and all(ef == (1, 1) for ef in self.pairs)
        )

    @property
    def ramified(self) -> bool:
        return any(e > 1 for e, _ in self.pairs)

    @property
    def inert(self) -> bool:
        return self.status is Status.EXACT and self.pairs == ((1, self.degree),)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "pairs": [list(ef) for ef in self.pairs],
            "g": self.g,
            "splits_completely": self.splits_completely,
            "ramified": self.ramified if self.status is Status.EXACT else None,
            "status": self.status.value,
        }


def order_mod(p: int, m: int) -> int:
    """Multiplicative order of p modulo m."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(p, m) != 1:
        raise ValueError(f"gcd({p}, {m}) != 1")
    x, k = p % m, 1
    while x != 1 % m:
        x = x * p % m
        k += 1
    return k


def _cyclotomic_pairs(m: int, p: int) -> tuple[tuple[int, int], ...]:
    a, rest = 0, m
    while rest % p == 0:
        rest //= p
        a += 1
    e = totient(p**a) if a else 1
    f = order_mod(p, rest) if rest > 1 else 1
    g = totient(rest) // f
    return ((e, f),) * g


def split_prime(K: NumberField, p: int, seed: int = 0) -> SplittingType:
    p = require_prime(p)
    n = K.degree
    if K.kind is FieldKind.QUADRATIC:
        chi = kronecker(K.quadratic.D, p)
        pairs = {1: ((1, 1), (1, 1)), -1: ((1, 2),), 0: ((2, 1),)}[chi]
        return SplittingType(p, pairs, Status.EXACT, n)
    if K.kind is FieldKind.CYCLOTOMIC:
        return SplittingType(p, _cyclotomic_pairs(K.cyclotomic.m, p), Status.EXACT, n)
    if K.poly_discriminant % p == 0:
        return SplittingType(p, (), Status.INDETERMINATE, n)
    fac = factor_mod_p(reduce_mod_p(K.defining_poly, p), seed)
    pairs = tuple(sorted((k, g.degree) for g, k in fac.factors))
    return SplittingType(p, pairs, Status.EXACT, n)


def splits_completely(K: NumberField, p: int) -> bool:
    p = require_prime(p)
    if K.kind is FieldKind.QUADRATIC:
        return kronecker(K.quadratic.D, p) == 1
    if K.kind is FieldKind.CYCLOTOMIC:
        return p % K.cyclotomic.m == 1
    if K.poly_discriminant % p == 0:
        return False
    return splits_into_distinct_linear(reduce_mod_p(K.defining_poly, p))


def bad_primes_mask(K: NumberField, primes: np.ndarray) -> np.ndarray:
    """Primes dividing the discriminant (quadratic), conductor, or disc(f)."""
    out = np.zeros(len(primes), dtype=bool)
    for q in K.discriminant_primes:
        out |= primes == q
    return out


def split_mask(K: NumberField, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (splits_completely, excluded) over an array of primes.

    Excluded primes are the finitely many dividing the discriminant or
    conductor; they are reported as not split.
    """
    ps = np.asarray(primes, dtype=np.int64)
    excluded = bad_primes_mask(K, ps)
    split = np.zeros(ps.shape, dtype=bool)
    good = ~excluded
    if K.kind is FieldKind.QUADRATIC:
        D = K.quadratic.D
        split[good] = [kronecker(D, int(p)) == 1 for p in ps[good]]
    elif K.kind is FieldKind.CYCLOTOMIC:
        split = good & (ps % K.cyclotomic.m == 1)
    elif K.degree == 1:
        split = good.copy()
    else:
        split[good] = x_pow_p_is_x(K.defining_poly, ps[good])
    return split, excluded
