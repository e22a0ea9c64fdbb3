"""Density experiments for sets of completely split primes."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .ffpoly import IntPoly, reduce_mod_p, splits_into_distinct_linear, x_pow_p_is_x
from .numfield import (
    NumberField,
    cyclotomic_field,
    field_from_poly,
    is_squarefree,
    poly_discriminant,
    quadratic_field,
    rational_field,
)
from .primes import factorize, primes_upto, totient
from .splitting import split_mask, splits_completely
from .zetaseries import partial_zeta

DEFAULT_TOLERANCE = 0.01
SIGMAS = 4.0
DEFAULT_S_SAMPLES = tuple(float(s) for s in np.linspace(1.02, 1.5, 13))

# Splitting field of x^3 - 2: Q(cbrt 2 + sqrt(-3)), minimal polynomial below.
CUBIC_CLOSURE_POLY = IntPoly((31, 36, 27, -4, 9, 0, 1))


@dataclass(frozen=True)
class PrimePredicate:
    """A set of rational primes, classified in bulk.

    ``classify`` maps an int64 array of primes to (hits, excluded) boolean
    arrays. ``declared`` lists the integers (discriminants, conductors) that
    every excluded prime must divide.
    """

    label: str
    classify: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    declared: tuple[int, ...] = ()

    def __call__(self, p: int) -> bool:
        hit, excl = self.classify(np.array([p], dtype=np.int64))
        return bool(hit[0] and not excl[0])


def split_completely_in(K: NumberField) -> PrimePredicate:
    declared = (K.quadratic.D if K.quadratic else K.cyclotomic.m if K.cyclotomic else K.poly_discriminant,)
    return PrimePredicate(f"splits completely in {K.label}", lambda ps: split_mask(K, ps), declared)


def distinct_linear_mod_p(f: IntPoly) -> PrimePredicate:
    """p not dividing disc(f) such that f splits into distinct linear factors mod p."""
    disc = poly_discriminant(f)
    bad = sorted(factorize(disc)) if abs(disc) > 1 else []

    def classify(ps: np.ndarray):
        excluded = np.isin(ps, bad)
        hits = np.zeros(ps.shape, dtype=bool)
        hits[~excluded] = x_pow_p_is_x(f, ps[~excluded])
        return hits, excluded

    return PrimePredicate(f"{f} splits into distinct linear factors", classify, (disc,))


def subgroup_closure(m: int, gens: Sequence[int]) -> frozenset[int]:
    for g in gens:
        if math.gcd(g, m) != 1:
            raise ValueError(f"generator {g} is not a unit mod {m}")
    H = {1 % m}
    frontier = list(H)
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                x = h * g % m
                if x not in H:
                    H.add(x)
                    nxt.append(x)
        frontier = nxt
    return frozenset(H)


def residue_class_in(m: int, gens: Sequence[int]) -> tuple[PrimePredicate, frozenset[int]]:
    H = subgroup_closure(m, gens)
    bad = sorted(factorize(m))
    table = np.zeros(m, dtype=bool)
    table[sorted(H)] = True

    def classify(ps: np.ndarray):
        excluded = np.isin(ps, bad)
        return table[ps % m] & ~excluded, excluded

    return PrimePredicate(f"p mod {m} in {sorted(H)}", classify, (m,)), H


def all_primes() -> PrimePredicate:
    return PrimePredicate(
        "all primes", lambda ps: (np.ones(ps.shape, bool), np.zeros(ps.shape, bool))
    )


def complement(pred: PrimePredicate) -> PrimePredicate:
    def classify(ps):
        hits, excl = pred.classify(ps)
        return ~hits & ~excl, excl

    return PrimePredicate(f"not ({pred.label})", classify, pred.declared)


# ---------------------------------------------------------------------------
# natural density


@dataclass(frozen=True)
class DensityReport:
    experiment_id: str
    X: int
    total_primes: int
    hits: int
    excluded: tuple[int, ...]
    empirical: float
    theoretical: Fraction
    abs_error: float
    standard_error: float
    tolerance: float
    verdict: bool
    checkpoints: tuple[tuple[int, float], ...] = field(default=(), compare=False)
    half_gap: float = 0.0  # |empirical(X) - empirical(X/2)|
    half_gap_bound: float = math.inf  # 3 standard errors at X/2

    @property
    def stable(self) -> bool:
        return self.half_gap <= self.half_gap_bound

    @property
    def threshold(self) -> float:
        return max(self.tolerance, SIGMAS * self.standard_error)

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "X": self.X,
            "total_primes": self.total_primes,
            "hits": self.hits,
            "excluded": list(self.excluded),
            "empirical": self.empirical,
            "theoretical": str(self.theoretical),
            "theoretical_value": float(self.theoretical),
            "abs_error": self.abs_error,
            "standard_error": self.standard_error,
            "threshold": self.threshold,
            "verdict": "pass" if self.verdict else "fail",
            "checkpoints": [[x, e] for x, e in self.checkpoints],
            "half_gap": self.half_gap,
            "half_gap_bound": self.half_gap_bound,
        }


def _split_chunks(arr: np.ndarray, chunks: int) -> list[np.ndarray]:
    return [a for a in np.array_split(arr, max(1, int(chunks)))]


def classify_primes(
    pred: PrimePredicate, primes: np.ndarray, *, chunks: int = 1, workers: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Classify in contiguous chunks (optionally on a thread pool), merged in order."""
    parts = _split_chunks(primes, chunks)
    if workers > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(pred.classify, parts))
    else:
        results = [pred.classify(part) for part in parts]
    hits = np.concatenate([r[0] for r in results]) if results else np.zeros(0, bool)
    excl = np.concatenate([r[1] for r in results]) if results else np.zeros(0, bool)
    return hits, excl


def natural_density(
    pred: PrimePredicate,
    X: int,
    theoretical: Fraction,
    *,
    experiment_id: str = "natural",
    tolerance: float = DEFAULT_TOLERANCE,
    chunks: int = 1,
    workers: int = 1,
    n_checkpoints: int = 5,
) -> DensityReport:
    """Fraction of primes p <= X in the set, against the predicted value."""
    X = int(X)
    if X < 1000:
        raise ValueError("natural density needs X >= 1000")
    ps = primes_upto(X)
    hits, excl = classify_primes(pred, ps, chunks=chunks, workers=workers)
    valid = ~excl
    total = int(valid.sum())
    nhit = int((hits & valid).sum())
    q = float(theoretical)
    empirical = nhit / total
    se = math.sqrt(q * (1 - q) / total)
    err = abs(empirical - q)

    cum_hits = np.cumsum(hits & valid)
    cum_valid = np.cumsum(valid)
    checkpoints = []
    for k in range(n_checkpoints - 1, -1, -1):
        xk = X >> k
        idx = int(np.searchsorted(ps, xk, side="right")) - 1
        if idx >= 0 and cum_valid[idx] > 0:
            checkpoints.append((xk, float(cum_hits[idx] / cum_valid[idx])))
    half = int(np.searchsorted(ps, X // 2, side="right")) - 1
    half_total = int(cum_valid[half]) if half >= 0 else 0
    if half_total:
        half_gap = abs(empirical - float(cum_hits[half]) / half_total)
        half_bound = 3 * math.sqrt(q * (1 - q) / half_total)
    else:
        half_gap, half_bound = 0.0, math.inf
    return DensityReport(
        experiment_id=experiment_id,
        X=X,
        total_primes=total,
        hits=nhit,
        excluded=tuple(int(p) for p in ps[excl]),
        empirical=empirical,
        theoretical=Fraction(theoretical),
        abs_error=err,
        standard_error=se,
        tolerance=tolerance,
        verdict=err <= max(tolerance, SIGMAS * se),
        checkpoints=tuple(checkpoints),
        half_gap=half_gap,
        half_gap_bound=half_bound,
    )


# ---------------------------------------------------------------------------
# Dirichlet density


@dataclass(frozen=True)
class DirichletDensityEstimate:
    s_samples: tuple[float, ...]
    ratios: tuple[float, ...]
    extrapolated: float
    naive_linear: float  # plain linear fit of ratio against (s - 1), for comparison

    def to_dict(self) -> dict:
        return {
            "s_samples": list(self.s_samples),
            "ratios": list(self.ratios),
            "extrapolated": self.extrapolated,
            "naive_linear": self.naive_linear,
        }


def dirichlet_density(
    pred: PrimePredicate, P: int = 10**6, s_samples: Sequence[float] = DEFAULT_S_SAMPLES
) -> DirichletDensityEstimate:
    """Estimate lim_{s->1+} sum_{p in A} p^-s / sum_p p^-s from primes <= P.

    Writing S(s) = sum_p p^-s and S_A(s) for the restricted sum,
    S_A(s) = delta * S(s) + b(s) with b smooth at s = 1 while S(s) blows up.
    Fitting S_A against S plus a quadratic in (s - 1) isolates delta, which
    is the value the ratio S_A / S tends to at s = 1.
    """
    if P < 10**5:
        raise ValueError("Dirichlet density needs P >= 1e5")
    ss = np.asarray(sorted(s_samples, reverse=True), dtype=np.float64)
    if np.any(ss <= 1):
        raise ValueError("all s samples must exceed 1")
    ps = primes_upto(P)
    hits, excl = pred.classify(ps)
    logp = np.log(ps[~excl].astype(np.float64))
    inA = hits[~excl]
    num = np.array([float(np.sum(np.exp(-s * logp[inA]))) for s in ss])
    den = np.array([float(np.sum(np.exp(-s * logp))) for s in ss])
    ratios = num / den
    h = ss - 1
    design = np.stack([den, np.ones_like(h), h, h * h], axis=1)
    if len(ss) >= design.shape[1]:
        delta = float(np.linalg.lstsq(design, num, rcond=None)[0][0])
    else:
        delta = float(np.polyfit(h, ratios, 1)[1])
    naive = float(np.polyfit(h, ratios, 1)[1]) if len(ss) >= 2 else float(ratios[0])
    return DirichletDensityEstimate(tuple(map(float, ss)), tuple(map(float, ratios)), delta, naive)


# ---------------------------------------------------------------------------
# the experiments


def experiment_thm3(L: NumberField, X: int, **kw) -> DensityReport:
    if not L.is_normal_over_Q:
        raise ValueError(f"{L.label} is not normal over Q; use experiment_cor1")
    kw.setdefault("experiment_id", f"thm3:{L.label}")
    return natural_density(split_completely_in(L), X, Fraction(1, L.degree), **kw)


def _poly_experiment(tag: str, f: IntPoly, degree: int, X: int, **kw) -> DensityReport:
    field_from_poly(f)  # certification; raises on failure
    if degree < f.degree:
        raise ValueError(f"closure degree {degree} is below deg f = {f.degree}")
    kw.setdefault("experiment_id", f"{tag}:{f}")
    return natural_density(distinct_linear_mod_p(f), X, Fraction(1, degree), **kw)


def experiment_cor1(f: IntPoly, normal_closure_degree: int, X: int, **kw) -> DensityReport:
    return _poly_experiment("cor1", f, normal_closure_degree, X, **kw)


def experiment_cor2(f: IntPoly, splitting_field_degree: int, X: int, **kw) -> DensityReport:
    return _poly_experiment("cor2", f, splitting_field_degree, X, **kw)


def experiment_cor3(m: int, gens: Sequence[int], X: int, **kw) -> DensityReport:
    pred, H = residue_class_in(m, gens)
    kw.setdefault("experiment_id", f"cor3:m={m}:H={sorted(H)}")
    return natural_density(pred, X, Fraction(len(H), totient(m)), **kw)


@dataclass(frozen=True)
class Lemma3Report:
    X: int
    checked: int
    excluded: tuple[int, ...]
    split_count: int
    counterexamples: tuple[int, ...]
    closure_checked: int
    closure_counterexamples: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.closure_counterexamples

    def to_dict(self) -> dict:
        return {
            "X": self.X,
            "checked": self.checked,
            "excluded": list(self.excluded),
            "split_count": self.split_count,
            "counterexamples": list(self.counterexamples),
            "closure_checked": self.closure_checked,
            "closure_counterexamples": list(self.closure_counterexamples),
            "verdict": "pass" if self.ok else "fail",
        }


def check_lemma3(X: int) -> Lemma3Report:
    """Split completely in Q(cbrt 2) <=> split completely in its normal closure.

    The closure side is tested twice: as "x^3 - 2 splits and p = 1 mod 3",
    and directly through a defining polynomial of the degree-6 closure
    (on the primes not dividing that polynomial's discriminant).
    """
    if X < 1000:
        raise ValueError("closure equivalence check needs X >= 1000")
    f = IntPoly((-2, 0, 0, 1))
    ps = primes_upto(X)
    excluded = np.isin(ps, [2, 3])
    good = ps[~excluded]
    in_L = x_pow_p_is_x(f, good)
    in_M = in_L & (good % 3 == 1)
    bad = good[in_L != in_M]

    closure_bad = sorted(factorize(poly_discriminant(CUBIC_CLOSURE_POLY)))
    ok_c = ~np.isin(good, closure_bad)
    in_M2 = x_pow_p_is_x(CUBIC_CLOSURE_POLY, good[ok_c])
    bad2 = good[ok_c][in_L[ok_c] != in_M2]
    return Lemma3Report(
        X=int(X),
        checked=int(good.size),
        excluded=tuple(int(p) for p in ps[excluded]),
        split_count=int(in_L.sum()),
        counterexamples=tuple(int(p) for p in bad),
        closure_checked=int(ok_c.sum()),
        closure_counterexamples=tuple(int(p) for p in bad2),
    )


def lemma3_sides(p: int) -> tuple[bool, bool]:
    """(x^3 - 2 splits into distinct linear factors mod p, that and p = 1 mod 3)."""
    lhs = splits_into_distinct_linear(reduce_mod_p(IntPoly((-2, 0, 0, 1)), p))
    return lhs, lhs and p % 3 == 1


def check_thm3_identity(s: float, P: int) -> list[dict]:
    """Truncated zeta_{Q,A}(s)^n against zeta_{L,B}(s), A = primes split in L."""
    if s <= 1:
        raise ValueError("identity check needs s > 1")
    Q = rational_field()
    out = []
    for L in (quadratic_field(-1), cyclotomic_field(5)):
        n = L.degree
        in_A = lambda p, L=L: splits_completely(L, p)
        lhs = partial_zeta(Q, in_A, s, P)
        rhs = partial_zeta(L, in_A, s, P)
        lhs_n = lhs.value.real**n
        lhs_bound = abs(lhs_n) * math.expm1(n * (lhs.log_tail or 0.0))
        diff = abs(lhs_n - rhs.value.real)
        bound = lhs_bound + rhs.truncation_bound
        out.append(
            {
                "L": L.label,
                "exponent": n,
                "s": float(s),
                "P": int(P),
                "lhs": lhs_n,
                "rhs": rhs.value.real,
                "diff": diff,
                "bound": bound,
                "ok": diff <= bound,
            }
        )
    return out


def quadratic_ds(limit: int = 20) -> list[int]:
    return [d for d in range(-limit, limit + 1) if d not in (0, 1) and is_squarefree(d)]


def distinguishing_prime(K1: NumberField, K2: NumberField, X: int) -> int | None:
    """Least p <= X splitting completely in exactly one of K1, K2."""
    if K1 == K2:
        raise ValueError("fields are not distinct")
    for p in primes_upto(X):
        p = int(p)
        if splits_completely(K1, p) != splits_completely(K2, p):
            return p
    return None


def check_cor4(X: int, limit: int = 20) -> dict:
    if X < 100:
        raise ValueError("witness search needs X >= 100")
    fields = {d: quadratic_field(d) for d in quadratic_ds(limit)}
    witnesses = {}
    missing = []
    for d1, d2 in itertools.combinations(sorted(fields), 2):
        w = distinguishing_prime(fields[d1], fields[d2], X)
        if w is None:
            missing.append([d1, d2])
        witnesses[f"{d1},{d2}"] = w
    return {
        "X": int(X),
        "pairs": len(witnesses),
        "max_witness": max((w for w in witnesses.values() if w), default=None),
        "missing": missing,
        "witnesses": witnesses,
        "verdict": "pass" if not missing else "fail",
    }

