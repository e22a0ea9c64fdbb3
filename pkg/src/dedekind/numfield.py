"""Number fields over Q: general monogenic, quadratic and cyclotomic."""

from __future__ import annotations

import enum
import shlex
from dataclasses import dataclass, field
from typing import Optional

from .ffpoly import IntPoly, factor_mod_p, reduce_mod_p
from .primes import factorize, segmented_sieve, totient

CERTIFY_PRIME_BOUND = 200


class FieldKind(enum.Enum):
    GENERAL = "general"
    QUADRATIC = "quadratic"
    CYCLOTOMIC = "cyclotomic"


@dataclass(frozen=True)
class QuadraticData:
    d: int
    D: int


@dataclass(frozen=True)
class CyclotomicData:
    m: int
    phi_m: int


@dataclass(frozen=True)
class NumberField:
    kind: FieldKind
    defining_poly: IntPoly
    poly_discriminant: int
    is_normal_over_Q: bool
    label: str
    quadratic: Optional[QuadraticData] = None
    cyclotomic: Optional[CyclotomicData] = None
    certified: bool = True
    class_number: Optional[int] = field(default=None, compare=False)

    @property
    def degree(self) -> int:
        return self.defining_poly.degree

    @property
    def discriminant_primes(self) -> list[int]:
        """Primes where the field may ramify (or where Z[alpha] may fail)."""
        if self.kind is FieldKind.QUADRATIC:
            return sorted(factorize(self.quadratic.D))
        if self.kind is FieldKind.CYCLOTOMIC:
            return sorted(factorize(self.cyclotomic.m))
        if abs(self.poly_discriminant) == 1:
            return []
        return sorted(factorize(self.poly_discriminant))

    def describe(self) -> dict:
        out = {
            "label": self.label,
            "kind": self.kind.value,
            "defining_poly": str(self.defining_poly),
            "coeffs": list(self.defining_poly.coeffs),
            "degree": self.degree,
            "poly_discriminant": self.poly_discriminant,
            "is_normal_over_Q": self.is_normal_over_Q,
            "certified": self.certified,
        }
        if self.quadratic:
            out["d"] = self.quadratic.d
            out["fundamental_discriminant"] = self.quadratic.D
        if self.cyclotomic:
            out["m"] = self.cyclotomic.m
        if self.class_number is not None:
            out["class_number"] = self.class_number
        return out


# ---------------------------------------------------------------------------
# discriminants


def _bareiss_det(mat: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = [row[:] for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def resultant(f: IntPoly, g: IntPoly) -> int:
    """Resultant via the Sylvester matrix."""
    m, n = f.degree, g.degree
    if f.is_zero or g.is_zero:
        return 0
    fr, gr = f.coeffs[::-1], g.coeffs[::-1]
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(fr) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(gr) + [0] * (size - n - 1 - i))
    return _bareiss_det(rows)


def poly_discriminant(f: IntPoly) -> int:
    if f.degree < 1:
        raise ValueError("discriminant needs degree >= 1")
    n = f.degree
    if n == 1:
        return 1
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    r = resultant(f, f.derivative())
    lead = f.coeffs[-1]
    return sign * r // lead


# ---------------------------------------------------------------------------
# constructors


def _certify_irreducible(f: IntPoly, disc: int) -> Optional[int]:
    """A prime p <= 200 with p not dividing disc and f irreducible mod p."""
    if f.degree == 1:
        return 1
    for p in segmented_sieve(CERTIFY_PRIME_BOUND):
        p = int(p)
        if disc % p == 0:
            continue
        fac = factor_mod_p(reduce_mod_p(f, p))
        if len(fac.factors) == 1 and fac.factors[0][1] == 1:
            return p
    return None


def field_from_poly(
    f: IntPoly,
    assert_normal: bool = False,
    *,
    allow_uncertified: bool = False,
    label: Optional[str] = None,
    class_number: Optional[int] = None,
) -> NumberField:
    if not f.is_monic:
        raise ValueError(f"defining polynomial {f} is not monic")
    if f.degree < 1:
        raise ValueError("defining polynomial must have degree >= 1")
    disc = poly_discriminant(f)
    if disc == 0:
        raise ValueError(f"{f} has zero discriminant (repeated roots)")
    certified = _certify_irreducible(f, disc) is not None
    if not certified and not allow_uncertified:
        raise ValueError(
            f"could not certify irreducibility of {f} modulo any prime <= "
            f"{CERTIFY_PRIME_BOUND}; pass allow_uncertified to override"
        )
    return NumberField(
        kind=FieldKind.GENERAL,
        defining_poly=f,
        poly_discriminant=disc,
        is_normal_over_Q=assert_normal or f.degree == 1,
        label=label or f"Q[x]/({f})",
        certified=certified,
        class_number=class_number,
    )


def rational_field() -> NumberField:
    return field_from_poly(IntPoly((0, 1)), True, label="Q", class_number=1)


def is_squarefree(n: int) -> bool:
    return n != 0 and all(k == 1 for k in factorize(n).values())


def fundamental_discriminant(d: int) -> int:
    return d if d % 4 == 1 else 4 * d


def quadratic_field(d: int, *, class_number: Optional[int] = None) -> NumberField:
    if d in (0, 1) or not is_squarefree(d):
        raise ValueError(f"d = {d} must be squarefree and not 0 or 1")
    D = fundamental_discriminant(d)
    if d % 4 == 1:
        f = IntPoly(((1 - d) // 4, -1, 1))
    else:
        f = IntPoly((-d, 0, 1))
    return NumberField(
        kind=FieldKind.QUADRATIC,
        defining_poly=f,
        poly_discriminant=poly_discriminant(f),
        is_normal_over_Q=True,
        label=f"Q(sqrt({d}))",
        quadratic=QuadraticData(d, D),
        class_number=class_number,
    )


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    """Quotient of integer polynomials when b is monic and divides a."""
    r = list(a)
    db = len(b) - 1
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db]
        q[k] = c
        for j in range(db + 1):
            r[k + j] -= c * b[j]
    if any(r[:db]):
        raise ArithmeticError("inexact polynomial division")
    return q


_CYCLO_CACHE: dict[int, tuple[int, ...]] = {}


def cyclotomic_poly(m: int) -> IntPoly:
    """Phi_m from x^m - 1 divided by Phi_d for every proper divisor d."""
    if m < 1:
        raise ValueError("m must be positive")
    if m not in _CYCLO_CACHE:
        num = [-1] + [0] * (m - 1) + [1]
        for d in range(1, m):
            if m % d == 0:
                num = _exact_div(num, list(cyclotomic_poly(d).coeffs))
        _CYCLO_CACHE[m] = tuple(num)
    return IntPoly(_CYCLO_CACHE[m])


def cyclotomic_field(m: int, *, class_number: Optional[int] = None) -> NumberField:
    if m < 3:
        raise ValueError(f"conductor m = {m} must be >= 3")
    f = cyclotomic_poly(m)
    return NumberField(
        kind=FieldKind.CYCLOTOMIC,
        defining_poly=f,
        poly_discriminant=poly_discriminant(f),
        is_normal_over_Q=True,
        label=f"Q(zeta_{m})",
        cyclotomic=CyclotomicData(m, totient(m)),
        class_number=class_number,
    )


# ---------------------------------------------------------------------------
# text definitions: "quadratic d=-1", "cyclotomic m=5", 'poly f="x^3-2" normal=false'


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def parse_field(text: str) -> tuple[NumberField, dict[str, str]]:
    """Build a field from its one-line definition.

    Returns the field and any keys not consumed by the constructor (for
    example ``closure=6``), which experiments read as metadata.
    """
    tokens = shlex.split(text)
    if not tokens:
        raise ValueError("empty field definition")
    kind, params = tokens[0].lower(), {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ValueError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        params[k.strip()] = v.strip()
    h = int(params.pop("h")) if "h" in params else None
    if kind == "quadratic":
        fld = quadratic_field(int(_take(params, "d", text)), class_number=h)
    elif kind == "cyclotomic":
        fld = cyclotomic_field(int(_take(params, "m", text)), class_number=h)
    elif kind in ("poly", "general"):
        f = IntPoly.parse(_take(params, "f", text))
        normal = _parse_bool(params.pop("normal", "false"))
        override = _parse_bool(params.pop("uncertified", "false"))
        fld = field_from_poly(f, normal, allow_uncertified=override, class_number=h)
    elif kind in ("rational", "q"):
        fld = rational_field()
    else:
        raise ValueError(f"unknown field kind {kind!r}")
    return fld, params


def _take(params: dict[str, str], key: str, text: str) -> str:
    if key not in params:
        raise ValueError(f"field definition {text!r} is missing {key}=")
    return params.pop(key)

