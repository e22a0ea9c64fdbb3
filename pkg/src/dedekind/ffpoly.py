"""Integer polynomials and complete factorization over prime fields F_p.

Polynomials are coefficient tuples, lowest degree first. The factoring
pipeline is the classical one: squarefree decomposition, distinct-degree
splitting with ``x^(p^d) - x``, then seeded equal-degree splitting
(Cantor-Zassenhaus for odd p, the trace map for p = 2).
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .primes import is_prime

MAX_MODULUS = 1 << 31

Coeffs = list  # working representation: list[int], lowest degree first, trimmed


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


@dataclass(frozen=True)
class IntPoly:
    """Dense polynomial over Z. The zero polynomial has no coefficients."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = _trim([int(a) for a in self.coeffs])
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def derivative(self) -> IntPoly:
        return IntPoly(tuple(i * a for i, a in enumerate(self.coeffs))[1:])

    def __call__(self, x: int) -> int:
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def __str__(self) -> str:
        return format_poly(self.coeffs)

    def to_json(self) -> str:
        return json.dumps(list(self.coeffs))

    @classmethod
    def from_json(cls, text: str) -> IntPoly:
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(a, int) for a in data):
            raise ValueError(f"expected a JSON list of integers, got {text!r}")
        return cls(tuple(data))

    @classmethod
    def parse(cls, text: str) -> IntPoly:
        """Parse ``"x^3 - 2"``-style text, or a JSON coefficient list."""
        text = text.strip()
        if text.startswith("["):
            return cls.from_json(text)
        return cls(tuple(parse_poly(text)))


_TERM = re.compile(r"^(\d*)\*?(x(?:\^(\d+))?)?$")


def parse_poly(text: str) -> list[int]:
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    coeffs: dict[int, int] = {}
    for sign, body in re.findall(r"([+-])([^+-]*)", s):
        m = _TERM.match(body)
        if not body or not m or (not m.group(1) and not m.group(2)):
            raise ValueError(f"cannot parse term {sign}{body!r} in {text!r}")
        coef = int(m.group(1)) if m.group(1) else 1
        if m.group(2):
            power = int(m.group(3)) if m.group(3) else 1
        else:
            power = 0
        coeffs[power] = coeffs.get(power, 0) + (coef if sign == "+" else -coef)
    out = [0] * (max(coeffs) + 1)
    for k, v in coeffs.items():
        out[k] = v
    return _trim(out)


def format_poly(coeffs: Sequence[int]) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        a = coeffs[k]
        if a == 0:
            continue
        mag = abs(a)
        if k == 0:
            body = str(mag)
        else:
            mono = "x" if k == 1 else f"x^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not terms:
            terms.append(body if a > 0 else "-" + body)
        else:
            terms.append(("+ " if a > 0 else "- ") + body)
    return " ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# arithmetic on coefficient lists mod p


def _add(a: Coeffs, b: Coeffs, p: int) -> Coeffs:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] = (out[i] + v) % p
    return _trim(out)


def _sub(a: Coeffs, b: Coeffs, p: int) -> Coeffs:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, v in enumerate(b):
        out[i] = (out[i] - v) % p
    return _trim(out)


def _mul(a: Coeffs, b: Coeffs, p: int) -> Coeffs:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([v % p for v in out])


def _scale(a: Coeffs, c: int, p: int) -> Coeffs:
    return _trim([v * c % p for v in a])


def _divmod(a: Coeffs, b: Coeffs, p: int) -> tuple[Coeffs, Coeffs]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], r
    inv = pow(b[-1], -1, p)
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] * inv % p
        q[k] = c
        if c:
            for j in range(db + 1):
                r[k + j] = (r[k + j] - c * b[j]) % p
    return _trim(q), _trim(r[:db])


def _mod(a: Coeffs, b: Coeffs, p: int) -> Coeffs:
    return _divmod(a, b, p)[1]


def _monic(a: Coeffs, p: int) -> Coeffs:
    if not a:
        return []
    return _scale(a, pow(a[-1], -1, p), p)


def _gcd(a: Coeffs, b: Coeffs, p: int) -> Coeffs:
    while b:
        a, b = b, _mod(a, b, p)
    return _monic(a, p)


def _powmod(base: Coeffs, e: int, f: Coeffs, p: int) -> Coeffs:
    result = [1]
    base = _mod(base, f, p)
    while e:
        if e & 1:
            result = _mod(_mul(result, base, p), f, p)
        e >>= 1
        if e:
            base = _mod(_mul(base, base, p), f, p)
    return _mod(result, f, p)


def _frobenius(g: Coeffs, times: int, f: Coeffs, p: int) -> Coeffs:
    """g^(p^times) mod f, exponentiating by p one step at a time."""
    for _ in range(times):
        g = _powmod(g, p, f, p)
    return g


def _deriv(a: Coeffs, p: int) -> Coeffs:
    return _trim([i * v % p for i, v in enumerate(a)][1:])


def _pth_root(a: Coeffs, p: int) -> Coeffs:
    # over F_p the p-th root of sum c_k x^(kp) is sum c_k x^k
    return _trim([a[i] for i in range(0, len(a), p)])


# ---------------------------------------------------------------------------
# public types


@dataclass(frozen=True)
class PolyModP:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.p >= MAX_MODULUS:
            raise ValueError(f"modulus {self.p} exceeds 2^31")
        c = _trim([int(a) % self.p for a in self.coeffs])
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def monic(self) -> PolyModP:
        return PolyModP(self.p, tuple(_monic(list(self.coeffs), self.p)))

    def __mul__(self, other: PolyModP) -> PolyModP:
        _same_modulus(self, other)
        return PolyModP(self.p, tuple(_mul(list(self.coeffs), list(other.coeffs), self.p)))

    def __pow__(self, k: int) -> PolyModP:
        out = PolyModP(self.p, (1,))
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x: int) -> int:
        acc = 0
        for a in reversed(self.coeffs):
            acc = (acc * x + a) % self.p
        return acc

    def roots(self) -> list[int]:
        """Roots in F_p by exhaustion; only sensible for small p."""
        return [x for x in range(self.p) if self(x) == 0]

    def __str__(self) -> str:
        return f"{format_poly(self.coeffs)} (mod {self.p})"


@dataclass(frozen=True)
class FactorizationModP:
    p: int
    factors: tuple[tuple[PolyModP, int], ...]
    unit: int = 1

    def product(self) -> PolyModP:
        out = PolyModP(self.p, (self.unit,))
        for g, k in self.factors:
            out = out * g**k
        return out

    @property
    def degree_pattern(self) -> list[tuple[int, int]]:
        """(multiplicity, degree) per irreducible factor."""
        return [(k, g.degree) for g, k in self.factors]


def _same_modulus(a: PolyModP, b: PolyModP) -> None:
    if a.p != b.p:
        raise ValueError(f"modulus mismatch: {a.p} vs {b.p}")


def reduce_mod_p(f: IntPoly, p: int) -> PolyModP:
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    return PolyModP(int(p), f.coeffs)


def gcd_mod_p(a: PolyModP, b: PolyModP) -> PolyModP:
    _same_modulus(a, b)
    return PolyModP(a.p, tuple(_gcd(list(a.coeffs), list(b.coeffs), a.p)))


def _squarefree_parts(f: Coeffs, p: int) -> list[tuple[Coeffs, int]]:
    """Squarefree factorization of monic f: [(g_i, i)] with f = prod g_i^i."""
    out: list[tuple[Coeffs, int]] = []
    if len(f) <= 1:
        return out
    df = _deriv(f, p)
    if not df:
        # f is a p-th power
        for g, k in _squarefree_parts(_pth_root(f, p), p):
            out.append((g, k * p))
        return out
    c = _gcd(f, df, p)
    w = _divmod(f, c, p)[0]
    i = 1
    while w != [1]:
        y = _gcd(w, c, p)
        z = _divmod(w, y, p)[0]
        if z != [1]:
            out.append((z, i))
        i += 1
        w = y
        c = _divmod(c, y, p)[0]
    if c != [1]:
        for g, k in _squarefree_parts(_pth_root(c, p), p):
            out.append((g, k * p))
    return out


def _distinct_degree(f: Coeffs, p: int) -> list[tuple[Coeffs, int]]:
    """Split squarefree monic f into products of same-degree irreducibles."""
    out = []
    h = [0, 1]
    d = 0
    rest = f
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        h = _frobenius(h, 1, rest, p)
        g = _gcd(rest, _sub(h, [0, 1], p), p)
        if g != [1]:
            out.append((g, d))
            rest = _divmod(rest, g, p)[0]
            h = _mod(h, rest, p)
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def _equal_degree(f: Coeffs, d: int, p: int, rng: random.Random) -> list[Coeffs]:
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = _trim([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        if p == 2:
            # trace map F_{2^d} -> F_2
            t, acc = a, a
            for _ in range(d - 1):
                t = _mod(_mul(t, t, p), f, p)
                acc = _add(acc, t, p)
            b = acc
        else:
            b = _sub(_powmod(a, (p**d - 1) // 2, f, p), [1], p)
        g = _gcd(f, b, p)
        if 0 < len(g) - 1 < n:
            q = _divmod(f, g, p)[0]
            return _equal_degree(g, d, p, rng) + _equal_degree(q, d, p, rng)


def factor_mod_p(f: PolyModP, seed: int = 0) -> FactorizationModP:
    """Complete factorization into monic irreducibles with multiplicities.

    The output is sorted (degree, then coefficients), so it does not depend
    on the random choices made during equal-degree splitting.
    """
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    p = f.p
    lead = f.coeffs[-1]
    monic = _monic(list(f.coeffs), p)
    rng = random.Random(f"{seed}:{p}:{monic}")
    found: dict[tuple[int, ...], int] = {}
    for part, mult in _squarefree_parts(monic, p):
        for block, d in _distinct_degree(part, p):
            for g in _equal_degree(block, d, p, rng):
                found[tuple(g)] = found.get(tuple(g), 0) + mult
    factors = sorted(found.items(), key=lambda kv: (len(kv[0]), kv[0][::-1]))
    return FactorizationModP(
        p, tuple((PolyModP(p, g), k) for g, k in factors), unit=lead
    )


def splits_into_distinct_linear(f: PolyModP) -> bool:
    """True iff f is a product of distinct monic linear factors over F_p."""
    if f.is_zero:
        raise ValueError("zero polynomial")
    c = _monic(list(f.coeffs), f.p)
    n = len(c) - 1
    if n == 0:
        return True
    if _gcd(c, _deriv(c, f.p), f.p) != [1]:
        return False
    h = _sub(_powmod([0, 1], f.p, c, f.p), [0, 1], f.p)
    return len(_gcd(h, c, f.p)) - 1 == n


# ---------------------------------------------------------------------------
# batched hot loop: x^p mod f for many primes at once


def x_pow_p_is_x(f: IntPoly, primes: np.ndarray) -> np.ndarray:
    """Vectorized test of x^p == x (mod f, p) for every prime in ``primes``.

    For p not dividing disc(f), f is squarefree mod p and this is exactly
    "f splits into distinct linear factors mod p". Primes must be < 2^31 so
    every residue product fits in int64.
    """
    if not f.is_monic:
        raise ValueError("batched test needs a monic polynomial")
    ps = np.asarray(primes, dtype=np.int64)
    if ps.size == 0:
        return np.zeros(0, dtype=bool)
    if int(ps.max()) >= MAX_MODULUS:
        raise ValueError("primes must be < 2^31")
    n = f.degree
    if n < 1 or any(abs(a) >= 1 << 62 for a in f.coeffs):
        raise ValueError("batched test needs degree >= 1 and coefficients < 2^62")
    fc = np.stack([np.mod(np.int64(a), ps) for a in f.coeffs[:-1]])

    def reduce(prod: np.ndarray) -> np.ndarray:
        # prod has rows 0..2n-2; eliminate top rows with x^n = -sum fc_i x^i
        for k in range(prod.shape[0] - 1, n - 1, -1):
            top = prod[k]
            for i in range(n):
                prod[k - n + i] = (prod[k - n + i] - top * fc[i] % ps) % ps
        return prod[:n]

    def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        prod = np.zeros((2 * n - 1,) + ps.shape, dtype=np.int64)
        for i in range(n):
            for j in range(n):
                prod[i + j] = (prod[i + j] + a[i] * b[j] % ps) % ps
        return reduce(prod)

    def times_x(a: np.ndarray) -> np.ndarray:
        prod = np.zeros((n + 1,) + ps.shape, dtype=np.int64)
        prod[1:] = a
        return reduce(prod)

    x_mod_f = times_x(_unit_rows(n, ps.shape))
    acc = _unit_rows(n, ps.shape)
    bits = int(ps.max()).bit_length()
    for b in range(bits - 1, -1, -1):
        acc = mul(acc, acc)
        mask = ((ps >> b) & 1).astype(bool)
        if mask.any():
            shifted = times_x(acc)
            acc = np.where(mask, shifted, acc)
    return np.all(acc == x_mod_f, axis=0)


def _unit_rows(n: int, shape) -> np.ndarray:
    out = np.zeros((n,) + shape, dtype=np.int64)
    if n:
        out[0] = 1
    return out
