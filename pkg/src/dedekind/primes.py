"""Prime enumeration: deterministic primality, a segmented sieve, and a disk cache.

The cache directory comes from ``DEDEKIND_CACHE_DIR`` (falling back to
``~/.cache/dedekind``). Cache files are an optimization only: anything that
fails to load or validate is recomputed and rewritten.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from pathlib import Path

import numpy as np
from filelock import FileLock, Timeout

log = logging.getLogger(__name__)

CACHE_ENV = "DEDEKIND_CACHE_DIR"
MAX_BOUND = 10**7
SEGMENT = 1 << 18

# Deterministic Miller-Rabin witnesses, valid for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_prime(p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return int(p)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of a non-zero integer (sign dropped)."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def totient(n: int) -> int:
    result = n
    for q in factorize(n):
        result -= result // q
    return result


def _small_primes(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return np.flatnonzero(flags)


def segmented_sieve(bound: int, segment: int = SEGMENT) -> np.ndarray:
    """All primes <= bound as an int64 array, sieved segment by segment."""
    if bound < 2:
        return np.zeros(0, dtype=np.int64)
    root = max(math.isqrt(bound), 2)
    base = _small_primes(root)
    chunks = [base[base <= bound].astype(np.int64)]
    lo = root + 1
    while lo <= bound:
        hi = min(lo + segment - 1, bound)
        flags = np.ones(hi - lo + 1, dtype=bool)
        for q in base:
            q = int(q)
            if q * q > hi:
                break
            start = max(q * q, (lo + q - 1) // q * q)
            flags[start - lo :: q] = False
        chunks.append(np.flatnonzero(flags).astype(np.int64) + lo)
        lo = hi + 1
    return np.concatenate(chunks)


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "dedekind"


def _digest(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr, dtype="<i8").tobytes()).hexdigest()


def _load(path: Path, bound: int) -> np.ndarray | None:
    try:
        with np.load(path, allow_pickle=False) as data:
            primes = data["primes"].astype(np.int64)
            stored_bound = int(data["bound"])
            digest = str(data["sha256"])
    except Exception as exc:  # any unreadable file is just a cache miss
        log.info("ignoring unreadable prime cache %s: %s", path, exc)
        return None
    if stored_bound != bound or digest != _digest(primes):
        log.info("ignoring corrupted prime cache %s", path)
        return None
    if primes.size and (primes[0] != 2 or primes[-1] > bound or np.any(np.diff(primes) <= 0)):
        return None
    return primes


def primes_upto(bound: int, *, use_cache: bool = True) -> np.ndarray:
    """Primes <= bound, read from / written to the disk cache when possible."""
    bound = int(bound)
    if bound > MAX_BOUND:
        raise ValueError(f"prime bound {bound} exceeds limit {MAX_BOUND}")
    if not use_cache or bound < 10**4:
        return segmented_sieve(bound)
    path = cache_dir() / f"primes_{bound}.npz"
    if path.exists():
        cached = _load(path, bound)
        if cached is not None:
            return cached
    primes = segmented_sieve(bound)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with FileLock(str(path) + ".lock", timeout=30):
            tmp = path.with_suffix(".tmp.npz")
            np.savez(tmp, primes=primes, bound=bound, sha256=_digest(primes))
            os.replace(tmp, path)
    except (OSError, Timeout) as exc:
        log.warning("prime cache write failed (%s); continuing without cache", exc)
    return primes
