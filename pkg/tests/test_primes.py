import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dedekind import primes
from oracles import sieve, totient_bruteforce


def test_segmented_sieve_matches_simple_sieve():
    for bound in (1, 2, 3, 100, 65536, 300_001):
        assert tuple(primes.segmented_sieve(bound, segment=4096).tolist()) == sieve(bound)


def test_prime_count_at_one_million():
    assert primes.primes_upto(10**6).size == 78498


@given(st.integers(min_value=-10, max_value=10**6))
@settings(max_examples=300)
def test_is_prime_agrees_with_trial_division(n):
    expected = n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))
    assert primes.is_prime(n) == expected


def test_is_prime_large():
    assert primes.is_prime(2**61 - 1)
    assert not primes.is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


@given(st.integers(min_value=1, max_value=5000))
def test_totient_and_factorize(n):
    assert primes.totient(n) == totient_bruteforce(n)
    f = primes.factorize(n)
    assert int(np.prod([p**e for p, e in f.items()])) == n
    assert all(primes.is_prime(p) for p in f)


def test_require_prime_rejects_composites():
    with pytest.raises(ValueError):
        primes.require_prime(15)


def test_bound_limit():
    with pytest.raises(ValueError):
        primes.primes_upto(10**7 + 1)


def test_cache_roundtrip_and_corruption(tmp_path, monkeypatch):
    monkeypatch.setenv("DEDEKIND_CACHE_DIR", str(tmp_path))
    first = primes.primes_upto(200_000)
    files = list(tmp_path.glob("primes_200000*.npz"))
    assert files
    files[0].write_bytes(b"not a numpy archive")
    again = primes.primes_upto(200_000)
    assert np.array_equal(first, again)
    np.savez(files[0], primes=first, sha256="0" * 64, bound=200_000)
    assert np.array_equal(primes.primes_upto(200_000), first)
    # self-consistent digest over the wrong content
    bogus = np.arange(10, dtype=np.int64)
    np.savez(files[0], primes=bogus, sha256=primes._digest(bogus), bound=200_000)
    assert np.array_equal(primes.primes_upto(200_000), first)


def test_unwritable_cache_is_not_fatal(tmp_path, monkeypatch):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    monkeypatch.setenv("DEDEKIND_CACHE_DIR", str(blocker / "sub"))
    assert primes.primes_upto(50_000).size == len(sieve(50_000))
