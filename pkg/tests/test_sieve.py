import pickle

import numpy as np
import pytest
import sympy

from concentra.errors import CapacityError
from concentra.polynomial import eval_poly, parse_poly
from concentra.sieve import (
    SEGMENT,
    default_sieve_bound,
    factorize_small,
    friable_decompose,
    interval_factorize,
    load_interval_cache,
    primes_up_to,
    save_interval_cache,
)

from conftest import quiet_family


def test_primes_examples():
    assert list(primes_up_to(10).primes()) == [2, 3, 5, 7]
    assert len(primes_up_to(100).primes()) == 25
    assert len(primes_up_to(10**6).primes()) == 78498


def test_primes_match_trial_division():
    table = primes_up_to(10**5)
    rng = np.random.default_rng(3)
    for n in rng.integers(2, 10**5, size=300):
        assert table.is_prime(int(n)) == sympy.isprime(int(n))


def test_segment_boundaries():
    # limits around the segment size must agree with a plain sieve
    for lim in (SEGMENT - 1, SEGMENT, SEGMENT + 1, 2 * SEGMENT + 17):
        ps = primes_up_to(lim).primes()
        assert int(ps[-1]) == int(sympy.prevprime(lim + 1))
        assert ps[0] == 2


def test_factorize_small_examples():
    t = primes_up_to(100)
    assert factorize_small(12, t) == [(2, 2), (3, 1)]
    assert factorize_small(1, t) == []
    assert factorize_small(97, t) == [(97, 1)]
    with pytest.raises(ValueError):
        factorize_small(101, t)


def test_interval_factorize_linear_matches_small(fam_x):
    t = primes_up_to(10**4)
    fac = interval_factorize(fam_x, 10, 5)
    assert fac.count == 5
    for i in range(5):
        assert fac.factors[0][i] == factorize_small(11 + i, t)


def test_interval_factorize_example_65(fam_x2p1):
    fac = interval_factorize(fam_x2p1, 5, 5)
    assert fac.factors[0][8 - fac.n0] == [(5, 1), (13, 1)]


def test_interval_multiply_back_and_maximality(fam_x2p1):
    fac = interval_factorize(fam_x2p1, 10**6, 10**3)
    for i in range(fac.count):
        n = fac.n0 + i
        value = n * n + 1
        assert fac.value(0, i) == value
        for p, nu in fac.factors[0][i]:
            assert value % p**nu == 0
            assert value % p ** (nu + 1) != 0
            assert sympy.isprime(p)


def test_interval_zero_flag():
    fam = quiet_family("x-5")
    fac = interval_factorize(fam, 3, 4)  # n in 4..7, Q(5) = 0
    i = 5 - fac.n0
    assert fac.zero[0][i]
    assert not fac.zero[0][0]
    assert fac.value(0, 6 - fac.n0) == 1


def test_interval_determinism(fam_x2p1):
    a = interval_factorize(fam_x2p1, 1000, 200)
    b = interval_factorize(fam_x2p1, 1000, 200)
    assert pickle.dumps(a.factors) == pickle.dumps(b.factors)


def test_interval_capacity():
    fam = quiet_family("x")
    with pytest.raises(CapacityError):
        interval_factorize(fam, 1, 2**22)


def test_default_sieve_bound():
    assert default_sieve_bound(10, 10) == 10**5
    assert default_sieve_bound(8e15, 0) == 200000


def test_cache_round_trip(tmp_path, fam_x2p1):
    fac = interval_factorize(fam_x2p1, 100, 50)
    path = tmp_path / "fac.bin"
    save_interval_cache(fac, path)
    loaded = load_interval_cache(path, fam_x2p1, 100, 50, fac.sieve_bound)
    assert loaded is not None
    assert loaded.factors == fac.factors
    assert loaded.zero == fac.zero
    assert loaded.n0 == fac.n0
    # key mismatches invalidate
    assert load_interval_cache(path, fam_x2p1, 100, 51, fac.sieve_bound) is None
    assert load_interval_cache(path, fam_x2p1, 100, 50, fac.sieve_bound + 1) is None
    other = quiet_family("x")
    assert load_interval_cache(path, other, 100, 50, fac.sieve_bound) is None
    # version/magic corruption invalidates
    raw = bytearray(path.read_bytes())
    raw[0] ^= 0xFF
    path.write_bytes(bytes(raw))
    assert load_interval_cache(path, fam_x2p1, 100, 50, fac.sieve_bound) is None


def test_friable_decompose_example_12():
    fam = quiet_family("x")
    fac = interval_factorize(fam, 11, 1)  # n = 12
    fd = friable_decompose(fac, 12, 0.5, threshold=6)
    assert fd.xi[0] == 2
    assert fd.a[0] == (4,)
    assert fd.b[0] == 3
    assert fd.p_minus[0] == 3 and fd.nu[0] == 1


def test_friable_decompose_prime_and_unit():
    fam = quiet_family("x")
    fac = interval_factorize(fam, 100, 1)  # n = 101 prime
    fd = friable_decompose(fac, 100, 0.5, threshold=50)
    assert fd.xi[0] == 100  # p - 1
    assert fd.a[0] == (1,) and fd.b[0] == 101
    fac1 = interval_factorize(fam, 0, 1)  # n = 1, Q(n) = 1
    fd1 = friable_decompose(fac1, 10, 0.5, threshold=5)
    assert fd1.xi[0] is None and fd1.a[0] == (1,) and fd1.b[0] == 1


def test_friable_part_monotone_in_threshold(fam_x2p1):
    fac = interval_factorize(fam_x2p1, 50, 30)
    prev_parts = None
    for thr in (2, 5, 17, 100, 10**4, 10**8):
        fd = friable_decompose(fac, 100, 0.5, threshold=thr)
        parts = []
        for i in range(fac.count):
            prod_a = 1
            for v in fd.a[i]:
                prod_a *= v
            parts.append(prod_a)
        if prev_parts is not None:
            assert all(a >= b for a, b in zip(parts, prev_parts))
        prev_parts = parts
