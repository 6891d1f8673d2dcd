"""Arbitrary-precision integer helpers: primality, Pollard rho, factorization.

Everything here works on plain Python ints so it stays correct for the full
128-bit value range the sieve can produce.  Deterministic: the Miller-Rabin
base set is fixed and Brent's rho walks a fixed schedule of parameters.
"""

from math import gcd, isqrt

# Deterministic for every n < 3317044064679887385961981 (> 2^121).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229,
)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24, far above our range)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """Nontrivial factor of composite odd n via Brent's cycle variant.

    Deterministic: walks c = 1, 2, 3, ... until a factor splits off.
    Batches gcd computations 128 steps at a time.
    """
    if n % 2 == 0:
        return 2
    for c in range(1, 1000):
        y, m = 2, 128
        g = q = r = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")  # pragma: no cover


def _perfect_root(n: int, k: int):
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 2 and cand**k == n:
            return cand
    return None


def factorize(n: int) -> list[tuple[int, int]]:
    """Exact factorization of |n| as a sorted list of (prime, exponent) pairs.

    Trial division by the small primes, then Miller-Rabin plus Brent rho on
    whatever is left.  factorize(0) raises; factorize(+-1) is [].
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factorize 0")
    out = []
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        if n < _SMALL_PRIMES[-1] ** 2 or is_prime(n):
            out.append((n, 1))
        else:
            out.extend(_factor_hard(n))
    out.sort()
    merged = []
    for p, e in out:
        if merged and merged[-1][0] == p:
            merged[-1] = (p, merged[-1][1] + e)
        else:
            merged.append((p, e))
    return merged


def _factor_hard(n: int) -> list[tuple[int, int]]:
    # n composite, odd, no small factors
    stack = [n]
    found: dict[int, int] = {}
    while stack:
        m = stack.pop()
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        for k in (2, 3, 5):
            r = _perfect_root(m, k)
            if r is not None:
                stack.extend([r] * k)
                break
        else:
            d = _brent_rho(m)
            stack.append(d)
            stack.append(m // d)
    return sorted(found.items())


def euler_phi_from_factors(factors) -> int:
    out = 1
    for p, e in factors:
        out *= (p - 1) * p ** (e - 1)
    return out


__all__ = ["is_prime", "factorize", "euler_phi_from_factors", "isqrt"]
