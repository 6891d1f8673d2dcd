"""Prime generation, smallest-prime-factor tables, and complete factorization
of polynomial values over an interval by sieving along roots mod p.

The factorization path materializes (p, nu) lists per n, so it is capped at
moderate interval lengths; the concentration module streams f-values through
the kernels instead when it only needs additive statistics.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, isqrt

import numpy as np

from . import _kernels
from ._arith import factorize, is_prime
from .errors import CapacityError
from .polynomial import (
    DEFAULT_SPLIT_SEED,
    IntPolynomial,
    PolynomialFamily,
    eval_poly,
    max_abs_over_interval,
)

SEGMENT = 1 << 20
MAX_SIEVE_LIMIT = 1 << 34
MAX_SPF_LIMIT = 1 << 26
MAX_MATERIALIZED = 1 << 21
CACHE_MAGIC = b"CONCFAC1"
CACHE_VERSION = 1


class PrimeTable:
    """Bit-packed primality up to `limit`, with a lazy smallest-prime-factor
    array for factorize_small.  Immutable after construction."""

    def __init__(self, limit: int):
        if limit < 2:
            raise ValueError("limit must be >= 2")
        if limit > MAX_SIEVE_LIMIT:
            raise CapacityError(f"prime table limit {limit} exceeds 2^34")
        self.limit = int(limit)
        self._bits = self._build_bits(self.limit)
        self._primes: np.ndarray | None = None
        self._spf: np.ndarray | None = None

    @staticmethod
    def _build_bits(limit: int) -> np.ndarray:
        root = isqrt(limit)
        base = np.ones(root + 1, dtype=bool)
        base[:2] = False
        for p in range(2, isqrt(root) + 1):
            if base[p]:
                base[p * p :: p] = False
        base_primes = np.nonzero(base)[0]
        packed = []
        for lo in range(0, limit + 1, SEGMENT):
            hi = min(lo + SEGMENT, limit + 1)
            seg = np.ones(hi - lo, dtype=bool)
            if lo == 0:
                seg[:2] = False
            for p in base_primes:
                p = int(p)
                start = max(p * p, ((lo + p - 1) // p) * p)
                if start < hi:
                    seg[start - lo :: p] = False
            packed.append(np.packbits(seg))
        return np.concatenate(packed)

    def is_prime(self, n: int) -> bool:
        if n < 2 or n > self.limit:
            return False
        return bool((self._bits[n >> 3] >> (7 - (n & 7))) & 1)

    def primes(self) -> np.ndarray:
        """All primes <= limit as an int64 array (cached)."""
        if self._primes is None:
            flags = np.unpackbits(self._bits, count=self.limit + 1)
            self._primes = np.nonzero(flags)[0].astype(np.int64)
        return self._primes

    @property
    def spf(self) -> np.ndarray:
        """Smallest prime factor of every n <= limit (spf[0] = spf[1] = 0)."""
        if self._spf is None:
            if self.limit > MAX_SPF_LIMIT:
                raise CapacityError(
                    f"spf table limited to {MAX_SPF_LIMIT}; got {self.limit}")
            spf = np.zeros(self.limit + 1, dtype=np.int32)
            for p in range(2, isqrt(self.limit) + 1):
                if spf[p] == 0:
                    view = spf[p::p]
                    view[view == 0] = p
            rest = np.nonzero(spf[2:] == 0)[0] + 2
            spf[rest] = rest
            self._spf = spf
        return self._spf


@lru_cache(maxsize=12)
def primes_up_to(limit: int) -> PrimeTable:
    """Exact prime table up to `limit` (memoized on the exact limit)."""
    return PrimeTable(limit)


def factorize_small(n: int, table: PrimeTable) -> list[tuple[int, int]]:
    """Exact factorization of 1 <= n <= table.limit via repeated spf division."""
    if n < 1 or n > table.limit:
        raise ValueError(f"n = {n} outside [1, {table.limit}]")
    spf = table.spf
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


# ----------------------------------------------------------------------------
# interval factorization
# ----------------------------------------------------------------------------

def default_sieve_bound(x: float, y: float) -> int:
    return max(10**5, ceil((x + y) ** (1.0 / 3.0)))


def interval_bounds(x: float, y: float) -> tuple[int, int]:
    """Integers n with x < n <= x + y, as (first, count)."""
    n0 = int(np.floor(x)) + 1
    n1 = int(np.floor(x + y))
    return n0, max(n1 - n0 + 1, 0)


@dataclass
class IntervalFactorization:
    """Complete factorizations of |Q_j(n)| for all n in (x, x+y].

    factors[j][i] lists (p, nu) pairs for n = n0 + i, sorted by p; zero[j][i]
    flags Q_j(n) = 0 (only possible for linear members).
    """

    family: PolynomialFamily
    x: float
    y: float
    n0: int
    count: int
    sieve_bound: int
    factors: list[list[list[tuple[int, int]]]]
    zero: list[list[bool]]

    def value(self, j: int, i: int) -> int:
        out = 1
        for p, nu in self.factors[j][i]:
            out *= p**nu
        return out

    def n_at(self, i: int) -> int:
        return self.n0 + i

    def merged(self, i: int) -> list[tuple[int, int]]:
        """Factorization of |Q(n0+i)| = prod_j |Q_j(n0+i)|."""
        acc: dict[int, int] = {}
        for j in range(self.family.r):
            for p, nu in self.factors[j][i]:
                acc[p] = acc.get(p, 0) + nu
        return sorted(acc.items())


def interval_factorize(family: PolynomialFamily, x: float, y: float,
                       sieve_bound: int | None = None,
                       seed: int = DEFAULT_SPLIT_SEED) -> IntervalFactorization:
    """Sieve each member's values along root progressions, then finish the
    cofactors with Miller-Rabin and Brent rho."""
    n0, m = interval_bounds(x, y)
    if m > MAX_MATERIALIZED:
        raise CapacityError(
            f"interval of {m} entries exceeds the materialization cap "
            f"{MAX_MATERIALIZED}; stream through concentration.build_table instead")
    bound = sieve_bound if sieve_bound is not None else default_sieve_bound(x, y)
    factors: list[list[list[tuple[int, int]]]] = []
    zero: list[list[bool]] = []
    if m == 0:
        return IntervalFactorization(family, x, y, n0, 0, bound, [], [])
    for q in family.members:
        # guard the 128-bit evaluation contract once per member
        eval_poly(q, n0)
        eval_poly(q, n0 + m - 1)
    table = primes_up_to(bound)
    parr = table.primes()
    bb = bound * bound
    for q in family.members:
        offsets, flat = _kernels.roots_csr(q.coeffs, parr, seed)
        vals = [abs(eval_poly(q, n0 + i)) for i in range(m)]
        zrow = [v == 0 for v in vals]
        frow: list[list[tuple[int, int]]] = [[] for _ in range(m)]
        for t in range(len(parr)):
            p = int(parr[t])
            for ri in range(int(offsets[t]), int(offsets[t + 1])):
                r = int(flat[ri])
                for i in range((r - n0) % p, m, p):
                    v = vals[i]
                    if v == 0 or v % p:
                        continue
                    nu = 0
                    while v % p == 0:
                        v //= p
                        nu += 1
                    vals[i] = v
                    frow[i].append((p, nu))
        for i in range(m):
            c = vals[i]
            if c > 1:
                if c < bb or is_prime(c):
                    frow[i].append((c, 1))
                else:
                    frow[i].extend(factorize(c))
        factors.append(frow)
        zero.append(zrow)
    return IntervalFactorization(family, x, y, n0, m, bound, factors, zero)


# ----------------------------------------------------------------------------
# friable decomposition diagnostic
# ----------------------------------------------------------------------------

@dataclass
class FriableDecomposition:
    """Per-n split Q(n) = b_n * prod_j a_{j,n}: a parts xi_n-friable with
    product <= threshold, b_n carrying only primes > xi_n."""

    threshold: float
    small_threshold: float
    xi: list[int | None]          # None means every prime factor is friable
    a: list[tuple[int, ...]]      # per n: (a_1, ..., a_r)
    b: list[int]
    p_minus: list[int | None]     # P^-(b_n)
    nu: list[int | None]          # exponent of p_minus in Q(n)
    n1_mask: list[bool]           # prod_j a_j <= small_threshold
    excluded: list[bool]          # Q(n) = 0


def friable_decompose(fac: IntervalFactorization, x: float, epsilon: float,
                      threshold: float | None = None) -> FriableDecomposition:
    """xi_n is the largest integer whose xi_n-friable part of Q(n) stays at or
    below x^(2 epsilon / 3) (or the explicit threshold override)."""
    T = threshold if threshold is not None else float(x) ** (2.0 * epsilon / 3.0)
    Ts = T**0.5
    xi: list[int | None] = []
    a_parts: list[tuple[int, ...]] = []
    b_parts: list[int] = []
    p_minus: list[int | None] = []
    nus: list[int | None] = []
    n1_mask: list[bool] = []
    excluded: list[bool] = []
    for i in range(fac.count):
        if any(fac.zero[j][i] for j in range(fac.family.r)):
            xi.append(None)
            a_parts.append(tuple([1] * fac.family.r))
            b_parts.append(0)
            p_minus.append(None)
            nus.append(None)
            n1_mask.append(False)
            excluded.append(True)
            continue
        merged = fac.merged(i)
        part = 1
        cut: int | None = None
        for p, nu in merged:
            nxt = part * p**nu
            if nxt > T:
                cut = p - 1
                break
            part = nxt
        xi.append(cut)
        arow = []
        prod_a = 1
        for j in range(fac.family.r):
            aj = 1
            for p, nu in fac.factors[j][i]:
                if cut is None or p <= cut:
                    aj *= p**nu
            arow.append(aj)
            prod_a *= aj
        bn = 1
        pm: int | None = None
        nu_n: int | None = None
        for p, nu in merged:
            if cut is not None and p > cut:
                bn *= p**nu
                if pm is None:
                    pm = p
                    nu_n = nu
        a_parts.append(tuple(arow))
        b_parts.append(bn)
        p_minus.append(pm)
        nus.append(nu_n)
        n1_mask.append(prod_a <= Ts)
        excluded.append(False)
    return FriableDecomposition(T, Ts, xi, a_parts, b_parts, p_minus, nus,
                                n1_mask, excluded)


# ----------------------------------------------------------------------------
# binary cache: little-endian length-prefixed records
# ----------------------------------------------------------------------------

_ZERO_SENTINEL = 0xFFFFFFFF


def _family_digest(family: PolynomialFamily) -> bytes:
    return hashlib.sha256(family.key().encode()).digest()


def save_interval_cache(fac: IntervalFactorization, path) -> None:
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<I", CACHE_VERSION))
        fh.write(_family_digest(fac.family))
        fh.write(struct.pack("<ddqqqH", fac.x, fac.y, fac.n0, fac.count,
                             fac.sieve_bound, fac.family.r))
        for j in range(fac.family.r):
            for i in range(fac.count):
                if fac.zero[j][i]:
                    fh.write(struct.pack("<I", _ZERO_SENTINEL))
                    continue
                row = fac.factors[j][i]
                fh.write(struct.pack("<I", len(row)))
                for p, nu in row:
                    fh.write(struct.pack("<QI", p, nu))


def load_interval_cache(path, family: PolynomialFamily, x: float, y: float,
                        sieve_bound: int) -> IntervalFactorization | None:
    """Returns the cached factorization, or None on any key mismatch."""
    try:
        fh = open(path, "rb")
    except OSError:
        return None
    with fh:
        head = fh.read(8)
        if head != CACHE_MAGIC:
            return None
        (version,) = struct.unpack("<I", fh.read(4))
        if version != CACHE_VERSION:
            return None
        if fh.read(32) != _family_digest(family):
            return None
        cx, cy, n0, count, bound, r = struct.unpack("<ddqqqH", fh.read(42))
        if (cx, cy, bound, r) != (x, y, sieve_bound, family.r):
            return None
        factors = []
        zero = []
        for _ in range(r):
            frow = []
            zrow = []
            for _ in range(count):
                (k,) = struct.unpack("<I", fh.read(4))
                if k == _ZERO_SENTINEL:
                    zrow.append(True)
                    frow.append([])
                    continue
                zrow.append(False)
                entry = []
                for _ in range(k):
                    p, nu = struct.unpack("<QI", fh.read(12))
                    entry.append((int(p), int(nu)))
                frow.append(entry)
            factors.append(frow)
            zero.append(zrow)
    return IntervalFactorization(family, x, y, n0, count, bound, factors, zero)
