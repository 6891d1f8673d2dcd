"""Additive functions and the introductory analytic quantities: E_f(x; r),
Mertens-type deviations, the finite-value condition audit, and beta*D / phi_0.

An additive function is determined by its values on prime powers; it extends
to Z by f(-n) = f(n) and f(0) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from ._arith import factorize
from ._quad import li
from .errors import CapacityError, DegenerateFactor, EmptyGrid
from .polynomial import (
    DEFAULT_SPLIT_SEED,
    IntPolynomial,
    PolynomialFamily,
    format_poly,
)
from .sieve import factorize_small, primes_up_to

_KIND_CODES = {"omega": _kernels.KIND_OMEGA,
               "big_omega": _kernels.KIND_BIG_OMEGA,
               "omega_y": _kernels.KIND_OMEGA_Y}

STAR_SCALE_CAP = 1 << 26


@dataclass(frozen=True)
class AdditiveFunction:
    """Rule (p, nu) -> value on prime powers; induced additively elsewhere."""

    kind: str
    threshold: float = math.inf
    rules: tuple = ()
    default: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("omega", "big_omega", "omega_y", "custom"):
            raise ValueError(f"unknown additive function kind {self.kind!r}")
        object.__setattr__(self, "_map", dict(self.rules))

    def on_prime_power(self, p: int, nu: int) -> float:
        if self.kind == "omega":
            return 1.0
        if self.kind == "big_omega":
            return float(nu)
        if self.kind == "omega_y":
            return 1.0 if p <= self.threshold else 0.0
        return float(self._map.get((p, nu), self.default))

    @property
    def integer_valued(self) -> bool:
        if self.kind != "custom":
            return True
        vals = list(self._map.values()) + [self.default]
        return all(float(v).is_integer() for v in vals)

    @property
    def kernel_kind(self) -> int | None:
        """Kernel dispatch code, or None when only the slow path applies."""
        return _KIND_CODES.get(self.kind)

    def descriptor(self) -> str:
        if self.kind == "omega":
            return "omega"
        if self.kind == "big_omega":
            return "big-omega"
        if self.kind == "omega_y":
            thr = self.threshold
            txt = str(int(thr)) if float(thr).is_integer() else repr(thr)
            return f"omega_y:{txt}"
        return self.label or "custom"

    def __str__(self) -> str:
        return self.descriptor()


def omega() -> AdditiveFunction:
    return AdditiveFunction(kind="omega")


def big_omega() -> AdditiveFunction:
    return AdditiveFunction(kind="big_omega")


def omega_y(threshold: float) -> AdditiveFunction:
    return AdditiveFunction(kind="omega_y", threshold=float(threshold))


def custom_function(rules, default: float = 0.0, label: str = "custom") -> AdditiveFunction:
    norm = tuple(sorted(((int(p), int(nu)), float(v)) for (p, nu), v in dict(rules).items()))
    return AdditiveFunction(kind="custom", rules=norm, default=float(default),
                            label=label)


def load_custom_function(path) -> AdditiveFunction:
    """File format: lines "p nu value" plus one "default value" line."""
    rules = {}
    default = 0.0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "default":
                if len(parts) != 2:
                    raise ValueError(f"bad default line {line!r}")
                default = float(parts[1])
            elif len(parts) == 3:
                rules[(int(parts[0]), int(parts[1]))] = float(parts[2])
            else:
                raise ValueError(f"bad rule line {line!r}")
    return custom_function(rules, default, label=f"custom:{path}")


def parse_function(descriptor: str) -> AdditiveFunction:
    """CLI descriptors: omega | big-omega | omega_y:<t> | custom:<path>."""
    d = descriptor.strip()
    if d == "omega":
        return omega()
    if d in ("big-omega", "big_omega"):
        return big_omega()
    if d.startswith("omega_y:"):
        return omega_y(float(d.split(":", 1)[1]))
    if d.startswith("custom:"):
        return load_custom_function(d.split(":", 1)[1])
    raise ValueError(f"unknown additive function descriptor {descriptor!r}")


def eval_f(f: AdditiveFunction, factorization) -> float:
    """Sum of f over the prime powers of a complete factorization."""
    return float(sum(f.on_prime_power(p, nu) for p, nu in factorization))


def eval_at(f: AdditiveFunction, n: int) -> float:
    """f(n) for an integer n, via f(-n) = f(n) and f(0) = 0."""
    n = abs(int(n))
    if n <= 1:
        return 0.0
    return eval_f(f, factorize(n))


# ----------------------------------------------------------------------------
# E_f(x; r)
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class EfResult:
    x: float
    weight: str
    value: float


def _rho_of_primes(q: IntPolynomial, parr: np.ndarray,
                   seed: int = DEFAULT_SPLIT_SEED) -> np.ndarray:
    if q.degree <= _kernels.MAXD - 1:
        return _kernels.count_roots_primes(q.coeffs, parr, seed)
    from .polynomial import _roots_mod_p_python

    return np.array([len(_roots_mod_p_python(list(q.coeffs), int(p), seed))
                     for p in parr], dtype=np.int64)


def e_f(f: AdditiveFunction, x: float, weight: IntPolynomial | None = None,
        seed: int = DEFAULT_SPLIT_SEED) -> EfResult:
    """E_f(x; r) = 1 + sum over p <= x with f(p) != 0 of r(p)/p."""
    if x < 2:
        raise ValueError("x must be >= 2")
    parr = primes_up_to(int(x)).primes()
    if weight is None:
        w = np.ones(len(parr))
        desc = "unit"
    else:
        w = _rho_of_primes(weight, parr, seed).astype(float)
        desc = f"rho[{format_poly(weight)}]"
    if f.kind in ("omega", "big_omega"):
        mask = np.ones(len(parr), dtype=bool)
    elif f.kind == "omega_y":
        mask = parr <= f.threshold
    else:
        mask = np.array([f.on_prime_power(int(p), 1) != 0.0 for p in parr])
    value = 1.0 + float(np.sum(w[mask] / parr[mask]))
    return EfResult(x=float(x), weight=desc, value=value)


# ----------------------------------------------------------------------------
# Mertens-type deviations
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class MertensDeviation:
    member: str
    X: float
    grid: tuple[float, ...]
    log_points: tuple[float, ...]   # |sum rho(p)/p - loglog t| per grid point
    li_points: tuple[float, ...]    # |sum rho(p) - li(t)| per grid point
    dev_log: float                  # max of log_points
    dev_li: float                   # max of li_points (raw, unrescaled)
    terminal_dev_log: float         # deviation at the top of the grid


def default_deviation_grid(X: float) -> tuple[float, ...]:
    pts = []
    t = 10.0
    while t <= X:
        pts.append(t)
        t *= 10.0
    if not pts or pts[-1] != X:
        pts.append(float(X))
    return tuple(p for p in pts if 10.0 <= p <= X)


def mertens_deviation(family: PolynomialFamily, j: int, X: float,
                      grid=None, seed: int = DEFAULT_SPLIT_SEED) -> MertensDeviation:
    """Empirical M_j / M'_j content: deviations of the rho-weighted prime sums
    from loglog t and li(t) on the sample grid."""
    if X < 10:
        raise ValueError("X must be >= 10")
    grid = tuple(sorted(set(float(t) for t in (grid if grid is not None
                                               else default_deviation_grid(X)))))
    if not grid:
        raise EmptyGrid("deviation grid is empty")
    if grid[0] < 10 or grid[-1] > X:
        raise ValueError("grid must lie inside [10, X]")
    q = family.members[j]
    parr = primes_up_to(int(X)).primes()
    rho = _rho_of_primes(q, parr, seed).astype(float)
    cum_ratio = np.cumsum(rho / parr)
    cum_count = np.cumsum(rho)
    log_pts = []
    li_pts = []
    for t in grid:
        idx = int(np.searchsorted(parr, t, side="right"))
        s1 = float(cum_ratio[idx - 1]) if idx else 0.0
        s2 = float(cum_count[idx - 1]) if idx else 0.0
        log_pts.append(abs(s1 - math.log(math.log(t))))
        li_pts.append(abs(s2 - li(t)))
    return MertensDeviation(
        member=format_poly(q), X=float(X), grid=grid,
        log_points=tuple(log_pts), li_points=tuple(li_pts),
        dev_log=max(log_pts), dev_li=max(li_pts),
        terminal_dev_log=log_pts[-1],
    )


# ----------------------------------------------------------------------------
# condition (*) audit
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class StarConditionReport:
    function: str
    t: int
    u: int
    cap: float
    values: tuple[float, ...]
    count: int
    bound: float
    passed: bool


def star_condition_check(f: AdditiveFunction, t: int, u: int,
                         V: float) -> StarConditionReport:
    """Enumerates n <= t^u with P^-(n) > t (n = 1 included) and compares the
    number of distinct f-values against V^u."""
    if t < 2:
        raise ValueError("t must be >= 2")
    N = int(t) ** int(u)
    if N > STAR_SCALE_CAP:
        raise CapacityError(f"t^u = {N} beyond desk scale {STAR_SCALE_CAP}")
    rough = np.ones(N + 1, dtype=bool)
    rough[0] = False
    table = primes_up_to(max(N, 2))
    for p in table.primes():
        p = int(p)
        if p > t:
            break
        rough[p::p] = False
    values = {0.0}  # n = 1: empty product
    spf_table = table
    for n in np.nonzero(rough)[0]:
        n = int(n)
        if n == 1:
            continue
        values.add(eval_f(f, factorize_small(n, spf_table)))
    bound = float(V) ** u
    vals = tuple(sorted(values))
    return StarConditionReport(
        function=f.descriptor(), t=int(t), u=int(u), cap=float(N),
        values=vals, count=len(vals), bound=bound, passed=len(vals) <= bound,
    )


# ----------------------------------------------------------------------------
# (beta D / phi_0(beta D)) factor
# ----------------------------------------------------------------------------

def beta_d_factor(family: PolynomialFamily) -> float:
    """|beta D| / phi_0(|beta D|); raises DegenerateFactor when phi_0 vanishes."""
    bd = abs(family.beta_d)
    if bd == 1:
        return 1.0
    value = Fraction(1)
    for p, _ in factorize(bd):
        r0 = family.rho0(p)
        if r0 == p:
            raise DegenerateFactor(
                f"phi_0({bd}) = 0: rho_0({p}) = {p}", prime=p)
        value *= Fraction(p, p - r0)
    # value = prod_{p | bd} p/(p - rho_0(p)) = bd/phi_0(bd)
    return float(value)
