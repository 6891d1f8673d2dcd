"""Computable surface of the two analytic lemmas: the oscillatory integral
bound, friable sets S(x, y), weighted concentration sums, characteristic sums
R(t), and the Fourier-inversion identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quad import adaptive_quad
from .additive import AdditiveFunction, eval_f
from .errors import CapacityError, NonIntegerValues
from .polynomial import PolynomialFamily, lift_roots
from .sieve import primes_up_to

FRIABLE_CAP = 2_000_000


# ----------------------------------------------------------------------------
# the oscillatory integral of Lemme 1
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class BConfig:
    """Finitely supported map n -> B_n >= 0 on nonzero integers."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        seen = set()
        for n, b in self.entries:
            if n == 0:
                raise ValueError("frequency 0 not allowed")
            if b < 0:
                raise ValueError(f"B_{n} = {b} negative")
            if n in seen:
                raise ValueError(f"duplicate frequency {n}")
            seen.add(n)
        if len(self.entries) > 1000:
            raise CapacityError("support larger than 10^3")
        if any(b > 1e6 for _, b in self.entries):
            raise CapacityError("B_n above 10^6")

    @classmethod
    def from_dict(cls, d) -> "BConfig":
        return cls(tuple(sorted((int(n), float(b)) for n, b in d.items())))

    @property
    def total(self) -> float:
        return float(sum(b for _, b in self.entries))

    def s_of(self, t: np.ndarray) -> np.ndarray:
        s = np.zeros_like(t, dtype=float)
        for n, b in self.entries:
            if b:
                s += b * np.sin(math.pi * n * t) ** 2
        return s


@dataclass(frozen=True)
class IntegralCheck:
    integral: float
    ratio: float        # integral * sqrt(1 + sum B_n)
    error: float


def integral_lemma_check(cfg: BConfig, tolerance: float = 1e-10) -> IntegralCheck:
    """I = int_0^1 (1 + S(t)) e^{-S(t)} dt with S(t) = sum sin^2(pi n t) B_n.

    The lemma predicts I * sqrt(1 + sum B_n) stays bounded; the fitted
    constant is reported, not assumed.
    """
    def integrand(t):
        s = cfg.s_of(np.asarray(t, dtype=float))
        return (1.0 + s) * np.exp(-s)

    value, err = adaptive_quad(integrand, 0.0, 1.0, abs_tol=tolerance)
    return IntegralCheck(integral=value,
                         ratio=value * math.sqrt(1.0 + cfg.total),
                         error=err)


def single_b_identity(B: float, tolerance: float = 1e-10) -> tuple[float, float]:
    """Both sides of int_0^1 e^{-sin^2(pi t) B} dt
    = (2/pi) int_0^sqrt(B) e^{-u^2} / sqrt(B - u^2) du.

    The right side is evaluated after u = sqrt(B) sin(theta), which removes
    the endpoint singularity exactly.
    """
    if B <= 0:
        raise ValueError("B must be positive")

    def lhs_f(t):
        return np.exp(-B * np.sin(math.pi * np.asarray(t)) ** 2)

    def rhs_f(theta):
        return np.exp(-B * np.sin(np.asarray(theta)) ** 2)

    lhs, _ = adaptive_quad(lhs_f, 0.0, 1.0, abs_tol=tolerance)
    rhs_raw, _ = adaptive_quad(rhs_f, 0.0, math.pi / 2.0, abs_tol=tolerance)
    return lhs, 2.0 / math.pi * rhs_raw


def lemma1_suite(n_configs: int = 200, seed: int = 42, support_max: int = 20,
                 freq_bound: int = 50, mag_lo: float = 1e-2,
                 mag_hi: float = 1e4, tolerance: float = 1e-10) -> dict:
    """Seeded random sweep of BConfigs; reports per-config ratios and the
    empirical max (the paper's implicit constant is not asserted)."""
    rng = np.random.default_rng(seed)
    rows = []
    max_ratio = 0.0
    max_integral = 0.0
    for i in range(n_configs):
        k = int(rng.integers(1, support_max + 1))
        freqs: set[int] = set()
        while len(freqs) < k:
            n = int(rng.integers(-freq_bound, freq_bound + 1))
            if n != 0:
                freqs.add(n)
        mags = 10.0 ** rng.uniform(math.log10(mag_lo), math.log10(mag_hi), size=k)
        cfg = BConfig.from_dict(dict(zip(sorted(freqs), mags)))
        res = integral_lemma_check(cfg, tolerance)
        max_ratio = max(max_ratio, res.ratio)
        max_integral = max(max_integral, res.integral)
        rows.append({
            "seed": [int(seed), i],
            "support": sorted(freqs),
            "sumB": cfg.total,
            "integral": res.integral,
            "ratio": res.ratio,
        })
    return {
        "configs": rows,
        "summary": {"maxRatio": max_ratio, "maxIntegral": max_integral,
                    "configCount": n_configs},
    }


# ----------------------------------------------------------------------------
# friable sets and weighted concentration
# ----------------------------------------------------------------------------

@dataclass
class FriableSet:
    """All n <= x with P^+(n) <= y, with factorizations; 1 is always present."""

    x: int
    y: float
    values: np.ndarray
    factors: list[list[tuple[int, int]]]

    def __len__(self) -> int:
        return len(self.values)


def friable_set(x: float, y: float) -> FriableSet:
    """Exact enumeration by recursive generation over primes <= y."""
    xi = int(math.floor(x))
    if xi < 1:
        raise ValueError("x must be >= 1")
    if xi > 10**7:
        raise CapacityError("friable enumeration capped at x = 10^7")
    ps = [int(p) for p in primes_up_to(max(2, min(int(y), xi))).primes()
          if p <= y]
    out_vals = [1]
    out_facs: list[list[tuple[int, int]]] = [[]]

    def rec(idx: int, val: int, facs: list[tuple[int, int]]):
        if len(out_vals) > FRIABLE_CAP:
            raise CapacityError(f"friable set exceeds {FRIABLE_CAP} elements")
        for i in range(idx, len(ps)):
            p = ps[i]
            v = val * p
            e = 1
            while v <= xi:
                out_vals.append(v)
                out_facs.append(facs + [(p, e)])
                rec(i + 1, v, facs + [(p, e)])
                v *= p
                e += 1

    rec(0, 1, [])
    order = np.argsort(np.asarray(out_vals))
    values = np.asarray(out_vals, dtype=np.int64)[order]
    facs = [out_facs[i] for i in order]
    return FriableSet(x=xi, y=float(y), values=values, factors=facs)


class WeightFunction:
    """Multiplicative weight r >= 0 with r(1) = 1.

    Built-ins: "unit", and the rho-tilde rule tied to a family member:
    r(p^nu) = rho_j(p^nu) p^nu / phi(p^nu) away from beta*D, rho_j(p) at
    nu = 1 on beta*D, and 0 for higher powers of primes dividing beta*D.
    An optional nu_cap truncates all higher prime powers to 0.
    """

    def __init__(self, kind: str = "unit", family: PolynomialFamily | None = None,
                 member: int = 0, nu_cap: int | None = None):
        if kind not in ("unit", "rho_tilde"):
            raise ValueError(f"unknown weight kind {kind!r}")
        if kind == "rho_tilde" and family is None:
            raise ValueError("rho_tilde weight needs a family")
        self.kind = kind
        self.family = family
        self.member = member
        self.nu_cap = nu_cap
        self._cache: dict[tuple[int, int], float] = {}

    def describe(self) -> str:
        if self.kind == "unit":
            return "unit"
        return f"rho_tilde[{self.family.members[self.member]}]"

    def value(self, p: int, nu: int) -> float:
        if self.nu_cap is not None and nu > self.nu_cap:
            return 0.0
        if self.kind == "unit":
            return 1.0
        key = (p, nu)
        if key not in self._cache:
            q = self.family.members[self.member]
            bd = abs(self.family.beta_d)
            if bd % p == 0:
                if nu >= 2:
                    val = 0.0
                else:
                    val = float(len_roots(q, p))
            else:
                count = lift_roots(q, p, nu).count
                pn = p**nu
                val = count * pn / (pn - pn // p)
            self._cache[key] = val
        return self._cache[key]

    def on_factors(self, facs) -> float:
        out = 1.0
        for p, nu in facs:
            out *= self.value(p, nu)
            if out == 0.0:
                return 0.0
        return out


def len_roots(q, p: int) -> int:
    from .polynomial import roots_mod_p

    return len(roots_mod_p(q, p))


def unit_weight() -> WeightFunction:
    return WeightFunction("unit")


def _grouped(f: AdditiveFunction, r: WeightFunction, fset: FriableSet) -> dict[float, float]:
    groups: dict[float, float] = {}
    for val, facs in zip(fset.values, fset.factors):
        k = eval_f(f, facs)
        w = r.on_factors(facs)
        groups[k] = groups.get(k, 0.0) + w
    return groups


def weighted_concentration(f: AdditiveFunction, r: WeightFunction,
                           x: float, y: float,
                           fset: FriableSet | None = None) -> tuple[float, float]:
    """(sup over k of the r-weighted count in S(x, y) with f(n) = k, arg k).

    Ties break toward the smallest k for determinism.
    """
    if fset is None:
        fset = friable_set(x, y)
    groups = _grouped(f, r, fset)
    best_w = max(groups.values())
    best_k = min(k for k, w in groups.items() if w == best_w)
    return best_w, best_k


def char_sum(f: AdditiveFunction, r: WeightFunction, x: float, y: float,
             t: float, fset: FriableSet | None = None) -> complex:
    """R(t) = sum over S(x, y) of r(n) e^{2 i pi f(n) t}, grouped by f-value."""
    if fset is None:
        fset = friable_set(x, y)
    groups = _grouped(f, r, fset)
    out = 0j
    for k in sorted(groups):
        out += groups[k] * complex(math.cos(2 * math.pi * k * t),
                                   math.sin(2 * math.pi * k * t))
    return out


def fourier_inversion_check(f: AdditiveFunction, r: WeightFunction,
                            x: float, y: float, k: float,
                            fset: FriableSet | None = None) -> tuple[float, float]:
    """Integral side of sum_{n in S, f(n)=k} r(n) = int_0^1 R(t) e^{-2 i pi k t} dt
    versus the direct count.

    R is a trigonometric polynomial over the attained integer values, so the
    uniform grid with more than twice the bandwidth evaluates the integral
    exactly up to roundoff.
    """
    if fset is None:
        fset = friable_set(x, y)
    groups = _grouped(f, r, fset)
    for v in groups:
        if not float(v).is_integer():
            raise NonIntegerValues(f"attained value {v} is not an integer")
    if not float(k).is_integer():
        raise NonIntegerValues(f"target value {k} is not an integer")
    bandwidth = max((abs(int(v)) for v in groups), default=0)
    n_grid = 2 * max(bandwidth, abs(int(k))) + 8
    ts = np.arange(n_grid) / n_grid
    rt = np.zeros(n_grid, dtype=complex)
    for v in sorted(groups):
        rt += groups[v] * np.exp(2j * math.pi * v * ts)
    integral = float(np.real(np.mean(rt * np.exp(-2j * math.pi * k * ts))))
    exact = float(groups.get(float(k), 0.0))
    return integral, exact
