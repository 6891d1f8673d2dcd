"""Joint concentration tables for (f_1(Q_1(n)), ..., f_r(Q_r(n))) over
(x, x+y], sup extraction, and the empirical upper/lower bound reports.

Bound checks are stability-of-ratio properties: the theorems carry
unspecified constants, so reports expose the fitted ratios and the callers
(verify suites) assert bands across decades.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

from . import _kernels
from ._arith import factorize
from .additive import AdditiveFunction, e_f, eval_f, omega_y
from .errors import CapacityError, EmptyTable, RangeError
from .polynomial import (
    DEFAULT_SPLIT_SEED,
    IntPolynomial,
    PolynomialFamily,
    eval_poly,
    format_poly,
    lift_roots,
    max_abs_over_interval,
    roots_mod_p,
)
from .sieve import SEGMENT, interval_bounds, interval_factorize, primes_up_to

DEFAULT_EPSILON = 0.5
DEFAULT_DELTA = 0.5
DEFAULT_LAMBDA = 0.5
DEFAULT_C = 10.0
DEFAULT_W = 11
DEFAULT_QUANT_STEP = 1e-9

_KERNEL_VALUE_LIMIT = 1 << 62
_FAST_SIEVE_CAP = 1 << 26
_EQ6_CAPS = {1: 10**7, 2: 10**6, 3: 500}
_POISSON_CAP = 10**7


# ----------------------------------------------------------------------------
# tables
# ----------------------------------------------------------------------------

@dataclass
class ConcentrationTable:
    """Joint histogram of attained value tuples over (x, x+y]."""

    family: PolynomialFamily
    functions: tuple[AdditiveFunction, ...]
    x: float
    y: float
    counts: dict[tuple, int]
    total: int
    excluded: int
    quant_step: float = DEFAULT_QUANT_STEP

    def interval_length(self) -> int:
        _, m = interval_bounds(self.x, self.y)
        return m

    def sorted_items(self):
        return sorted(self.counts.items())


def _function_threshold(f: AdditiveFunction) -> int:
    if f.kind != "omega_y":
        return 0
    if math.isinf(f.threshold):
        return 1 << 62
    return int(math.floor(f.threshold))


def _fast_path_ok(family: PolynomialFamily, functions) -> bool:
    if any(f.kernel_kind is None for f in functions):
        return False
    return all(q.degree <= _kernels.MAXD - 1 for q in family.members)


def _member_sieve_data(q: IntPolynomial, n0: int, n1: int, seed: int):
    """Primes up to sqrt(max|Q|) and the root CSR for the kernel sieve."""
    maxabs = max_abs_over_interval(q, n0, n1)
    height_bound = q.height * (q.degree + 1) * max(abs(n0), abs(n1), 1) ** q.degree
    if height_bound >= _KERNEL_VALUE_LIMIT:
        raise OverflowError(f"|{q}| over [{n0}, {n1}] exceeds the int64 sieve range")
    bound = max(isqrt(maxabs), 2)
    if bound > _FAST_SIEVE_CAP:
        raise CapacityError(f"sieve bound {bound} beyond fast-path cap")
    parr = primes_up_to(bound).primes()
    offsets, flat = _kernels.roots_csr(q.coeffs, parr, seed)
    return parr, offsets, flat


def build_table(family: PolynomialFamily, functions, x: float, y: float,
                quant_step: float = DEFAULT_QUANT_STEP,
                seed: int = DEFAULT_SPLIT_SEED) -> ConcentrationTable:
    """Exact joint histogram; keys are tuples of attained f-values.

    Builtin integer-valued functions stream through the sieve kernels in
    2^20-entry segments; custom functions fall back to materialized
    factorizations per segment (slow, intended for moderate y).
    """
    functions = tuple(functions)
    if len(functions) != family.r:
        raise ValueError("one additive function per family member required")
    n0, m = interval_bounds(x, y)
    counts: dict[tuple, int] = {}
    excluded = 0
    if m == 0:
        return ConcentrationTable(family, functions, x, y, counts, 0, 0, quant_step)
    if _fast_path_ok(family, functions):
        data = [_member_sieve_data(q, n0, n0 + m - 1, seed) for q in family.members]
        kinds = [f.kernel_kind for f in functions]
        thrs = [_function_threshold(f) for f in functions]
        enc_counts: dict[int, int] = {}
        stride = 1 << 21
        for seg in range(n0, n0 + m, SEGMENT):
            seg_len = min(SEGMENT, n0 + m - seg)
            enc = np.zeros(seg_len, np.int64)
            bad = np.zeros(seg_len, bool)
            for j, q in enumerate(family.members):
                parr, offsets, flat = data[j]
                fv, ex, _ = _kernels.additive_segment(
                    seg, seg_len, q.coeffs, parr, offsets, flat,
                    kinds[j], thrs[j])
                bad |= ex.astype(bool)
                enc = enc * stride + fv
            good = ~bad
            excluded += int(np.count_nonzero(bad))
            keys, kcounts = np.unique(enc[good], return_counts=True)
            for kk, cc in zip(keys, kcounts):
                kk = int(kk)
                enc_counts[kk] = enc_counts.get(kk, 0) + int(cc)
        for kk, cc in enc_counts.items():
            parts = []
            for _ in range(family.r):
                parts.append(kk % stride)
                kk //= stride
            counts[tuple(reversed(parts))] = cc
    else:
        for seg in range(n0, n0 + m, SEGMENT):
            seg_len = min(SEGMENT, n0 + m - seg)
            fac = interval_factorize(family, seg - 1, seg_len, seed=seed)
            for i in range(seg_len):
                if any(fac.zero[j][i] for j in range(family.r)):
                    excluded += 1
                    continue
                key = []
                for j, f in enumerate(functions):
                    v = eval_f(f, fac.factors[j][i])
                    if f.integer_valued:
                        key.append(int(round(v)))
                    else:
                        key.append(round(v / quant_step) * quant_step)
                key = tuple(key)
                counts[key] = counts.get(key, 0) + 1
            del fac
    total = sum(counts.values())
    assert total + excluded == m
    return ConcentrationTable(family, functions, x, y, counts, total, excluded,
                              quant_step)


def sup_concentration(table: ConcentrationTable) -> tuple[tuple, int]:
    """(arg tuple, max count); ties break to the lexicographically smallest."""
    if not table.counts:
        raise EmptyTable("concentration table has no entries")
    best = max(table.counts.values())
    arg = min(k for k, c in table.counts.items() if c == best)
    return arg, best


def table_to_csv(table: ConcentrationTable, path) -> None:
    """CSV: header k_1..k_r,count; rows sorted by key."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"k_{j + 1}" for j in range(table.family.r)] + ["count"])
        for key, cnt in table.sorted_items():
            writer.writerow(list(key) + [cnt])


# ----------------------------------------------------------------------------
# bound reports
# ----------------------------------------------------------------------------

@dataclass
class BoundReport:
    x: float
    y: float
    sup: int
    arg: tuple
    e_values: tuple[float, ...]
    upper_reference: float      # y / prod sqrt(E_j)
    ratio_upper: float          # sup * prod sqrt(E_j) / y
    z: float
    parameters: dict
    observed_lower: int | None = None
    lower_key: tuple | None = None
    ratio_lower: float | None = None
    eq6_reference: float | None = None
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        out = {
            "x": self.x,
            "y": self.y,
            "sup": self.sup,
            "arg": list(self.arg),
            "E": list(self.e_values),
            "upper_reference": self.upper_reference,
            "ratio_upper": self.ratio_upper,
            "z": self.z,
            "parameters": self.parameters,
            "degenerate": self.degenerate,
        }
        if self.ratio_lower is not None:
            out["observed_lower"] = self.observed_lower
            out["lower_key"] = list(self.lower_key)
            out["ratio_lower"] = self.ratio_lower
        if self.eq6_reference is not None:
            out["eq6_reference"] = self.eq6_reference
        return out


def _e_values(family: PolynomialFamily, functions, x: float,
              seed: int) -> tuple[float, ...]:
    return tuple(e_f(f, x, weight=family.members[j], seed=seed).value
                 for j, f in enumerate(functions))


def upper_bound_report(family: PolynomialFamily, functions, x: float, y: float,
                       table: ConcentrationTable | None = None,
                       lam: float = DEFAULT_LAMBDA,
                       seed: int = DEFAULT_SPLIT_SEED) -> BoundReport:
    """sup * prod_j sqrt(E_{f_j}(x; rho_j)) / y; bounded ratios across scales
    are the empirical content of the upper-bound theorem."""
    functions = tuple(functions)
    if table is None:
        table = build_table(family, functions, x, y, seed=seed)
    evals = _e_values(family, functions, x, seed)
    if table.counts:
        arg, sup = sup_concentration(table)
    else:
        arg, sup = (), 0
    root = math.sqrt(math.prod(evals))
    upper_ref = y / root if y > 0 else 0.0
    ratio = sup * root / y if y > 0 else 0.0
    z = math.exp(math.log(x) ** (1.0 - lam)) if x > 1 else 1.0
    return BoundReport(
        x=float(x), y=float(y), sup=int(sup), arg=arg, e_values=evals,
        upper_reference=upper_ref, ratio_upper=ratio, z=z,
        parameters={"lambda": lam, "family": family.key(),
                    "functions": [f.descriptor() for f in functions]},
        degenerate=(y <= 0 or not table.counts),
    )


# ----------------------------------------------------------------------------
# lower-bound target and report
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LowerTarget:
    """Per member: y_j, y_j* = min(y_j, x^e), L_j, k_j = floor(L_j)."""

    y_js: tuple[float, ...]
    ystars: tuple[float, ...]
    L: tuple[float, ...]
    k: tuple[int, ...]
    w: int
    C: float
    epsilon: float
    ystar_exponent: float


def lower_target(family: PolynomialFamily, y_js, x: float,
                 epsilon: float = DEFAULT_EPSILON, w: int = DEFAULT_W,
                 C: float = DEFAULT_C, ystar_exponent: float | None = None,
                 seed: int = DEFAULT_SPLIT_SEED) -> LowerTarget:
    """Computes y_j*, L_j = sum_{w < p <= y_j*, p coprime to beta D} rho_j(p)/p
    and the target values k_j = floor(L_j).

    The cap exponent defaults to epsilon_0 / C with epsilon_0 = epsilon/(50 g);
    that choice needs astronomically large x before x^e reaches w, so desk
    runs override ystar_exponent explicitly.
    """
    y_js = tuple(float(v) for v in y_js)
    if len(y_js) != family.r:
        raise ValueError("one y_j per family member required")
    g = family.total_degree
    exponent = (ystar_exponent if ystar_exponent is not None
                else epsilon / (50.0 * g) / C)
    xcap = float(x) ** exponent
    if xcap < w:
        raise RangeError(
            f"x^{exponent:.6g} = {xcap:.3f} < w = {w}; raise x or override "
            "ystar_exponent for desk-scale runs")
    bd = abs(family.beta_d)
    ystars = []
    Ls = []
    ks = []
    for j, yj in enumerate(y_js):
        ystar = min(yj, xcap)
        ystars.append(ystar)
        L = 0.0
        if ystar > w:
            parr = primes_up_to(max(int(ystar), 2)).primes()
            sel = [int(p) for p in parr if w < p <= ystar and bd % int(p) != 0]
            q = family.members[j]
            for p in sel:
                L += len(roots_mod_p(q, p, seed)) / p
        Ls.append(L)
        ks.append(int(math.floor(L)))
    return LowerTarget(y_js=y_js, ystars=tuple(ystars), L=tuple(Ls),
                       k=tuple(ks), w=int(w), C=float(C), epsilon=float(epsilon),
                       ystar_exponent=float(exponent))


def lower_bound_report(family: PolynomialFamily, x: float, y: float,
                       target: LowerTarget,
                       table: ConcentrationTable | None = None,
                       seed: int = DEFAULT_SPLIT_SEED) -> BoundReport:
    """Observed count at (k_1, ..., k_r) for f_j = omega_{y_j}, scaled by
    sqrt(prod E_{omega_{y_j}}(x; rho_j)) / y; the lower-bound theorem predicts
    this stays away from 0."""
    functions = tuple(omega_y(v) for v in target.y_js)
    if table is None:
        table = build_table(family, functions, x, y, seed=seed)
    evals = _e_values(family, functions, x, seed)
    key = tuple(target.k)
    observed = table.counts.get(key, 0)
    root = math.sqrt(math.prod(evals))
    degenerate = y <= 0 or not table.counts
    ratio = observed * root / y if y > 0 else 0.0
    sup_arg, sup = ((), 0) if not table.counts else sup_concentration(table)
    z = math.exp(math.log(x) ** (1.0 - DEFAULT_LAMBDA)) if x > 1 else 1.0
    return BoundReport(
        x=float(x), y=float(y), sup=int(sup), arg=sup_arg, e_values=evals,
        upper_reference=(y / root if y > 0 else 0.0),
        ratio_upper=(sup * root / y if y > 0 else 0.0), z=z,
        parameters={"w": target.w, "C": target.C, "epsilon": target.epsilon,
                    "ystar_exponent": target.ystar_exponent,
                    "y_js": list(target.y_js), "ystars": list(target.ystars),
                    "L": list(target.L), "family": family.key()},
        observed_lower=int(observed), lower_key=key, ratio_lower=ratio,
        degenerate=degenerate,
    )


# ----------------------------------------------------------------------------
# shared arithmetic arrays over 1..A
# ----------------------------------------------------------------------------

def _euler_phi_array(A: int, parr: np.ndarray) -> np.ndarray:
    phi = np.arange(A + 1, dtype=np.int64)
    for p in parr:
        p = int(p)
        phi[p::p] -= phi[p::p] // p
    return phi


def _squarefree_array(A: int, parr: np.ndarray) -> np.ndarray:
    sq = np.ones(A + 1, dtype=bool)
    sq[0] = False
    for p in parr:
        p = int(p)
        if p * p > A:
            break
        sq[p * p :: p * p] = False
    return sq


def _mobius_array(A: int, parr: np.ndarray) -> np.ndarray:
    mu = np.ones(A + 1, dtype=np.int64)
    mu[0] = 0
    for p in parr:
        p = int(p)
        mu[p::p] *= -1
        if p * p <= A:
            mu[p * p :: p * p] = 0
    return mu


def _rho_pk(q: IntPolynomial, p: int, k: int, cache: dict, seed: int) -> int:
    key = (p, k)
    if key not in cache:
        cache[key] = lift_roots(q, p, k, seed).count
    return cache[key]


def _rho_array(q: IntPolynomial, A: int, parr: np.ndarray,
               seed: int) -> np.ndarray:
    """rho(a) for all a <= A, multiplicative over prime powers.

    Assigns each exponent layer exactly: multiples of p^k not p^{k+1} get the
    factor rho(p^k), which stays correct when lifting kills roots.
    """
    from .additive import _rho_of_primes

    rho1 = _rho_of_primes(q, parr, seed)
    out = np.ones(A + 1, dtype=np.int64)
    cache: dict[tuple[int, int], int] = {}
    for t, p in enumerate(parr):
        p = int(p)
        pk = p
        k = 1
        while pk <= A:
            rk = int(rho1[t]) if k == 1 else _rho_pk(q, p, k, cache, seed)
            nxt = pk * p
            idx = np.arange(pk, A + 1, pk, dtype=np.int64)
            exact = idx[(idx % nxt) != 0] if nxt <= A else idx
            if rk == 0:
                out[exact] = 0
            elif rk != 1:
                out[exact] *= rk
            pk = nxt
            k += 1
    return out


def _f_values_array(f: AdditiveFunction, A: int, parr: np.ndarray,
                    table) -> np.ndarray:
    if f.kind == "omega" or f.kind == "omega_y":
        thr = f.threshold if f.kind == "omega_y" else math.inf
        cnt = np.zeros(A + 1, dtype=np.int64)
        for p in parr:
            p = int(p)
            if p > thr:
                break
            cnt[p::p] += 1
        return cnt.astype(float)
    if f.kind == "big_omega":
        cnt = np.zeros(A + 1, dtype=np.int64)
        for p in parr:
            p = int(p)
            pk = p
            while pk <= A:
                cnt[pk::pk] += 1
                pk *= p
        return cnt.astype(float)
    from .sieve import factorize_small

    vals = np.zeros(A + 1, dtype=float)
    for a in range(2, A + 1):
        vals[a] = eval_f(f, factorize_small(a, table))
    return vals


def _coprime_mask(A: int, modulus: int) -> np.ndarray:
    mask = np.ones(A + 1, dtype=bool)
    mask[0] = False
    if modulus > 1:
        for p, _ in factorize(modulus):
            mask[p::p] = False
    return mask


# ----------------------------------------------------------------------------
# Eq. (6) right-hand side
# ----------------------------------------------------------------------------

def eq6_rhs_sum(family: PolynomialFamily, functions, x: float, epsilon: float,
                k, epsilon0: float | None = None, bound: int | None = None,
                enforce_pairwise: bool = True,
                seed: int = DEFAULT_SPLIT_SEED) -> float:
    """Joint sum over (a_1, ..., a_r) <= x^{epsilon_0} of
    prod_j rho_j(a_j) phi(a_j) / a_j^2 restricted to f_j(a_j) = k_j,
    (a_j, beta D) = 1, and pairwise coprime a's.

    Pairwise coprimality is enforced exactly by Moebius inclusion-exclusion
    over one shared squarefree divisor per pair; with enforce_pairwise=False
    the unconstrained product of sums is returned (an upper bound).
    """
    functions = tuple(functions)
    r = family.r
    if len(functions) != r or len(k) != r:
        raise ValueError("need one function and one k_j per member")
    if r > 3:
        raise CapacityError("joint coprimality limited to r <= 3")
    g = family.total_degree
    eps0 = epsilon0 if epsilon0 is not None else epsilon / (50.0 * g)
    A = int(bound) if bound is not None else int(float(x) ** eps0)
    cap = _EQ6_CAPS[r] if enforce_pairwise else _EQ6_CAPS[1]
    if A > cap:
        raise CapacityError(f"enumeration bound {A} beyond cap {cap} for r={r}")
    if A < 1:
        raise ValueError("enumeration bound below 1")
    table = primes_up_to(max(A, 2))
    parr = table.primes()
    parr = parr[parr <= A]
    phi = _euler_phi_array(A, parr)
    bd = abs(family.beta_d)
    mask = _coprime_mask(A, bd)
    a = np.arange(A + 1, dtype=float)
    a[0] = 1.0
    weights = []
    for j, f in enumerate(functions):
        rho_a = _rho_array(family.members[j], A, parr, seed)
        fv = _f_values_array(f, A, parr, table)
        sel = mask & (fv == float(k[j]))
        wj = np.where(sel, rho_a * phi / (a * a), 0.0)
        wj[0] = 0.0
        weights.append(wj)
    if not enforce_pairwise or r == 1:
        return float(math.prod(float(w.sum()) for w in weights))
    mu = _mobius_array(A, parr)
    sq = [d for d in range(1, A + 1) if mu[d] != 0]
    pairs = [(i, j) for i in range(r) for j in range(i + 1, r)]
    s_cache: dict[tuple[int, int], float] = {}

    def s_of(j: int, m: int) -> float:
        key = (j, m)
        if key not in s_cache:
            s_cache[key] = float(weights[j][m::m].sum())
        return s_cache[key]

    total = 0.0

    def rec(idx: int, lcms: list[int], sign: int):
        nonlocal total
        if idx == len(pairs):
            term = sign
            for j in range(r):
                term *= s_of(j, lcms[j])
                if term == 0:
                    return
            total += term
            return
        i, j = pairs[idx]
        for d in sq:
            li = lcms[i] * d // gcd(lcms[i], d)
            if li > A:
                continue
            lj = lcms[j] * d // gcd(lcms[j], d)
            if lj > A:
                continue
            old_i, old_j = lcms[i], lcms[j]
            lcms[i], lcms[j] = li, lj
            rec(idx + 1, lcms, sign * int(mu[d]))
            lcms[i], lcms[j] = old_i, old_j

    rec(0, [1] * r, 1)
    return float(total)


# ----------------------------------------------------------------------------
# Poisson profile (Lemme 3 shape)
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PoissonProfileReport:
    member: str
    x: float
    y_j: float
    ystar: float
    enumeration_bound: int
    L: float
    tail_sum: float          # sum_{ystar < p <= x, p coprime to beta D} rho(p)/p
    kprimes: tuple[int, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    ratios: tuple[float, ...]
    parameters: dict


def poisson_profile_check(family: PolynomialFamily, j: int, x: float,
                          y_j: float, w: int = DEFAULT_W, C: float = DEFAULT_C,
                          kprimes=None, epsilon: float = DEFAULT_EPSILON,
                          epsilon0: float | None = None,
                          seed: int = DEFAULT_SPLIT_SEED) -> PoissonProfileReport:
    """LHS: sum over squarefree n <= x^{epsilon_0} with omega_{y_j}(n) = k',
    (n, W beta D) = 1 of rho_j(n) phi(n) / n^2.  RHS: Poisson profile
    L^{k'}/k'! times exp of the remaining prime sum up to x."""
    g = family.total_degree
    eps0 = epsilon0 if epsilon0 is not None else epsilon / (50.0 * g)
    A = int(float(x) ** eps0)
    if A > _POISSON_CAP:
        raise CapacityError(f"enumeration bound {A} beyond {_POISSON_CAP}")
    if A < 2:
        raise ValueError("x^epsilon_0 too small to enumerate")
    ystar = min(float(y_j), float(x) ** (eps0 / C))
    q = family.members[j]
    bd = abs(family.beta_d)
    W = 1
    for p in primes_up_to(max(int(w), 2)).primes():
        if p <= w:
            W *= int(p)
    table = primes_up_to(A)
    parr = table.primes()
    phi = _euler_phi_array(A, parr)
    sq = _squarefree_array(A, parr)
    mask = _coprime_mask(A, W * bd) & sq
    rho_a = _rho_array(q, A, parr, seed)
    fv = np.zeros(A + 1, dtype=np.int64)
    for p in parr:
        p = int(p)
        if p > y_j:
            break
        fv[p::p] += 1
    a = np.arange(A + 1, dtype=float)
    a[0] = 1.0
    wgt = np.where(mask, rho_a * phi / (a * a), 0.0)

    # L and the tail prime sum, both with rho_j and the beta*D exclusion
    from .additive import _rho_of_primes

    big = primes_up_to(int(x)).primes()
    rho_p = _rho_of_primes(q, big, seed).astype(float)
    pf = big.astype(float)
    bd_ok = np.array([bd % int(p) != 0 for p in big]) if bd > 1 else np.ones(len(big), bool)
    selL = (big > w) & (pf <= ystar) & bd_ok
    L = float(np.sum(rho_p[selL] / pf[selL]))
    selT = (pf > ystar) & bd_ok
    tail = float(np.sum(rho_p[selT] / pf[selT]))

    if kprimes is None:
        kprimes = tuple(range(int(math.floor(L)) + 1))
    else:
        kprimes = tuple(int(v) for v in kprimes)
    lhs = []
    rhs = []
    ratios = []
    for kp in kprimes:
        lv = float(np.sum(wgt[fv == kp]))
        rv = L**kp / math.factorial(kp) * math.exp(tail)
        lhs.append(lv)
        rhs.append(rv)
        ratios.append(lv / rv if rv > 0 else math.inf)
    return PoissonProfileReport(
        member=format_poly(q), x=float(x), y_j=float(y_j), ystar=ystar,
        enumeration_bound=A, L=L, tail_sum=tail, kprimes=kprimes,
        lhs=tuple(lhs), rhs=tuple(rhs), ratios=tuple(ratios),
        parameters={"w": int(w), "C": float(C), "epsilon": float(epsilon),
                    "epsilon0": float(eps0), "W": W, "family": family.key()},
    )
