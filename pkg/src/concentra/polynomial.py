"""Exact integer polynomials: parsing, resultants, family validation, and
root counting modulo prime powers with Hensel lifting.

Coefficients are plain Python ints (capped at |c| < 2^31 by construction so
that residue arithmetic elsewhere stays inside 64-bit words); evaluation is
guarded against leaving the signed 128-bit range.  All functions are pure;
nothing here mutates shared state.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from ._arith import factorize, is_prime
from .errors import (
    CapacityError,
    CompositeModulus,
    FixedDivisor,
    NotIrreducible,
    NotPairwiseCoprime,
    PolynomialParseError,
    UnverifiedIrreducibility,
    ZeroDiscriminant,
)

MAX_COEFF = 2**31
EVAL_LIMIT = 2**127
BRUTE_FORCE_THRESHOLD = 2**13
DEFAULT_SPLIT_SEED = 0x1D872B41

_M64 = (1 << 64) - 1


@dataclass(frozen=True)
class IntPolynomial:
    """Univariate integer polynomial; coeffs[i] is the coefficient of x^i."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("degree must be at least 1")
        if self.coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        for c in self.coeffs:
            if not isinstance(c, int) or abs(c) >= MAX_COEFF:
                raise ValueError(f"coefficient {c!r} outside |c| < 2^31")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1]

    @property
    def height(self) -> int:
        """Max absolute coefficient."""
        return max(abs(c) for c in self.coeffs)

    @property
    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def __call__(self, n: int) -> int:
        return eval_poly(self, n)

    def __str__(self) -> str:
        return format_poly(self)


def poly(*coeffs_ascending: int) -> IntPolynomial:
    """Convenience constructor from ascending coefficients."""
    return IntPolynomial(tuple(coeffs_ascending))


# ----------------------------------------------------------------------------
# text format: "x^3 - 2" style, variable x, integer coefficients
# ----------------------------------------------------------------------------

_TERM_RE = re.compile(
    r"""^(?P<coef>\d+)?           # optional integer coefficient (sign handled outside)
        (?P<var>\*?[xX])?         # optional variable, optional '*'
        (?:\^(?P<exp>\d+))?$      # optional exponent
    """,
    re.VERBOSE,
)


def parse_poly(text: str) -> IntPolynomial:
    """Parse "x^3 - 2" style text into an IntPolynomial."""
    s = text.strip()
    if not s:
        raise PolynomialParseError("empty polynomial string")
    s = s.replace("-", "+-").replace(" ", "")
    if s.startswith("+"):
        s = s[1:]
    parts = [t for t in s.split("+") if t]
    if not parts:
        raise PolynomialParseError(f"no terms in {text!r}")
    terms: dict[int, int] = {}
    for part in parts:
        sign = 1
        body = part
        while body and body[0] == "-":
            sign = -sign
            body = body[1:]
        m = _TERM_RE.match(body)
        if not m or not body or (m.group("exp") and not m.group("var")):
            raise PolynomialParseError(f"bad term {part!r} in {text!r}")
        coef_s, var, exp_s = m.group("coef"), m.group("var"), m.group("exp")
        if coef_s is None and var is None:
            raise PolynomialParseError(f"bad term {part!r} in {text!r}")
        coef = sign * (int(coef_s) if coef_s is not None else 1)
        if var is None:
            exp = 0
        else:
            exp = int(exp_s) if exp_s else 1
        terms[exp] = terms.get(exp, 0) + coef
    deg = max(terms)
    coeffs = [terms.get(i, 0) for i in range(deg + 1)]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise PolynomialParseError(f"{text!r} has degree < 1")
    try:
        return IntPolynomial(tuple(coeffs))
    except ValueError as exc:
        raise PolynomialParseError(str(exc)) from exc


def format_poly(q: IntPolynomial) -> str:
    """Canonical printer; round-trips exactly through parse_poly."""
    out = []
    for i in range(q.degree, -1, -1):
        c = q.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            var = "x" if i == 1 else f"x^{i}"
            body = var if mag == 1 else f"{mag}{var}"
        out.append((sign, body))
    first_sign, first_body = out[0]
    s = ("-" if first_sign == "-" else "") + first_body
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


# ----------------------------------------------------------------------------
# evaluation and resultants
# ----------------------------------------------------------------------------

def eval_poly(q: IntPolynomial, n: int) -> int:
    """Horner evaluation; raises OverflowError outside the 128-bit range."""
    acc = 0
    for c in reversed(q.coeffs):
        acc = acc * n + c
        if abs(acc) >= EVAL_LIMIT:
            raise OverflowError(f"|{q}| at n={n} exceeds the 128-bit range")
    return acc


def derivative_coeffs(coeffs) -> list[int]:
    return [i * coeffs[i] for i in range(1, len(coeffs))]


def _bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free exact determinant (Bareiss)."""
    n = len(m)
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _sylvester(a: list[int], b: list[int]) -> list[list[int]]:
    # a, b ascending; matrix rows carry descending coefficients
    da, db = len(a) - 1, len(b) - 1
    n = da + db
    rows = []
    arow = list(reversed(a))
    brow = list(reversed(b))
    for i in range(db):
        rows.append([0] * i + arow + [0] * (n - da - 1 - i))
    for i in range(da):
        rows.append([0] * i + brow + [0] * (n - db - 1 - i))
    return rows


def resultant(a: IntPolynomial, b: IntPolynomial) -> int:
    """Res(a, b) as the Sylvester determinant, computed fraction-free."""
    return _bareiss_det(_sylvester(list(a.coeffs), list(b.coeffs)))


def _resultant_lists(a: list[int], b: list[int]) -> int:
    return _bareiss_det(_sylvester(a, b))


def discriminant(q: IntPolynomial) -> int:
    """disc(q) = (-1)^(g(g-1)/2) Res(q, q') / lead; degree 1 gives 1."""
    g = q.degree
    if g == 1:
        return 1
    res = _resultant_lists(list(q.coeffs), derivative_coeffs(q.coeffs))
    sign = -1 if (g * (g - 1) // 2) % 2 else 1
    return sign * res // q.lead


def _discriminant_coeffs(coeffs: list[int]) -> int:
    g = len(coeffs) - 1
    if g == 1:
        return 1
    res = _resultant_lists(coeffs, derivative_coeffs(coeffs))
    sign = -1 if (g * (g - 1) // 2) % 2 else 1
    return sign * res // coeffs[-1]


def poly_product(ps) -> list[int]:
    out = [1]
    for q in ps:
        nxt = [0] * (len(out) + len(q.coeffs) - 1)
        for i, a in enumerate(out):
            if a:
                for j, b in enumerate(q.coeffs):
                    nxt[i + j] += a * b
        out = nxt
    return out


# ----------------------------------------------------------------------------
# arithmetic in F_p[X] (ascending coefficient lists, trailing zeros stripped)
# ----------------------------------------------------------------------------

def _pp_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pp_monic(a, p):
    inv = pow(a[-1], p - 2, p)
    return [(c * inv) % p for c in a]


def _pp_divmod(a, b, p):
    # b monic
    a = a[:]
    db = len(b) - 1
    q = [0] * max(len(a) - db, 0)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            q[k - db] = c
            for i in range(db + 1):
                a[k - db + i] = (a[k - db + i] - c * b[i]) % p
    return _pp_trim(q), _pp_trim(a[:db])


def _pp_gcd(a, b, p):
    a, b = _pp_trim(a[:]), _pp_trim(b[:])
    while b:
        b = _pp_monic(b, p)
        _, r = _pp_divmod(a, b, p)
        a, b = b, r
    return _pp_monic(a, p) if a else []


def _pp_mulmod(a, b, f, p):
    # f monic; result reduced mod f
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    _, r = _pp_divmod(prod, f, p)
    return r


def _pp_powmod(base, e, f, p):
    result = [1]
    b = base[:]
    while e > 0:
        if e & 1:
            result = _pp_mulmod(result, b, f, p)
        e >>= 1
        if e:
            b = _pp_mulmod(b, b, f, p)
    return result


def _splitmix_next(state: int):
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return state, (z ^ (z >> 31))


def _split_linear(h, p, state, out):
    # h: monic product of distinct linear factors; collects roots into out
    stack = [h]
    while stack:
        g = stack.pop()
        d = len(g) - 1
        if d <= 0:
            continue
        if d == 1:
            out.append((p - g[0]) % p)
            continue
        while True:
            state, z = _splitmix_next(state)
            a = z % p
            w = _pp_powmod([a, 1], (p - 1) // 2, g, p)
            w = w[:] if w else [0]
            w[0] = (w[0] - 1) % p
            u = _pp_gcd(_pp_trim(w), g, p)
            du = len(u) - 1
            if 0 < du < d:
                q, _ = _pp_divmod(g, u, p)
                stack.append(u)
                stack.append(q)
                break
    return state


def _roots_mod_p_python(coeffs, p: int, seed: int) -> list[int]:
    """Reference root finder mod p; brute scan below the threshold, else
    gcd(X^p - X, Q) with seeded randomized splitting."""
    c = [x % p for x in coeffs]
    _pp_trim(c)
    if not c:
        raise ArithmeticError("polynomial vanishes identically mod p")
    if len(c) == 1:
        return []
    if p < BRUTE_FORCE_THRESHOLD:
        roots = []
        for r in range(p):
            acc = 0
            for cc in reversed(c):
                acc = (acc * r + cc) % p
            if acc == 0:
                roots.append(r)
        return roots
    f = _pp_monic(c, p)
    xp = _pp_powmod([0, 1], p, f, p)
    g = xp[:] if xp else [0]
    while len(g) < 2:
        g.append(0)
    g[1] = (g[1] - 1) % p
    h = _pp_gcd(_pp_trim(g), f, p)
    if len(h) <= 1:
        return []
    out: list[int] = []
    _split_linear(h, p, seed ^ (p * 0x9E3779B9), out)
    out.sort()
    return out


# ----------------------------------------------------------------------------
# public root-counting operations
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class RootsModPrimePower:
    """Roots of a polynomial in Z/p^nu Z, sorted."""

    p: int
    nu: int
    roots: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.roots)


def roots_mod_p(q: IntPolynomial, p: int, seed: int = DEFAULT_SPLIT_SEED) -> list[int]:
    """Sorted residues r in [0, p) with q(r) = 0 mod p."""
    if p < 2 or not is_prime(p):
        raise CompositeModulus(f"{p} is not prime")
    return _roots_mod_p_python(q.coeffs, p, seed)


def lift_roots(q: IntPolynomial, p: int, nu: int,
               seed: int = DEFAULT_SPLIT_SEED) -> RootsModPrimePower:
    """Hensel lifting: full sorted root set mod p^nu.

    Non-singular roots (q'(r) != 0 mod p) lift uniquely by the Newton step;
    singular roots lift to 0 or p children per level.
    """
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if p < 2 or not is_prime(p):
        raise CompositeModulus(f"{p} is not prime")
    if p**nu > 2**63:
        raise OverflowError(f"p^nu = {p}^{nu} exceeds the working width")
    dcoeffs = derivative_coeffs(q.coeffs)

    def qval(n, m):
        acc = 0
        for c in reversed(q.coeffs):
            acc = (acc * n + c) % m
        return acc

    def dval(n):
        acc = 0
        for c in reversed(dcoeffs):
            acc = (acc * n + c) % p
        return acc

    level = _roots_mod_p_python(q.coeffs, p, seed)
    pk = p
    for _ in range(1, nu):
        pk1 = pk * p
        nxt = []
        for r in level:
            d = dval(r)
            if d != 0:
                # unique Newton lift: r - q(r) * inv(q'(r)) mod p^{k+1}
                val = qval(r, pk1)
                inv = pow(d, p - 2, p)
                t = ((val // pk) * inv) % p
                nxt.append((r - t * pk) % pk1)
            else:
                if qval(r, pk1) == 0:
                    nxt.extend(r + t * pk for t in range(p))
        if len(nxt) > 10**6:
            raise CapacityError("root set exceeds 10^6 residues")
        level = nxt
        pk = pk1
    level.sort()
    return RootsModPrimePower(p=p, nu=nu, roots=tuple(level))


def rho(q: IntPolynomial, m: int, seed: int = DEFAULT_SPLIT_SEED) -> int:
    """Number of roots of q in Z/mZ; multiplicative over the factorization."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return 1
    out = 1
    for p, nu in factorize(m):
        out *= lift_roots(q, p, nu, seed).count
        if out == 0:
            return 0
    return out


def phi_j(q: IntPolynomial, n: int, seed: int = DEFAULT_SPLIT_SEED) -> Fraction:
    """n * prod_{p | n} (1 - rho(p)/p) as an exact rational; may be 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = Fraction(n)
    for p, _ in factorize(n) if n > 1 else []:
        out *= Fraction(p - len(roots_mod_p(q, p, seed)), p)
    return out


def rho_bound1_holds(g: int, p: int, nu: int, rho_p: int, count: int) -> bool:
    """Bound rho(p^nu) <= min(g p^{nu-1}, g p^{nu-nu/g}, p^{nu-1} rho(p)).

    The middle term is checked exactly via count^g <= g^g * p^{nu(g-1)}.
    """
    if count > g * p ** (nu - 1):
        return False
    if count**g > g**g * p ** (nu * (g - 1)):
        return False
    if count > p ** (nu - 1) * rho_p:
        return False
    return True


def rho_bound2_holds(g: int, p: int, counts_by_nu: list[int]) -> bool:
    """For p not dividing the discriminant: rho(p^{nu+1}) <= rho(p^nu) <= min(g, p-1)."""
    if not counts_by_nu:
        return True
    if counts_by_nu[0] > min(g, p - 1):
        return False
    for a, b in zip(counts_by_nu, counts_by_nu[1:]):
        if b > a:
            return False
    return True


# ----------------------------------------------------------------------------
# irreducibility over Q (exact for degree <= 4, heuristic certificate above)
# ----------------------------------------------------------------------------

def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return sorted(out)


def _has_rational_root(coeffs) -> bool:
    if coeffs[0] == 0:
        return True
    lead, const = coeffs[-1], coeffs[0]
    for u in _divisors(const):
        for v in _divisors(lead):
            if gcd(u, v) != 1:
                continue
            for uu in (u, -u):
                # value of q(uu/v) times v^deg
                acc = 0
                g = len(coeffs) - 1
                for i in range(g, -1, -1):
                    acc = acc * uu + coeffs[i] * v ** (g - i)
                if acc == 0:
                    return True
    return False


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def _quartic_has_quadratic_factor(coeffs) -> bool:
    # primitive quartic, no rational root; normalize lead > 0
    q = list(coeffs) if coeffs[-1] > 0 else [-c for c in coeffs]
    q0, q1, q2, q3, q4 = q
    for a in _divisors(q4):
        if q4 % a:
            continue
        d = q4 // a
        for c in _divisors(q0) + [-x for x in _divisors(q0)]:
            if c == 0 or q0 % c:
                continue
            f = q0 // c
            # (a x^2 + b x + c)(d x^2 + e x + f): solve for integer b, e
            det = d * c - f * a
            if det != 0:
                bn = q3 * c - a * q1
                en = d * q1 - q3 * f
                if bn % det or en % det:
                    continue
                b, e = bn // det, en // det
                if a * f + c * d + b * e == q2:
                    return True
            else:
                # degenerate line: eliminate e, leaving d b^2 - q3 b + a(q2 - af - cd) = 0
                A2, B2, C2 = d, -q3, a * (q2 - a * f - c * d)
                disc = B2 * B2 - 4 * A2 * C2
                if not _is_square(disc):
                    continue
                s = isqrt(disc)
                for num in (-B2 + s, -B2 - s):
                    if num % (2 * A2):
                        continue
                    b = num // (2 * A2)
                    if (q3 - d * b) % a:
                        continue
                    e = (q3 - d * b) // a
                    if f * b + c * e == q1 and a * f + c * d + b * e == q2:
                        return True
    return False


def _irreducible_mod_p(coeffs, p: int) -> bool:
    c = [x % p for x in coeffs]
    g = len(c) - 1
    if c[-1] == 0:
        return False
    f = _pp_monic(c, p)
    df = _pp_trim([(i * f[i]) % p for i in range(1, len(f))])
    if len(_pp_gcd(f[:], df, p)) != 1:
        return False
    t = [0, 1]
    for _ in range(g // 2):
        t = _pp_powmod(t, p, f, p)
        u = t[:] if t else [0]
        while len(u) < 2:
            u.append(0)
        u[1] = (u[1] - 1) % p
        if len(_pp_gcd(_pp_trim(u[:]), f, p)) != 1:
            return False
    return True


def check_irreducible(q: IntPolynomial) -> None:
    """Raises NotIrreducible / UnverifiedIrreducibility unless q is certified
    irreducible over Q.  Exact for degree <= 4."""
    g = q.degree
    coeffs = list(q.coeffs)
    if g == 1:
        return
    if g == 2:
        if _is_square(coeffs[1] ** 2 - 4 * coeffs[2] * coeffs[0]):
            raise NotIrreducible(f"{q} has a rational root")
        return
    if _has_rational_root(coeffs):
        raise NotIrreducible(f"{q} has a rational root")
    if g == 3:
        return
    if g == 4:
        if _quartic_has_quadratic_factor(coeffs):
            raise NotIrreducible(f"{q} splits into two quadratics")
        return
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
              61, 67, 71, 73, 79, 83, 89, 97):
        if q.lead % p != 0 and _irreducible_mod_p(coeffs, p):
            return
    raise UnverifiedIrreducibility(
        f"{q}: no p <= 100 certifies irreducibility (degree >= 5 heuristic)")


# ----------------------------------------------------------------------------
# family validation
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PolynomialFamily:
    """Validated family {Q_j}: irreducible, pairwise coprime, no fixed divisor."""

    members: tuple[IntPolynomial, ...]
    product_coeffs: tuple[int, ...]
    disc: int
    lead: int
    fixed_divisor_primes: tuple[int, ...] = field(default=())

    @property
    def r(self) -> int:
        return len(self.members)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(q.degree for q in self.members)

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    @property
    def beta_d(self) -> int:
        return self.lead * self.disc

    def product_eval(self, n: int) -> int:
        acc = 0
        for c in reversed(self.product_coeffs):
            acc = acc * n + c
        return acc

    def rho0(self, p: int, seed: int = DEFAULT_SPLIT_SEED) -> int:
        """Root count of the product polynomial mod p."""
        if not is_prime(p):
            raise CompositeModulus(f"{p} is not prime")
        return len(_roots_mod_p_python(self.product_coeffs, p, seed))

    def key(self) -> str:
        return ";".join(format_poly(q) for q in self.members)

    def __str__(self) -> str:
        return "{" + ", ".join(format_poly(q) for q in self.members) + "}"


def validate_family(members) -> PolynomialFamily:
    """Checks every standing hypothesis and returns the validated family.

    Raises NotIrreducible, NotPairwiseCoprime, FixedDivisor or
    ZeroDiscriminant with a diagnostic naming the failed invariant.  A
    whole-family fixed divisor (rho_0(p) = p) is only warned about, since the
    motivating family {x, x+1} has one at p = 2.
    """
    members = tuple(members)
    if not members:
        raise ValueError("family must contain at least one polynomial")
    for q in members:
        check_irreducible(q)
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if resultant(members[i], members[j]) == 0:
                raise NotPairwiseCoprime(
                    f"{members[i]} and {members[j]} share a rational factor")
    for q in members:
        if q.content != 1:
            p = factorize(q.content)[0][0]
            raise FixedDivisor(f"{q}: content divisible by {p}")
        for p in _primes_up_to_small(q.degree):
            if len(_roots_mod_p_python(q.coeffs, p, DEFAULT_SPLIT_SEED)) == p:
                raise FixedDivisor(f"{q}: value always divisible by {p}")
    prod = poly_product(members)
    disc = _discriminant_coeffs(prod)
    if disc == 0:
        raise ZeroDiscriminant("product polynomial has a repeated factor")
    lead = prod[-1]
    g = len(prod) - 1
    fixed = []
    for p in _primes_up_to_small(g):
        if len(_roots_mod_p_python(prod, p, DEFAULT_SPLIT_SEED)) == p:
            fixed.append(p)
    if fixed:
        warnings.warn(
            f"family product has fixed prime divisor(s) {fixed}; "
            "per-member hypothesis still holds", stacklevel=2)
    return PolynomialFamily(
        members=members,
        product_coeffs=tuple(prod),
        disc=disc,
        lead=lead,
        fixed_divisor_primes=tuple(fixed),
    )


def family_from_strings(text: str) -> PolynomialFamily:
    """Parse a semicolon-separated family like "x;x+1"."""
    return validate_family(parse_poly(part) for part in text.split(";") if part.strip())


def _primes_up_to_small(n: int) -> list[int]:
    return [p for p in (2, 3, 5, 7, 11, 13, 17, 19) if p <= n]


def max_abs_over_interval(q: IntPolynomial, lo: int, hi: int) -> int:
    """Exact max of |q(n)| over integers n in [lo, hi].

    The maximum sits at an endpoint or next to a real critical point, since q
    is monotone between consecutive zeros of q'.
    """
    if lo > hi:
        raise ValueError("empty interval")
    candidates = {lo, hi}
    dcoeffs = derivative_coeffs(q.coeffs)
    if len(dcoeffs) > 1:
        import numpy as np

        roots = np.roots(list(reversed(dcoeffs)))
        for z in roots:
            if abs(z.imag) < 1e-9:
                base = int(z.real)
                for n in (base - 1, base, base + 1, base + 2):
                    if lo <= n <= hi:
                        candidates.add(n)
    return max(abs(eval_poly(q, n)) for n in candidates)
