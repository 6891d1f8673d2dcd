"""Hot numeric kernels: root counting/extraction over prime batches and the
interval additive-value sieve.

Every kernel exists twice: a numba @njit version (module constants _nb_*) and
a pure numpy/Python fallback (_np_*).  The public dispatchers pick one based
on the CONCENTRA_NUMBA env flag resolved in _backend.  Both produce identical
integer outputs; the fallback is the reference implementation and is what the
benchmark script compares against.
"""

from __future__ import annotations

import numpy as np

from ._backend import USE_NUMBA
from .polynomial import BRUTE_FORCE_THRESHOLD, DEFAULT_SPLIT_SEED, _roots_mod_p_python

MAXD = 12          # coefficient slots; kernel path supports degree <= 11
_LEN = 2 * MAXD

KIND_OMEGA = 0
KIND_BIG_OMEGA = 1
KIND_OMEGA_Y = 2


def _check_kernel_poly(coeffs) -> np.ndarray:
    arr = np.asarray(coeffs, dtype=np.int64)
    if len(arr) > MAXD:
        raise ValueError(f"kernel path limited to degree <= {MAXD - 1}")
    return arr


# ============================================================================
# numba kernels
# ============================================================================

if USE_NUMBA:
    from numba import njit

    @njit(cache=True, inline="always")
    def _nb_powmod(a, e, p):
        r = 1
        a = a % p
        while e > 0:
            if e & 1:
                r = r * a % p
            a = a * a % p
            e >>= 1
        return r

    @njit(cache=True)
    def _nb_mulmod_poly(a, da, b, db, f, df, p):
        t = np.zeros(_LEN, np.int64)
        if da >= 0 and db >= 0:
            for i in range(da + 1):
                ai = a[i]
                if ai != 0:
                    for j in range(db + 1):
                        t[i + j] = (t[i + j] + ai * b[j]) % p
        dt = da + db
        while dt >= 0 and t[dt] == 0:
            dt -= 1
        for k in range(dt, df - 1, -1):
            c = t[k]
            if c != 0:
                for i in range(df + 1):
                    t[k - df + i] = (t[k - df + i] - c * f[i]) % p
        d = df - 1
        while d >= 0 and t[d] == 0:
            d -= 1
        return t, d

    @njit(cache=True)
    def _nb_powmod_poly(base, dbase, e, f, df, p):
        r = np.zeros(_LEN, np.int64)
        r[0] = 1
        dr = 0
        b = base.copy()
        db = dbase
        while e > 0:
            if e & 1:
                r, dr = _nb_mulmod_poly(r, dr, b, db, f, df, p)
            e >>= 1
            if e > 0:
                b, db = _nb_mulmod_poly(b, db, b, db, f, df, p)
        return r, dr

    @njit(cache=True)
    def _nb_gcd_poly(a, da, b, db, p):
        A = a.copy()
        dA = da
        B = b.copy()
        dB = db
        while dB >= 0:
            lc = B[dB]
            if lc != 1:
                inv = _nb_powmod(lc, p - 2, p)
                for i in range(dB + 1):
                    B[i] = B[i] * inv % p
            for k in range(dA, dB - 1, -1):
                c = A[k]
                if c != 0:
                    for i in range(dB + 1):
                        A[k - dB + i] = (A[k - dB + i] - c * B[i]) % p
            dnew = dB - 1
            while dnew >= 0 and A[dnew] == 0:
                dnew -= 1
            A, B = B, A
            dA, dB = dB, dnew
        if dA >= 0 and A[dA] != 1:
            inv = _nb_powmod(A[dA], p - 2, p)
            for i in range(dA + 1):
                A[i] = A[i] * inv % p
        return A, dA

    @njit(cache=True)
    def _nb_divrem(a, da, b, db, p):
        # b monic
        q = np.zeros(_LEN, np.int64)
        r = a.copy()
        for k in range(da, db - 1, -1):
            c = r[k]
            if c != 0:
                q[k - db] = c
                for i in range(db + 1):
                    r[k - db + i] = (r[k - db + i] - c * b[i]) % p
        dq = da - db
        while dq >= 0 and q[dq] == 0:
            dq -= 1
        return q, dq

    @njit(cache=True)
    def _nb_reduce_coeffs(coeffs, p):
        c = np.zeros(_LEN, np.int64)
        d = -1
        for i in range(len(coeffs)):
            v = coeffs[i] % p
            c[i] = v
            if v != 0:
                d = i
        return c, d

    @njit(cache=True)
    def _nb_extract_roots(h, dh, p, state, buf):
        # h: monic product of distinct linear factors; fills buf, returns count
        stack = np.zeros((MAXD, _LEN), np.int64)
        sdeg = np.zeros(MAXD, np.int64)
        for i in range(dh + 1):
            stack[0, i] = h[i]
        sdeg[0] = dh
        top = 1
        nout = 0
        while top > 0:
            top -= 1
            g = stack[top].copy()
            dg = sdeg[top]
            if dg <= 0:
                continue
            if dg == 1:
                buf[nout] = (p - g[0]) % p
                nout += 1
                continue
            while True:
                state = (state * 1103515245 + 12345) % 2147483648
                a = state % p
                base = np.zeros(_LEN, np.int64)
                base[0] = a
                base[1] = 1
                w, dw = _nb_powmod_poly(base, 1, (p - 1) // 2, g, dg, p)
                w[0] = (w[0] - 1) % p
                if dw < 0:
                    dw = 0
                while dw >= 0 and w[dw] == 0:
                    dw -= 1
                if dw < 0:
                    continue
                u, du = _nb_gcd_poly(w, dw, g, dg, p)
                if 0 < du < dg:
                    q, dq = _nb_divrem(g, dg, u, du, p)
                    for i in range(du + 1):
                        stack[top, i] = u[i]
                    for i in range(du + 1, _LEN):
                        stack[top, i] = 0
                    sdeg[top] = du
                    top += 1
                    for i in range(_LEN):
                        stack[top, i] = q[i] if i <= dq else 0
                    sdeg[top] = dq
                    top += 1
                    break
        return nout

    @njit(cache=True)
    def _nb_roots_one(coeffs, p, seed, buf):
        c, d = _nb_reduce_coeffs(coeffs, p)
        if d <= 0:
            return 0
        if p < BRUTE_FORCE_THRESHOLD:
            n = 0
            for r in range(p):
                acc = 0
                for i in range(d, -1, -1):
                    acc = (acc * r + c[i]) % p
                if acc == 0:
                    buf[n] = r
                    n += 1
            return n
        lc = c[d]
        if lc != 1:
            inv = _nb_powmod(lc, p - 2, p)
            for i in range(d + 1):
                c[i] = c[i] * inv % p
        if d == 1:
            buf[0] = (p - c[0]) % p
            return 1
        xp, dxp = _nb_powmod_poly_x(p, c, d, p)
        xp[1] = (xp[1] - 1) % p
        dxp2 = max(dxp, 1)
        while dxp2 >= 0 and xp[dxp2] == 0:
            dxp2 -= 1
        if dxp2 < 0:
            # x^p == x mod f: f splits completely into distinct linears
            h, dh = c, d
        else:
            h, dh = _nb_gcd_poly(xp, dxp2, c, d, p)
        if dh < 1:
            return 0
        state = (seed ^ (p * 2654435761)) % 2147483648
        n = _nb_extract_roots(h, dh, p, state, buf)
        # insertion sort
        for i in range(1, n):
            key = buf[i]
            j = i - 1
            while j >= 0 and buf[j] > key:
                buf[j + 1] = buf[j]
                j -= 1
            buf[j + 1] = key
        return n

    @njit(cache=True)
    def _nb_powmod_poly_x(e, f, df, p):
        # x^e mod f (f monic)
        base = np.zeros(_LEN, np.int64)
        if df == 1:
            base[0] = (p - f[0]) % p
            dbase = 0 if base[0] != 0 else -1
        else:
            base[1] = 1
            dbase = 1
        return _nb_powmod_poly(base, dbase, e, f, df, p)

    @njit(cache=True)
    def _nb_roots_batch(coeffs, primes, seed, width):
        n = len(primes)
        counts = np.zeros(n, np.int64)
        roots = np.zeros(n * width, np.int64)
        buf = np.zeros(64, np.int64)
        for t in range(n):
            k = _nb_roots_one(coeffs, primes[t], seed, buf)
            counts[t] = k
            for i in range(k):
                roots[t * width + i] = buf[i]
        return counts, roots

    @njit(cache=True)
    def _nb_count_roots_batch(coeffs, primes):
        n = len(primes)
        counts = np.zeros(n, np.int64)
        for t in range(n):
            p = primes[t]
            c, d = _nb_reduce_coeffs(coeffs, p)
            if d <= 0:
                counts[t] = 0
                continue
            if p < BRUTE_FORCE_THRESHOLD:
                cnt = 0
                for r in range(p):
                    acc = 0
                    for i in range(d, -1, -1):
                        acc = (acc * r + c[i]) % p
                    if acc == 0:
                        cnt += 1
                counts[t] = cnt
                continue
            lc = c[d]
            if lc != 1:
                inv = _nb_powmod(lc, p - 2, p)
                for i in range(d + 1):
                    c[i] = c[i] * inv % p
            if d == 1:
                counts[t] = 1
                continue
            xp, dxp = _nb_powmod_poly_x(p, c, d, p)
            xp[1] = (xp[1] - 1) % p
            dxp2 = max(dxp, 1)
            while dxp2 >= 0 and xp[dxp2] == 0:
                dxp2 -= 1
            if dxp2 < 0:
                counts[t] = d
            else:
                h, dh = _nb_gcd_poly(xp, dxp2, c, d, p)
                counts[t] = dh if dh >= 1 else 0
        return counts

    @njit(cache=True)
    def _nb_count_roots_mod(coeffs, moduli):
        # exhaustive scan; the oracle path, shares nothing with gcd/Hensel
        g = len(coeffs) - 1
        out = np.zeros(len(moduli), np.int64)
        for t in range(len(moduli)):
            m = moduli[t]
            cnt = 0
            for r in range(m):
                acc = 0
                for i in range(g, -1, -1):
                    acc = (acc * r + coeffs[i]) % m
                if acc == 0:
                    cnt += 1
            out[t] = cnt
        return out

    @njit(cache=True)
    def _nb_additive_segment(n_start, m, coeffs, degree, primes, offsets,
                             roots_flat, kind, thr):
        vals = np.empty(m, np.int64)
        fvals = np.zeros(m, np.int64)
        excl = np.zeros(m, np.uint8)
        for i in range(m):
            n = n_start + i
            acc = coeffs[degree]
            for d in range(degree - 1, -1, -1):
                acc = acc * n + coeffs[d]
            if acc < 0:
                acc = -acc
            vals[i] = acc
            if acc == 0:
                excl[i] = 1
        for t in range(len(primes)):
            p = primes[t]
            for ri in range(offsets[t], offsets[t + 1]):
                r = roots_flat[ri]
                i0 = (r - n_start) % p
                for i in range(i0, m, p):
                    v = vals[i]
                    if v == 0 or v % p != 0:
                        continue
                    nu = 0
                    while v % p == 0:
                        v //= p
                        nu += 1
                    vals[i] = v
                    if kind == 0:
                        fvals[i] += 1
                    elif kind == 1:
                        fvals[i] += nu
                    elif p <= thr:
                        fvals[i] += 1
        for i in range(m):
            if excl[i]:
                continue
            c = vals[i]
            if c > 1:
                if kind == 0 or kind == 1:
                    fvals[i] += 1
                elif c <= thr:
                    fvals[i] += 1
        return fvals, excl, vals


# ============================================================================
# numpy / pure-Python fallbacks
# ============================================================================

def _np_count_roots_mod(coeffs, moduli):
    out = np.zeros(len(moduli), np.int64)
    cs = [int(c) for c in coeffs]
    for t, m in enumerate(np.asarray(moduli)):
        m = int(m)
        r = np.arange(m, dtype=np.int64)
        acc = np.zeros(m, np.int64)
        for c in reversed(cs):
            acc = (acc * r + c) % m
        out[t] = int(np.count_nonzero(acc == 0))
    return out


def _np_roots_csr(coeffs, primes, seed):
    counts = np.zeros(len(primes), np.int64)
    chunks = []
    cs = [int(c) for c in coeffs]
    for t, p in enumerate(primes):
        rs = _roots_mod_p_python(cs, int(p), seed)
        counts[t] = len(rs)
        if rs:
            chunks.append(np.asarray(rs, dtype=np.int64))
    flat = np.concatenate(chunks) if chunks else np.zeros(0, np.int64)
    return counts, flat


def _np_additive_segment(n_start, m, coeffs, primes, offsets, roots_flat,
                         kind, thr):
    n = np.arange(n_start, n_start + m, dtype=np.int64)
    vals = np.zeros(m, np.int64) + int(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        vals = vals * n + int(c)
    vals = np.abs(vals)
    excl = vals == 0
    fvals = np.zeros(m, np.int64)
    primes = np.asarray(primes)
    for t in range(len(primes)):
        p = int(primes[t])
        for ri in range(int(offsets[t]), int(offsets[t + 1])):
            r = int(roots_flat[ri])
            i0 = (r - n_start) % p
            idx = np.arange(i0, m, p, dtype=np.int64)
            if idx.size == 0:
                continue
            idx = idx[(vals[idx] != 0) & (vals[idx] % p == 0)]
            cur = idx
            first = True
            while cur.size:
                vals[cur] //= p
                if kind == KIND_OMEGA:
                    if first:
                        fvals[cur] += 1
                elif kind == KIND_BIG_OMEGA:
                    fvals[cur] += 1
                elif first and p <= thr:
                    fvals[cur] += 1
                first = False
                cur = cur[vals[cur] % p == 0]
    left = (~excl) & (vals > 1)
    if kind in (KIND_OMEGA, KIND_BIG_OMEGA):
        fvals[left] += 1
    else:
        fvals[left & (vals <= thr)] += 1
    return fvals, excl.astype(np.uint8), vals


# ============================================================================
# dispatchers
# ============================================================================

def count_roots_mod(coeffs, moduli) -> np.ndarray:
    """Exhaustive-scan root counts of coeffs mod each modulus (oracle path)."""
    moduli = np.asarray(moduli, dtype=np.int64)
    arr = np.asarray(coeffs, dtype=np.int64)
    if USE_NUMBA:
        return _nb_count_roots_mod(arr, moduli)
    return _np_count_roots_mod(arr, moduli)


def roots_csr(coeffs, primes, seed: int = DEFAULT_SPLIT_SEED):
    """Roots of the polynomial mod each prime, as (offsets, flat) CSR arrays."""
    primes = np.asarray(primes, dtype=np.int64)
    arr = _check_kernel_poly(coeffs)
    if USE_NUMBA:
        width = max(len(arr) - 1, 1)
        counts, padded = _nb_roots_batch(arr, primes, seed, width)
        offsets = np.zeros(len(primes) + 1, np.int64)
        np.cumsum(counts, out=offsets[1:])
        flat = np.empty(int(offsets[-1]), np.int64)
        mask = np.repeat(counts, width) > np.tile(np.arange(width), len(primes))
        flat[:] = padded[mask]
        return offsets, flat
    counts, flat = _np_roots_csr(arr, primes, seed)
    offsets = np.zeros(len(primes) + 1, np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, flat


def count_roots_primes(coeffs, primes, seed: int = DEFAULT_SPLIT_SEED) -> np.ndarray:
    """rho(p) for each prime in the batch (no root extraction)."""
    primes = np.asarray(primes, dtype=np.int64)
    arr = _check_kernel_poly(coeffs)
    if USE_NUMBA:
        return _nb_count_roots_batch(arr, primes)
    counts, _ = _np_roots_csr(arr, primes, seed)
    return counts


def additive_segment(n_start: int, m: int, coeffs, primes, offsets, roots_flat,
                     kind: int, thr: int):
    """f(|Q(n)|) for n in [n_start, n_start + m) given roots of Q mod each
    sieving prime.  Requires the caller to guarantee max|Q| < 2^62 and that
    the prime batch reaches sqrt(max|Q|), so leftover cofactors are prime.

    Returns (fvals int64, excluded uint8, residual cofactors int64).
    """
    arr = np.asarray(coeffs, dtype=np.int64)
    primes = np.asarray(primes, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    roots_flat = np.asarray(roots_flat, dtype=np.int64)
    if USE_NUMBA:
        return _nb_additive_segment(np.int64(n_start), np.int64(m), arr,
                                    np.int64(len(arr) - 1), primes, offsets,
                                    roots_flat, np.int64(kind), np.int64(thr))
    return _np_additive_segment(int(n_start), int(m), arr, primes, offsets,
                                roots_flat, int(kind), int(thr))
