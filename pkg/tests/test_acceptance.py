"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and fitted constants.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from concentra import _kernels, verify
from concentra.concentration import poisson_profile_check
from concentra.polynomial import (
    IntPolynomial,
    discriminant,
    lift_roots,
    parse_poly,
    rho_bound1_holds,
    rho_bound2_holds,
)
from concentra.sieve import interval_factorize, primes_up_to

from conftest import quiet_family

CORPUS = ("x", "x+1", "x^2+1", "x^2+x+1", "x^3-2")
PKG_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def _report(num, name, ok, detail=""):
    line = f"criterion {num:02d} [{name}]: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    assert ok, line


def test_criterion_01_rho_oracle_equivalence():
    t0 = time.time()
    table = primes_up_to(10**5)
    parr = table.primes()
    for text in CORPUS:
        q = parse_poly(text)
        g = q.degree
        dj = discriminant(q)
        coeffs = np.array(q.coeffs, dtype=np.int64)
        scan1 = _kernels.count_roots_mod(coeffs, parr)
        lift1 = _kernels.count_roots_primes(q.coeffs, parr)
        assert np.array_equal(scan1, lift1), text
        # bound (1) at nu = 1 reduces to rho(p) <= g
        assert np.all(scan1 <= g), text
        # bound (2) for p not dividing D_j
        nod = np.array([dj % int(p) != 0 for p in parr])
        assert np.all(scan1[nod] <= np.minimum(g, parr[nod] - 1)), text
        # higher prime powers p^nu <= 1e5
        for p in (int(v) for v in parr[parr <= 316]):
            idx = int(np.searchsorted(parr, p))
            chain = [int(scan1[idx])]
            pk = p * p
            nu = 2
            while pk <= 10**5:
                lifted = lift_roots(q, p, nu).count
                scanned = int(_kernels.count_roots_mod(coeffs,
                                                       np.array([pk]))[0])
                assert lifted == scanned, (text, p, nu)
                assert rho_bound1_holds(g, p, nu, chain[0], lifted), (text, p, nu)
                chain.append(lifted)
                pk *= p
                nu += 1
            if dj % p != 0:
                assert rho_bound2_holds(g, p, chain), (text, p)
    elapsed = time.time() - t0
    _report(1, "rho-oracle equivalence", elapsed <= 60.0,
            f"corpus of {len(CORPUS)}, p^nu <= 1e5, elapsed {elapsed:.1f}s")


def test_criterion_02_discriminant_cross_check():
    rng = np.random.default_rng(1234)
    checked = 0
    while checked < 500:
        c, b, a = (int(v) for v in rng.integers(-50, 51, size=3))
        if a == 0:
            continue
        assert discriminant(IntPolynomial((c, b, a))) == b * b - 4 * a * c
        checked += 1
    while checked < 1000:
        d, c, b, a = (int(v) for v in rng.integers(-50, 51, size=4))
        if a == 0:
            continue
        want = (18 * a * b * c * d - 4 * b**3 * d + b**2 * c**2
                - 4 * a * c**3 - 27 * a**2 * d**2)
        assert discriminant(IntPolynomial((d, c, b, a))) == want
        checked += 1
    _report(2, "discriminant closed forms", True, "1000 random polynomials, exact")


def test_criterion_03_interval_factorization_integrity(fam_x2p1):
    t0 = time.time()
    fac = interval_factorize(fam_x2p1, 10**9, 10**4)
    bad = 0
    for i in range(fac.count):
        n = fac.n0 + i
        if fac.value(0, i) != n * n + 1:
            bad += 1
    elapsed = time.time() - t0
    _report(3, "interval factorization", bad == 0 and elapsed <= 60.0,
            f"(1e9, 1e9+1e4], failures={bad}, elapsed {elapsed:.1f}s")


def test_criterion_04_fourier_inversion():
    passed, rep = verify.verify_fourier(x=1e4, functions=("omega", "big-omega"))
    _report(4, "Fourier inversion", passed and rep["maxDiff"] <= 1e-9,
            f"maxDiff {rep['maxDiff']:.2e} over omega/big-omega at x=y=1e4")


def test_criterion_05_lemma1_suite():
    t0 = time.time()
    passed, rep = verify.verify_lemma1(configs=200, seed=42)
    elapsed = time.time() - t0
    _report(5, "oscillatory-integral suite", passed and elapsed <= 30.0,
            f"maxRatio {rep['summary']['maxRatio']:.3f} <= 3.0, "
            f"identity ok, elapsed {elapsed:.1f}s")


def test_criterion_06_halasz_single_function_stability():
    t0 = time.time()
    passed, rep = verify.verify_upper(family="x", functions="omega",
                                      decades=(5, 6, 7), norm="sqrt-e",
                                      band=1.5)
    elapsed = time.time() - t0
    ratios = [round(r["ratio"], 4) for r in rep["rows"]]
    _report(6, "single-function stability",
            passed and elapsed <= 300.0,
            f"ratios {ratios}, spread {rep['spread']:.3f} <= 1.5, "
            f"elapsed {elapsed:.1f}s")


def test_criterion_07_two_sided_simultaneous():
    passed, rep = verify.verify_upper(family="x;x+1", functions="omega;omega",
                                      decades=(5, 6, 7), norm="loglog",
                                      band=2.0)
    ratios = [round(r["ratio"], 4) for r in rep["rows"]]
    _report(7, "two-sided omega/omega(n+1)", passed,
            f"sup*loglog(x)/x ratios {ratios}, spread {rep['spread']:.3f} <= 2")


def test_criterion_08_upper_bound_ratio_stability():
    passed, rep = verify.verify_upper(family="x;x^2+1", functions="omega;omega",
                                      decades=(5, 6, 7), norm="sqrt-e",
                                      band=2.0)
    ratios = [round(r["ratio"], 4) for r in rep["rows"]]
    _report(8, "upper-bound shape", passed,
            f"sup*sqrt(E1 E2)/y ratios {ratios}, spread {rep['spread']:.3f} <= 2")


def test_criterion_09_lower_bound_positivity():
    passed, rep = verify.verify_lower(family="x", y_js="100",
                                      decades=(5, 6, 7), epsilon=0.5, w=11,
                                      C=10.0, ystar_exponent=0.3,
                                      min_frac=0.2)
    ratios = [round(r["ratio"], 4) for r in rep["rows"]]
    ks = rep["rows"][0]["k"]
    _report(9, "lower-bound positivity", passed,
            f"k={ks}, ratios {ratios}, min/max "
            f"{rep['minRatio'] / rep['maxRatio']:.3f} >= 0.2")


def test_criterion_10_poisson_profile(fam_x):
    rep = poisson_profile_check(fam_x, 0, 1e7, y_j=1e7, w=2, C=2,
                                epsilon0=math.log(1e5) / math.log(1e7))
    in_band = all(0.1 <= r <= 10.0 for r in rep.ratios)
    positive = all(r > 0 for r in rep.ratios)
    smooth = all(max(a, b) / min(a, b) <= 5.0
                 for a, b in zip(rep.ratios, rep.ratios[1:]))
    _report(10, "Poisson profile",
            in_band and positive and smooth and len(rep.ratios) >= 1,
            f"L={rep.L:.3f}, k'<= {max(rep.kprimes)}, "
            f"ratios {[round(r, 3) for r in rep.ratios]} in [0.1, 10]")


def test_criterion_11_star_condition_audit():
    passed, rep = verify.verify_star(functions=("omega", "big-omega"),
                                     ts=(10, 30, 100), us=(1, 2, 3), V=2.0)
    worst = max(r["count"] / r["bound"] for r in rep["rows"])
    _report(11, "condition (*) audit", passed,
            f"18 combinations, worst count/bound {worst:.2f} <= 1")


def test_criterion_12_mertens_deviations():
    passed, rep = verify.verify_mertens(polys=("x", "x^2+1", "x^2+x+1"),
                                        min_exp=4, max_exp=7,
                                        terminal=0.2615, terminal_tol=0.002)
    term = rep["terminal"]["value"]
    _report(12, "Mertens deviations", passed,
            f"increments nonincreasing for k=4..6; terminal offset "
            f"{term:.5f} within 0.2615 +/- 0.002")


def _run_verify_cli(suite, args, out_path):
    res = subprocess.run(
        [sys.executable, "-m", "concentra", "verify", suite, *args, "--out",
         str(out_path)],
        capture_output=True, text=True, cwd=PKG_ROOT)
    return res.returncode


def test_criterion_13_determinism(tmp_path):
    cheap = {
        "lemma1": ["--configs", "30", "--seed", "42"],
        "fourier": ["--x", "1e3"],
        "star": [],
        "mertens": ["--max-exp", "5", "--min-exp", "4"],
        "upper": ["--decades", "4,5"],
        "lower": ["--decades", "4,5"],
    }
    mismatches = []
    for suite, args in cheap.items():
        a = tmp_path / f"{suite}_a.json"
        b = tmp_path / f"{suite}_b.json"
        rc_a = _run_verify_cli(suite, args, a)
        rc_b = _run_verify_cli(suite, args, b)
        if a.read_bytes() != b.read_bytes():
            mismatches.append(suite)
        assert rc_a == rc_b
        json.loads(a.read_text())  # well-formed JSON
    _report(13, "verify determinism", not mismatches,
            f"all 6 verify subcommands byte-identical across reruns"
            + (f"; mismatches: {mismatches}" if mismatches else ""))
