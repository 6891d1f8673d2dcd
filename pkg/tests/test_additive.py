import math

import numpy as np
import pytest

from concentra.additive import (
    beta_d_factor,
    big_omega,
    custom_function,
    e_f,
    eval_at,
    eval_f,
    load_custom_function,
    mertens_deviation,
    omega,
    omega_y,
    parse_function,
    star_condition_check,
)
from concentra.errors import CapacityError, DegenerateFactor, EmptyGrid
from concentra.polynomial import parse_poly
from concentra.sieve import factorize_small, primes_up_to

from conftest import quiet_family


def test_eval_f_examples():
    assert eval_f(big_omega(), [(2, 2), (3, 1)]) == 3
    assert eval_f(omega(), [(2, 2), (3, 1)]) == 2
    assert eval_f(omega_y(5), [(7, 1), (11, 1)]) == 0
    assert eval_at(omega(), 0) == 0
    assert eval_at(omega(), 1) == 0
    assert eval_at(omega(), -12) == 2


def test_additivity_random_coprime_pairs():
    from concentra._arith import factorize

    rng = np.random.default_rng(23)
    fns = [omega(), big_omega(), omega_y(100),
           custom_function({(2, 1): 0.5, (3, 2): 2.5}, default=1.0)]
    done = 0
    while done < 10**4:
        m, n = (int(v) for v in rng.integers(2, 10**6, size=2))
        if math.gcd(m, n) != 1:
            continue
        done += 1
        fm, fn, fmn = factorize(m), factorize(n), factorize(m * n)
        for f in fns:
            assert eval_f(f, fmn) == pytest.approx(eval_f(f, fm) + eval_f(f, fn))


def test_e_f_examples():
    table = primes_up_to(100)
    oracle = 1.0 + sum(1.0 / p for p in table.primes())
    got = e_f(omega(), 100)
    assert got.value == pytest.approx(oracle, abs=1e-12)
    assert got.value == pytest.approx(2.8028, abs=2e-4)
    assert e_f(omega_y(1), 100).value == 1.0
    unit = e_f(omega(), 1000).value
    weighted = e_f(omega(), 1000, weight=parse_poly("x")).value
    assert unit == pytest.approx(weighted, abs=1e-12)


def test_e_f_monotone():
    vals = [e_f(omega(), x).value for x in (10, 100, 1000, 10**4)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert all(v >= 1.0 for v in vals)


def test_e_omega_offset_converges():
    d6 = e_f(omega(), 10**6).value - math.log(math.log(10**6))
    d7 = e_f(omega(), 10**7).value - math.log(math.log(10**7))
    assert abs(d7 - d6) < 0.05


def test_mertens_deviation_example(fam_x):
    dev = mertens_deviation(fam_x, 0, 10)
    # four primes by hand: 1/2 + 1/3 + 1/5 + 1/7 vs loglog 10
    oracle = abs((1 / 2 + 1 / 3 + 1 / 5 + 1 / 7) - math.log(math.log(10)))
    assert dev.dev_log == pytest.approx(oracle, abs=1e-12)
    assert dev.dev_log == pytest.approx(0.342, abs=5e-4)
    with pytest.raises(EmptyGrid):
        mertens_deviation(fam_x, 0, 100, grid=[])


def test_mertens_deviation_nondecreasing_in_X(fam_x, fam_x2p1):
    for fam in (fam_x, fam_x2p1):
        d4 = mertens_deviation(fam, 0, 10**4).dev_log
        d5 = mertens_deviation(fam, 0, 10**5).dev_log
        assert d5 >= d4 - 1e-15


def test_star_condition_examples():
    rep = star_condition_check(omega(), 10, 2, 2)
    assert rep.values == (0.0, 1.0) and rep.passed
    rep1 = star_condition_check(omega(), 10, 1, 2)
    assert rep1.values == (0.0,) and rep1.passed
    rep2 = star_condition_check(big_omega(), 30, 3, 2)
    assert set(rep2.values) <= {0.0, 1.0, 2.0, 3.0}
    assert rep2.count <= 8 and rep2.passed
    with pytest.raises(CapacityError):
        star_condition_check(omega(), 10**4, 3, 2)


def test_star_values_oracle():
    # brute force: n <= 900 with smallest prime factor > 30
    rep = star_condition_check(omega(), 30, 2, 2)
    t = primes_up_to(900)
    want = {0.0}
    for n in range(2, 901):
        fac = factorize_small(n, t)
        if fac[0][0] > 30:
            want.add(float(len(fac)))
    assert set(rep.values) == want


def test_beta_d_factor_examples(fam_x_xp1, fam_x2p1):
    assert beta_d_factor(fam_x_xp1) == 1.0
    assert beta_d_factor(fam_x2p1) == 2.0
    fam3 = quiet_family("x", "x+1", "x+2")
    with pytest.raises(DegenerateFactor) as exc:
        beta_d_factor(fam3)
    assert exc.value.prime == 2


def test_custom_function_file(tmp_path):
    path = tmp_path / "f.rules"
    path.write_text("# test rule file\ndefault 0.25\n2 1 1.0\n2 2 1.5\n3 1 -1\n")
    f = load_custom_function(path)
    assert f.on_prime_power(2, 1) == 1.0
    assert f.on_prime_power(2, 2) == 1.5
    assert f.on_prime_power(3, 1) == -1.0
    assert f.on_prime_power(5, 9) == 0.25
    assert not f.integer_valued
    via_desc = parse_function(f"custom:{path}")
    assert via_desc.rules == f.rules


def test_parse_function_descriptors():
    assert parse_function("omega").kind == "omega"
    assert parse_function("big-omega").kind == "big_omega"
    f = parse_function("omega_y:1000")
    assert f.kind == "omega_y" and f.threshold == 1000.0
    assert f.descriptor() == "omega_y:1000"
    with pytest.raises(ValueError):
        parse_function("sigma")
