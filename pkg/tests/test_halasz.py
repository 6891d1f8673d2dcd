import math

import mpmath
import numpy as np
import pytest

from concentra._quad import adaptive_quad
from concentra.additive import big_omega, custom_function, omega
from concentra.errors import CapacityError, NonIntegerValues, QuadratureNonConvergence
from concentra.halasz import (
    BConfig,
    WeightFunction,
    char_sum,
    fourier_inversion_check,
    friable_set,
    integral_lemma_check,
    lemma1_suite,
    single_b_identity,
    unit_weight,
    weighted_concentration,
)

from conftest import quiet_family


def test_bconfig_validation():
    with pytest.raises(ValueError):
        BConfig(((0, 1.0),))
    with pytest.raises(ValueError):
        BConfig(((1, -2.0),))
    with pytest.raises(ValueError):
        BConfig(((1, 1.0), (1, 2.0)))
    with pytest.raises(CapacityError):
        BConfig(((1, 2e6),))


def test_integral_empty_config():
    res = integral_lemma_check(BConfig(()))
    assert res.integral == pytest.approx(1.0, abs=1e-10)
    assert res.ratio == pytest.approx(1.0, abs=1e-10)


def test_integral_single_frequency_values():
    res = integral_lemma_check(BConfig.from_dict({1: 100.0}))
    # independent oracle at high precision
    oracle = float(mpmath.quad(
        lambda t: (1 + 100 * mpmath.sin(mpmath.pi * t) ** 2)
        * mpmath.e ** (-100 * mpmath.sin(mpmath.pi * t) ** 2), [0, 0.5, 1]))
    assert res.integral == pytest.approx(oracle, abs=1e-9)
    assert res.integral == pytest.approx(0.0846, abs=2e-3)
    assert res.ratio == pytest.approx(0.85, abs=2e-2)
    res1 = integral_lemma_check(BConfig.from_dict({1: 1.0}))
    assert 1.2 < res1.ratio < 1.3


def test_integral_frequency_invariance():
    # sin^2(pi n t) over [0,1] averages the same for every n
    r1 = integral_lemma_check(BConfig.from_dict({1: 37.0}))
    r5 = integral_lemma_check(BConfig.from_dict({-5: 37.0}))
    assert r1.integral == pytest.approx(r5.integral, abs=1e-9)


def test_integral_never_exceeds_one():
    rep = lemma1_suite(n_configs=40, seed=9)
    for row in rep["configs"]:
        assert row["integral"] <= 1.0 + 1e-9
        assert row["ratio"] <= 3.0


def test_single_b_identity_grid():
    for B in (1e-4, 1.0, 10.0, 100.0, 1e4):
        lhs, rhs = single_b_identity(B)
        assert abs(lhs - rhs) <= 1e-8, B
    lhs, _ = single_b_identity(1.0)
    oracle = float(mpmath.e ** (-0.5) * mpmath.besseli(0, 0.5))
    assert lhs == pytest.approx(oracle, abs=1e-9)
    assert lhs == pytest.approx(0.6450, abs=1e-3)
    big, _ = single_b_identity(100.0)
    assert big == pytest.approx(1.0 / math.sqrt(math.pi * 100.0), rel=0.02)
    tiny, _ = single_b_identity(1e-8)
    assert tiny == pytest.approx(1.0, abs=1e-6)


def test_quadrature_nonconvergence_reported():
    with pytest.raises(QuadratureNonConvergence) as exc:
        adaptive_quad(lambda t: np.sign(t - 1 / math.pi), 0.0, 1.0,
                      abs_tol=1e-14, max_levels=6)
    assert exc.value.achieved_error is not None


def test_friable_set_examples():
    assert list(friable_set(10, 2).values) == [1, 2, 4, 8]
    assert list(friable_set(10, 10).values) == list(range(1, 11))
    fs = friable_set(100, 3)
    oracle = sorted(2**a * 3**b for a in range(7) for b in range(5)
                    if 2**a * 3**b <= 100)
    assert list(fs.values) == oracle
    assert len(fs) == 20
    with pytest.raises(ValueError):
        friable_set(0.5, 10)


def test_friable_set_factorizations():
    fs = friable_set(500, 7)
    for v, facs in zip(fs.values, fs.factors):
        prod = 1
        for p, e in facs:
            assert p <= 7
            prod *= p**e
        assert prod == v


def test_weighted_concentration_example():
    sup, k = weighted_concentration(omega(), unit_weight(), 10, 10)
    assert (sup, k) == (7.0, 1.0)
    zero = custom_function({}, default=0.0)
    sup0, k0 = weighted_concentration(zero, unit_weight(), 10, 10)
    assert sup0 == 10.0 and k0 == 0.0


def test_char_sum_values():
    assert char_sum(omega(), unit_weight(), 10, 10, 0.0) == pytest.approx(10 + 0j)
    assert char_sum(omega(), unit_weight(), 10, 10, 0.5) == pytest.approx(-4 + 0j, abs=1e-9)
    r0 = char_sum(omega(), unit_weight(), 30, 30, 0.0)
    r1 = char_sum(omega(), unit_weight(), 30, 30, 1.0)
    assert r0 == pytest.approx(r1, abs=1e-9)


def test_char_sum_bounded_by_r0():
    fs = friable_set(200, 200)
    r0 = abs(char_sum(omega(), unit_weight(), 200, 200, 0.0, fset=fs))
    for t in np.linspace(0.01, 0.99, 17):
        assert abs(char_sum(omega(), unit_weight(), 200, 200, float(t), fset=fs)) <= r0 + 1e-9


def test_char_sum_t0_equals_total_weight():
    fs = friable_set(300, 5)
    total = char_sum(omega(), unit_weight(), 300, 5, 0.0, fset=fs)
    assert total.real == pytest.approx(len(fs), abs=1e-12)


def test_fourier_inversion_examples():
    assert fourier_inversion_check(omega(), unit_weight(), 10, 10, 1) == pytest.approx((7.0, 7.0))
    got = fourier_inversion_check(omega(), unit_weight(), 10, 10, 5)
    assert got == pytest.approx((0.0, 0.0), abs=1e-12)
    assert fourier_inversion_check(omega(), unit_weight(), 10, 10, 0) == pytest.approx((1.0, 1.0))


def test_fourier_inversion_all_attained():
    for x in (100, 1000):
        fs = friable_set(x, x)
        for f in (omega(), big_omega()):
            seen = set()
            for facs in fs.factors:
                seen.add(sum(e if f.kind == "big_omega" else 1 for _, e in facs))
            for k in sorted(seen):
                integral, exact = fourier_inversion_check(
                    f, unit_weight(), x, x, float(k), fset=fs)
                assert abs(integral - exact) <= 1e-9


def test_fourier_rejects_non_integer():
    half = custom_function({}, default=0.5)
    with pytest.raises(NonIntegerValues):
        fourier_inversion_check(half, unit_weight(), 10, 10, 1)


def test_rho_tilde_weight_values():
    fam = quiet_family("x^2+1")  # beta*D = -4
    w = WeightFunction("rho_tilde", family=fam, member=0)
    assert w.value(2, 1) == 1.0      # rho(2) on the beta*D primes
    assert w.value(2, 2) == 0.0      # higher powers vanish there
    assert w.value(3, 1) == 0.0      # no roots mod 3
    assert w.value(5, 1) == pytest.approx(2 * 5 / 4)
    assert w.on_factors([(5, 1), (13, 1)]) == pytest.approx((2 * 5 / 4) * (2 * 13 / 12))
    capped = WeightFunction("rho_tilde", family=fam, member=0, nu_cap=1)
    assert capped.value(5, 2) == 0.0


def test_lemma1_suite_report_shape():
    rep = lemma1_suite(n_configs=5, seed=1)
    assert rep["summary"]["configCount"] == 5
    for row in rep["configs"]:
        assert set(row) == {"seed", "support", "sumB", "integral", "ratio"}
        assert row["sumB"] == pytest.approx(sum(abs(b) for b in [row["sumB"]]), rel=1)
    # determinism
    rep2 = lemma1_suite(n_configs=5, seed=1)
    assert rep == rep2
