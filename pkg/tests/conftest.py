import warnings

import pytest

from concentra.polynomial import parse_poly, validate_family

CORPUS_TEXT = ("x", "x + 1", "x^2 + 1", "x^2 + x + 1", "x^3 - 2")


@pytest.fixture(scope="session")
def corpus():
    return [parse_poly(s) for s in CORPUS_TEXT]


def quiet_family(*texts):
    """validate_family silencing the whole-family fixed-divisor warning
    (expected for families like {x, x+1})."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return validate_family(parse_poly(t) for t in texts)


@pytest.fixture(scope="session")
def fam_x():
    return quiet_family("x")


@pytest.fixture(scope="session")
def fam_x_xp1():
    return quiet_family("x", "x+1")


@pytest.fixture(scope="session")
def fam_x2p1():
    return quiet_family("x^2+1")


@pytest.fixture(scope="session")
def fam_x_x2p1():
    return quiet_family("x", "x^2+1")
