"""Concentration statistics of additive functions along polynomial shifts."""

from ._backend import backend_name
from .additive import (
    AdditiveFunction,
    EfResult,
    MertensDeviation,
    beta_d_factor,
    big_omega,
    custom_function,
    e_f,
    eval_at,
    eval_f,
    mertens_deviation,
    omega,
    omega_y,
    parse_function,
    star_condition_check,
)
from .concentration import (
    BoundReport,
    ConcentrationTable,
    LowerTarget,
    build_table,
    eq6_rhs_sum,
    lower_bound_report,
    lower_target,
    poisson_profile_check,
    sup_concentration,
    upper_bound_report,
)
from .halasz import (
    BConfig,
    FriableSet,
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
from .polynomial import (
    IntPolynomial,
    PolynomialFamily,
    RootsModPrimePower,
    discriminant,
    eval_poly,
    family_from_strings,
    format_poly,
    lift_roots,
    parse_poly,
    phi_j,
    resultant,
    rho,
    roots_mod_p,
    validate_family,
)
from .sieve import (
    FriableDecomposition,
    IntervalFactorization,
    PrimeTable,
    factorize_small,
    friable_decompose,
    interval_factorize,
    load_interval_cache,
    primes_up_to,
    save_interval_cache,
)

__version__ = "0.1.0"
