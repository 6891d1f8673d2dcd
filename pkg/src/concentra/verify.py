"""Verification suites: each returns (passed, report) where the report is a
JSON-ready dict with deterministic content (no timestamps, fixed seeds).

The CLI `verify` subcommands and the acceptance tests both run these.
"""

from __future__ import annotations

import math

from .additive import (
    AdditiveFunction,
    big_omega,
    mertens_deviation,
    omega,
    parse_function,
    star_condition_check,
)
from .concentration import (
    build_table,
    lower_bound_report,
    lower_target,
    sup_concentration,
    upper_bound_report,
)
from .halasz import (
    friable_set,
    fourier_inversion_check,
    lemma1_suite,
    single_b_identity,
    unit_weight,
    _grouped,
)
from .polynomial import family_from_strings

LEMMA1_RATIO_LIMIT = 3.0
FOURIER_TOL = 1e-9
IDENTITY_TOL = 1e-8
IDENTITY_BS = (1e-4, 1.0, 10.0, 100.0, 1e4)


def verify_lemma1(configs: int = 200, seed: int = 42,
                  ratio_limit: float = LEMMA1_RATIO_LIMIT,
                  identity_tol: float = IDENTITY_TOL) -> tuple[bool, dict]:
    """Random BConfig sweep: every ratio <= limit and every integral <= 1,
    plus the single-frequency identity at the fixed B grid."""
    suite = lemma1_suite(n_configs=configs, seed=seed)
    ratios_ok = all(row["ratio"] <= ratio_limit for row in suite["configs"])
    integrals_ok = all(row["integral"] <= 1.0 + 1e-9 for row in suite["configs"])
    identity_rows = []
    identity_ok = True
    for B in IDENTITY_BS:
        lhs, rhs = single_b_identity(B)
        diff = abs(lhs - rhs)
        identity_rows.append({"B": B, "lhs": lhs, "rhs": rhs, "diff": diff})
        identity_ok = identity_ok and diff <= identity_tol
    passed = ratios_ok and integrals_ok and identity_ok
    report = {
        "suite": "lemma1",
        "passed": passed,
        "ratioLimit": ratio_limit,
        "ratiosOk": ratios_ok,
        "integralsOk": integrals_ok,
        "identity": {"tolerance": identity_tol, "rows": identity_rows,
                     "ok": identity_ok},
        "configs": suite["configs"],
        "summary": suite["summary"],
    }
    return passed, report


def verify_fourier(x: float = 1e4, functions=("omega", "big-omega"),
                   tolerance: float = FOURIER_TOL) -> tuple[bool, dict]:
    """Inversion identity on S(x, x) for every attained k of each function."""
    fset = friable_set(x, x)
    w = unit_weight()
    rows = []
    max_diff = 0.0
    for desc in functions:
        f = parse_function(desc) if isinstance(desc, str) else desc
        groups = _grouped(f, w, fset)
        worst = 0.0
        for k in sorted(groups):
            integral, exact = fourier_inversion_check(f, w, x, x, k, fset=fset)
            worst = max(worst, abs(integral - exact))
        rows.append({"function": f.descriptor(), "attained": len(groups),
                     "maxDiff": worst})
        max_diff = max(max_diff, worst)
    passed = max_diff <= tolerance
    return passed, {"suite": "fourier", "passed": passed, "x": float(x),
                    "tolerance": tolerance, "maxDiff": max_diff, "rows": rows}


def verify_star(functions=("omega", "big-omega"), ts=(10, 30, 100),
                us=(1, 2, 3), V: float = 2.0) -> tuple[bool, dict]:
    rows = []
    passed = True
    for desc in functions:
        f = parse_function(desc) if isinstance(desc, str) else desc
        for t in ts:
            for u in us:
                rep = star_condition_check(f, t, u, V)
                rows.append({
                    "function": rep.function, "t": rep.t, "u": rep.u,
                    "count": rep.count, "bound": rep.bound,
                    "passed": rep.passed,
                })
                passed = passed and rep.passed
    return passed, {"suite": "star", "passed": passed, "V": float(V),
                    "rows": rows}


def verify_mertens(polys=("x", "x^2+1", "x^2+x+1"), min_exp: int = 4,
                   max_exp: int = 7, terminal: float = 0.2615,
                   terminal_tol: float = 0.002) -> tuple[bool, dict]:
    """Deviation maxima per decade must have nonincreasing increments, and
    the linear polynomial's terminal offset must sit at the Mertens constant."""
    rows = []
    passed = True
    terminal_row = None
    for text in polys:
        fam = family_from_strings(text)
        dev = mertens_deviation(fam, 0, 10.0**max_exp)
        by_decade = {}
        for t, d in zip(dev.grid, dev.log_points):
            k = int(round(math.log10(t)))
            prior = [dd for tt, dd in zip(dev.grid, dev.log_points) if tt <= t]
            by_decade[k] = max(prior)
        increments = [abs(by_decade[k + 1] - by_decade[k])
                      for k in range(min_exp, max_exp)]
        nonincreasing = all(a >= b - 1e-15 for a, b in zip(increments, increments[1:]))
        passed = passed and nonincreasing
        row = {
            "poly": text,
            "devLogByDecade": {str(k): by_decade[k] for k in sorted(by_decade)},
            "increments": increments,
            "nonincreasing": nonincreasing,
            "terminalDevLog": dev.terminal_dev_log,
            "devLi": dev.dev_li,
        }
        rows.append(row)
        if text == "x":
            terminal_ok = abs(dev.terminal_dev_log - terminal) <= terminal_tol
            passed = passed and terminal_ok
            terminal_row = {"value": dev.terminal_dev_log,
                            "target": terminal, "tolerance": terminal_tol,
                            "ok": terminal_ok}
    return passed, {"suite": "mertens", "passed": passed, "rows": rows,
                    "terminal": terminal_row}


def _decade_xs(decades) -> list[float]:
    return [10.0**int(k) for k in decades]


def verify_upper(family: str = "x", functions: str = "omega",
                 decades=(5, 6, 7), norm: str = "sqrt-e",
                 band: float = 2.0, seed: int = 0x1D872B41) -> tuple[bool, dict]:
    """Stability of the normalized sup across decades with y = x.

    norm "sqrt-e" uses sup * prod sqrt(E_{f_j}(x; rho_j)) / y; norm "loglog"
    uses sup * loglog(x) / y (the two-sided simultaneous normalization).
    """
    fam = family_from_strings(family)
    fns = tuple(parse_function(d) for d in functions.split(";"))
    rows = []
    ratios = []
    for x in _decade_xs(decades):
        table = build_table(fam, fns, x, x, seed=seed)
        rep = upper_bound_report(fam, fns, x, x, table=table, seed=seed)
        if norm == "sqrt-e":
            ratio = rep.ratio_upper
        elif norm == "loglog":
            ratio = rep.sup * math.log(math.log(x)) / x
        else:
            raise ValueError(f"unknown norm {norm!r}")
        ratios.append(ratio)
        rows.append({"x": x, "y": x, "sup": rep.sup, "arg": list(rep.arg),
                     "E": list(rep.e_values), "ratio": ratio})
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    passed = spread <= band
    return passed, {
        "suite": "upper", "passed": passed, "family": family,
        "functions": functions, "norm": norm, "band": band,
        "spread": spread, "rows": rows,
    }


def verify_lower(family: str = "x", y_js="100", decades=(5, 6, 7),
                 epsilon: float = 0.5, w: int = 11, C: float = 10.0,
                 ystar_exponent: float = 0.3, min_frac: float = 0.2,
                 seed: int = 0x1D872B41) -> tuple[bool, dict]:
    """Positivity of the lower-bound ratio at k_j = floor(L_j) across decades:
    the minimum must stay above min_frac times the maximum."""
    fam = family_from_strings(family)
    if isinstance(y_js, str):
        yvals = tuple(float(v) for v in y_js.split(";"))
    else:
        yvals = tuple(float(v) for v in y_js)
    rows = []
    ratios = []
    for x in _decade_xs(decades):
        target = lower_target(fam, yvals, x, epsilon=epsilon, w=w, C=C,
                              ystar_exponent=ystar_exponent, seed=seed)
        rep = lower_bound_report(fam, x, x, target, seed=seed)
        ratios.append(rep.ratio_lower)
        rows.append({"x": x, "y": x, "k": list(target.k), "L": list(target.L),
                     "ystars": list(target.ystars),
                     "observed": rep.observed_lower, "E": list(rep.e_values),
                     "ratio": rep.ratio_lower})
    mx = max(ratios)
    mn = min(ratios)
    passed = mx > 0 and mn >= min_frac * mx
    return passed, {
        "suite": "lower", "passed": passed, "family": family,
        "y_js": list(yvals), "epsilon": epsilon, "w": w, "C": C,
        "ystar_exponent": ystar_exponent, "min_frac": min_frac,
        "minRatio": mn, "maxRatio": mx, "rows": rows,
    }


VERIFY_SUITES = {
    "lemma1": verify_lemma1,
    "fourier": verify_fourier,
    "star": verify_star,
    "mertens": verify_mertens,
    "upper": verify_upper,
    "lower": verify_lower,
}
