"""Command-line front end.

Subcommands: rho, efx, mertens, concentration, lower-target,
verify {upper,lower,lemma1,fourier,mertens,star}, charsum, friable.

Exit codes: 0 success/pass, 1 verification or runtime failure, 2 usage or
parse errors.  Identical configuration plus seed produces byte-identical
output files; reports carry no timestamps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import verify as verify_mod
from ._backend import backend_name
from .additive import e_f, mertens_deviation, parse_function
from .concentration import (
    DEFAULT_C,
    DEFAULT_EPSILON,
    DEFAULT_W,
    build_table,
    lower_target,
    table_to_csv,
    upper_bound_report,
)
from .errors import ConcentraError, PolynomialParseError
from .halasz import char_sum, friable_set, unit_weight
from .polynomial import (
    DEFAULT_SPLIT_SEED,
    discriminant,
    family_from_strings,
    lift_roots,
    parse_poly,
    rho_bound1_holds,
    rho_bound2_holds,
)
from .sieve import primes_up_to


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _threads_default() -> int:
    raw = os.environ.get("CONCENTRA_THREADS", "1")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


# ----------------------------------------------------------------------------
# subcommand implementations
# ----------------------------------------------------------------------------

def cmd_rho(args) -> int:
    q = parse_poly(args.poly)
    maxp = int(float(args.max))
    d = discriminant(q)
    g = q.degree
    rows = []
    if maxp >= 2:
        for p in primes_up_to(maxp).primes():
            p = int(p)
            if p > maxp:
                break
            chain = []
            nu = 1
            while nu == 1 or p**nu <= maxp:
                if args.max_nu is not None and nu > args.max_nu:
                    break
                chain.append(lift_roots(q, p, nu, args.seed).count)
                nu += 1
            applies = d % p != 0
            for i, cnt in enumerate(chain):
                rows.append({
                    "p": p, "nu": i + 1, "rho": cnt,
                    "bound1_ok": rho_bound1_holds(g, p, i + 1, chain[0], cnt),
                    "bound2_applies": applies,
                    "bound2_ok": rho_bound2_holds(g, p, chain[: i + 1]) if applies else "",
                })
    lines = ["p,nu,rho,bound1_ok,bound2_applies,bound2_ok"]
    for r in rows:
        lines.append(f"{r['p']},{r['nu']},{r['rho']},{r['bound1_ok']},"
                     f"{r['bound2_applies']},{r['bound2_ok']}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_efx(args) -> int:
    f = parse_function(args.f)
    weight = parse_poly(args.poly) if args.poly else None
    res = e_f(f, float(args.x), weight=weight, seed=args.seed)
    _emit(_json_text({"x": res.x, "f": f.descriptor(), "weight": res.weight,
                      "value": res.value}), args.out)
    return 0


def cmd_mertens(args) -> int:
    fam = family_from_strings(args.poly)
    dev = mertens_deviation(fam, 0, float(args.X), seed=args.seed)
    _emit(_json_text({
        "poly": dev.member, "X": dev.X, "grid": list(dev.grid),
        "logPoints": list(dev.log_points), "liPoints": list(dev.li_points),
        "devLog": dev.dev_log, "devLi": dev.dev_li,
        "terminalDevLog": dev.terminal_dev_log,
    }), args.out)
    return 0


def cmd_concentration(args) -> int:
    fam = family_from_strings(args.family)
    fns = tuple(parse_function(d) for d in args.f.split(";"))
    x = float(args.x)
    y = float(args.y)
    table = build_table(fam, fns, x, y, seed=args.seed)
    prefix = args.out_prefix
    table_to_csv(table, f"{prefix}_table.csv")
    rep = upper_bound_report(fam, fns, x, y, table=table, seed=args.seed)
    with open(f"{prefix}_report.json", "w", encoding="utf-8") as fh:
        fh.write(_json_text(rep.to_json_dict()))
    if not table.counts:
        sys.stderr.write("warning: empty table (y too small)\n")
    return 0


def cmd_lower_target(args) -> int:
    fam = family_from_strings(args.family)
    yvals = tuple(float(v) for v in args.yj.split(";"))
    target = lower_target(fam, yvals, float(args.x), epsilon=args.epsilon,
                          w=args.w, C=args.C,
                          ystar_exponent=args.ystar_exponent, seed=args.seed)
    _emit(_json_text({
        "family": fam.key(), "x": float(args.x), "y_js": list(target.y_js),
        "ystars": list(target.ystars), "L": list(target.L),
        "k": list(target.k), "w": target.w, "C": target.C,
        "epsilon": target.epsilon, "ystar_exponent": target.ystar_exponent,
    }), args.out)
    return 0


def cmd_charsum(args) -> int:
    f = parse_function(args.f)
    ts = [float(v) for v in str(args.t).split(",")]
    x = float(args.x)
    y = float(args.y)
    fs = friable_set(x, y)
    rows = []
    for t in ts:
        val = char_sum(f, unit_weight(), x, y, t, fset=fs)
        rows.append({"t": t, "re": val.real, "im": val.imag})
    _emit(_json_text({"f": f.descriptor(), "x": x, "y": y, "rows": rows}), args.out)
    return 0


def cmd_friable(args) -> int:
    fs = friable_set(float(args.x), float(args.y))
    payload = {"x": fs.x, "y": fs.y, "count": len(fs)}
    if args.values:
        payload["values"] = [int(v) for v in fs.values]
    _emit(_json_text(payload), args.out)
    return 0


def cmd_verify(args) -> int:
    suite = args.suite
    kwargs = {}
    if suite == "lemma1":
        kwargs = {"configs": args.configs, "seed": args.seed}
    elif suite == "fourier":
        kwargs = {"x": float(args.x)}
        if args.f:
            kwargs["functions"] = tuple(args.f.split(";"))
    elif suite == "star":
        if args.f:
            kwargs["functions"] = tuple(args.f.split(";"))
        kwargs["ts"] = tuple(int(v) for v in args.t.split(","))
        kwargs["us"] = tuple(int(v) for v in args.u.split(","))
        kwargs["V"] = args.V
    elif suite == "mertens":
        kwargs = {"min_exp": args.min_exp, "max_exp": args.max_exp}
        if args.polys:
            kwargs["polys"] = tuple(args.polys.split(";"))
    elif suite == "upper":
        kwargs = {"family": args.family, "functions": args.f,
                  "decades": tuple(int(v) for v in args.decades.split(",")),
                  "norm": args.norm, "band": args.band, "seed": args.seed}
    elif suite == "lower":
        kwargs = {"family": args.family, "y_js": args.yj,
                  "decades": tuple(int(v) for v in args.decades.split(",")),
                  "epsilon": args.epsilon, "w": args.w, "C": args.C,
                  "ystar_exponent": args.ystar_exponent,
                  "min_frac": args.min_frac, "seed": args.seed}
    passed, report = verify_mod.VERIFY_SUITES[suite](**kwargs)
    out = args.out or f"verify_{suite}.json"
    _emit(_json_text(report), out)
    sys.stderr.write(f"verify {suite}: {'pass' if passed else 'FAIL'} "
                     f"({out}, backend={backend_name()})\n")
    return 0 if passed else 1


# ----------------------------------------------------------------------------
# parser assembly
# ----------------------------------------------------------------------------

def _add_common(sp) -> None:
    sp.add_argument("--seed", type=int, default=DEFAULT_SPLIT_SEED,
                    help="seed for the randomized root splitting")
    sp.add_argument("--threads", type=int, default=_threads_default(),
                    help="worker cap (current build runs single-threaded)")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--config", default=None,
                    help="optional key=value config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="concentra",
        description="Concentration statistics of additive functions along "
                    "polynomial shifts")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("rho", help="table of rho(p^nu) with bound checks")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--max", required=True, help="largest prime power")
    sp.add_argument("--max-nu", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_rho)

    sp = sub.add_parser("efx", help="E_f(x; weight)")
    sp.add_argument("--f", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--poly", default=None, help="weight rho of this polynomial")
    _add_common(sp)
    sp.set_defaults(func=cmd_efx)

    sp = sub.add_parser("mertens", help="Mertens-type deviations")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--X", required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_mertens)

    sp = sub.add_parser("concentration", help="joint table CSV + report JSON")
    sp.add_argument("--family", required=True, help='e.g. "x;x+1"')
    sp.add_argument("--f", required=True, help='e.g. "omega;omega"')
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--out-prefix", default="concentration")
    _add_common(sp)
    sp.set_defaults(func=cmd_concentration)

    sp = sub.add_parser("lower-target", help="y_j*, L_j, k_j for the lower bound")
    sp.add_argument("--family", required=True)
    sp.add_argument("--yj", required=True, help='semicolon list, e.g. "100;100"')
    sp.add_argument("--x", required=True)
    sp.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    sp.add_argument("--w", type=int, default=DEFAULT_W)
    sp.add_argument("--C", type=float, default=DEFAULT_C)
    sp.add_argument("--ystar-exponent", type=float, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_lower_target)

    sp = sub.add_parser("charsum", help="characteristic sum R(t) over S(x, y)")
    sp.add_argument("--f", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--t", required=True, help="comma list of t values")
    _add_common(sp)
    sp.set_defaults(func=cmd_charsum)

    sp = sub.add_parser("friable", help="enumerate S(x, y)")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--values", action="store_true")
    _add_common(sp)
    sp.set_defaults(func=cmd_friable)

    sp = sub.add_parser("verify", help="run a verification suite")
    vsub = sp.add_subparsers(dest="suite", required=True)

    v = vsub.add_parser("lemma1")
    v.add_argument("--configs", type=int, default=200)
    _verify_common(v, seed_default=42)

    v = vsub.add_parser("fourier")
    v.add_argument("--x", default="1e4")
    v.add_argument("--f", default="omega;big-omega")
    _verify_common(v)

    v = vsub.add_parser("star")
    v.add_argument("--f", default="omega;big-omega")
    v.add_argument("--t", default="10,30,100")
    v.add_argument("--u", default="1,2,3")
    v.add_argument("--V", type=float, default=2.0)
    _verify_common(v)

    v = vsub.add_parser("mertens")
    v.add_argument("--polys", default="x;x^2+1;x^2+x+1")
    v.add_argument("--min-exp", type=int, default=4)
    v.add_argument("--max-exp", type=int, default=7)
    _verify_common(v)

    v = vsub.add_parser("upper")
    v.add_argument("--family", default="x")
    v.add_argument("--f", default="omega")
    v.add_argument("--decades", default="5,6,7")
    v.add_argument("--norm", choices=("sqrt-e", "loglog"), default="sqrt-e")
    v.add_argument("--band", type=float, default=2.0)
    _verify_common(v)

    v = vsub.add_parser("lower")
    v.add_argument("--family", default="x")
    v.add_argument("--yj", default="100")
    v.add_argument("--decades", default="5,6,7")
    v.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    v.add_argument("--w", type=int, default=DEFAULT_W)
    v.add_argument("--C", type=float, default=DEFAULT_C)
    v.add_argument("--ystar-exponent", type=float, default=0.3)
    v.add_argument("--min-frac", type=float, default=0.2)
    _verify_common(v)

    return ap


def _verify_common(v, seed_default: int = DEFAULT_SPLIT_SEED) -> None:
    v.add_argument("--seed", type=int, default=seed_default)
    v.add_argument("--threads", type=int, default=_threads_default())
    v.add_argument("--out", default=None,
                   help="JSON detail path (default verify_<suite>.json)")
    v.add_argument("--config", default=None)
    v.set_defaults(func=cmd_verify)


def _apply_config_file(ap: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """key=value config file; explicit flags override file values."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv
    path = argv[idx + 1]
    inject: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line or "=" not in line:
                continue
            key, val = line.split("=", 1)
            flag = "--" + key.strip().replace("_", "-")
            if flag in argv:
                continue
            inject.extend([flag, val.strip()])
    # insert after the subcommand tokens, before explicit flags
    return argv + inject


def main(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(ap, argv)
        args = ap.parse_args(argv)
    except OSError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    try:
        return args.func(args)
    except (PolynomialParseError, ValueError) as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return 2
    except ConcentraError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
