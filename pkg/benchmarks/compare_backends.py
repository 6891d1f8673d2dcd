#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure numpy/Python fallback.

Each backend runs in a subprocess because CONCENTRA_NUMBA resolves at import
time.  The numba side is run once untimed to absorb JIT compilation, then both
sides time identical workloads and the script checks the outputs match.

Usage: python benchmarks/compare_backends.py [--scale small|medium]
"""

import argparse
import json
import os
import subprocess
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

_WORK = r"""
import json, time
import numpy as np
from concentra import _kernels
from concentra._backend import backend_name
from concentra.sieve import primes_up_to
from concentra.concentration import build_table
from concentra.additive import omega
from concentra.polynomial import parse_poly, validate_family
import warnings
warnings.simplefilter("ignore")

scale = {scale!r}
limits = {{"small": (2 * 10**4, 10**4), "medium": (2 * 10**5, 10**5)}}
scan_limit, x = limits[scale]

fam = validate_family([parse_poly("x^2+1")])
parr = primes_up_to(scan_limit).primes()

results = {{"backend": backend_name()}}

t0 = time.perf_counter()
scan = _kernels.count_roots_mod(np.array([1, 0, 1]), parr)
results["scan_s"] = time.perf_counter() - t0
results["scan_sum"] = int(scan.sum())

t0 = time.perf_counter()
off, flat = _kernels.roots_csr([1, 0, 1], parr)
results["roots_s"] = time.perf_counter() - t0
results["roots_count"] = int(off[-1])

t0 = time.perf_counter()
tab = build_table(fam, [omega()], x, x)
results["table_s"] = time.perf_counter() - t0
results["table_top"] = sorted(tab.counts.items())[:3]
results["table_total"] = tab.total

print(json.dumps(results))
"""


def run_once(numba_flag: str, scale: str) -> dict:
    env = dict(os.environ)
    env["CONCENTRA_NUMBA"] = numba_flag
    code = _WORK.format(scale=scale)
    res = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, cwd=ROOT, env=env)
    if res.returncode != 0:
        sys.stderr.write(res.stderr)
        raise SystemExit(1)
    return json.loads(res.stdout)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--scale", choices=("small", "medium"), default="medium")
    args = ap.parse_args()

    run_once("1", "small")  # warm the JIT cache
    fast = run_once("1", args.scale)
    slow = run_once("0", args.scale)

    for key in ("scan_sum", "roots_count", "table_total", "table_top"):
        if fast[key] != slow[key]:
            print(f"MISMATCH on {key}: {fast[key]} vs {slow[key]}")
            return 1

    print(f"workload scale: {args.scale}")
    print(f"{'kernel':<22}{'numba':>10}{'numpy':>10}{'speedup':>9}")
    for name, key in (("root-count scan", "scan_s"),
                      ("root extraction", "roots_s"),
                      ("concentration table", "table_s")):
        a, b = fast[key], slow[key]
        print(f"{name:<22}{a:>9.3f}s{b:>9.3f}s{b / a:>8.1f}x")
    print("outputs identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
