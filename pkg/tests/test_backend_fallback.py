"""The numpy fallback path (CONCENTRA_NUMBA=0) must agree with the numba
kernels on integer outputs.  The flag resolves at import time, so each
backend runs in its own subprocess.
"""

import json
import os
import subprocess
import sys

PKG_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

_PROBE = r"""
import json
import numpy as np
from concentra import _kernels
from concentra._backend import backend_name
from concentra.polynomial import parse_poly
from concentra.sieve import primes_up_to
from concentra.concentration import build_table
from concentra.additive import omega, big_omega
from conftest import quiet_family

parr = primes_up_to(3000).primes()
out = {"backend": backend_name()}
out["scan"] = _kernels.count_roots_mod(np.array([1, 0, 1]), parr[:200]).tolist()
off, flat = _kernels.roots_csr([1, 0, 1], parr)
out["roots_offsets_tail"] = off[-5:].tolist()
out["roots_sum"] = int(flat.sum())
fam = quiet_family("x", "x^2+1")
tab = build_table(fam, [omega(), big_omega()], 2000, 1500)
out["table"] = sorted([list(k) + [c] for k, c in tab.counts.items()])
out["excluded"] = tab.excluded
print(json.dumps(out, sort_keys=True))
"""


def _run_backend(flag: str) -> dict:
    env = dict(os.environ)
    env["CONCENTRA_NUMBA"] = flag
    env["PYTHONPATH"] = os.path.join(PKG_ROOT, "tests")
    res = subprocess.run([sys.executable, "-c", _PROBE], capture_output=True,
                         text=True, cwd=PKG_ROOT, env=env)
    assert res.returncode == 0, res.stderr
    return json.loads(res.stdout)


def test_backends_agree():
    fast = _run_backend("1")
    slow = _run_backend("0")
    assert fast["backend"] == "numba"
    assert slow["backend"] == "numpy"
    for key in ("scan", "roots_offsets_tail", "roots_sum", "table", "excluded"):
        assert fast[key] == slow[key], key
