"""Backend selection: numba-jitted kernels vs the pure numpy/Python fallback.

The env flag CONCENTRA_NUMBA controls the choice: unset or "1"/"true" uses
numba when importable, "0"/"false" forces the fallback.  Both paths produce
identical results on integer data; the fallback exists for environments
without a working JIT and as a reference implementation for the kernels.
"""

import os
import warnings


def _env_wants_numba() -> bool:
    raw = os.environ.get("CONCENTRA_NUMBA", "1").strip().lower()
    return raw not in ("0", "false", "no", "off")


def _resolve() -> bool:
    if not _env_wants_numba():
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        warnings.warn("numba not importable; falling back to the numpy backend")
        return False
    return True


USE_NUMBA = _resolve()


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
