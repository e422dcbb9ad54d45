"""Numba on/off switch for the hot kernels.

Kernels are written once as plain functions over numpy arrays. By default
they are compiled with numba @njit; setting SUBMATCH_JIT=0 selects the
pure-numpy fallback, which runs the identical source interpreted (integer
overflow is wrap-around in both modes). `submatch bench --engines both`
compares the two paths on the same workload.
"""

from __future__ import annotations

import functools
import os

import numpy as np


def _flag() -> bool:
    raw = os.environ.get("SUBMATCH_JIT", "1").strip().lower()
    return raw not in ("0", "false", "no", "off")


JIT_ENABLED = _flag()

if JIT_ENABLED:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover
        JIT_ENABLED = False

if JIT_ENABLED:
    def kernel(fn):
        return _njit(cache=True)(fn)
else:
    def kernel(fn):
        @functools.wraps(fn)
        def run(*args):
            with np.errstate(over="ignore"):
                return fn(*args)
        run.py_func = fn
        return run


def engine_name() -> str:
    return "jit" if JIT_ENABLED else "py"
