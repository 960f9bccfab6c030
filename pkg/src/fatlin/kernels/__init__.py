"""GF(p) row-reduction kernels with optional compiled fast paths.

`rank_fp` and `batched_rank_fp` dominate the runtime of every exhaustive
enumeration, so they come in two flavours: the numpy reference in
`kernels.pure` and a Cython extension `kernels._fastrank`.  The compiled
version is selected at import when present; set FATLIN_PURE=1 to force the
pure implementation.  All other helpers are numpy-only.
"""

from __future__ import annotations

import os

import numpy as np

from . import pure
from .pure import (  # noqa: F401
    inv_fp,
    inverse_table,
    nullspace_fp,
    reduce_rows,
    rref_fp,
    solve_fp,
)

HAVE_COMPILED = False
_fast = None

if not os.environ.get("FATLIN_PURE"):
    try:
        from . import _fastrank as _fast  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        _fast = None


def rank_fp(mat, p: int) -> int:
    if _fast is not None:
        m = np.ascontiguousarray(np.asarray(mat, dtype=np.uint8) % p)
        if m.ndim != 2 or m.size == 0:
            return pure.rank_fp(mat, p)
        return int(_fast.rank_fp(m, p))
    return pure.rank_fp(mat, p)


def batched_rank_fp(mats, p: int) -> np.ndarray:
    if _fast is not None:
        m = np.ascontiguousarray(np.asarray(mats, dtype=np.uint8) % p)
        if m.ndim != 3 or m.size == 0:
            return pure.batched_rank_fp(mats, p)
        return _fast.batched_rank_fp(m, p)
    return pure.batched_rank_fp(mats, p)


def implementation() -> str:
    return "compiled" if HAVE_COMPILED else "pure"
