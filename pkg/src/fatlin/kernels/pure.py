"""Pure numpy kernels for row reduction over GF(p).

These are the reference implementations; a compiled extension with the same
signatures may replace `rank_fp` and `batched_rank_fp` at import time (see
the package __init__).  Matrices are small (tens of rows/columns) but the
batched rank runs over hundreds of thousands of matrices, which is the hot
loop of every exhaustive enumeration in this package.
"""

from __future__ import annotations

import numpy as np


def _inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, p - 2, p)
    return inv


_INV_CACHE: dict[int, np.ndarray] = {}


def inverse_table(p: int) -> np.ndarray:
    tab = _INV_CACHE.get(p)
    if tab is None:
        tab = _INV_CACHE[p] = _inverse_table(p)
    return tab


def rank_fp(mat: np.ndarray, p: int) -> int:
    """Rank of a matrix over GF(p)."""
    m = np.array(mat, dtype=np.int64) % p
    if m.size == 0:
        return 0
    rows, cols = m.shape
    inv = inverse_table(p)
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = None
        col = m[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * inv[m[r, c]]) % p
        below = m[r + 1:, c]
        nzb = np.nonzero(below)[0]
        if nzb.size:
            rows_idx = r + 1 + nzb
            m[rows_idx] = (m[rows_idx] - np.outer(m[rows_idx, c], m[r])) % p
        r += 1
    return r


def rref_fp(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p); returns (rref, pivot columns)."""
    m = np.array(mat, dtype=np.int64) % p
    if m.size == 0:
        return m, []
    rows, cols = m.shape
    inv = inverse_table(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * inv[m[r, c]]) % p
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        if others.size:
            m[others] = (m[others] - np.outer(m[others, c], m[r])) % p
        pivots.append(c)
        r += 1
    return m[: len(pivots)], pivots


def reduce_rows(rows: np.ndarray, echelon: np.ndarray, pivots: list[int], p: int) -> np.ndarray:
    """Reduce rows modulo a row space given in reduced echelon form.

    Because the echelon is fully reduced (each pivot column is zero in every
    other echelon row), the sequential elimination collapses into one matrix
    product with the pivot-column coefficients.
    """
    out = np.array(rows, dtype=np.int32)
    np.mod(out, p, out=out)
    if not pivots or out.size == 0:
        return out
    ech = np.asarray(echelon, dtype=np.int32)
    out -= out[..., list(pivots)] @ ech
    np.mod(out, p, out=out)
    return out


def nullspace_fp(mat: np.ndarray, p: int) -> np.ndarray:
    """Canonical basis (as rows) of the right kernel of `mat` over GF(p)."""
    m = np.asarray(mat, dtype=np.int64)
    if m.size == 0:
        return np.eye(m.shape[1] if m.ndim == 2 else 0, dtype=np.int64)
    rows, cols = m.shape
    red, pivots = rref_fp(m, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for bi, fc in enumerate(free):
        basis[bi, fc] = 1
        for ri, pc in enumerate(pivots):
            basis[bi, pc] = (-red[ri, fc]) % p
    return basis


def solve_fp(mat: np.ndarray, rhs: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of mat @ x = rhs over GF(p), or None if inconsistent."""
    m = np.asarray(mat, dtype=np.int64)
    b = np.asarray(rhs, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([m, b])
    red, pivots = rref_fp(aug, p)
    cols = m.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for ri, pc in enumerate(pivots):
        x[pc] = red[ri, cols]
    return x


def inv_fp(mat: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over GF(p); raises on singular input."""
    m = np.asarray(mat, dtype=np.int64)
    n = m.shape[0]
    aug = np.hstack([m % p, np.eye(n, dtype=np.int64)])
    red, pivots = rref_fp(aug, p)
    if pivots != list(range(n)):
        raise ZeroDivisionError("matrix is singular over GF(p)")
    return red[:, n:]


def batched_rank_fp(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks over GF(p) of a (B, R, C) stack of matrices.

    Vectorized Gauss-Jordan across the batch axis: every matrix consumes the
    same column in lockstep but keeps its own pivot-row counter.
    """
    m = np.array(mats, dtype=np.int64) % p
    if m.ndim != 3:
        raise ValueError("expected a 3-d array of matrices")
    B, R, C = m.shape
    if B == 0 or R == 0 or C == 0:
        return np.zeros(B, dtype=np.int64)
    inv = inverse_table(p)
    r = np.zeros(B, dtype=np.int64)
    row_idx = np.arange(R)
    batch_idx = np.arange(B)
    for c in range(C):
        active = r < R
        if not np.any(active):
            break
        col = m[:, :, c]
        candidate = (col != 0) & (row_idx[None, :] >= r[:, None])
        has = candidate.any(axis=1) & active
        if not np.any(has):
            continue
        piv = np.argmax(candidate, axis=1)
        sel = np.nonzero(has)[0]
        # swap pivot row into position r
        pr = r[sel]
        pv = piv[sel]
        tmp = m[sel, pr, :].copy()
        m[sel, pr, :] = m[sel, pv, :]
        m[sel, pv, :] = tmp
        # normalize pivot rows
        m[sel, pr, :] = (m[sel, pr, :] * inv[m[sel, pr, c]][:, None]) % p
        # eliminate the column everywhere else
        pivot_rows = np.zeros((B, C), dtype=np.int64)
        pivot_rows[sel] = m[sel, pr, :]
        factor = m[:, :, c].copy()
        factor[~has] = 0
        factor[sel, pr] = 0
        m = (m - factor[:, :, None] * pivot_rows[:, None, :]) % p
        r[has] += 1
    return r
