# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled GF(p) rank kernels; mirrors kernels.pure signatures."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef int _rank_one(unsigned char[:, ::1] m, int rows, int cols, int p,
                   long[::1] inv) nogil:
    cdef int r = 0, c, i, j, piv
    cdef int pivval, factor
    cdef unsigned char tmp
    for c in range(cols):
        if r >= rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                tmp = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = tmp
        pivval = <int> inv[m[r, c]]
        if pivval != 1:
            for j in range(c, cols):
                m[r, j] = <unsigned char> ((m[r, j] * pivval) % p)
        for i in range(r + 1, rows):
            factor = m[i, c]
            if factor != 0:
                for j in range(c, cols):
                    m[i, j] = <unsigned char> ((m[i, j] + (p - factor) * m[r, j]) % p)
        r += 1
    return r


def rank_fp(unsigned char[:, ::1] mat, int p):
    """Rank over GF(p) of a single matrix (entries already reduced mod p)."""
    cdef int rows = mat.shape[0]
    cdef int cols = mat.shape[1]
    work = np.array(mat, dtype=np.uint8)
    cdef unsigned char[:, ::1] m = work
    inv_np = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv_np[x] = pow(x, p - 2, p)
    cdef long[::1] inv = inv_np
    cdef int r
    with nogil:
        r = _rank_one(m, rows, cols, p, inv)
    return r


def batched_rank_fp(unsigned char[:, :, ::1] mats, int p):
    """Ranks over GF(p) of a (B, R, C) stack of matrices."""
    cdef int B = mats.shape[0]
    cdef int R = mats.shape[1]
    cdef int C = mats.shape[2]
    work = np.array(mats, dtype=np.uint8)
    cdef unsigned char[:, :, ::1] m = work
    out = np.zeros(B, dtype=np.int64)
    cdef long[::1] ranks = out
    inv_np = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv_np[x] = pow(x, p - 2, p)
    cdef long[::1] inv = inv_np
    cdef int b
    with nogil:
        for b in range(B):
            ranks[b] = _rank_one(m[b], R, C, p, inv)
    return out
