"""Row-reduction kernels: pure/compiled agreement and algebraic properties."""

import numpy as np
import pytest

from fatlin import kernels
from fatlin.kernels import pure


@pytest.mark.parametrize("p", [2, 3, 5, 13])
def test_rank_known_matrices(p):
    eye = np.eye(4, dtype=np.int64)
    assert kernels.rank_fp(eye, p) == 4
    assert kernels.rank_fp(np.zeros((3, 5), dtype=np.int64), p) == 0
    m = np.array([[1, 2], [2, 4]], dtype=np.int64)  # second row = 2 * first
    assert kernels.rank_fp(m, p) == (1 if p != 2 else 1)


def test_rank_matches_row_space_size():
    # over GF(2) the row space can be enumerated directly
    rng = np.random.default_rng(5)
    for _ in range(25):
        m = rng.integers(0, 2, size=(5, 7))
        r = kernels.rank_fp(m, 2)
        span = set()
        for mask in range(1 << 5):
            v = np.zeros(7, dtype=np.int64)
            for i in range(5):
                if mask >> i & 1:
                    v = (v + m[i]) % 2
            span.add(v.tobytes())
        assert len(span) == 2 ** r


@pytest.mark.parametrize("p", [2, 3, 5])
def test_pure_and_selected_agree(p):
    rng = np.random.default_rng(p)
    mats = rng.integers(0, p, size=(300, 8, 11))
    batch = kernels.batched_rank_fp(mats, p)
    ref = pure.batched_rank_fp(mats, p)
    assert np.array_equal(batch, ref)
    for i in range(0, 300, 17):
        assert kernels.rank_fp(mats[i], p) == batch[i]


def test_rref_properties():
    rng = np.random.default_rng(9)
    m = rng.integers(0, 3, size=(6, 9))
    red, pivots = kernels.rref_fp(m, 3)
    assert len(pivots) == kernels.rank_fp(m, 3)
    for i, c in enumerate(pivots):
        col = red[:, c]
        assert col[i] == 1 and np.count_nonzero(col) == 1


def test_nullspace_annihilates():
    rng = np.random.default_rng(2)
    for p in (2, 3, 5):
        m = rng.integers(0, p, size=(4, 7))
        ns = kernels.nullspace_fp(m, p)
        assert ns.shape[0] == 7 - kernels.rank_fp(m, p)
        assert not ((m @ ns.T) % p).any()
        if ns.shape[0]:
            assert kernels.rank_fp(ns, p) == ns.shape[0]


def test_solve_and_inverse():
    rng = np.random.default_rng(3)
    p = 5
    while True:
        m = rng.integers(0, p, size=(5, 5))
        if kernels.rank_fp(m, p) == 5:
            break
    inv = kernels.inv_fp(m, p)
    assert np.array_equal((m @ inv) % p, np.eye(5, dtype=np.int64))
    b = rng.integers(0, p, size=5)
    x = kernels.solve_fp(m, b, p)
    assert np.array_equal((m @ x) % p, b % p)
    singular = np.vstack([m[:4], m[0]])
    with pytest.raises(ZeroDivisionError):
        kernels.inv_fp(singular, p)


def test_solve_inconsistent_returns_none():
    m = np.array([[1, 0], [1, 0]], dtype=np.int64)
    assert kernels.solve_fp(m, np.array([1, 2]), 3) is None


def test_reduce_rows_against_echelon():
    m = np.array([[1, 0, 2], [0, 1, 1]], dtype=np.int64)
    red, piv = kernels.rref_fp(m, 3)
    inside = np.array([[1, 1, 0], [2, 0, 1]], dtype=np.int64)  # combos of rows
    out = kernels.reduce_rows(inside, red, piv, 3)
    assert not out.any()
    outside = np.array([[0, 0, 1]], dtype=np.int64)
    assert kernels.reduce_rows(outside, red, piv, 3).any()


def test_batched_rank_shapes_and_degenerate():
    assert kernels.batched_rank_fp(np.zeros((0, 3, 3), dtype=np.int64), 3).size == 0
    mats = np.stack([np.eye(3, dtype=np.int64),
                     np.zeros((3, 3), dtype=np.int64)])
    assert list(kernels.batched_rank_fp(mats, 2)) == [3, 0]
