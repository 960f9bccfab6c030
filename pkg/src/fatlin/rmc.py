"""Rank-metric codes from duals of linear sets: distributions, identities, bounds.

The pipeline dualizes a subspace under the F_q-bilinear form Tr(u . v),
takes the code generated by the dual's basis as columns, enumerates the
full rank-weight distribution, and cross-checks it against the three-weight
prediction, the MacWilliams identities, the Singleton bound and the rank
bounds.  All arithmetic is exact; the MacWilliams solve runs over rationals
and aborts on any non-integral coefficient instead of rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ConsistencyError,
    EnumerationCapError,
    PreconditionError,
)
from .gf import FieldCtx, field_nullspace, field_rank
from .kernels import batched_rank_fp, nullspace_fp, rank_fp, reduce_rows, rref_fp
from .linset import (
    Classification,
    SpectrumReport,
    Subspace,
    enumeration_cap,
    weight_spectrum,
)

_CHUNK = 1 << 14


# ---------------------------------------------------------------------------
# duality under the trace form
# ---------------------------------------------------------------------------

def perp_prime(U: Subspace) -> Subspace:
    """Orthogonal complement under (u, v) -> Tr_{q^n/q}(u . v).

    Returns an F_q-basis subspace of dimension nk - rho.
    """
    ctx = U.ctx
    k, deg, h = U.k, ctx.deg, ctx.h
    tr_coord = ctx.trace_coord_matrix(h)  # (h, deg)
    rows = np.zeros((U.rho * h, k * deg), dtype=np.int64)
    for b, vec in enumerate(U.basis_vals):
        for j, c in enumerate(vec):
            cond = (tr_coord @ ctx.mult_matrix(c)) % ctx.p  # (h, deg)
            rows[b * h:(b + 1) * h, j * deg:(j + 1) * deg] = cond
    kernel = nullspace_fp(rows, ctx.p)
    if kernel.shape[0] != ctx.n * k * h - U.rho * h:
        raise ConsistencyError("dual dimension mismatch (degenerate form?)")
    # extract an F_q-basis from the F_p-kernel basis
    zeta = ctx.fq_fp_basis()
    chosen: list[tuple[int, ...]] = []
    ech = np.zeros((0, k * deg), dtype=np.int64)
    piv: list[int] = []
    target = (ctx.n * k * h - U.rho * h) // h
    for row in kernel:
        red = reduce_rows(row[None, :], ech, piv, ctx.p)
        if not red.any():
            continue
        vec = tuple(int(row[j * deg:(j + 1) * deg].astype(np.int64) @ ctx._p_pows)
                    for j in range(k))
        chosen.append(vec)
        closure = []
        for z in zeta:
            crow = np.concatenate([
                np.array(ctx.digits_of(ctx.mul(z, v)), dtype=np.int64)
                for v in vec])
            closure.append(crow)
        ech, piv = rref_fp(np.vstack([ech, np.array(closure)]), ctx.p)
        if len(chosen) == target:
            break
    if len(chosen) != target:
        raise ConsistencyError("could not extract an F_q-basis of the dual")
    return Subspace(ctx, k, chosen)


# ---------------------------------------------------------------------------
# codes
# ---------------------------------------------------------------------------

@dataclass
class RankCode:
    ctx: FieldCtx
    N: int                       # length
    k: int                       # dimension over F_{q^n}
    G: tuple[tuple[int, ...], ...]  # k x N generator matrix (encoded values)
    nondegenerate: bool = True
    d_claimed: Optional[int] = None

    def to_json(self) -> dict:
        ctx = self.ctx
        return {"field": ctx.to_json(), "N": self.N, "k": self.k,
                "G": [[list(ctx.digits_of(c)) for c in row] for row in self.G],
                "nondegenerate": self.nondegenerate,
                "d_claimed": self.d_claimed}


@dataclass
class RankDistribution:
    A: tuple[int, ...]  # A[j] = number of codewords of rank weight j

    def to_json(self) -> list[int]:
        return list(self.A)


def code_of_dual(U: Subspace, classification: Optional[Classification] = None) -> RankCode:
    """Code generated by the trace-dual of U, columns an echelonized basis.

    Requires the dual to span F_{q^n}^k over F_{q^n} (equivalently: no point
    of weight n in L_U); the regular-fat parameters, when supplied, only set
    the claimed minimum distance n - i.
    """
    ctx = U.ctx
    Uperp = perp_prime(U)
    N = Uperp.rho
    k = U.k
    G = tuple(tuple(vec[i] for vec in Uperp.basis_vals) for i in range(k))
    if field_rank(ctx, [list(row) for row in G]) != k:
        raise PreconditionError(
            "dual does not span the ambient: L_U has a point of weight n")
    d_claimed = None
    if classification is not None and classification.i is not None:
        d_claimed = ctx.n - classification.i
    return RankCode(ctx, N, k, G, nondegenerate=True, d_claimed=d_claimed)


def rank_weight(ctx: FieldCtx, v: Sequence, N: Optional[int] = None) -> int:
    """F_q-dimension of the span of the coordinates of v."""
    vals = [ctx.elem(c).val for c in v]
    if N is not None and len(vals) != N:
        raise PreconditionError("vector length mismatch")
    zeta = ctx.fq_fp_basis()
    rows = [ctx.digits_of(ctx.mul(z, c)) for c in vals for z in zeta]
    r = rank_fp(np.array(rows, dtype=np.int64), ctx.p)
    if r % ctx.h:
        raise ConsistencyError("coordinate span is not an F_q-space")
    return r // ctx.h


def _hyperplane_intersection_dim(U: Subspace, x_vals: Sequence[int]) -> int:
    """dim_{F_q}(U meet x^perp) for the dot-product hyperplane of x."""
    ctx = U.ctx
    k, deg = U.k, ctx.deg
    basis = field_nullspace(ctx, [list(x_vals)])
    rows = []
    for vec in basis:
        for m in range(deg):
            b = ctx.p ** m
            rows.append(np.concatenate([
                np.array(ctx.digits_of(ctx.mul(b, c)), dtype=np.int64)
                for c in vec]))
    hyper = np.array(rows, dtype=np.int64)
    stacked = np.vstack([hyper, U.fp_rows()])
    r = rank_fp(stacked, ctx.p)
    inter_p = (k - 1) * deg + U.rho * ctx.h - r
    if inter_p % ctx.h:
        raise ConsistencyError("intersection is not an F_q-space")
    return inter_p // ctx.h


def rank_distribution(C: RankCode, cap: Optional[int] = None,
                      jobs: int = 1) -> RankDistribution:
    """Exhaustive rank-weight tally over all q^(nk) codewords.

    Three deterministic sample codewords are cross-checked against the
    hyperplane formula w(xG) = N - dim(U_span meet x^perp).
    """
    ctx = C.ctx
    cap = cap if cap is not None else enumeration_cap()
    total = ctx.order ** C.k
    if total > cap:
        raise EnumerationCapError(
            f"enumeration of {total} codewords exceeds the cap {cap}")
    n, h, deg, p = ctx.n, ctx.h, ctx.deg, ctx.p
    zeta = ctx.fq_fp_basis()
    # digit tensors of zeta_a * (x * G_row) for every field value x
    all_vals = np.arange(ctx.order, dtype=np.int64)
    row_tabs = []
    for row in C.G:
        tabs = []
        for z in zeta:
            per_coord = []
            for c in row:
                prod = ctx.mul_vec(all_vals, ctx.mul(z, c))
                per_coord.append(ctx.digits_vec(prod))
            tabs.append(np.stack(per_coord, axis=1))  # (order, N, deg)
        row_tabs.append(tabs)
    A = np.zeros(n + 1, dtype=np.int64)

    def process(lo: int, hi: int) -> np.ndarray:
        counters = np.arange(lo, hi, dtype=np.int64)
        idx = [(counters // (ctx.order ** j)) % ctx.order for j in range(C.k)]
        B = counters.size
        local = np.zeros(n + 1, dtype=np.int64)
        mats = np.zeros((B, C.N * h, deg), dtype=np.int64)
        for a in range(h):
            acc = row_tabs[0][a][idx[0]]
            for j in range(1, C.k):
                acc = acc + row_tabs[j][a][idx[j]]
            mats[:, a * C.N:(a + 1) * C.N, :] = acc % p
        ranks = batched_rank_fp(mats, p)
        if np.any(ranks % h):
            raise ConsistencyError("codeword span is not an F_q-space")
        w, cnt = np.unique(ranks // h, return_counts=True)
        local[w] += cnt
        return local

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        bounds = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for local in pool.map(lambda bd: process(*bd), bounds):
                A += local
    else:
        for lo in range(0, total, _CHUNK):
            A += process(lo, min(lo + _CHUNK, total))
    if A[0] != 1 or int(A.sum()) != total:
        raise ConsistencyError("rank distribution does not cover the code")
    # spot-check three codewords against the hyperplane formula
    u_span = _span_of_columns(C)
    samples = [1, ctx.order - 1, (ctx.order ** C.k - 1) // 2 or 1]
    for counter in samples:
        xs = [(counter // (ctx.order ** j)) % ctx.order for j in range(C.k)]
        if all(x == 0 for x in xs):
            continue
        word = _codeword(C, xs)
        w_direct = rank_weight(ctx, word)
        w_formula = C.N - _hyperplane_intersection_dim(u_span, xs)
        if w_direct != w_formula:
            raise ConsistencyError("hyperplane weight formula disagrees")
    return RankDistribution(tuple(int(a) for a in A))


def _codeword(C: RankCode, xs: Sequence[int]) -> list[int]:
    ctx = C.ctx
    word = [0] * C.N
    for j, x in enumerate(xs):
        if x:
            for c in range(C.N):
                word[c] = ctx.add(word[c], ctx.mul(x, C.G[j][c]))
    return word


def _span_of_columns(C: RankCode) -> Subspace:
    cols = [tuple(C.G[i][c] for i in range(C.k)) for c in range(C.N)]
    return Subspace(C.ctx, C.k, cols)


def predicted_distribution(q: int, n: int, k: int, rho: int, r: int, i: int,
                           size: int) -> RankDistribution:
    """Three-weight law for the dual code of an (r, i)-regular fat set."""
    if r and i < 2:
        raise PreconditionError("heavy weight i must be at least 2")
    A = [0] * (n + 1)
    A[0] = 1
    qn = q ** n
    if r:
        A[n - i] += r * (qn - 1)
    A[n - 1] += (size - r) * (qn - 1)
    A[n] += q ** (n * k) - 1 - size * (qn - 1)
    return RankDistribution(tuple(A))


# ---------------------------------------------------------------------------
# Gaussian binomials, MacWilliams, bounds
# ---------------------------------------------------------------------------

def gaussian_binom(r: int, h: int, q: int) -> int:
    """Number of h-dimensional subspaces of F_q^r; 0 outside 0 <= h <= r."""
    if h < 0 or h > r:
        return 0
    if h == 0:
        return 1
    num = den = 1
    for j in range(h):
        num *= q ** (r - j) - 1
        den *= q ** (h - j) - 1
    if num % den:
        raise ConsistencyError("Gaussian binomial is not integral")
    return num // den


def macwilliams_transform(A: Sequence[int], N: int, n: int, k: int,
                          q: int) -> tuple[int, ...]:
    """Dual rank distribution B from A by forward substitution.

    Solves, for nu = 0..n,
      sum_{j<=n-nu} A_j [n-j, nu]_q = |C| q^(-N nu) sum_{j<=nu} B_j [n-j, nu-j]_q
    for B; each step introduces one new B_nu with unit coefficient.  Raises
    on non-integral or negative values (these signal an inconsistent A).
    """
    if len(A) != n + 1:
        raise PreconditionError(f"distribution must have {n + 1} entries")
    code_size = q ** (n * k)
    if sum(A) != code_size:
        raise PreconditionError("distribution does not sum to |C|")
    B: list[int] = []
    for nu in range(n + 1):
        lhs = sum(A[j] * gaussian_binom(n - j, nu, q) for j in range(n - nu + 1))
        rhs_known = sum(B[j] * gaussian_binom(n - j, nu - j, q) for j in range(nu))
        val = Fraction(lhs) * Fraction(q ** (N * nu), code_size) - rhs_known
        if val.denominator != 1 or val < 0:
            raise ConsistencyError(
                f"MacWilliams transform yields non-admissible B_{nu} = {val}")
        B.append(int(val))
    return tuple(B)


def dual_code_brute_force(C: RankCode, cap: int = 1 << 20) -> Optional[tuple[int, ...]]:
    """Rank distribution of the dot-product dual by direct enumeration.

    Returns None when the dual is too large to enumerate under the cap.
    """
    ctx = C.ctx
    dual_dim = C.N - C.k
    if ctx.order ** dual_dim > cap:
        return None
    rows = [[C.G[i][c] for c in range(C.N)] for i in range(C.k)]
    kernel = field_nullspace(ctx, rows)
    if len(kernel) != dual_dim:
        raise ConsistencyError("dual code dimension mismatch")
    B = np.zeros(ctx.n + 1, dtype=np.int64)
    total = ctx.order ** dual_dim
    for counter in range(total):
        xs = [(counter // (ctx.order ** j)) % ctx.order for j in range(dual_dim)]
        word = [0] * C.N
        for j, x in enumerate(xs):
            if x:
                for c in range(C.N):
                    word[c] = ctx.add(word[c], ctx.mul(x, kernel[j][c]))
        B[rank_weight(ctx, word)] += 1
    return tuple(int(b) for b in B)


def singleton_check(N: int, k: int, d: int, n: int, q: int) -> bool:
    """Rank-metric Singleton inequality nk <= max(N,n)(min(N,n) - d + 1)."""
    return n * k <= max(N, n) * (min(N, n) - d + 1)


def rho_bound_check(n: int, k: int, i: int, rho: int) -> Optional[bool]:
    """rho <= nki/(i+1) under the hypothesis rho <= nk - n; None if unmet."""
    if rho > n * k - n:
        return None
    if i >= n:
        raise PreconditionError("heavy weight must satisfy i < n")
    return rho * (i + 1) <= n * k * i


def r_lower_bound(q: int, n: int, k: int, i: int, rho: int) -> Fraction:
    """Exact rational lower bound on the heavy-point count r."""
    if i < 2:
        raise PreconditionError("bound needs i >= 2")
    if i >= n:
        raise PreconditionError("bound needs i < n")
    top = (Fraction(q) ** (2 * rho - n * k) - 1) * gaussian_binom(n, 2, q)
    bottom = (q ** n - 1) * gaussian_binom(i, 2, q)
    return top / bottom


# ---------------------------------------------------------------------------
# assembled report
# ---------------------------------------------------------------------------

@dataclass
class CodeReport:
    params: tuple[int, int, int]
    A: tuple[int, ...]
    B: tuple[int, ...]
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"params": list(self.params), "A": list(self.A),
                "B": list(self.B), "checks": self.checks}


def code_report(U: Subspace, report: Optional[SpectrumReport] = None,
                cap: Optional[int] = None, jobs: int = 1) -> CodeReport:
    """Full pipeline: dualize, enumerate, transform, check all identities."""
    ctx = U.ctx
    if report is None:
        report = weight_spectrum(U, cap=cap)
    cls = report.classification
    C = code_of_dual(U, cls)
    dist = rank_distribution(C, cap=cap, jobs=jobs)
    A = dist.A
    n, q, k, N = ctx.n, ctx.q, C.k, C.N
    d = next(j for j in range(1, n + 1) if A[j])
    B = macwilliams_transform(A, N, n, k, q)
    checks: dict = {}
    checks["macwilliams_integral"] = True  # transform would have raised
    checks["B0_one"] = B[0] == 1
    checks["B1_zero"] = B[1] == 0
    checks["B_nonnegative"] = all(b >= 0 for b in B)
    checks["B_total"] = sum(B) == q ** (n * (N - k))
    checks["singleton"] = singleton_check(N, k, d, n, q)
    reg = cls.as_regular()
    if reg is not None and reg[0] > 0:
        r, i = reg
        pred = predicted_distribution(q, n, k, U.rho, r, i, report.size)
        checks["three_weight_match"] = pred.A == A
        checks["min_distance_matches"] = d == n - i
        rb = rho_bound_check(n, k, i, U.rho)
        checks["rho_bound"] = rb if rb is not None else "not-applicable"
        bound = r_lower_bound(q, n, k, i, U.rho)
        checks["r_bound"] = {"bound": f"{bound.numerator}/{bound.denominator}",
                             "r": r, "ok": r >= bound}
    elif reg is not None:
        pred = predicted_distribution(q, n, k, U.rho, 0, 0, report.size)
        checks["three_weight_match"] = pred.A == A
    brute = dual_code_brute_force(C)
    if brute is not None:
        checks["dual_brute_force_match"] = brute == B
    return CodeReport((N, k, d), A, B, checks)
