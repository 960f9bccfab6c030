"""Rank-metric code pipeline: duality, distributions, identities, bounds."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from fatlin import gf, linpoly
from fatlin import families as fam
from fatlin.errors import ConsistencyError, PreconditionError
from fatlin.linset import Subspace, point_weight, weight_spectrum
from fatlin.rmc import (
    code_of_dual,
    code_report,
    dual_code_brute_force,
    gaussian_binom,
    macwilliams_transform,
    perp_prime,
    predicted_distribution,
    r_lower_bound,
    rank_distribution,
    rank_weight,
    rho_bound_check,
    singleton_check,
)


def trace_club(p, n):
    ctx = gf.make_field(p, 1, n)
    return ctx, linpoly.graph_subspace(linpoly.trace_poly(ctx))


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

def test_perp_involution_and_dimensions():
    for p, n in ((2, 3), (3, 4)):
        ctx, U = trace_club(p, n)
        Up = perp_prime(U)
        assert U.rho + Up.rho == ctx.n * U.k
        assert perp_prime(Up).same_span(U)
        # orthogonality holds pairwise
        for u in U.basis_vals:
            for v in Up.basis_vals:
                dot = 0
                for a, b in zip(u, v):
                    dot = ctx.add(dot, ctx.mul(a, b))
                assert gf.rel_trace(ctx, ctx.elem(dot), ctx.deg, 1).val == 0


def test_perp_of_field_line_is_field_perp():
    # for an F_{q^n}-subspace W the two orthogonal complements coincide
    ctx = gf.make_field(3, 1, 3)
    line = [(ctx.mul(b, 1), ctx.mul(b, ctx.omega)) for b in
            (ctx.p ** m for m in range(ctx.deg))]
    W = Subspace(ctx, 2, line)
    Wp = perp_prime(W)
    # W^perp over the field: spanned by (omega, -1)
    field_perp = Subspace(ctx, 2, [
        (ctx.mul(b, ctx.omega), ctx.mul(b, ctx.neg(1)))
        for b in (ctx.p ** m for m in range(ctx.deg))])
    assert Wp.same_span(field_perp)


def test_dual_weight_relation_all_points():
    ctx, U = trace_club(2, 3)
    Up = perp_prime(U)
    n, k, rho = ctx.n, U.k, U.rho
    pts = [(1, v) for v in range(ctx.order)] + [(0, 1)]
    for coords in pts:
        from fatlin.linset import ProjPoint
        P = ProjPoint.normalize(ctx, coords)
        perp_pt = ProjPoint.normalize(ctx, (P.coords[1], ctx.neg(P.coords[0])))
        assert point_weight(Up, perp_pt) == n * k - rho - n + point_weight(U, P)


# ---------------------------------------------------------------------------
# codes and weights
# ---------------------------------------------------------------------------

def test_code_of_dual_trace_club():
    ctx, U = trace_club(2, 3)
    rep = weight_spectrum(U)
    C = code_of_dual(U, rep.classification)
    assert (C.N, C.k, C.d_claimed) == (3, 2, 1)
    assert C.nondegenerate


def test_code_of_dual_rejects_weight_n_point():
    ctx = gf.make_field(2, 1, 3)
    F8 = [ctx.p ** m for m in range(3)]
    U = Subspace(ctx, 2, [(b, 0) for b in F8])  # the point (1:0) has weight n
    with pytest.raises(PreconditionError, match="weight n"):
        code_of_dual(U)


def test_rank_weight_examples():
    ctx = gf.make_field(2, 1, 3)
    assert rank_weight(ctx, (0, 0, 0)) == 0
    assert rank_weight(ctx, (1, 1, 1)) == 1
    w = ctx.omega
    assert rank_weight(ctx, (1, w, ctx.mul(w, w))) == 3
    ctx3 = gf.make_field(3, 1, 4)
    assert rank_weight(ctx3, (1, 2, 1, 2)) == 1


def test_rank_distribution_trace_club():
    ctx, U = trace_club(2, 3)
    C = code_of_dual(U)
    dist = rank_distribution(C)
    assert dist.A == (1, 7, 28, 28)
    assert sum(dist.A) == 2 ** 6


def test_predicted_distribution_matches_enumeration():
    # regular-fat input: the three-weight law must match exactly
    ctx = gf.make_field(2, 1, 6)
    _, eta, _ = fam.e_components(ctx, 3, 2)
    U = fam.construct_T2(ctx, 1, eta, fam.full_subfield_basis(ctx, 2), 2, 3)
    rep = weight_spectrum(U)
    C = code_of_dual(U, rep.classification)
    dist = rank_distribution(C)
    pred = predicted_distribution(2, 6, 2, U.rho, rep.classification.r,
                                  rep.classification.i, rep.size)
    assert dist.A == pred.A


def test_predicted_distribution_scattered_two_weight():
    ctx = gf.make_field(3, 1, 4)
    U = linpoly.graph_subspace(linpoly.make_poly(ctx, {1: 1}))
    rep = weight_spectrum(U)
    assert rep.classification.kind == "scattered"
    C = code_of_dual(U, rep.classification)
    dist = rank_distribution(C)
    pred = predicted_distribution(3, 4, 2, U.rho, 0, 0, rep.size)
    assert dist.A == pred.A
    weights = {j for j in range(1, 5) if dist.A[j]}
    assert weights == {3, 4}


def test_predicted_distribution_rejects_small_i():
    with pytest.raises(PreconditionError):
        predicted_distribution(3, 6, 2, 6, 4, 1, 316)


# ---------------------------------------------------------------------------
# Gaussian binomials
# ---------------------------------------------------------------------------

def count_subspaces(q, r, h):
    """Oracle: count h-dimensional subspaces of F_q^r by echelon enumeration."""
    from fatlin.kernels import rref_fp
    seen = set()
    vectors = list(itertools.product(range(q), repeat=r))
    for rows in itertools.combinations(vectors[1:], h):
        m = np.array(rows, dtype=np.int64)
        red, piv = rref_fp(m, q)
        if len(piv) == h:
            seen.add(red.tobytes())
    return len(seen)


def test_gaussian_binom_values():
    assert gaussian_binom(5, 0, 3) == 1
    assert gaussian_binom(2, 1, 3) == 4 == count_subspaces(3, 2, 1)
    assert gaussian_binom(4, 2, 3) == 130
    assert gaussian_binom(3, 2, 2) == count_subspaces(2, 3, 2)
    assert gaussian_binom(2, 3, 5) == 0
    assert gaussian_binom(-1, 0, 3) in (0, 1)


def test_gaussian_binom_oracle_43():
    # [4, 2]_3 = 130 cross-checked by direct enumeration
    assert count_subspaces(3, 4, 2) == 130


# ---------------------------------------------------------------------------
# MacWilliams
# ---------------------------------------------------------------------------

def test_macwilliams_trace_club_vs_brute_force():
    ctx, U = trace_club(2, 3)
    C = code_of_dual(U)
    A = rank_distribution(C).A
    B = macwilliams_transform(A, C.N, ctx.n, C.k, 2)
    brute = dual_code_brute_force(C)
    assert brute is not None and sum(brute) == 8
    assert brute == B
    assert B[0] == 1 and B[1] == 0


def test_macwilliams_rejects_inconsistent_input():
    ctx, U = trace_club(2, 3)
    C = code_of_dual(U)
    A = list(rank_distribution(C).A)
    A[1] += 7
    A[3] -= 7
    with pytest.raises(ConsistencyError):
        macwilliams_transform(A, C.N, ctx.n, C.k, 2)
    with pytest.raises(PreconditionError):
        macwilliams_transform(A[:-1], C.N, ctx.n, C.k, 2)


def test_macwilliams_b1_zero_for_dual_codes():
    for builder in ("club", "t2"):
        if builder == "club":
            ctx, U = trace_club(3, 4)
        else:
            ctx = gf.make_field(2, 1, 6)
            _, eta, _ = fam.e_components(ctx, 3, 2)
            U = fam.construct_T2(ctx, 1, eta,
                                 fam.full_subfield_basis(ctx, 2), 2, 3)
        C = code_of_dual(U)
        A = rank_distribution(C).A
        B = macwilliams_transform(A, C.N, ctx.n, C.k, ctx.q)
        assert B[0] == 1 and B[1] == 0
        assert all(b >= 0 for b in B)
        assert sum(B) == ctx.q ** (ctx.n * (C.N - C.k))


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def test_singleton_cases():
    assert singleton_check(6, 2, 3, 6, 3)        # 12 <= 24
    assert singleton_check(4, 2, 3, 4, 2)        # equality: 8 <= 8
    assert not singleton_check(4, 2, 4, 4, 2)    # 8 <= 4 fails


def test_rho_bound_cases():
    assert rho_bound_check(6, 2, 3, 6) is True       # 6 <= 9
    assert rho_bound_check(3, 2, 2, 3) is True       # 3 <= 4
    assert rho_bound_check(6, 2, 3, 7) is None       # hypothesis unmet
    with pytest.raises(PreconditionError):
        rho_bound_check(4, 2, 4, 4)


def test_r_lower_bound_values():
    assert r_lower_bound(3, 6, 2, 3, 6) == 0
    assert r_lower_bound(3, 6, 2, 3, 7) == Fraction(88088, 9464)
    with pytest.raises(PreconditionError):
        r_lower_bound(3, 6, 2, 1, 6)


def test_r_lower_bound_satisfied_by_constructions():
    ctx = gf.make_field(5, 1, 6)
    _, eta, _ = fam.e_components(ctx, 3, 2)
    U = fam.construct_T2(ctx, 1, eta, fam.full_subfield_basis(ctx, 2), 2, 3)
    rep = weight_spectrum(U)
    bound = r_lower_bound(5, 6, 2, rep.classification.i, U.rho)
    assert rep.classification.r >= bound


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------

def test_code_report_trace_club():
    ctx, U = trace_club(2, 3)
    out = code_report(U)
    assert out.params == (3, 2, 1)
    assert out.A == (1, 7, 28, 28)
    for key in ("macwilliams_integral", "B0_one", "B1_zero", "B_total",
                "singleton", "three_weight_match", "dual_brute_force_match"):
        assert out.checks[key] is True, key
    assert out.checks["r_bound"]["ok"] is True


def test_code_report_json_shape():
    ctx, U = trace_club(2, 3)
    payload = code_report(U).to_json()
    assert set(payload) == {"params", "A", "B", "checks"}
    assert payload["params"] == [3, 2, 1]


def test_rank_distribution_jobs_deterministic():
    ctx, U = trace_club(3, 4)
    C = code_of_dual(U)
    assert rank_distribution(C, jobs=1).A == rank_distribution(C, jobs=4).A


def test_full_pipeline_nonprime_q():
    # q = 4 (h = 2): duality, distribution and MacWilliams over a true
    # subfield tower rather than a prime base
    ctx = gf.make_field(2, 2, 3)
    U = linpoly.graph_subspace(linpoly.trace_poly(ctx))
    rep = weight_spectrum(U)
    assert rep.classification.kind == "club" and rep.size == 17
    out = code_report(U, rep)
    assert out.params == (3, 2, 1)
    assert out.A == (1, 63, 1008, 3024)
    assert out.B == (1, 0, 63, 0)
    assert out.checks["three_weight_match"]
    assert out.checks["dual_brute_force_match"]
