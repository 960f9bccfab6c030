"""Construction catalog: every builder checked against full enumeration."""

import random

import pytest

from fatlin import gf, linpoly, linset
from fatlin import families as fam
from fatlin.errors import PreconditionError
from fatlin.gf import discrete_log
from fatlin.linpoly import eval_poly, graph_subspace, make_poly
from fatlin.linset import (
    heavy_points_subgeometry,
    is_partially_scattered,
    weight_spectrum,
)


# ---------------------------------------------------------------------------
# T1
# ---------------------------------------------------------------------------

def test_t1_guaranteed_case_q3_t4():
    ctx = gf.make_field(3, 1, 8)
    w = fam.t1_auto_w(ctx, 4)
    assert fam.trace_zero_set_contains(ctx, 4, w.val)
    assert fam.t1_norm_separation(ctx, 4, w.val)
    U = fam.construct_T1(ctx, 1, w, fam.full_subfield_basis(ctx, 4), 2,
                         strict=True)
    rep = weight_spectrum(U)
    assert rep.spectrum == {1: 3120, 4: 4}
    assert rep.classification.kind == "regular_fat"
    assert (rep.classification.r, rep.classification.i) == (4, 4)
    assert heavy_points_subgeometry(rep, U)
    assert is_partially_scattered(U, 4)
    assert rep.size == linset.size_formula(3, 8, 4, 4)


def test_t1_guaranteed_case_q5_t3():
    ctx = gf.make_field(5, 1, 6)
    w = fam.t1_auto_w(ctx, 3)
    assert fam.t1_norm_separation(ctx, 3, w.val)
    U = fam.construct_T1(ctx, 1, w, fam.full_subfield_basis(ctx, 3), 2,
                         strict=True)
    rep = weight_spectrum(U)
    assert rep.classification.kind == "regular_fat"
    assert (rep.classification.r, rep.classification.i) == (6, 3)
    assert heavy_points_subgeometry(rep, U)


def test_t1_q3_odd_t_has_no_admissible_twist():
    # for q = 3 every nonzero w in E violates the norm separation, and the
    # set genuinely picks up extra weight-2 points
    ctx = gf.make_field(3, 1, 6)
    qt = 27
    E_star = [ctx.pow(ctx.omega, (qt + 1) // 2 + j * (qt + 1)) for j in range(26)]
    assert all(not fam.t1_norm_separation(ctx, 3, w) for w in E_star)
    w = fam.t1_auto_w(ctx, 3)
    with pytest.raises(PreconditionError):
        fam.construct_T1(ctx, 1, w, fam.full_subfield_basis(ctx, 3), 2,
                         strict=True)
    U = fam.construct_T1(ctx, 1, w, fam.full_subfield_basis(ctx, 3), 2)
    rep = weight_spectrum(U)
    assert rep.spectrum == {1: 216, 2: 24, 3: 4}
    assert is_partially_scattered(U, 3)
    desc = fam.describe_T1(ctx, 1, w, fam.full_subfield_basis(ctx, 3), 2)
    assert desc.expected["guaranteed"] is False


def test_t1_precondition_errors():
    ctx = gf.make_field(3, 1, 6)
    w = fam.t1_auto_w(ctx, 3)
    I = fam.full_subfield_basis(ctx, 3)
    even = gf.make_field(2, 1, 6)
    with pytest.raises(PreconditionError, match="odd"):
        fam.construct_T1(even, 1, 1, [1, 2], 2)
    with pytest.raises(PreconditionError, match="gcd"):
        fam.construct_T1(ctx, 3, w, I, 2)
    with pytest.raises(PreconditionError, match="E"):
        fam.construct_T1(ctx, 1, ctx.one, I, 2)
    with pytest.raises(PreconditionError, match="dim I"):
        fam.construct_T1(ctx, 1, w, I[:1], 2)
    with pytest.raises(PreconditionError, match="outside"):
        fam.construct_T1(ctx, 1, w, [1, ctx.omega], 2)
    small_t = gf.make_field(3, 1, 4)
    with pytest.raises(PreconditionError, match="at least 3"):
        fam.construct_T1(small_t, 1, 1, [1, 2], 2)


def test_t1_nonprime_q():
    # q = 9 (h = 2), t = 3 odd: here q > 3 so the norm separation holds and
    # the predicted (q^2-1)/(q-1) = 10 heavy points of weight 3 appear
    ctx = gf.make_field(3, 2, 6)
    w = fam.t1_auto_w(ctx, 3)
    assert fam.t1_norm_separation(ctx, 3, w.val)
    U = fam.construct_T1(ctx, 1, w, fam.full_subfield_basis(ctx, 3), 2,
                         strict=True)
    rep = weight_spectrum(U)
    assert (rep.classification.r, rep.classification.i) == (10, 3)
    assert heavy_points_subgeometry(rep, U)
    assert is_partially_scattered(U, 3)


def test_t1_proper_subspace_I():
    # a 2-dimensional I inside F_81: rank 4 set in PG(1, 3^8)
    ctx = gf.make_field(3, 1, 8)
    w = fam.t1_auto_w(ctx, 4)
    F81 = fam.full_subfield_basis(ctx, 4)
    U = fam.construct_T1(ctx, 1, w, F81[:2], 2, strict=True)
    assert U.rho == 4
    rep = weight_spectrum(U)
    assert rep.classification.kind == "regular_fat"
    assert (rep.classification.r, rep.classification.i) == (4, 2)


# ---------------------------------------------------------------------------
# eigenline components and T2
# ---------------------------------------------------------------------------

def test_e_components_ell2_matches_trace_zero():
    ctx = gf.make_field(3, 1, 6)
    eps, eta, gens = fam.e_components(ctx, 2, 3)
    assert eps.val == ctx.neg(1)
    assert fam.trace_zero_set_contains(ctx, 3, eta.val)
    assert gens[0].val == 1


def test_e_components_q5():
    ctx = gf.make_field(5, 1, 6)
    eps, eta, gens = fam.e_components(ctx, 3, 2)
    # eps is a primitive cube root of unity in F_25
    assert ctx.pow(eps.val, 3) == 1 and eps.val != 1
    assert gf.in_subfield(ctx, eps, 2)
    # eta is the least omega power in E_1
    L = discrete_log(ctx, eta)
    for j in range(L):
        cand = ctx.pow(ctx.omega, j)
        assert ctx.frob_q(cand, 2) != ctx.mul(eps.val, cand)
    # product rule E_j * E_h <= E_{j+h}
    rng = random.Random(8)
    f25 = [int(v) for v in ctx.subfield_vals(2)]
    for _ in range(20):
        j, h = rng.randrange(3), rng.randrange(3)
        xj = ctx.mul(gens[j].val, f25[rng.randrange(1, 25)])
        xh = ctx.mul(gens[h].val, f25[rng.randrange(1, 25)])
        prod = ctx.mul(xj, xh)
        target = (j + h) % 3
        assert ctx.frob_q(prod, 2) == ctx.mul(ctx.pow(eps.val, target), prod)


def test_eigenline_index():
    ctx = gf.make_field(5, 1, 6)
    _, eta, gens = fam.e_components(ctx, 3, 2)
    assert fam.eigenline_index(ctx, 3, 2, eta) == 1
    assert fam.eigenline_index(ctx, 3, 2, gens[2]) == 2
    assert fam.eigenline_index(ctx, 3, 2, 1) == 0
    assert fam.eigenline_index(ctx, 3, 2, ctx.omega) is None


def test_t2_q5_t2_ell3():
    ctx = gf.make_field(5, 1, 6)
    _, eta, _ = fam.e_components(ctx, 3, 2)
    U = fam.construct_T2(ctx, 1, eta, fam.full_subfield_basis(ctx, 2), 2, 3)
    rep = weight_spectrum(U)
    assert rep.spectrum == {1: 120, 2: 6}
    assert (rep.classification.r, rep.classification.i) == (6, 2)
    assert rep.size == 126
    assert heavy_points_subgeometry(rep, U)
    assert is_partially_scattered(U, 2)


def test_t2_q2_t2_ell3():
    ctx = gf.make_field(2, 1, 6)
    _, eta, _ = fam.e_components(ctx, 3, 2)
    U = fam.construct_T2(ctx, 1, eta, fam.full_subfield_basis(ctx, 2), 2, 3)
    rep = weight_spectrum(U)
    assert (rep.classification.r, rep.classification.i) == (3, 2)
    assert U.rho == 4
    assert heavy_points_subgeometry(rep, U)


def test_t2_k3():
    ctx = gf.make_field(2, 1, 6)
    _, eta, _ = fam.e_components(ctx, 3, 2)
    U = fam.construct_T2(ctx, 1, eta, fam.full_subfield_basis(ctx, 2), 3, 3)
    rep = weight_spectrum(U)
    assert (rep.classification.r, rep.classification.i) == (7, 2)
    assert heavy_points_subgeometry(rep, U)


def test_t2_precondition_errors():
    ctx = gf.make_field(5, 1, 6)
    _, eta, gens = fam.e_components(ctx, 3, 2)
    I = fam.full_subfield_basis(ctx, 2)
    with pytest.raises(PreconditionError, match="exceed 2"):
        fam.construct_T2(ctx, 1, eta, I, 2, 2)
    with pytest.raises(PreconditionError, match="E_1"):
        fam.construct_T2(ctx, 1, gens[2], I, 2, 3)
    with pytest.raises(PreconditionError, match="E_1"):
        fam.construct_T2(ctx, 1, ctx.one, I, 2, 3)
    bad_ell = gf.make_field(2, 1, 6)
    with pytest.raises(PreconditionError):
        fam.construct_T2(bad_ell, 1, 1, [1], 2, 6)  # 6 does not divide 2^1-1


# ---------------------------------------------------------------------------
# polynomial forms
# ---------------------------------------------------------------------------

def test_polform1_matches_t2_spectrum():
    ctx = gf.make_field(3, 1, 6)
    t, s = 3, 1
    w = fam.t1_auto_w(ctx, t)
    gen_t = ctx.pow(ctx.omega, ctx.group // 26)
    U_ref = fam.construct_T1(ctx, s, w, fam.full_subfield_basis(ctx, t), 2)
    ref = weight_spectrum(U_ref).spectrum
    for j in (1, 3, 5):
        mu = ctx.pow(gen_t, (3 - 1) * j)  # norm-one elements of F_27
        if mu == 1:
            continue
        f = fam.polform(ctx, "POL1", mu, w.val, s, t)
        assert f.coeffs[0] == 0  # the plain-X monomial is dropped
        rep = weight_spectrum(graph_subspace(f))
        assert rep.spectrum == ref


def test_polform2_matches_t1_full_spectrum():
    ctx = gf.make_field(3, 1, 8)
    t, s = 4, 1
    e = ctx.pow(ctx.omega, (3 ** 4 + 1) // 2)
    m = ctx.pow(e, 3 + 1)
    f = fam.polform(ctx, "POL2", m, 0, s, t)
    rep = weight_spectrum(graph_subspace(f))
    w = fam.t1_auto_w(ctx, t)
    U_ref = fam.construct_T1(ctx, s, w, fam.full_subfield_basis(ctx, t), 2)
    assert rep.spectrum == weight_spectrum(U_ref).spectrum
    assert (rep.classification.r, rep.classification.i) == (4, 4)


def test_polform1_coefficients_match_raw_expression():
    # independent oracle: evaluate the two bracketed combinations directly
    ctx = gf.make_field(3, 1, 6)
    t, s = 3, 1
    w = fam.t1_auto_w(ctx, t).val
    gen_t = ctx.pow(ctx.omega, ctx.group // 26)
    mu = ctx.pow(gen_t, 2)  # norm one, not one
    f = fam.polform(ctx, "POL1", mu, w, s, t)

    def raw(x):
        q = ctx.q
        mus = ctx.frob_q(mu, s)
        a = ctx.sub(mus, 1)
        b = ctx.sub(mu, 1)
        xqt = ctx.frob_q(x, t)
        term1 = ctx.mul(ctx.add(mu, 1), xqt)
        inner1 = ctx.sub(ctx.frob_q(x, t - s), ctx.frob_q(x, 2 * t - s))
        term1 = ctx.sub(term1, ctx.mul(2, ctx.mul(ctx.inv(ctx.frob_q(w, t - s)),
                                                  inner1)))
        term2 = ctx.mul(ctx.add(mus, 1), xqt)
        inner2 = ctx.add(ctx.frob_q(x, s), ctx.frob_q(x, t + s))
        term2 = ctx.add(term2, ctx.mul(2, ctx.mul(ctx.mul(w, mus), inner2)))
        return ctx.add(ctx.mul(a, term1), ctx.mul(b, term2))

    rng = random.Random(6)
    for _ in range(40):
        x = rng.randrange(729)
        assert eval_poly(f, x).val == raw(x)


def test_polform_preconditions():
    ctx = gf.make_field(3, 1, 6)
    w = fam.t1_auto_w(ctx, 3)
    with pytest.raises(PreconditionError, match="lie in"):
        fam.polform(ctx, "POL1", ctx.omega, w.val, 1, 3)
    with pytest.raises(PreconditionError, match="norm one"):
        fam.polform(ctx, "POL1", ctx.pow(ctx.omega, 28), w.val, 1, 3)
    with pytest.raises(PreconditionError, match="t even"):
        fam.polform(ctx, "POL2", 1, 0, 1, 3)
    ctx8 = gf.make_field(3, 1, 8)
    with pytest.raises(PreconditionError, match="power"):
        fam.polform(ctx8, "POL2", ctx8.pow(ctx8.omega, 82 * 3), 0, 1, 4)


# ---------------------------------------------------------------------------
# phi classification
# ---------------------------------------------------------------------------

def test_phi_power_sets_partition_q3_t3():
    ctx = gf.make_field(3, 1, 6)
    minus = plus = scattered = 0
    for m in (int(v) for v in ctx.subfield_vals(3) if v):
        cls = fam.phi_expected_class(ctx, m, 1, 3)
        if cls.kind == "scattered":
            scattered += 1
        elif cls.i == 2:
            minus += 1
        else:
            plus += 1
            assert (cls.r, cls.i) == (2, 3)
    assert (minus, plus, scattered) == (13, 13, 0)


def test_phi_power_sets_q5_t3():
    ctx = gf.make_field(5, 1, 6)
    minus = plus = scattered = 0
    for m in (int(v) for v in ctx.subfield_vals(3) if v):
        cls = fam.phi_expected_class(ctx, m, 1, 3)
        if cls.kind == "scattered":
            scattered += 1
        elif cls.i == 2:
            minus += 1
        else:
            plus += 1
    assert (minus, plus, scattered) == (31, 62, 31)


def test_phi_full_sweep_q5_t3_with_scattered_rows():
    # the only small case exercising all three predicted outcomes at once
    ctx = gf.make_field(5, 1, 6)
    counts = {"minus": 0, "plus": 0, "scattered": 0}
    for m in (int(v) for v in ctx.subfield_vals(3) if v):
        expected = fam.phi_expected_class(ctx, m, 1, 3)
        U = graph_subspace(linpoly.phi_poly(ctx, m, 1, 3))
        rep = weight_spectrum(U)
        assert fam.classification_matches(expected, rep.classification)
        if expected.kind == "scattered":
            counts["scattered"] += 1
        elif expected.i == 2:
            counts["minus"] += 1
        else:
            counts["plus"] += 1
            assert (expected.r, expected.i) == (2, 3)
    assert counts == {"minus": 31, "plus": 62, "scattered": 31}


def test_phi_power_sets_enumeration_oracle():
    # dlog arithmetic vs direct set enumeration of {e^(sigma-1)} and
    # {e^(sigma+1)} over E*
    ctx = gf.make_field(3, 1, 6)
    sigma, t = 3, 3
    E_star = [ctx.pow(ctx.omega, 14 + 28 * j) for j in range(26)]
    minus_set = {ctx.pow(e, sigma - 1) for e in E_star}
    plus_set = {ctx.pow(e, sigma + 1) for e in E_star}
    assert not (minus_set & plus_set)
    for m in (int(v) for v in ctx.subfield_vals(3) if v):
        cls = fam.phi_expected_class(ctx, m, 1, t)
        if m in minus_set:
            assert cls.i == 2
        elif m in plus_set:
            assert cls.i == t
        else:
            assert cls.kind == "scattered"
    assert minus_set | plus_set == {int(v) for v in ctx.subfield_vals(3) if v}


def test_phi_weight2_char_special_points():
    ctx = gf.make_field(3, 1, 6)
    t, J, sigma = 3, 1, 3
    w = fam.t1_auto_w(ctx, t)
    m = ctx.pow(w.val, sigma - 1)
    for x in (int(v) for v in ctx.subfield_vals(3) if v):
        assert fam.phi_weight2_char(ctx, x, m, w.val, J, t) is True
    E_star = [ctx.pow(ctx.omega, 14 + 28 * j) for j in range(26)]
    for x in E_star[:8]:
        assert fam.phi_weight2_char(ctx, x, m, w.val, J, t) is True


def test_phi_weight2_char_preconditions():
    ctx = gf.make_field(3, 1, 6)
    w = fam.t1_auto_w(ctx, 3)
    with pytest.raises(PreconditionError, match="sigma"):
        fam.phi_weight2_char(ctx, 1, 1, w.val, 1, 3)
    with pytest.raises(PreconditionError):
        fam.phi_weight2_char(ctx, 0, ctx.pow(w.val, 2), w.val, 1, 3)


# ---------------------------------------------------------------------------
# clubs
# ---------------------------------------------------------------------------

def test_club_lambda_q3_n4():
    ctx = gf.make_field(3, 1, 4)
    U = fam.club_lambda(ctx, ctx.beta)
    rep = weight_spectrum(U)
    assert rep.spectrum == {1: 36, 2: 1}
    assert rep.classification.kind == "club"
    assert rep.classification.i == 2
    assert sum((3 ** w - 1) * c for w, c in rep.spectrum.items()) == 80


def test_club_lambda_q2_n4():
    ctx = gf.make_field(2, 1, 4)
    U = fam.club_lambda(ctx, ctx.beta)
    rep = weight_spectrum(U)
    assert rep.classification.kind == "club"
    assert rep.classification.i == 2
    assert U.rho == 4


def test_club_lambda_rejects_subfield_lambda():
    ctx = gf.make_field(3, 1, 4)
    with pytest.raises(PreconditionError):
        fam.club_lambda(ctx, 2)


def test_club_uab_invertible_case():
    ctx = gf.make_field(2, 1, 4)
    f = make_poly(ctx, {1: 1})  # X^q, scattered on F_4
    U = fam.club_uab(ctx, f, 0, 1, 2)
    assert U.rho == 4
    assert fam.club_uab_expected_i(ctx, f, 0, 2) == 2
    rep = weight_spectrum(U)
    assert rep.classification.kind == "club"
    assert rep.classification.i == 2


def test_club_uab_singular_case():
    ctx = gf.make_field(2, 1, 4)
    f = make_poly(ctx, {1: 1})
    # pick a = f(x0)/x0 for some x0 in F_4*, making f - aX singular
    x0 = int(ctx.subfield_vals(2)[2])
    a = ctx.mul(eval_poly(f, x0).val, ctx.inv(x0))
    assert fam.club_uab_expected_i(ctx, f, a, 2) == 3
    U = fam.club_uab(ctx, f, a, 1, 2)
    rep = weight_spectrum(U)
    assert rep.classification.kind == "club"
    assert rep.classification.i == 3


def test_club_uab_rejects_bad_inputs():
    ctx = gf.make_field(2, 1, 4)
    f = make_poly(ctx, {1: 1})
    with pytest.raises(PreconditionError, match="nonzero"):
        fam.club_uab(ctx, f, 0, 0, 2)
    not_scattered = make_poly(ctx, {0: 1})  # identity: every point heavy
    with pytest.raises(PreconditionError, match="scattered"):
        fam.club_uab(ctx, not_scattered, 0, 1, 2)


# ---------------------------------------------------------------------------
# complementary-weight products
# ---------------------------------------------------------------------------

def test_comp_product_plain_axis_weights():
    ctx = gf.make_field(2, 1, 6)
    U = fam.comp_product(ctx,
                         S_basis=ctx.subfield_fp_basis(2),
                         Sp_basis=ctx.subfield_fp_basis(3))
    from fatlin.linset import point_weight
    assert point_weight(U, (1, 0)) == 2
    assert point_weight(U, (0, 1)) == 3


def test_comp_product_twisted_two_heavy_points():
    ctx = gf.make_field(3, 1, 6)
    xi = ctx.pow(ctx.omega, 2)
    mu = ctx.pow(ctx.omega, 28)  # norm -1 in F_27
    U = fam.comp_product(ctx, xi=xi, mu=mu, s=1)
    rep = weight_spectrum(U)
    heavy = {w: c for w, c in rep.spectrum.items() if w > 1}
    assert sum(heavy.values()) == 2
    assert rep.classification.kind == "regular_fat"
    assert rep.classification.r == 2


def test_comp_product_twisted_preconditions():
    ctx = gf.make_field(3, 1, 6)
    with pytest.raises(PreconditionError, match="outside"):
        fam.comp_product(ctx, xi=1, mu=ctx.pow(ctx.omega, 28), s=1)
    with pytest.raises(PreconditionError, match="norm one"):
        fam.comp_product(ctx, xi=ctx.omega, mu=ctx.pow(ctx.omega, 56), s=1)
    # xi = omega has odd log, making the last norm condition fail
    with pytest.raises(PreconditionError, match="norm condition"):
        fam.comp_product(ctx, xi=ctx.omega, mu=ctx.pow(ctx.omega, 28), s=1)


# ---------------------------------------------------------------------------
# two-term polynomial predictions
# ---------------------------------------------------------------------------

def lp_enumerated_r(ctx, delta, s):
    U = graph_subspace(linpoly.lp_poly(ctx, delta, s))
    rep = weight_spectrum(U)
    return sum(c for w, c in rep.spectrum.items() if w > 1), rep


@pytest.mark.parametrize("dlog,expected", [(1, 0), (2, 10)])
def test_lp_q3_n5(dlog, expected):
    ctx = gf.make_field(3, 1, 5)
    delta = ctx.pow(ctx.omega, dlog)
    assert fam.lp_expected_r(ctx, delta, 1) == expected
    r, rep = lp_enumerated_r(ctx, delta, 1)
    assert r == expected
    if expected:
        assert rep.classification.i == 2
        assert expected == (3 ** 4 - 1) // (3 ** 2 - 1)


@pytest.mark.parametrize("dlog,expected", [(1, 0), (8, 1), (2, 4)])
def test_lp_q3_n4(dlog, expected):
    ctx = gf.make_field(3, 1, 4)
    delta = ctx.pow(ctx.omega, dlog)
    assert fam.lp_expected_r(ctx, delta, 1) == expected
    r, _ = lp_enumerated_r(ctx, delta, 1)
    assert r == expected


def test_lp_norm_case_coverage_q3_n4():
    # every delta in F_81* lands in a case and matches enumeration
    ctx = gf.make_field(3, 1, 4)
    rng = random.Random(5)
    for _ in range(12):
        delta = ctx.pow(ctx.omega, rng.randrange(1, 81))
        pred = fam.lp_expected_r(ctx, delta, 1)
        r, _ = lp_enumerated_r(ctx, delta, 1)
        assert pred == r


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

def test_descriptor_round_trip_and_build():
    ctx = gf.make_field(5, 1, 6)
    _, eta, _ = fam.e_components(ctx, 3, 2)
    I = fam.full_subfield_basis(ctx, 2)
    desc = fam.describe_T2(ctx, 1, eta, I, 2, 3)
    again = fam.ConstructionDescriptor.from_json(desc.to_json())
    U1 = fam.build_from_descriptor(desc)
    U2 = fam.build_from_descriptor(again)
    assert U1.same_span(U2)
    assert desc.expected["r"] == 6


def test_classification_matches_logic():
    from fatlin.linset import Classification

    reg = Classification("regular_fat", r=4, i=3)
    club = Classification("club", r=1, i=3)
    assert fam.classification_matches(Classification("regular_fat", r=None, i=3), reg)
    assert fam.classification_matches(Classification("regular_fat", r=None, i=3), club)
    assert not fam.classification_matches(Classification("regular_fat", r=2, i=3), reg)
    assert fam.classification_matches(Classification("scattered", r=0),
                                      Classification("scattered", r=0))
    assert not fam.classification_matches(
        Classification("scattered", r=0), reg)
