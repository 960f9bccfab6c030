"""Catalog of linear-set constructions and their predicted classifications.

Each builder validates its structural hypotheses individually and returns a
Subspace; the `describe_*` helpers and `build_from_descriptor` give the
serializable form used by the CLI and the equivalence module.

The twisted families T1 (over F_{q^2t}, twist from the half-trace-zero set E)
and T2 (over F_{q^lt}, twist from an eigenline E_1 of the q^t-Frobenius) come
with a guarantee flag: for q = 3 and odd t no element of E satisfies the
norm separation N(w^2) != (-1)^t, and the predicted regular-fat shape then
genuinely fails (extra weight-2 points appear), so builders record whether
the guarantee applies instead of refusing to build.  `strict=True` turns the
norm separation into a hard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import PreconditionError
from .gf import (
    FieldCtx,
    FieldElem,
    discrete_log,
    in_subfield,
    make_field,
    rel_norm,
    rel_trace,
    solve_congruence,
)
from .linpoly import (
    LinearizedPoly,
    eval_poly,
    graph_subspace,
    lp_poly,
    make_poly,
    phi_poly,
    trace_poly,
    club_trace_poly,
)
from .linset import Classification, Subspace, is_partially_scattered

FAMILIES = ("T1", "T2", "POLFORM1", "POLFORM2", "PHI", "LP", "TRACE_CLUB",
            "CLUB_LAMBDA", "CLUB_UAB", "COMP_PRODUCT", "NPSZ")


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

@dataclass
class ConstructionDescriptor:
    family: str
    field: tuple[int, int, int]  # (p, h, n)
    params: dict
    expected: Optional[dict] = None

    def ctx(self) -> FieldCtx:
        return make_field(*self.field)

    def to_json(self) -> dict:
        out = {"family": self.family,
               "field": {"p": self.field[0], "h": self.field[1], "n": self.field[2]},
               "params": self.params}
        if self.expected is not None:
            out["expected"] = self.expected
        return out

    @classmethod
    def from_json(cls, payload: dict) -> "ConstructionDescriptor":
        fld = payload["field"]
        return cls(payload["family"], (fld["p"], fld["h"], fld["n"]),
                   payload["params"], payload.get("expected"))


def _elem_json(ctx: FieldCtx, v: int) -> list[int]:
    return list(ctx.digits_of(v))


def _basis_json(ctx: FieldCtx, vals: Sequence[int]) -> list[list[int]]:
    return [_elem_json(ctx, v) for v in vals]


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _as_vals(ctx: FieldCtx, items) -> list[int]:
    return [ctx.elem(x).val for x in items]


def trace_zero_set_contains(ctx: FieldCtx, t: int, w) -> bool:
    """Membership in E = {x : Tr over F_{q^t} of x vanishes}, for n = 2t."""
    return rel_trace(ctx, ctx.elem(w), ctx.deg, t * ctx.h).val == 0


def check_I_basis(ctx: FieldCtx, t: int, I_basis: Sequence, min_dim: int = 2) -> list[int]:
    """Validate an F_q-basis of a subspace I of F_{q^t}; returns values."""
    vals = _as_vals(ctx, I_basis)
    if len(vals) < min_dim:
        raise PreconditionError(f"dim I = {len(vals)} is below {min_dim}")
    for v in vals:
        if not in_subfield(ctx, FieldElem(ctx, v), t * ctx.h):
            raise PreconditionError("I basis element outside F_{q^t}")
    probe = Subspace(ctx, 1, [(v,) for v in vals])  # independence check
    del probe
    return vals


def full_subfield_basis(ctx: FieldCtx, t: int) -> list[int]:
    """Canonical F_q-basis of F_{q^t} (the 'full' keyword for I)."""
    return list(ctx.fq_basis_of_subfield(t * ctx.h))


def _twisted_basis(ctx: FieldCtx, s: int, w: int, I_vals: Sequence[int],
                   k: int) -> list[tuple[int, ...]]:
    """Basis of (T)^k for T = {x + w x^(q^s) : x in I}."""
    tbasis = [ctx.add(b, ctx.mul(w, ctx.frob_q(b, s))) for b in I_vals]
    basis = []
    for j in range(k):
        for tb in tbasis:
            vec = [0] * k
            vec[j] = tb
            basis.append(tuple(vec))
    return basis


def regular_fat_expectation(q: int, k: int, i: int, guaranteed: bool) -> dict:
    r = (q ** k - 1) // (q - 1)
    return {"kind": "club" if r == 1 else "regular_fat", "r": r, "i": i,
            "rank": k * i, "heavy_points": "PG(k-1,q)", "guaranteed": guaranteed}


# ---------------------------------------------------------------------------
# T1: twist by an element of the trace-zero line E (n = 2t)
# ---------------------------------------------------------------------------

def t1_auto_w(ctx: FieldCtx, t: int) -> FieldElem:
    """Canonical twist: omega^((q^t + 1)/2), always a nonzero element of E."""
    return FieldElem(ctx, ctx.pow(ctx.omega, (ctx.q ** t + 1) // 2))


def t1_norm_separation(ctx: FieldCtx, t: int, w) -> bool:
    """N_{q^t/q}(w^2) != (-1)^t, the hypothesis separating heavy weights."""
    wv = ctx.elem(w).val
    nw2 = rel_norm(ctx, FieldElem(ctx, ctx.mul(wv, wv)), t * ctx.h, ctx.h).val
    sign = 1 if t % 2 == 0 else ctx.neg(1)
    return nw2 != sign


def construct_T1(ctx: FieldCtx, s: int, w, I_basis: Sequence, k: int,
                 strict: bool = False) -> Subspace:
    """Cartesian power of T = {x + w x^(q^s) : x in I} inside F_{q^2t}^k."""
    if ctx.q % 2 == 0:
        raise PreconditionError("q must be odd")
    if ctx.n % 2:
        raise PreconditionError(f"n={ctx.n} must be even (n = 2t)")
    t = ctx.n // 2
    if t < 3:
        raise PreconditionError(f"t={t} must be at least 3")
    if math.gcd(s, t) != 1:
        raise PreconditionError(f"gcd(s={s}, t={t}) must be 1")
    wv = ctx.elem(w).val
    if wv == 0 or not trace_zero_set_contains(ctx, t, wv):
        raise PreconditionError("w is not a nonzero element of E")
    if strict and not t1_norm_separation(ctx, t, wv):
        raise PreconditionError(
            "norm separation N(w^2) != (-1)^t fails; the regular-fat "
            "conclusion is not guaranteed for this (q, t, w)")
    if k < 2:
        raise PreconditionError("k must be at least 2")
    I_vals = check_I_basis(ctx, t, I_basis)
    return Subspace(ctx, k, _twisted_basis(ctx, s, wv, I_vals, k))


def describe_T1(ctx: FieldCtx, s: int, w, I_basis: Sequence, k: int) -> ConstructionDescriptor:
    t = ctx.n // 2
    wv = ctx.elem(w).val
    I_vals = _as_vals(ctx, I_basis)
    guaranteed = t1_norm_separation(ctx, t, wv)
    return ConstructionDescriptor(
        family="T1", field=(ctx.p, ctx.h, ctx.n),
        params={"s": s, "t": t, "k": k, "w": _elem_json(ctx, wv),
                "I_basis": _basis_json(ctx, I_vals)},
        expected=regular_fat_expectation(ctx.q, k, len(I_vals), guaranteed))


# ---------------------------------------------------------------------------
# eigenline decomposition for n = l*t  (T2 support)
# ---------------------------------------------------------------------------

_E_COMPONENT_CACHE: dict[tuple, tuple] = {}


def e_components(ctx: FieldCtx, ell: int, t: int):
    """(epsilon, eta, generators) for the q^t-Frobenius eigenlines E_j.

    epsilon is the canonical primitive ell-th root of unity, eta the least
    power of omega spanning E_1 over F_{q^t}; generators[j] spans E_j.  The
    direct-sum decomposition of the whole field is verified before returning.
    """
    key = (ctx.p, ctx.h, ctx.n, ell, t)
    cached = _E_COMPONENT_CACHE.get(key)
    if cached is not None:
        return cached
    if ctx.n != ell * t:
        raise PreconditionError(f"n={ctx.n} must equal ell*t={ell * t}")
    qt = ctx.q ** t
    if (qt - 1) % ell:
        raise PreconditionError(f"ell={ell} does not divide q^t - 1 = {qt - 1}")
    group = ctx.group
    eps = ctx.pow(ctx.omega, group // ell)
    # eta: least j with omega^(j (q^t - 1)) = eps, i.e. eta in E_1
    sol = solve_congruence(qt - 1, group // ell, group)
    if sol is None:
        raise PreconditionError("eigenline generator equation is unsolvable")
    eta = ctx.pow(ctx.omega, sol[0])
    gens = [ctx.pow(eta, j) for j in range(ell)]
    # verify F_{q^lt} = E_0 + ... + E_{l-1} as a direct sum
    rows = []
    for g in gens:
        for z in ctx.subfield_fp_basis(t * ctx.h):
            rows.append(tuple(ctx.digits_of(ctx.mul(g, z))))
    from .kernels import rank_fp
    import numpy as np
    if rank_fp(np.array(rows, dtype=np.int64), ctx.p) != ctx.deg:
        raise PreconditionError("eigenlines do not span the field directly")
    result = (FieldElem(ctx, eps), FieldElem(ctx, eta),
              [FieldElem(ctx, g) for g in gens])
    _E_COMPONENT_CACHE[key] = result
    return result


def eigenline_index(ctx: FieldCtx, ell: int, t: int, x) -> Optional[int]:
    """j with x in E_j (x nonzero), or None if x is in no eigenline."""
    xv = ctx.elem(x).val
    if xv == 0:
        raise PreconditionError("zero lies in every eigenline")
    eps, _, _ = e_components(ctx, ell, t)
    fx = ctx.frob_q(xv, t)
    target = ctx.mul(ctx.inv(xv), fx)
    cur = 1
    for j in range(ell):
        if cur == target:
            return j
        cur = ctx.mul(cur, eps.val)
    return None


def construct_T2(ctx: FieldCtx, s: int, eta, I_basis: Sequence, k: int,
                 ell: int) -> Subspace:
    """Cartesian power of T = {x + eta x^(q^s) : x in I} inside F_{q^lt}^k."""
    if ell <= 2:
        raise PreconditionError("ell must exceed 2")
    if ctx.n % ell:
        raise PreconditionError(f"ell={ell} must divide n={ctx.n}")
    t = ctx.n // ell
    if math.gcd(s, t) != 1:
        raise PreconditionError(f"gcd(s={s}, t={t}) must be 1")
    if (ctx.q ** t - 1) % ell:
        raise PreconditionError(f"ell={ell} does not divide q^t - 1")
    ev = ctx.elem(eta).val
    if ev == 0 or eigenline_index(ctx, ell, t, ev) != 1:
        raise PreconditionError("eta is not a nonzero element of E_1")
    if k < 2:
        raise PreconditionError("k must be at least 2")
    I_vals = check_I_basis(ctx, t, I_basis)
    return Subspace(ctx, k, _twisted_basis(ctx, s, ev, I_vals, k))


def describe_T2(ctx: FieldCtx, s: int, eta, I_basis: Sequence, k: int,
                ell: int) -> ConstructionDescriptor:
    t = ctx.n // ell
    ev = ctx.elem(eta).val
    I_vals = _as_vals(ctx, I_basis)
    return ConstructionDescriptor(
        family="T2", field=(ctx.p, ctx.h, ctx.n),
        params={"s": s, "t": t, "ell": ell, "k": k, "eta": _elem_json(ctx, ev),
                "I_basis": _basis_json(ctx, I_vals)},
        expected=regular_fat_expectation(ctx.q, k, len(I_vals), True))


# ---------------------------------------------------------------------------
# power cosets of E* (for phi classification and POLFORM2)
# ---------------------------------------------------------------------------

def e_star_power_witness(ctx: FieldCtx, t: int, m, e: int) -> Optional[FieldElem]:
    """Some x in E* with x^e = m, or None; n = 2t, E the trace-zero line.

    E* is the coset omega^((q^t+1)/2) * <omega^(q^t+1)>, so solvability is a
    single linear congruence on discrete logs.
    """
    mv = ctx.elem(m).val
    if mv == 0:
        raise PreconditionError("m must be nonzero")
    qt = ctx.q ** t
    c0 = (qt + 1) // 2
    stride = qt + 1
    L = discrete_log(ctx, FieldElem(ctx, mv))
    sol = solve_congruence(e * stride, L - e * c0, ctx.group)
    if sol is None:
        return None
    return FieldElem(ctx, ctx.pow(ctx.omega, (c0 + sol[0] * stride) % ctx.group))


def phi_expected_class(ctx: FieldCtx, m, J: int, t: int) -> Classification:
    """Predicted classification of the graph set of phi_{m, sigma}."""
    mv = ctx.elem(m).val
    if mv == 0 or not in_subfield(ctx, FieldElem(ctx, mv), t * ctx.h):
        raise PreconditionError("m must be a nonzero element of F_{q^t}")
    phi_poly(ctx, mv, J, t)  # validates q, t, J
    sigma = ctx.q ** J
    minus = e_star_power_witness(ctx, t, mv, sigma - 1)
    plus = e_star_power_witness(ctx, t, mv, sigma + 1)
    if minus is not None and plus is not None:
        raise PreconditionError(
            "m is both a (sigma-1)- and (sigma+1)-power of E*; the two "
            "power sets are provably disjoint")
    if minus is not None:
        return Classification("regular_fat", r=None, i=2)
    if plus is not None:
        if t % 2:
            return Classification("regular_fat", r=2, i=t)
        return Classification("regular_fat", r=ctx.q + 1, i=t)
    return Classification("scattered", r=0)


def classification_matches(expected: Classification, actual: Classification) -> bool:
    """Compare a predicted classification against an enumerated one.

    club counts as regular_fat with r = 1; an expected r of None matches any
    positive point count (the prediction fixes only the heavy weight).
    """
    exp, act = expected.as_regular(), actual.as_regular()
    if exp is None or act is None:
        return False
    if expected.kind == "scattered":
        return actual.kind == "scattered"
    if act[0] == 0:
        return False
    if exp[0] is not None and exp[0] != act[0]:
        return False
    return exp[1] == act[1]


def phi_weight2_char(ctx: FieldCtx, x, m, w, J: int, t: int) -> Optional[bool]:
    """Trace criterion for weight-two points of the graph set of phi.

    Requires m = w^(sigma-1) with w in E*.  Returns True/False for the trace
    condition, or None when the denominator vanishes (the criterion does not
    decide those points; callers count them separately).
    """
    xv = ctx.elem(x).val
    if xv == 0:
        raise PreconditionError("x must be nonzero")
    mv = ctx.elem(m).val
    wv = ctx.elem(w).val
    if wv == 0 or not trace_zero_set_contains(ctx, t, wv):
        raise PreconditionError("w is not a nonzero element of E")
    sigma = ctx.q ** J
    if ctx.pow(wv, sigma - 1) != mv:
        raise PreconditionError("m must equal w^(sigma-1)")
    half = ctx.inv(2 % ctx.p)
    xt = ctx.frob_q(xv, t)
    x0 = ctx.mul(half, ctx.add(xv, xt))
    x1 = ctx.mul(half, ctx.sub(xv, xt))

    def sig(v: int, j: int = 1) -> int:
        return ctx.frob_q(v, (J * j) % ctx.n)

    num = ctx.sub(
        ctx.mul(ctx.pow(mv, sigma), ctx.mul(sig(x0, t - 1), sig(x1, 2))),
        ctx.mul(mv, ctx.mul(sig(x0), x1)))
    base = ctx.sub(ctx.mul(sig(x0, t - 1), x0), ctx.mul(mv, ctx.mul(sig(x1), x1)))
    den = ctx.mul(sig(wv), ctx.mul(sig(base), base))
    if den == 0:
        return None
    arg = ctx.mul(num, ctx.inv(den))
    if not in_subfield(ctx, FieldElem(ctx, arg), t * ctx.h):
        raise PreconditionError("trace argument escaped F_{q^t}")
    return rel_trace(ctx, FieldElem(ctx, arg), t * ctx.h, ctx.h).val == 0


# ---------------------------------------------------------------------------
# polynomial forms of the k = 2, full-I twisted family
# ---------------------------------------------------------------------------

def polform(ctx: FieldCtx, variant: str, mu_or_m, w, s: int, t: int) -> LinearizedPoly:
    """Short q-polynomials whose graph sets match L_{T^2} with I = F_{q^t}."""
    if ctx.n != 2 * t:
        raise PreconditionError(f"n={ctx.n} must equal 2t={2 * t}")
    if ctx.q % 2 == 0:
        raise PreconditionError("q must be odd")
    n = ctx.n
    if variant == "POL1":
        mu = ctx.elem(mu_or_m).val
        if not in_subfield(ctx, FieldElem(ctx, mu), t * ctx.h):
            raise PreconditionError("mu must lie in F_{q^t}")
        if rel_norm(ctx, FieldElem(ctx, mu), t * ctx.h, ctx.h).val != 1 or mu == 1:
            raise PreconditionError("mu must have norm one and differ from one")
        wv = ctx.elem(w).val
        if wv == 0 or not trace_zero_set_contains(ctx, t, wv):
            raise PreconditionError("w is not a nonzero element of E")
        mus = ctx.frob_q(mu, s)
        a = ctx.sub(mus, 1)          # mu^(q^s) - 1
        b = ctx.sub(mu, 1)           # mu - 1
        w_inv_pow = ctx.inv(ctx.frob_q(wv, t - s))
        two = 2 % ctx.p
        terms = [
            (t, ctx.mul(a, ctx.add(mu, 1))),
            (t - s, ctx.neg(ctx.mul(a, ctx.mul(two, w_inv_pow)))),
            (2 * t - s, ctx.mul(a, ctx.mul(two, w_inv_pow))),
            (t, ctx.mul(b, ctx.add(mus, 1))),
            (s, ctx.mul(b, ctx.mul(two, ctx.mul(wv, mus)))),
            (t + s, ctx.mul(b, ctx.mul(two, ctx.mul(wv, mus)))),
        ]
        acc: dict[int, int] = {}
        for j, v in terms:
            acc[j % n] = ctx.add(acc.get(j % n, 0), v)
        return make_poly(ctx, acc)
    if variant == "POL2":
        if t % 2:
            raise PreconditionError("the short even form needs t even")
        mv = ctx.elem(mu_or_m).val
        if e_star_power_witness(ctx, t, mv, ctx.q + 1) is None:
            raise PreconditionError(
                "m must be a (q+1)-th power of a nonzero element of E")
        return make_poly(ctx, {s % n: 1, (t + s) % n: 1,
                               (t - s) % n: mv, (2 * t - s) % n: ctx.neg(mv)})
    raise PreconditionError(f"unknown polynomial form variant {variant!r}")


# ---------------------------------------------------------------------------
# legacy club families and complementary-weight products
# ---------------------------------------------------------------------------

def club_lambda(ctx: FieldCtx, lam) -> Subspace:
    """Rank-n set with one heavy point of weight n-2 from a power basis."""
    lv = ctx.elem(lam).val
    n = ctx.n
    pows = [ctx.pow(lv, j) for j in range(n)]
    probe_rows = [[v] for v in pows]
    try:
        probe = Subspace(ctx, 1, probe_rows)
    except PreconditionError:
        raise PreconditionError("powers of lambda do not form an F_q-basis")
    if probe.rho != n:
        raise PreconditionError("powers of lambda do not form an F_q-basis")
    basis = [(pows[j], 0) for j in range(1, n - 1)]
    basis.append((pows[n - 1], 1))
    basis.append((0, lv))
    return Subspace(ctx, 2, basis)


def club_uab(ctx: FieldCtx, f: LinearizedPoly, a, b, ell: int) -> Subspace:
    """Club of rank n = l*t from a polynomial scattered on F_{q^t}."""
    if ctx.n % ell:
        raise PreconditionError(f"ell={ell} must divide n={ctx.n}")
    t = ctx.n // ell
    if t <= 1 or ell <= 1:
        raise PreconditionError("need t > 1 and ell > 1")
    av = ctx.elem(a).val
    bv = ctx.elem(b).val
    if bv == 0:
        raise PreconditionError("b must be nonzero")
    for v in (av, bv):
        if not in_subfield(ctx, FieldElem(ctx, v), t * ctx.h):
            raise PreconditionError("a and b must lie in F_{q^t}")
    for j, c in enumerate(f.coeffs):
        if c and (j >= t or not in_subfield(ctx, FieldElem(ctx, c), t * ctx.h)):
            raise PreconditionError(
                "f must be a q-polynomial over F_{q^t} (support below q^t)")
    zeta = ctx.fq_basis_of_subfield(t * ctx.h)
    graph_small = Subspace(ctx, 2, [(z, eval_poly(f, z).val) for z in zeta])
    if not is_partially_scattered(graph_small, t):
        raise PreconditionError("f is not scattered over F_{q^t}")
    omega_v = ctx.omega
    basis = [(ctx.sub(eval_poly(f, z).val, ctx.mul(av, z)), ctx.mul(bv, z))
             for z in zeta]
    for j in range(1, ell):
        wj = ctx.pow(omega_v, j)
        basis.extend((0, ctx.mul(z, wj)) for z in zeta)
    return Subspace(ctx, 2, basis)


def club_uab_expected_i(ctx: FieldCtx, f: LinearizedPoly, a, ell: int) -> int:
    """t(l-1) if f - aX is invertible on F_{q^t}, else t(l-1) + 1."""
    t = ctx.n // ell
    av = ctx.elem(a).val
    zeta = ctx.subfield_fp_basis(t * ctx.h)
    import numpy as np
    rows = []
    for z in zeta:
        img = ctx.sub(eval_poly(f, z).val, ctx.mul(av, z))
        rows.append(ctx.digits_of(img))
    from .kernels import rank_fp
    invertible = rank_fp(np.array(rows, dtype=np.int64), ctx.p) == len(zeta)
    return t * (ell - 1) if invertible else t * (ell - 1) + 1


def comp_product(ctx: FieldCtx, S_basis: Optional[Sequence] = None,
                 Sp_basis: Optional[Sequence] = None, xi=None, mu=None,
                 s: Optional[int] = None) -> Subspace:
    """Complementary-weight products in F_{q^n}^2.

    Plain mode (xi is None): U = S x S' from the two given bases.  Twisted
    mode: U = {(u + xi u^(q^s), v + xi mu v^(q^s)) : u, v in F_{q^t}} with
    n = 2t, which carries exactly two points of weight above one under the
    stated norm conditions.
    """
    if xi is None:
        if not S_basis or not Sp_basis:
            raise PreconditionError("plain product needs both bases")
        sv = _as_vals(ctx, S_basis)
        pv = _as_vals(ctx, Sp_basis)
        return Subspace(ctx, 2, [(v, 0) for v in sv] + [(0, v) for v in pv])
    if ctx.n % 2:
        raise PreconditionError("twisted product needs n = 2t")
    t = ctx.n // 2
    if s is None or math.gcd(s, t) != 1:
        raise PreconditionError(f"gcd(s, t={t}) must be 1")
    xv = ctx.elem(xi).val
    mv = ctx.elem(mu).val
    if in_subfield(ctx, FieldElem(ctx, xv), t * ctx.h):
        raise PreconditionError("xi must lie outside F_{q^t}")
    if mv == 0 or not in_subfield(ctx, FieldElem(ctx, mv), t * ctx.h):
        raise PreconditionError("mu must be a nonzero element of F_{q^t}")
    if rel_norm(ctx, FieldElem(ctx, mv), t * ctx.h, ctx.h).val == 1:
        raise PreconditionError("mu must not have norm one")
    prod = ctx.neg(ctx.mul(ctx.pow(xv, ctx.q ** t + 1), mv))
    sign = 1 if t % 2 == 0 else ctx.neg(1)
    if rel_norm(ctx, FieldElem(ctx, prod), t * ctx.h, ctx.h).val == sign:
        raise PreconditionError(
            "norm condition N(-xi^(q^t+1) mu) != (-1)^t fails")
    zeta = ctx.fq_basis_of_subfield(t * ctx.h)
    basis = [(ctx.add(z, ctx.mul(xv, ctx.frob_q(z, s))), 0) for z in zeta]
    basis += [(0, ctx.add(z, ctx.mul(ctx.mul(xv, mv), ctx.frob_q(z, s))))
              for z in zeta]
    return Subspace(ctx, 2, basis)


# ---------------------------------------------------------------------------
# two-term (LP) polynomials: predicted weight-two point counts
# ---------------------------------------------------------------------------

def lp_expected_r(ctx: FieldCtx, delta, s: int) -> int:
    """Predicted number of weight-two points of the graph set of lp_poly."""
    if math.gcd(s, ctx.n) != 1:
        raise PreconditionError(f"gcd(s={s}, n={ctx.n}) must be 1")
    dv = ctx.elem(delta).val
    if dv == 0:
        raise PreconditionError("delta must be nonzero")
    q, n = ctx.q, ctx.n
    norm_q = rel_norm(ctx, FieldElem(ctx, dv), ctx.deg, ctx.h).val
    if norm_q != 1:
        return 0
    if n % 2:
        return (q ** (n - 1) - 1) // (q * q - 1)
    norm_q2 = rel_norm(ctx, FieldElem(ctx, dv), ctx.deg, 2 * ctx.h).val
    minus_one = ctx.neg(1)
    half = (n - 2) // 2
    if n % 4 == 0:
        if norm_q2 == 1:
            return q * q * (q ** half + 1) * (q ** (half - 1) - 1) // (q * q - 1) + 1
        return (q ** (n // 2 - 1) + 1) * (q ** (n // 2) - 1) // (q * q - 1)
    if norm_q2 == minus_one:
        return q * q * (q ** (half - 1) + 1) * (q ** half - 1) // (q * q - 1) + 1
    return (q ** (n // 2) + 1) * (q ** (n // 2 - 1) - 1) // (q * q - 1)


# ---------------------------------------------------------------------------
# descriptor-driven building (CLI and equivalence support)
# ---------------------------------------------------------------------------

def build_from_descriptor(desc: ConstructionDescriptor) -> Subspace:
    ctx = desc.ctx()
    p = desc.params
    fam = desc.family
    if fam == "T1":
        return construct_T1(ctx, p["s"], ctx.val_of(p["w"]),
                            [ctx.val_of(c) for c in p["I_basis"]], p["k"])
    if fam == "T2":
        return construct_T2(ctx, p["s"], ctx.val_of(p["eta"]),
                            [ctx.val_of(c) for c in p["I_basis"]], p["k"],
                            p["ell"])
    if fam == "PHI":
        f = phi_poly(ctx, ctx.val_of(p["m"]), p["J"], p["t"])
        return graph_subspace(f)
    if fam == "LP":
        return graph_subspace(lp_poly(ctx, ctx.val_of(p["delta"]), p["s"]))
    if fam == "TRACE_CLUB":
        t = p.get("t", 1)
        s = p.get("s", 0)
        if t == 1 and s == 0:
            return graph_subspace(trace_poly(ctx))
        return graph_subspace(club_trace_poly(ctx, t, s))
    if fam == "CLUB_LAMBDA":
        return club_lambda(ctx, ctx.val_of(p["lam"]))
    if fam == "CLUB_UAB":
        f = LinearizedPoly(ctx, tuple(ctx.val_of(c) for c in p["f_coeffs"]), ctx.h)
        return club_uab(ctx, f, ctx.val_of(p["a"]), ctx.val_of(p["b"]), p["ell"])
    if fam in ("POLFORM1", "POLFORM2"):
        variant = "POL1" if fam == "POLFORM1" else "POL2"
        w = ctx.val_of(p["w"]) if "w" in p else 0
        f = polform(ctx, variant, ctx.val_of(p["mu_or_m"]), w, p["s"], p["t"])
        return graph_subspace(f)
    if fam == "COMP_PRODUCT":
        return comp_product(ctx,
                            S_basis=[ctx.val_of(c) for c in p["S_basis"]],
                            Sp_basis=[ctx.val_of(c) for c in p["Sp_basis"]])
    if fam == "NPSZ":
        return comp_product(ctx, xi=ctx.val_of(p["xi"]), mu=ctx.val_of(p["mu"]),
                            s=p["s"])
    raise PreconditionError(f"unknown family {fam!r}")
