"""Linearized polynomials sum a_j X^(q^j) acting on the top field.

Exponents are Frobenius indices mod n, never big integers; the coefficient
vector always has length n.  Kernel dimensions are computed from the F_p
block expansion of the induced linear map so prime and non-prime q share one
code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .gf import FieldCtx, FieldElem
from .kernels import rank_fp, solve_fp


@dataclass(frozen=True)
class LinearizedPoly:
    """Coefficients (a_0 .. a_{n-1}) of sum a_j X^(q^j) over F_{q^n}."""

    ctx: FieldCtx
    coeffs: tuple[int, ...]
    q_exp: int  # base Frobenius exponent: the map is F_{p^q_exp}-linear

    def __post_init__(self):
        if len(self.coeffs) != self.ctx.n:
            raise PreconditionError(
                f"need {self.ctx.n} coefficients, got {len(self.coeffs)}")
        if self.q_exp != self.ctx.h:
            raise PreconditionError("q_exp must equal the tower parameter h")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, a in enumerate(self.coeffs) if a)

    def coeff_elems(self) -> tuple[FieldElem, ...]:
        return tuple(FieldElem(self.ctx, a) for a in self.coeffs)

    def to_json(self) -> dict:
        return {"coeffs": [list(self.ctx.digits_of(a)) for a in self.coeffs],
                "q_exp": self.q_exp}

    @classmethod
    def from_json(cls, ctx: FieldCtx, payload: dict) -> "LinearizedPoly":
        coeffs = tuple(ctx.val_of(c) for c in payload["coeffs"])
        return cls(ctx, coeffs, payload["q_exp"])


def make_poly(ctx: FieldCtx, pairs: dict[int, int]) -> LinearizedPoly:
    """Build from {exponent: coefficient value}; exponents reduced mod n."""
    coeffs = [0] * ctx.n
    for j, a in pairs.items():
        j %= ctx.n
        coeffs[j] = ctx.add(coeffs[j], a)
    return LinearizedPoly(ctx, tuple(coeffs), ctx.h)


def eval_poly(f: LinearizedPoly, x) -> FieldElem:
    """f(x) = sum a_j x^(q^j)."""
    ctx = f.ctx
    xv = ctx.elem(x).val
    acc = 0
    for j, a in enumerate(f.coeffs):
        if a:
            acc = ctx.add(acc, ctx.mul(a, ctx.frob_q(xv, j)))
    return FieldElem(ctx, acc)


def fp_matrix(f: LinearizedPoly) -> np.ndarray:
    """F_p matrix (deg x deg) of the induced map in the power basis."""
    ctx = f.ctx
    cols = [ctx.digits_of(eval_poly(f, ctx.p ** i).val) for i in range(ctx.deg)]
    return np.array(cols, dtype=np.int64).T


def as_matrix(f: LinearizedPoly) -> list[list[int]]:
    """n x n matrix over F_q with f(b_i) = sum_j M[j][i] b_j.

    The basis is 1, beta, ..., beta^(n-1) for the modulus root beta, which is
    an F_q-basis of the top field.  Entries are encoded values lying in F_q.
    """
    ctx = f.ctx
    if ctx.h == 1:
        return [[int(v) for v in row] for row in fp_matrix(f)]
    n, h, deg = ctx.n, ctx.h, ctx.deg
    zeta = ctx.fq_fp_basis()
    beta_pows = [ctx.pow(ctx.beta, j) for j in range(n)]
    # columns of B: digits of beta^j * zeta_a, giving the F_p coordinates of
    # an (F_q-coordinate) vector under the basis {beta^j}
    B = np.zeros((deg, deg), dtype=np.int64)
    for j in range(n):
        for a in range(h):
            B[:, j * h + a] = ctx.digits_of(ctx.mul(beta_pows[j], zeta[a]))
    M: list[list[int]] = [[0] * n for _ in range(n)]
    for i in range(n):
        img = eval_poly(f, beta_pows[i]).val
        sol = solve_fp(B, np.array(ctx.digits_of(img), dtype=np.int64), ctx.p)
        if sol is None:
            raise PreconditionError("power basis failed to span the field")
        for j in range(n):
            coord = 0
            for a in range(h):
                if sol[j * h + a]:
                    coord = ctx.add(coord, ctx.mul(int(sol[j * h + a]), zeta[a]))
            M[j][i] = coord
    return M


def kernel_dim(f: LinearizedPoly) -> int:
    """dim_{F_q} ker(f), via the F_p rank of the block-expanded matrix."""
    ctx = f.ctx
    r = rank_fp(fp_matrix(f) % ctx.p, ctx.p)
    null_p = ctx.deg - r
    if null_p % ctx.h:
        raise PreconditionError("kernel is not an F_q-subspace (bad q_exp?)")
    return null_p // ctx.h


def trace_poly(ctx: FieldCtx) -> LinearizedPoly:
    """The full relative trace onto F_q: all coefficients one."""
    return LinearizedPoly(ctx, tuple([1] * ctx.n), ctx.h)


def club_trace_poly(ctx: FieldCtx, t: int, s: int) -> LinearizedPoly:
    """Trace onto F_{q^t} composed with x -> x^(q^s)."""
    if t <= 0 or ctx.n % t:
        raise PreconditionError(f"t={t} must divide n={ctx.n}")
    if math.gcd(s, t) != 1 and not (s == 0 and t == 1):
        raise PreconditionError(f"gcd(s={s}, t={t}) must be 1")
    ell = ctx.n // t
    return make_poly(ctx, {(j * t + s): 1 for j in range(ell)})


def phi_poly(ctx: FieldCtx, m, J: int, t: int) -> LinearizedPoly:
    """X^(s^(t-1)) + X^(s^(2t-1)) + m(X^s - X^(s^(t+1))) with s = q^J."""
    if ctx.q % 2 == 0:
        raise PreconditionError("q must be odd")
    if ctx.n != 2 * t:
        raise PreconditionError(f"n={ctx.n} must equal 2t={2 * t}")
    if t < 3:
        raise PreconditionError("t must be at least 3")
    if math.gcd(J, 2 * t) != 1:
        raise PreconditionError(f"gcd(J={J}, 2t={2 * t}) must be 1")
    mv = ctx.elem(m).val
    if mv == 0 or ctx.frob_q(mv, t) != mv:
        raise PreconditionError("m must be a nonzero element of F_{q^t}")
    n = ctx.n
    return make_poly(ctx, {
        (J * (t - 1)) % n: 1,
        (J * (2 * t - 1)) % n: 1,
        J % n: mv,
        (J * (t + 1)) % n: ctx.neg(mv),
    })


def lp_poly(ctx: FieldCtx, delta, s: int) -> LinearizedPoly:
    """X^(q^(s(n-1))) + delta X^(q^s)."""
    if math.gcd(s, ctx.n) != 1:
        raise PreconditionError(f"gcd(s={s}, n={ctx.n}) must be 1")
    dv = ctx.elem(delta).val
    return make_poly(ctx, {(s * (ctx.n - 1)) % ctx.n: 1, s % ctx.n: dv})


def projection_poly(ctx: FieldCtx, S_basis: Sequence, Sp_basis: Sequence) -> LinearizedPoly:
    """q-polynomial of the projection onto span(Sp_basis) along span(S_basis).

    Built from the concatenated basis and its trace-dual; validated on the
    generating vectors before returning.
    """
    from .gf import dual_basis  # local import to keep module init light

    s_vals = [ctx.elem(b).val for b in S_basis]
    sp_vals = [ctx.elem(b).val for b in Sp_basis]
    full = s_vals + sp_vals
    if len(full) != ctx.n:
        raise PreconditionError("S and S' must jointly span with n basis vectors")
    dual = dual_basis(ctx, [FieldElem(ctx, v) for v in full], ctx.deg, ctx.h)
    s = len(s_vals)
    pairs: dict[int, int] = {}
    for j in range(ctx.n):
        acc = 0
        for hh in range(s, ctx.n):
            acc = ctx.add(acc, ctx.mul(full[hh], ctx.frob_q(dual[hh].val, j)))
        pairs[j] = acc
    f = make_poly(ctx, pairs)
    for v in s_vals:
        if eval_poly(f, v).val != 0:
            raise PreconditionError("projection does not kill S")
    for v in sp_vals:
        if eval_poly(f, v).val != v:
            raise PreconditionError("projection does not fix S'")
    return f


def graph_subspace(f: LinearizedPoly, k: int = 2, positions: tuple[int, int] = (0, 1)):
    """The graph {(x, f(x))} as a rank-n subspace of F_{q^n}^k."""
    from .linset import Subspace

    ctx = f.ctx
    ix, iy = positions
    basis = []
    for j in range(ctx.n):
        b = ctx.pow(ctx.beta, j)
        vec = [0] * k
        vec[ix] = b
        vec[iy] = eval_poly(f, b).val
        basis.append(tuple(vec))
    return Subspace(ctx, k, basis)
