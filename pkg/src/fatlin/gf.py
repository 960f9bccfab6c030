"""Exact arithmetic in a finite-field tower F_p <= F_q <= F_{q^t} <= F_{q^n}.

A single top field F_{p^(h*n)} hosts the whole tower; subfields are the fixed
sets of Frobenius powers rather than separate representations.  Elements are
encoded as integers in [0, p^(h*n)) whose base-p digits are the coefficients
in the power basis of the modulus root, little-endian.  The modulus is the
first monic irreducible in that same integer encoding order, and omega is the
first element of full multiplicative order, so every artifact is reproducible
bit for bit across runs.

For fields up to TABLE_LIMIT elements the context carries exp/log and digit
tables and all arithmetic is table-driven (scalar and vectorized alike);
beyond that, polynomial arithmetic takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError
from .kernels import nullspace_fp, reduce_rows, rref_fp, solve_fp

TABLE_LIMIT = 1 << 20


# ---------------------------------------------------------------------------
# integer / polynomial helpers (no field context needed)
# ---------------------------------------------------------------------------

def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


def factorize(m: int) -> dict[int, int]:
    """Prime factorization by trial division; fine for desk-scale orders."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def solve_congruence(a: int, b: int, m: int) -> tuple[int, int] | None:
    """Solve a*x = b (mod m); returns (least solution, period) or None."""
    a %= m
    b %= m
    g = math.gcd(a, m)
    if b % g:
        return None
    mg = m // g
    x0 = (b // g) * pow(a // g, -1, mg) % mg
    return x0, mg


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = a[:]
    binv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * binv % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
        _poly_trim(a)
        if not a:
            break
    return q, a


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    _, rem = _poly_divmod(_poly_trim(out), mod, p)
    return rem


def _poly_powmod(a: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = a[:]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _poly_trim(a[:]), _poly_trim(b[:])
    while b:
        _, r = _poly_divmod(a, b, p)
        a, b = b, r
    return a


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Deterministic (Rabin) irreducibility test for a monic polynomial."""
    f = _poly_trim([c % p for c in coeffs])
    d = len(f) - 1
    if d < 1 or f[-1] != 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    xp = _poly_powmod(x, p ** d, f, p)
    if _poly_trim([(xc - c) % p for xc, c in
                   zip(xp + [0] * len(x), x + [0] * len(xp))]) != []:
        return False
    for r in factorize(d):
        xe = _poly_powmod(x, p ** (d // r), f, p)
        diff = [(a - b) % p for a, b in
                zip(xe + [0] * len(x), x + [0] * len(xe))]
        g = _poly_gcd(f, _poly_trim(diff), p)
        if len(g) - 1 > 0:
            return False
    return True


def least_irreducible(p: int, deg: int) -> tuple[int, ...]:
    """First monic irreducible of the given degree in integer encoding order."""
    for val in range(p ** deg):
        coeffs = []
        v = val
        for _ in range(deg):
            coeffs.append(v % p)
            v //= p
        coeffs.append(1)
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise PreconditionError(f"no irreducible of degree {deg} over F_{p}")


# ---------------------------------------------------------------------------
# field context
# ---------------------------------------------------------------------------

class FieldCtx:
    """Immutable tower context; all operations on elements live here.

    Do not call directly: `make_field` is the cached, validating entry point.
    """

    def __init__(self, p: int, h: int, n: int):
        if not is_prime(p):
            raise PreconditionError(f"p={p} is not prime")
        if h < 1 or n < 1:
            raise PreconditionError("h and n must be positive")
        self.p = p
        self.h = h
        self.n = n
        self.deg = h * n
        self.q = p ** h
        self.order = p ** self.deg
        self.group = self.order - 1
        self.modulus = least_irreducible(p, self.deg)
        self._group_factors = tuple(factorize(self.group)) if self.group > 1 else ()
        self._p_pows = np.array([p ** i for i in range(self.deg)], dtype=np.int64)
        self._tables = None
        if self.order <= TABLE_LIMIT:
            self._build_tables()
        self.omega = self._search_primitive()
        if self._tables is not None:
            self._finish_tables()
        self._subfield_cache: dict[int, np.ndarray] = {}
        self._fq_basis_cache: dict[int, tuple[int, ...]] = {}
        self._trace_coord_cache: dict[int, np.ndarray] = {}

    # -- representation ----------------------------------------------------

    def digits_of(self, val: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.deg):
            out.append(val % self.p)
            val //= self.p
        return tuple(out)

    def val_of(self, coeffs: Iterable[int]) -> int:
        coeffs = list(coeffs)
        if len(coeffs) != self.deg:
            raise PreconditionError(
                f"expected {self.deg} coefficients, got {len(coeffs)}")
        v = 0
        for c in reversed(coeffs):
            c = int(c)
            if not 0 <= c < self.p:
                raise PreconditionError(f"coefficient {c} out of range mod {self.p}")
            v = v * self.p + c
        return v

    # -- construction internals --------------------------------------------

    def _mul_poly(self, a: int, b: int) -> int:
        rem = _poly_mulmod(list(self.digits_of(a)), list(self.digits_of(b)),
                           list(self.modulus), self.p)
        rem += [0] * (self.deg - len(rem))
        return self.val_of(rem)

    def _pow_poly(self, a: int, e: int) -> int:
        rem = _poly_powmod(list(self.digits_of(a)), e, list(self.modulus), self.p)
        rem += [0] * (self.deg - len(rem))
        return self.val_of(rem)

    def _mult_matrix_poly(self, x: int) -> np.ndarray:
        """F_p matrix of multiplication by x in the power basis."""
        cols = []
        for j in range(self.deg):
            cols.append(self.digits_of(self._mul_poly(x, self.p ** j)))
        return np.array(cols, dtype=np.int64).T

    def _build_tables(self) -> None:
        order, deg, p = self.order, self.deg, self.p
        vals = np.arange(order, dtype=np.int64)
        digits = np.empty((order, deg), dtype=np.uint8)
        for i in range(deg):
            digits[:, i] = (vals // (p ** i)) % p
        self._tables = {"digits": digits}

    def _finish_tables(self) -> None:
        # exp table by repeated doubling: exp[m:2m] = exp[:m] * omega^m
        deg, p, group = self.deg, self.p, self.group
        exp_digits = np.zeros((group, deg), dtype=np.int64)
        exp_digits[0, 0] = 1
        m = 1
        while m < group:
            g = self._mul_poly(int(exp_digits[m - 1] @ self._p_pows), self.omega)
            step = min(m, group - m)
            M = self._mult_matrix_poly(g)
            exp_digits[m:m + step] = (exp_digits[:step] @ M.T) % p
            m += step
        exp_vals = (exp_digits @ self._p_pows).astype(np.int64)
        exp_table = np.concatenate([exp_vals, exp_vals, exp_vals[:1]])
        log_table = np.full(self.order, -1, dtype=np.int64)
        log_table[exp_vals] = np.arange(group, dtype=np.int64)
        assert self._tables is not None
        self._tables["exp"] = exp_table
        self._tables["log"] = log_table

    def _search_primitive(self) -> int:
        if self.group == 1:
            return 1
        checks = [self.group // r for r in self._group_factors]
        for cand in range(2, self.order):
            if all(self._pow_poly(cand, e) != 1 for e in checks):
                return cand
        raise PreconditionError("no primitive element found")

    # -- scalar arithmetic on encoded values --------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        da = np.array(self.digits_of(a), dtype=np.int64)
        db = np.array(self.digits_of(b), dtype=np.int64)
        return int(((da + db) % self.p) @ self._p_pows)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        da = np.array(self.digits_of(a), dtype=np.int64)
        return int(((-da) % self.p) @ self._p_pows)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._tables is not None:
            t = self._tables
            return int(t["exp"][t["log"][a] + t["log"][b]])
        return self._mul_poly(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self._tables is not None:
            t = self._tables
            return int(t["exp"][self.group - t["log"][a]])
        return self._pow_poly(a, self.group - 1)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        if self._tables is not None:
            t = self._tables
            return int(t["exp"][(int(t["log"][a]) * e) % self.group])
        return self._pow_poly(a, e % self.group if self.group else 0)

    def frob(self, a: int, e: int) -> int:
        """a^(p^e); e is reduced mod deg since Frobenius has order deg."""
        return self.pow(a, self.p ** (e % self.deg))

    def frob_q(self, a: int, j: int) -> int:
        """a^(q^j)."""
        return self.frob(a, (self.h * j) % self.deg)

    # -- vectorized arithmetic on int64 arrays of encoded values ------------

    def _need_tables(self):
        if self._tables is None:
            raise PreconditionError(
                f"field of order {self.order} exceeds the table limit; "
                "vectorized enumeration is not available")
        return self._tables

    def digits_vec(self, vals: np.ndarray) -> np.ndarray:
        t = self._need_tables()
        return t["digits"][vals]

    def vals_vec(self, digits: np.ndarray) -> np.ndarray:
        return (digits.astype(np.int64) @ self._p_pows).astype(np.int64)

    def mul_vec(self, a: np.ndarray, b) -> np.ndarray:
        """Elementwise product; b may be an array or a scalar value."""
        t = self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        if np.isscalar(b) or getattr(b, "ndim", 1) == 0:
            b = int(b)
            if b == 0:
                return np.zeros_like(a)
            lb = int(t["log"][b])
            out = t["exp"][t["log"][a] + lb]
            return np.where(a == 0, 0, out)
        b = np.asarray(b, dtype=np.int64)
        out = t["exp"][t["log"][a] + t["log"][b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv_vec(self, a: np.ndarray) -> np.ndarray:
        t = self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return t["exp"][self.group - t["log"][a]]

    def frob_vec(self, a: np.ndarray, e: int) -> np.ndarray:
        t = self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        mult = self.p ** (e % self.deg) % self.group if self.group > 1 else 0
        out = t["exp"][(t["log"][a] * mult) % self.group]
        return np.where(a == 0, 0, out)

    # -- structural helpers --------------------------------------------------

    def mult_matrix(self, x: int) -> np.ndarray:
        """F_p matrix (deg x deg) of multiplication by x in the power basis."""
        if self._tables is not None:
            pows = np.array([self.p ** j for j in range(self.deg)], dtype=np.int64)
            return self.digits_vec(self.mul_vec(pows, x)).T.astype(np.int64)
        return self._mult_matrix_poly(x)

    def frob_matrix(self, e: int) -> np.ndarray:
        """F_p matrix of the automorphism x -> x^(p^e) in the power basis."""
        cols = [self.digits_of(self.frob(self.p ** j, e)) for j in range(self.deg)]
        return np.array(cols, dtype=np.int64).T

    def subfield_vals(self, d: int) -> np.ndarray:
        """All encoded values of the subfield of degree d over F_p, sorted."""
        if self.deg % d:
            raise PreconditionError(f"degree {d} does not divide {self.deg}")
        cached = self._subfield_cache.get(d)
        if cached is None:
            basis = self.subfield_fp_basis(d)
            rows = np.array([self.digits_of(v) for v in basis], dtype=np.int64)
            combos = np.arange(self.p ** d, dtype=np.int64)
            digs = np.empty((len(combos), d), dtype=np.int64)
            for i in range(d):
                digs[:, i] = (combos // (self.p ** i)) % self.p
            vals = self.vals_vec((digs @ rows) % self.p)
            cached = np.sort(vals)
            self._subfield_cache[d] = cached
        return cached

    def subfield_fp_basis(self, d: int) -> tuple[int, ...]:
        """Canonical F_p-basis of the degree-d subfield (Frobenius kernel)."""
        if self.deg % d:
            raise PreconditionError(f"degree {d} does not divide {self.deg}")
        M = (self.frob_matrix(d) - np.eye(self.deg, dtype=np.int64)) % self.p
        basis_rows = nullspace_fp(M, self.p)
        if basis_rows.shape[0] != d:
            raise PreconditionError("subfield dimension mismatch")
        return tuple(int(r @ self._p_pows) for r in basis_rows)

    def fq_fp_basis(self) -> tuple[int, ...]:
        """F_p-basis of F_q inside the top field."""
        return self.subfield_fp_basis(self.h)

    def fq_basis_of_subfield(self, d: int) -> tuple[int, ...]:
        """Deterministic F_q-basis of the degree-d subfield (h | d)."""
        if d % self.h:
            raise PreconditionError(f"subfield of degree {d} is not an F_q-space")
        cached = self._fq_basis_cache.get(d)
        if cached is not None:
            return cached
        fq = self.fq_fp_basis()
        chosen: list[int] = []
        ech = np.zeros((0, self.deg), dtype=np.int64)
        pivots: list[int] = []
        for cand in self.subfield_fp_basis(d):
            row = np.array([self.digits_of(cand)], dtype=np.int64)
            red = reduce_rows(row, ech, pivots, self.p)
            if not red.any():
                continue
            chosen.append(cand)
            closure = np.array([self.digits_of(self.mul(z, cand)) for z in fq],
                               dtype=np.int64)
            ech, pivots = rref_fp(np.vstack([ech, closure]), self.p)
            if len(chosen) == d // self.h:
                break
        if len(chosen) != d // self.h:
            raise PreconditionError("could not extract an F_q-basis")
        result = tuple(chosen)
        self._fq_basis_cache[d] = result
        return result

    def trace_coord_matrix(self, d: int) -> np.ndarray:
        """Matrix taking digit vectors to coordinates of Tr_{top/F_{p^d}}.

        Coordinates are with respect to subfield_fp_basis(d); shape (d, deg).
        """
        cached = self._trace_coord_cache.get(d)
        if cached is not None:
            return cached
        T = np.zeros((self.deg, self.deg), dtype=np.int64)
        e = self.deg // d
        for j in range(self.deg):
            x = self.p ** j
            acc = 0
            for m in range(e):
                acc = self.add(acc, self.frob(x, d * m))
            T[:, j] = self.digits_of(acc)
        Q = np.array([self.digits_of(v) for v in self.subfield_fp_basis(d)],
                     dtype=np.int64).T  # deg x d
        # solve Q @ C = T column by column; Q has full column rank d
        C = np.zeros((d, self.deg), dtype=np.int64)
        for j in range(self.deg):
            sol = solve_fp(Q, T[:, j], self.p)
            if sol is None:
                raise PreconditionError("trace image escaped the subfield")
            C[:, j] = sol
        self._trace_coord_cache[d] = C
        return C

    # -- misc ----------------------------------------------------------------

    def elem(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.ctx is not self:
                raise PreconditionError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            v = int(value)
            if not 0 <= v < self.order:
                raise PreconditionError(f"value {v} outside [0, {self.order})")
            return FieldElem(self, v)
        return FieldElem(self, self.val_of(value))

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, 1)

    @property
    def omega_elem(self) -> "FieldElem":
        return FieldElem(self, self.omega)

    @property
    def beta(self) -> int:
        """Encoded value of the modulus root (the power-basis generator)."""
        return self.p if self.deg > 1 else 1

    def to_json(self) -> dict:
        return {"p": self.p, "h": self.h, "n": self.n,
                "modulus": list(self.modulus)}

    def __repr__(self):
        return f"FieldCtx(p={self.p}, h={self.h}, n={self.n})"

    def __eq__(self, other):
        return (isinstance(other, FieldCtx)
                and (self.p, self.h, self.n) == (other.p, other.h, other.n))

    def __hash__(self):
        return hash((self.p, self.h, self.n))


@dataclass(frozen=True)
class FieldElem:
    """An element of a FieldCtx top field, encoded as an integer."""

    ctx: FieldCtx
    val: int

    @property
    def coeffs(self) -> list[int]:
        return list(self.ctx.digits_of(self.val))

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx:
                raise PreconditionError("field context mismatch")
            return other.val
        if isinstance(other, (int, np.integer)):
            return int(other)
        raise TypeError(f"cannot coerce {other!r}")

    def __add__(self, other):
        return FieldElem(self.ctx, self.ctx.add(self.val, self._other(other)))

    def __sub__(self, other):
        return FieldElem(self.ctx, self.ctx.sub(self.val, self._other(other)))

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg(self.val))

    def __mul__(self, other):
        return FieldElem(self.ctx, self.ctx.mul(self.val, self._other(other)))

    def __truediv__(self, other):
        o = self._other(other)
        return FieldElem(self.ctx, self.ctx.mul(self.val, self.ctx.inv(o)))

    def __pow__(self, e: int):
        return FieldElem(self.ctx, self.ctx.pow(self.val, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx.inv(self.val))

    def __bool__(self):
        return self.val != 0

    def to_json(self) -> list[int]:
        return self.coeffs

    def __repr__(self):
        return f"FieldElem({self.val} in F_{self.ctx.p}^{self.ctx.deg})"


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def make_field(p: int, h: int, n: int) -> FieldCtx:
    """Deterministic tower context for F_p <= F_{p^h} <= F_{p^(h*n)}."""
    return FieldCtx(p, h, n)


def _as_val(ctx: FieldCtx, x) -> int:
    return ctx.elem(x).val


def frobenius(ctx: FieldCtx, x, j: int, base_exp: int) -> FieldElem:
    """x^((p^base_exp)^j); base_exp must divide h*n."""
    if base_exp <= 0 or ctx.deg % base_exp:
        raise PreconditionError(f"base_exp {base_exp} does not divide {ctx.deg}")
    return FieldElem(ctx, ctx.frob(_as_val(ctx, x), base_exp * j))


def _check_tower(ctx: FieldCtx, from_deg: int, to_deg: int, x_val: int):
    if to_deg <= 0 or from_deg % to_deg or ctx.deg % from_deg:
        raise PreconditionError(
            f"need to_deg | from_deg | {ctx.deg}; got {to_deg}, {from_deg}")
    if ctx.frob(x_val, from_deg) != x_val:
        raise PreconditionError(
            f"element is not in the subfield of degree {from_deg}")


def rel_trace(ctx: FieldCtx, x, from_deg: int, to_deg: int) -> FieldElem:
    """Relative trace from the degree-from_deg to the degree-to_deg subfield."""
    v = _as_val(ctx, x)
    _check_tower(ctx, from_deg, to_deg, v)
    acc = 0
    for m in range(from_deg // to_deg):
        acc = ctx.add(acc, ctx.frob(v, to_deg * m))
    return FieldElem(ctx, acc)


def rel_norm(ctx: FieldCtx, x, from_deg: int, to_deg: int) -> FieldElem:
    """Relative norm x^((p^from_deg - 1)/(p^to_deg - 1))."""
    v = _as_val(ctx, x)
    _check_tower(ctx, from_deg, to_deg, v)
    e = (ctx.p ** from_deg - 1) // (ctx.p ** to_deg - 1)
    return FieldElem(ctx, ctx.pow(v, e))


def in_subfield(ctx: FieldCtx, x, deg: int) -> bool:
    """True iff x lies in the subfield of degree deg over F_p."""
    if deg <= 0 or ctx.deg % deg:
        raise PreconditionError(f"degree {deg} does not divide {ctx.deg}")
    v = _as_val(ctx, x)
    return ctx.frob(v, deg) == v


def discrete_log(ctx: FieldCtx, x) -> int:
    """Baby-step/giant-step logarithm of x to base omega."""
    v = _as_val(ctx, x)
    if v == 0:
        raise PreconditionError("discrete log of zero")
    if ctx.group == 1 or v == 1:
        return 0
    m = math.isqrt(ctx.group) + 1
    baby: dict[int, int] = {}
    cur = 1
    for j in range(m):
        baby.setdefault(cur, j)
        cur = ctx.mul(cur, ctx.omega)
    giant = ctx.pow(ctx.omega, ctx.group - m)
    y = v
    for i in range(m + 1):
        j = baby.get(y)
        if j is not None:
            return (i * m + j) % ctx.group
        y = ctx.mul(y, giant)
    raise PreconditionError("discrete log failed (omega not primitive?)")


def solve_power(ctx: FieldCtx, c, e: int) -> FieldElem | None:
    """Least-exponent solution of theta^e = c in the top field, or None."""
    cv = _as_val(ctx, c)
    if cv == 0:
        raise PreconditionError("cannot solve powers of zero")
    sol = solve_congruence(e, discrete_log(ctx, cv), ctx.group)
    if sol is None:
        return None
    return FieldElem(ctx, ctx.pow(ctx.omega, sol[0]))


def dual_basis(ctx: FieldCtx, basis: Sequence, deg_big: int,
               deg_small: int) -> list[FieldElem]:
    """Trace-dual basis: Tr(b_i * out_j) = delta_ij over F_{p^deg_small}."""
    vals = [_as_val(ctx, b) for b in basis]
    e = deg_big // deg_small
    if deg_big % deg_small or len(vals) != e:
        raise PreconditionError(
            f"need {deg_big // deg_small} basis elements of the degree-{deg_big} subfield")
    for v in vals:
        if ctx.frob(v, deg_big) != v:
            raise PreconditionError("basis element outside the big subfield")
    gram = [[rel_trace(ctx, ctx.mul(vals[i], vals[j]), deg_big, deg_small).val
             for j in range(e)] for i in range(e)]
    ginv = field_inverse(ctx, gram)
    out = []
    for j in range(e):
        acc = 0
        for m in range(e):
            acc = ctx.add(acc, ctx.mul(ginv[m][j], vals[m]))
        out.append(FieldElem(ctx, acc))
    return out


# ---------------------------------------------------------------------------
# small dense linear algebra with field-element entries
# ---------------------------------------------------------------------------

def field_rref(ctx: FieldCtx, rows: Sequence[Sequence[int]]):
    """Reduced echelon form over the top field; returns (rows, pivots)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        ipiv = ctx.inv(m[r][c])
        m[r] = [ctx.mul(ipiv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[: len(pivots)], pivots


def field_rank(ctx: FieldCtx, rows) -> int:
    return len(field_rref(ctx, rows)[1])


def field_inverse(ctx: FieldCtx, M: Sequence[Sequence[int]]):
    n = len(M)
    aug = [list(M[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    red, pivots = field_rref(ctx, aug)
    if pivots != list(range(n)):
        raise PreconditionError("singular matrix over the field")
    return [row[n:] for row in red]


def field_nullspace(ctx: FieldCtx, rows: Sequence[Sequence[int]]):
    """Canonical basis of the right kernel, entries as encoded values."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = field_rref(ctx, rows)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for ri, pc in enumerate(pivots):
            vec[pc] = ctx.neg(red[ri][fc])
        out.append(vec)
    return out
