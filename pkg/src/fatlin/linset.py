"""Linear sets L_U in PG(k-1, q^n): enumeration, weights, classification.

weight_spectrum enumerates the q^rho - 1 nonzero vectors of U in chunks,
normalizes each to its projective point, and reads every point's weight off
the fiber size (a point of weight w absorbs exactly q^w - 1 vectors).  The
fiber sizes must come out as exact powers of q and must sum to q^rho - 1,
and a sample of points is re-checked by independent linear algebra, so an
enumeration or normalization bug cannot slip through silently.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConsistencyError, EnumerationCapError, PreconditionError
from .gf import FieldCtx, FieldElem
from .kernels import batched_rank_fp, nullspace_fp, rank_fp, reduce_rows, rref_fp

DEFAULT_CAP = 1 << 24
_CHUNK = 1 << 15


def enumeration_cap() -> int:
    env = os.environ.get("FATLIN_CAP")
    return int(env) if env else DEFAULT_CAP


class Subspace:
    """An F_q-subspace of F_{q^n}^k given by an F_q-basis of vectors."""

    def __init__(self, ctx: FieldCtx, k: int, basis: Sequence[Sequence]):
        if k < 1:
            raise PreconditionError("k must be positive")
        self.ctx = ctx
        self.k = k
        vals = []
        for vec in basis:
            if len(vec) != k:
                raise PreconditionError(f"basis vector of length {len(vec)} != k={k}")
            vals.append(tuple(ctx.elem(c).val for c in vec))
        self.basis_vals: tuple[tuple[int, ...], ...] = tuple(vals)
        self.rho = len(vals)
        if not 1 <= self.rho <= ctx.n * k:
            raise PreconditionError(f"rank {self.rho} outside [1, {ctx.n * k}]")
        self._fp_rows: Optional[np.ndarray] = None
        self._echelon: Optional[tuple[np.ndarray, list[int]]] = None
        if self.fp_rank() != self.rho * ctx.h:
            raise PreconditionError("basis vectors are not F_q-independent")

    # -- F_p expansion -------------------------------------------------------

    def fp_rows(self) -> np.ndarray:
        """F_p row matrix (rho*h, k*deg): rows are zeta_a * v_b expanded."""
        if self._fp_rows is None:
            ctx = self.ctx
            zeta = ctx.fq_fp_basis()
            rows = np.zeros((self.rho * ctx.h, self.k * ctx.deg), dtype=np.int64)
            for b, vec in enumerate(self.basis_vals):
                for a, z in enumerate(zeta):
                    for j, c in enumerate(vec):
                        rows[b * ctx.h + a, j * ctx.deg:(j + 1) * ctx.deg] = \
                            ctx.digits_of(ctx.mul(z, c))
            self._fp_rows = rows
        return self._fp_rows

    def fp_rank(self) -> int:
        return rank_fp(self.fp_rows(), self.ctx.p)

    def echelon(self) -> tuple[np.ndarray, list[int]]:
        if self._echelon is None:
            self._echelon = rref_fp(self.fp_rows(), self.ctx.p)
        return self._echelon

    def span_key(self) -> bytes:
        red, _ = self.echelon()
        return red.astype(np.uint8).tobytes()

    def same_span(self, other: "Subspace") -> bool:
        return (self.ctx == other.ctx and self.k == other.k
                and self.rho == other.rho and self.span_key() == other.span_key())

    def contains_vector(self, vec: Sequence) -> bool:
        ctx = self.ctx
        vals = [ctx.elem(c).val for c in vec]
        row = np.concatenate([np.array(ctx.digits_of(v), dtype=np.int64)
                              for v in vals])[None, :]
        red, piv = self.echelon()
        return not reduce_rows(row, red, piv, ctx.p).any()

    def basis_elems(self) -> tuple[tuple[FieldElem, ...], ...]:
        return tuple(tuple(FieldElem(self.ctx, c) for c in vec)
                     for vec in self.basis_vals)

    def to_json(self) -> dict:
        ctx = self.ctx
        return {"field": ctx.to_json(), "k": self.k,
                "basis": [[list(ctx.digits_of(c)) for c in vec]
                          for vec in self.basis_vals]}

    @classmethod
    def from_json(cls, payload: dict) -> "Subspace":
        from .gf import make_field

        fld = payload["field"]
        ctx = make_field(fld["p"], fld["h"], fld["n"])
        if list(ctx.modulus) != list(fld["modulus"]):
            raise PreconditionError("stored modulus disagrees with the "
                                    "deterministic modulus for (p, h, n)")
        basis = [[ctx.val_of(c) for c in vec] for vec in payload["basis"]]
        return cls(ctx, payload["k"], basis)

    def __repr__(self):
        return (f"Subspace(rho={self.rho}, k={self.k}, "
                f"field=F_{self.ctx.p}^{self.ctx.deg})")


@dataclass(frozen=True)
class ProjPoint:
    """A point of PG(k-1, q^n): coordinates normalized on the first nonzero."""

    coords: tuple[int, ...]

    @staticmethod
    def normalize(ctx: FieldCtx, coords: Sequence) -> "ProjPoint":
        vals = [ctx.elem(c).val for c in coords]
        lead = next((v for v in vals if v), None)
        if lead is None:
            raise PreconditionError("projective point needs a nonzero coordinate")
        ilead = ctx.inv(lead)
        return ProjPoint(tuple(ctx.mul(ilead, v) for v in vals))


@dataclass(frozen=True)
class Classification:
    kind: str  # scattered | club | regular_fat | fat_irregular
    r: Optional[int] = None
    i: Optional[int] = None
    heavy_weights: Optional[dict[int, int]] = None
    no_weight_one: bool = False

    def as_regular(self) -> Optional[tuple[int, Optional[int]]]:
        """(r, i) for scattered/club/regular_fat; None for irregular sets."""
        if self.kind == "scattered":
            return (0, None)
        if self.kind in ("club", "regular_fat"):
            return (self.r, self.i)
        return None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.r is not None:
            out["r"] = self.r
        if self.i is not None:
            out["i"] = self.i
        if self.heavy_weights is not None:
            out["heavy_weights"] = {str(w): c for w, c in
                                    sorted(self.heavy_weights.items())}
        if self.no_weight_one:
            out["no_weight_one"] = True
        return out


@dataclass
class SpectrumReport:
    q: int
    n: int
    k: int
    rho: int
    spectrum: dict[int, int]
    classification: Classification
    heavy_points: tuple[tuple[int, ...], ...]
    size: int
    checks: dict = field(default_factory=dict)
    partially_scattered: dict[int, bool] = field(default_factory=dict)
    heavy_points_form_subgeometry: Optional[bool] = None

    def to_json(self) -> dict:
        out = {
            "q": self.q, "n": self.n, "k": self.k, "rho": self.rho,
            "size": self.size,
            "spectrum": {str(w): c for w, c in sorted(self.spectrum.items())},
            "classification": self.classification.to_json(),
            "heavy_points": [[str(c) for c in pt] for pt in self.heavy_points],
            "checks": self.checks,
        }
        if self.partially_scattered:
            out["partially_scattered"] = {str(t): v for t, v in
                                          sorted(self.partially_scattered.items())}
        if self.heavy_points_form_subgeometry is not None:
            out["heavy_points_form_subgeometry"] = self.heavy_points_form_subgeometry
        return out


# ---------------------------------------------------------------------------
# point weights by linear algebra (the independent route)
# ---------------------------------------------------------------------------

def _line_rows(ctx: FieldCtx, coords: Sequence[int], scalars: Sequence[int]) -> np.ndarray:
    """F_p rows spanning {lambda * v : lambda in span_Fp(scalars)}."""
    rows = np.zeros((len(scalars), len(coords) * ctx.deg), dtype=np.int64)
    for a, lam in enumerate(scalars):
        for j, c in enumerate(coords):
            rows[a, j * ctx.deg:(j + 1) * ctx.deg] = ctx.digits_of(ctx.mul(lam, c))
    return rows


def point_weight(U: Subspace, P: ProjPoint | Sequence) -> int:
    """dim_{F_q} of the intersection of U with the F_{q^n}-line of P."""
    ctx = U.ctx
    if isinstance(P, ProjPoint):
        coords = P.coords
    else:
        coords = ProjPoint.normalize(ctx, P).coords
    if len(coords) != U.k:
        raise PreconditionError("point/subspace ambient mismatch")
    scalars = [ctx.p ** m for m in range(ctx.deg)]  # F_p-basis of the top field
    rows = _line_rows(ctx, coords, scalars)
    red, piv = U.echelon()
    resid = reduce_rows(rows, red, piv, ctx.p)
    r = rank_fp(resid, ctx.p)
    inter_p = ctx.deg - r
    if inter_p % ctx.h:
        raise ConsistencyError("intersection is not an F_q-space")
    return inter_p // ctx.h


def subline_dim(U: Subspace, coords: Sequence[int], t: int) -> int:
    """dim_{F_q} of U meet the F_{q^t}-line through the given vector."""
    ctx = U.ctx
    scalars = ctx.subfield_fp_basis(t * ctx.h)
    rows = _line_rows(ctx, list(coords), scalars)
    red, piv = U.echelon()
    resid = reduce_rows(rows, red, piv, ctx.p)
    r = rank_fp(resid, ctx.p)
    inter_p = t * ctx.h - r
    if inter_p % ctx.h:
        raise ConsistencyError("intersection is not an F_q-space")
    return inter_p // ctx.h


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------

def _vector_chunks(U: Subspace, lo: int, hi: int) -> np.ndarray:
    """Encoded coordinate array (hi-lo, k) for combination counters [lo, hi)."""
    ctx = U.ctx
    rows = U.fp_rows()
    nrows = rows.shape[0]
    counters = np.arange(lo, hi, dtype=np.int64)
    digs = np.empty((counters.size, nrows), dtype=np.int64)
    for i in range(nrows):
        digs[:, i] = (counters // (ctx.p ** i)) % ctx.p
    flat = (digs @ rows) % ctx.p
    coords = flat.reshape(-1, U.k, ctx.deg)
    return ctx.vals_vec(coords)


def _normalize_block(ctx: FieldCtx, coords: np.ndarray) -> np.ndarray:
    """Scale rows so the first nonzero coordinate is one."""
    nz = coords != 0
    lead_idx = np.argmax(nz, axis=1)
    lead = coords[np.arange(coords.shape[0]), lead_idx]
    ilead = ctx.inv_vec(lead)
    out = np.empty_like(coords)
    for j in range(coords.shape[1]):
        out[:, j] = ctx.mul_vec(coords[:, j], ilead)
    return out


def _point_counts(U: Subspace, cap: int, jobs: int) -> dict[tuple[int, ...], int]:
    ctx = U.ctx
    total = ctx.p ** (U.rho * ctx.h)
    if total > cap:
        raise EnumerationCapError(
            f"enumeration of {total} vectors exceeds the cap {cap}")
    pack = ctx.order ** U.k < (1 << 62)
    pows = np.array([ctx.order ** (U.k - 1 - j) for j in range(U.k)],
                    dtype=np.int64) if pack else None

    def process(bounds: tuple[int, int]) -> dict:
        lo, hi = bounds
        coords = _vector_chunks(U, lo, hi)
        nonzero = (coords != 0).any(axis=1)
        coords = coords[nonzero]
        if coords.shape[0] == 0:
            return {}
        norm = _normalize_block(ctx, coords)
        local: dict = {}
        if pack:
            keys = norm @ pows
            uniq, counts = np.unique(keys, return_counts=True)
            for kk, cc in zip(uniq.tolist(), counts.tolist()):
                local[kk] = local.get(kk, 0) + cc
        else:
            uniq, counts = np.unique(norm, axis=0, return_counts=True)
            for row, cc in zip(uniq, counts.tolist()):
                kk = tuple(int(v) for v in row)
                local[kk] = local.get(kk, 0) + cc
        return local

    bounds = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]
    merged: dict = {}
    if jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for local in pool.map(process, bounds):
                for kk, cc in local.items():
                    merged[kk] = merged.get(kk, 0) + cc
    else:
        for bd in bounds:
            for kk, cc in process(bd).items():
                merged[kk] = merged.get(kk, 0) + cc
    if pack:
        out: dict[tuple[int, ...], int] = {}
        for kk, cc in merged.items():
            coords_list = []
            rem = int(kk)
            for _ in range(U.k):
                coords_list.append(rem % ctx.order)
                rem //= ctx.order
            out[tuple(reversed(coords_list))] = cc
        return out
    return merged


def weight_spectrum(U: Subspace, cap: Optional[int] = None, jobs: int = 1,
                    cross_check: bool = True) -> SpectrumReport:
    """Full weight spectrum and classification of L_U by exhaustive enumeration."""
    ctx = U.ctx
    cap = cap if cap is not None else enumeration_cap()
    counts = _point_counts(U, cap, jobs)
    q = ctx.q
    qpow = {q ** w: w for w in range(U.rho + 1)}
    spectrum: dict[int, int] = {}
    heavy: list[tuple[int, ...]] = []
    total_vectors = 0
    for pt, c in counts.items():
        total_vectors += c
        w = qpow.get(c + 1)
        if w is None:
            raise ConsistencyError(f"fiber size {c} is not q^w - 1 at {pt}")
        spectrum[w] = spectrum.get(w, 0) + 1
        if w > 1:
            heavy.append(pt)
    if total_vectors != q ** U.rho - 1:
        raise ConsistencyError("fiber sizes do not sum to q^rho - 1")
    heavy.sort()
    checks = {"vector_identity": True}
    if cross_check:
        sample: list[tuple[int, ...]] = []
        if counts:
            sample.append(min(counts))
        sample.extend(heavy[:2])
        ok = True
        for pt in sample:
            lw = point_weight(U, ProjPoint(pt))
            if q ** lw - 1 != counts[pt]:
                ok = False
        if not ok:
            raise ConsistencyError("fiber count disagrees with linear algebra")
        checks["sample_weights_verified"] = True

    n_light = spectrum.get(1, 0)
    heavy_weights = {w: c for w, c in spectrum.items() if w > 1}
    if not heavy_weights:
        cls = Classification("scattered", r=0)
    elif len(heavy_weights) == 1 and n_light >= 1:
        (i, r), = heavy_weights.items()
        cls = Classification("club" if r == 1 else "regular_fat", r=r, i=i)
    else:
        cls = Classification("fat_irregular", heavy_weights=heavy_weights,
                             no_weight_one=(n_light == 0))
    report = SpectrumReport(
        q=q, n=ctx.n, k=U.k, rho=U.rho,
        spectrum=dict(sorted(spectrum.items())),
        classification=cls,
        heavy_points=tuple(heavy),
        size=sum(spectrum.values()),
        checks=checks,
    )
    return report


def size_formula(q: int, rho: int, r: int, i: Optional[int]) -> int:
    """(q^rho - 1 - r(q^i - q)) / (q - 1); errors when not an integer."""
    heavy_term = 0 if r == 0 else r * (q ** i - q)
    num = q ** rho - 1 - heavy_term
    if num % (q - 1):
        raise PreconditionError(
            f"size formula is non-integral for (q={q}, rho={rho}, r={r}, i={i})")
    return num // (q - 1)


def is_partially_scattered(U: Subspace, t: int, cap: Optional[int] = None) -> bool:
    """True iff every F_{q^t}-line meets U in F_q-dimension at most one."""
    ctx = U.ctx
    if t <= 0 or ctx.n % t:
        raise PreconditionError(f"t={t} must divide n={ctx.n}")
    cap = cap if cap is not None else enumeration_cap()
    total = ctx.p ** (U.rho * ctx.h)
    if total > cap:
        raise EnumerationCapError(
            f"enumeration of {total} vectors exceeds the cap {cap}")
    scalars = ctx.subfield_fp_basis(t * ctx.h)
    red, piv = U.echelon()
    th = len(scalars)
    for lo in range(0, total, _CHUNK):
        hi = min(lo + _CHUNK, total)
        coords = _vector_chunks(U, lo, hi)
        nonzero = (coords != 0).any(axis=1)
        coords = coords[nonzero]
        if coords.shape[0] == 0:
            continue
        B = coords.shape[0]
        mats = np.zeros((B, th, U.k * ctx.deg), dtype=np.int64)
        for a, lam in enumerate(scalars):
            prods = np.empty_like(coords)
            for j in range(U.k):
                prods[:, j] = ctx.mul_vec(coords[:, j], lam)
            mats[:, a, :] = ctx.digits_vec(prods).reshape(B, -1)
        flat = mats.reshape(B * th, -1)
        flat = reduce_rows(flat, red, piv, ctx.p)
        mats = flat.reshape(B, th, -1)
        ranks = batched_rank_fp(mats, ctx.p)
        inter = t * ctx.h - ranks
        if np.any(inter > ctx.h):
            return False
    return True


def heavy_points_subgeometry(report: SpectrumReport, U: Subspace) -> bool:
    """True iff the weight-i points sit inside PG(k-1, q).

    When their number equals |PG(k-1, q)| the heavy set must be the whole
    rational subgeometry, and every rational point is re-checked by linear
    algebra to carry weight exactly i.
    """
    cls = report.classification
    if cls.kind not in ("club", "regular_fat"):
        raise PreconditionError(
            "subgeometry check applies to club / regular_fat sets only")
    ctx = U.ctx
    fq_vals = set(int(v) for v in ctx.subfield_vals(ctx.h))
    for pt in report.heavy_points:
        if any(v not in fq_vals for v in pt):
            return False
    rational = rational_points(ctx, U.k)
    if len(report.heavy_points) == len(rational):
        for pt in rational:
            if point_weight(U, ProjPoint(pt)) != cls.i:
                return False
    return True


def rational_points(ctx: FieldCtx, k: int) -> list[tuple[int, ...]]:
    """Canonical points of PG(k-1, q) inside PG(k-1, q^n)."""
    fq_vals = [int(v) for v in ctx.subfield_vals(ctx.h)]
    pts: set[tuple[int, ...]] = set()
    def rec(prefix: list[int], started: bool):
        if len(prefix) == k:
            if started:
                pts.add(ProjPoint.normalize(ctx, prefix).coords)
            return
        for v in fq_vals:
            rec(prefix + [v], started or v != 0)
    rec([], False)
    return sorted(pts)


@dataclass
class Rank2iReport:
    applicable: bool
    reason: str = ""
    subfield_size: Optional[int] = None
    subfield_log: Optional[int] = None
    r: Optional[int] = None
    heavy_match: Optional[bool] = None

    def to_json(self) -> dict:
        out: dict = {"applicable": self.applicable}
        if self.reason:
            out["reason"] = self.reason
        if self.subfield_size is not None:
            out.update({"subfield_size": self.subfield_size,
                        "subfield_log": self.subfield_log,
                        "r": self.r, "heavy_match": self.heavy_match})
        return out


def rank2i_structure(U: Subspace, report: Optional[SpectrumReport] = None,
                     cap: Optional[int] = None) -> Rank2iReport:
    """Structure of a rank-2i set with r > 2 uniform heavy points in PG(1, q^n).

    Expects the three heavy points (1:0), (0:1), (1:1) to be present (the
    caller applies a projectivity first if needed).  Recovers the stabilizer
    subfield S of T_1 = {x : (x, 0) in U} and checks r = |S| + 1 with heavy
    points {(0:1)} union {(1:a) : a in S}.
    """
    ctx = U.ctx
    if U.k != 2:
        raise PreconditionError("rank-2i structure applies in PG(1, q^n) only")
    if report is None:
        report = weight_spectrum(U, cap=cap)
    hw = report.classification
    if hw.kind in ("club", "regular_fat"):
        heavy_w = {hw.i}
        r = hw.r
    elif hw.kind == "fat_irregular" and hw.heavy_weights and len(hw.heavy_weights) == 1:
        (i_, r), = hw.heavy_weights.items()
        heavy_w = {i_}
    else:
        return Rank2iReport(False, reason="heavy weights are not uniform")
    i = next(iter(heavy_w))
    if U.rho != 2 * i:
        return Rank2iReport(False, reason=f"rank {U.rho} != 2i = {2 * i}")
    if r <= 2:
        return Rank2iReport(False, reason="r <= 2: statement is vacuous")
    needed = {ProjPoint.normalize(ctx, (1, 0)).coords,
              ProjPoint.normalize(ctx, (0, 1)).coords,
              ProjPoint.normalize(ctx, (1, 1)).coords}
    if not needed <= set(report.heavy_points):
        raise PreconditionError(
            "move three heavy points to (1:0), (0:1), (1:1) first")
    # T_1 = {x : (x, 0) in U}: row combinations c with c @ block2 == 0
    rows = U.fp_rows()
    block2 = rows[:, ctx.deg:]
    combos = nullspace_fp(block2.T, ctx.p)
    t1_rows = (combos @ rows) % ctx.p if combos.size else np.zeros((0, rows.shape[1]))
    t1_digits = t1_rows[:, :ctx.deg]
    t1_red, t1_piv = rref_fp(t1_digits, ctx.p)
    dim_t1 = len(t1_piv)
    if dim_t1 != i * ctx.h:
        return Rank2iReport(False, reason="U is not a direct product T1 x T2")
    # enumerate T_1 values and the stabilizer subfield S
    combos_cnt = ctx.p ** dim_t1
    counters = np.arange(combos_cnt, dtype=np.int64)
    digs = np.empty((combos_cnt, dim_t1), dtype=np.int64)
    for idx in range(dim_t1):
        digs[:, idx] = (counters // (ctx.p ** idx)) % ctx.p
    t1_vals = set(int(v) for v in ctx.vals_vec((digs @ t1_red) % ctx.p))
    S = [b for b in range(ctx.order)
         if all(ctx.mul(b, x) in t1_vals for x in t1_vals if x)]
    size_s = len(S)
    # S must be a subfield of order q^j
    j = 0
    while ctx.q ** j < size_s:
        j += 1
    is_power = ctx.q ** j == size_s
    heavy_expected = {ProjPoint.normalize(ctx, (0, 1)).coords}
    for alpha in S:
        heavy_expected.add(ProjPoint.normalize(ctx, (1, alpha)).coords)
    match = (is_power and r == size_s + 1
             and heavy_expected == set(report.heavy_points))
    return Rank2iReport(True, subfield_size=size_s,
                        subfield_log=j if is_power else None,
                        r=r, heavy_match=match)
