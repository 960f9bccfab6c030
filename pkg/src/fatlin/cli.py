"""Command-line front end: JSON in, JSON out, deterministic across runs.

Exit codes: 0 success, 1 theorem-check mismatch, 2 invalid input,
3 enumeration cap exceeded.  FATLIN_CAP overrides the vector cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import families, linpoly, linset, rmc
from .equiv import check_equiv
from .errors import EnumerationCapError, PreconditionError, TheoremCheckError
from .families import ConstructionDescriptor
from .gf import FieldCtx, discrete_log, make_field
from .linset import Subspace, weight_spectrum

EXIT_OK = 0
EXIT_THEOREM = 1
EXIT_INVALID = 2
EXIT_CAP = 3


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise PreconditionError(f"q={q} is not a prime power")
    p = next((d for d in range(2, q + 1) if q % d == 0), q)
    h = 0
    m = q
    while m % p == 0:
        m //= p
        h += 1
    if m != 1:
        raise PreconditionError(f"q={q} is not a prime power")
    return p, h


def parse_element(ctx: FieldCtx, text: str) -> int:
    """Element syntax: 'omega^K', 'w^K', a bare integer value, or 'c0,c1,...'."""
    text = text.strip()
    if text.startswith(("omega^", "w^")):
        exp = int(text.split("^", 1)[1])
        return ctx.pow(ctx.omega, exp)
    if text in ("omega", "w"):
        return ctx.omega
    if "," in text:
        return ctx.val_of([int(c) for c in text.split(",")])
    return ctx.elem(int(text)).val


def _emit(payload: dict, pretty: bool, out: Optional[str] = None) -> None:
    text = json.dumps(payload, sort_keys=True,
                      indent=2 if pretty else None,
                      separators=None if pretty else (",", ":"))
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _load(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _cap(args) -> Optional[int]:
    if getattr(args, "cap", None):
        return args.cap
    env = os.environ.get("FATLIN_CAP")
    return int(env) if env else None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_field(args) -> int:
    ctx = make_field(args.p, args.h, args.n)
    payload = ctx.to_json()
    payload["omega"] = list(ctx.digits_of(ctx.omega))
    payload["omega_is_recomputed"] = True
    _emit(payload, args.pretty, args.out)
    return EXIT_OK


def _construct_descriptor(args) -> ConstructionDescriptor:
    fam = args.family
    if fam == "t1":
        p, h = _factor_prime_power(args.q)
        if args.q % 2 == 0:
            raise PreconditionError("q must be odd")
        ctx = make_field(p, h, 2 * args.t)
        w = families.t1_auto_w(ctx, args.t).val if args.w == "auto" \
            else parse_element(ctx, args.w)
        I = families.full_subfield_basis(ctx, args.t) if args.I == "full" \
            else [parse_element(ctx, e) for e in args.I.split(";")]
        families.construct_T1(ctx, args.s, w, I, args.k, strict=args.strict)
        return families.describe_T1(ctx, args.s, w, I, args.k)
    if fam == "t2":
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, args.ell * args.t)
        if args.eta == "auto":
            _, eta_elem, _ = families.e_components(ctx, args.ell, args.t)
            eta = eta_elem.val
        else:
            eta = parse_element(ctx, args.eta)
        I = families.full_subfield_basis(ctx, args.t) if args.I == "full" \
            else [parse_element(ctx, e) for e in args.I.split(";")]
        families.construct_T2(ctx, args.s, eta, I, args.k, args.ell)
        return families.describe_T2(ctx, args.s, eta, I, args.k, args.ell)
    if fam == "phi":
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, 2 * args.t)
        m = parse_element(ctx, args.m)
        expected = families.phi_expected_class(ctx, m, args.J, args.t)
        return ConstructionDescriptor(
            "PHI", (p, h, ctx.n),
            {"m": list(ctx.digits_of(m)), "J": args.J, "t": args.t},
            expected=expected.to_json())
    if fam == "lp":
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, args.n)
        delta = parse_element(ctx, args.delta)
        r = families.lp_expected_r(ctx, delta, args.s)
        return ConstructionDescriptor(
            "LP", (p, h, args.n),
            {"delta": list(ctx.digits_of(delta)), "s": args.s},
            expected={"kind": "scattered" if r == 0 else "regular_fat",
                      "r": r, "i": None if r == 0 else 2})
    if fam == "trace-club":
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, args.n)
        t = args.t or 1
        s = args.s or 0
        i = t * (ctx.n // t - 1)
        return ConstructionDescriptor(
            "TRACE_CLUB", (p, h, args.n), {"t": t, "s": s},
            expected={"kind": "club", "r": 1, "i": i})
    if fam == "club-lambda":
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, args.n)
        lam = ctx.beta if args.lam == "auto" else parse_element(ctx, args.lam)
        return ConstructionDescriptor(
            "CLUB_LAMBDA", (p, h, args.n),
            {"lam": list(ctx.digits_of(lam))},
            expected={"kind": "club", "r": 1, "i": ctx.n - 2})
    if fam == "club-uab":
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, args.ell * args.t)
        coeffs = [0] * ctx.n
        for pair in args.f.split(";"):
            j, val = pair.split(":")
            coeffs[int(j)] = parse_element(ctx, val)
        f = linpoly.LinearizedPoly(ctx, tuple(coeffs), ctx.h)
        a = parse_element(ctx, args.a)
        b = parse_element(ctx, args.b)
        i = families.club_uab_expected_i(ctx, f, a, args.ell)
        return ConstructionDescriptor(
            "CLUB_UAB", (p, h, ctx.n),
            {"f_coeffs": [list(ctx.digits_of(c)) for c in coeffs],
             "a": list(ctx.digits_of(a)), "b": list(ctx.digits_of(b)),
             "ell": args.ell},
            expected={"kind": "club", "r": 1, "i": i})
    if fam in ("polform1", "polform2"):
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, 2 * args.t)
        tag = "POLFORM1" if fam == "polform1" else "POLFORM2"
        params = {"s": args.s, "t": args.t,
                  "mu_or_m": list(ctx.digits_of(parse_element(ctx, args.mu_or_m)))}
        if fam == "polform1":
            w = families.t1_auto_w(ctx, args.t).val if args.w == "auto" \
                else parse_element(ctx, args.w)
            params["w"] = list(ctx.digits_of(w))
        return ConstructionDescriptor(tag, (p, h, ctx.n), params)
    if fam == "comp-product":
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, args.n)
        S = [parse_element(ctx, e) for e in args.S.split(";")]
        Sp = [parse_element(ctx, e) for e in args.Sp.split(";")]
        return ConstructionDescriptor(
            "COMP_PRODUCT", (p, h, args.n),
            {"S_basis": [list(ctx.digits_of(v)) for v in S],
             "Sp_basis": [list(ctx.digits_of(v)) for v in Sp]})
    if fam == "npsz":
        p, h = _factor_prime_power(args.q)
        ctx = make_field(p, h, 2 * args.t)
        return ConstructionDescriptor(
            "NPSZ", (p, h, ctx.n),
            {"xi": list(ctx.digits_of(parse_element(ctx, args.xi))),
             "mu": list(ctx.digits_of(parse_element(ctx, args.mu))),
             "s": args.s},
            expected={"heavy_points": 2})
    raise PreconditionError(f"unknown family {fam!r}")


def cmd_construct(args) -> int:
    desc = _construct_descriptor(args)
    U = families.build_from_descriptor(desc)
    payload = {"descriptor": desc.to_json(), "subspace": U.to_json()}
    _emit(payload, args.pretty, args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    payload = _load(args.subspace)
    U = Subspace.from_json(payload.get("subspace", payload))
    report = weight_spectrum(U, cap=_cap(args), jobs=args.jobs)
    if args.partial_scattered:
        for t in args.partial_scattered:
            report.partially_scattered[t] = linset.is_partially_scattered(
                U, t, cap=_cap(args))
    if report.classification.kind in ("club", "regular_fat") and args.subgeometry:
        report.heavy_points_form_subgeometry = \
            linset.heavy_points_subgeometry(report, U)
    out = report.to_json()
    if "descriptor" in payload:
        out["descriptor"] = payload["descriptor"]
        expected = payload["descriptor"].get("expected")
        if expected and "kind" in expected:
            exp_cls = linset.Classification(
                kind=expected["kind"], r=expected.get("r"),
                i=expected.get("i"))
            out["matches_expected"] = families.classification_matches(
                exp_cls, report.classification)
    _emit(out, args.pretty, args.out)
    return EXIT_OK


def cmd_phi_sweep(args) -> int:
    p, h = _factor_prime_power(args.q)
    ctx = make_field(p, h, 2 * args.t)
    rows = []
    all_match = True
    minus = plus = scattered = 0
    for m in (int(v) for v in ctx.subfield_vals(args.t * ctx.h) if v):
        expected = families.phi_expected_class(ctx, m, args.J, args.t)
        f = linpoly.phi_poly(ctx, m, args.J, args.t)
        U = linpoly.graph_subspace(f)
        rep = weight_spectrum(U, cap=_cap(args), jobs=args.jobs)
        match = families.classification_matches(expected, rep.classification)
        if expected.kind == "scattered":
            scattered += 1
        elif expected.i == 2:
            minus += 1
            match = match and max(rep.spectrum) <= 2
        else:
            plus += 1
        all_match = all_match and match
        rows.append({"m": list(ctx.digits_of(m)),
                     "m_log": discrete_log(ctx, ctx.elem(m)),
                     "predicted": expected.to_json(),
                     "enumerated": rep.classification.to_json(),
                     "match": match})
    qt = ctx.q ** args.t
    payload = {
        "q": ctx.q, "t": args.t, "J": args.J,
        "rows": rows,
        "counts": {"sigma_minus_rows": minus, "sigma_plus_rows": plus,
                   "scattered_rows": scattered},
        "checks": {
            "all_match": all_match,
            "power_sets_partition": minus + plus + scattered == qt - 1,
        },
    }
    _emit(payload, args.pretty, args.out)
    if not all_match:
        raise TheoremCheckError("a predicted class disagrees with enumeration")
    return EXIT_OK


def cmd_code(args) -> int:
    payload = _load(args.subspace)
    U = Subspace.from_json(payload.get("subspace", payload))
    report = rmc.code_report(U, cap=_cap(args), jobs=args.jobs)
    _emit(report.to_json(), args.pretty, args.out)
    return EXIT_OK


def cmd_equiv(args) -> int:
    p1 = _load(args.first)
    p2 = _load(args.second)
    d1 = ConstructionDescriptor.from_json(p1["descriptor"])
    d2 = ConstructionDescriptor.from_json(p2["descriptor"])
    verdict = check_equiv(d1, d2)
    _emit(verdict.to_json(d1.ctx()), args.pretty, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fatlin",
        description="Regular fat linear sets and their rank-metric codes")
    sub = ap.add_subparsers(dest="command", required=True)

    default_jobs = int(os.environ.get("FATLIN_JOBS", 0)) or (os.cpu_count() or 1)

    def common(sp):
        sp.add_argument("--pretty", action="store_true")
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--jobs", type=int, default=default_jobs,
                        help="enumeration worker count (default: all cores)")
        sp.add_argument("--cap", type=int, help="vector enumeration cap")

    sp = sub.add_parser("field", help="build a deterministic field tower")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--n", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_field)

    sp = sub.add_parser("construct", help="build a named construction")
    sp.add_argument("family", choices=[
        "t1", "t2", "phi", "lp", "trace-club", "club-lambda", "club-uab",
        "polform1", "polform2", "comp-product", "npsz"])
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--t", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--s", type=int, default=1)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--ell", type=int)
    sp.add_argument("--J", type=int, default=1)
    sp.add_argument("--w", default="auto")
    sp.add_argument("--eta", default="auto")
    sp.add_argument("--I", default="full")
    sp.add_argument("--m", help="element (phi / polform2)")
    sp.add_argument("--mu-or-m", dest="mu_or_m", help="element (polform)")
    sp.add_argument("--delta", help="element (lp)")
    sp.add_argument("--lam", default="auto")
    sp.add_argument("--f", help="q-polynomial as 'j:elem;j:elem' (club-uab)")
    sp.add_argument("--a", default="0")
    sp.add_argument("--b", default="1")
    sp.add_argument("--S", help="semicolon basis list (comp-product)")
    sp.add_argument("--Sp", help="semicolon basis list (comp-product)")
    sp.add_argument("--xi", help="element (npsz)")
    sp.add_argument("--mu", help="element (npsz)")
    sp.add_argument("--strict", action="store_true",
                    help="enforce every theorem hypothesis as a hard error")
    common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("classify", help="weight spectrum of a subspace file")
    sp.add_argument("subspace")
    sp.add_argument("--partial-scattered", type=int, action="append",
                    dest="partial_scattered")
    sp.add_argument("--subgeometry", action="store_true",
                    help="check whether the heavy points fill PG(k-1,q)")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("phi-sweep",
                        help="predicted vs enumerated class for every m")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--J", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_phi_sweep)

    sp = sub.add_parser("code", help="rank-metric code report of a subspace")
    sp.add_argument("subspace")
    common(sp)
    sp.set_defaults(func=cmd_code)

    sp = sub.add_parser("equiv", help="equivalence verdict for two files")
    sp.add_argument("first")
    sp.add_argument("second")
    common(sp)
    sp.set_defaults(func=cmd_equiv)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        _emit({"error": "invalid-input", "reason": str(exc)},
              getattr(args, "pretty", False))
        return EXIT_INVALID
    except EnumerationCapError as exc:
        _emit({"error": "cap-exceeded", "reason": str(exc)},
              getattr(args, "pretty", False))
        return EXIT_CAP
    except TheoremCheckError as exc:
        sys.stderr.write(f"theorem check failed: {exc}\n")
        return EXIT_THEOREM
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        _emit({"error": "invalid-input", "reason": f"{type(exc).__name__}: {exc}"},
              getattr(args, "pretty", False))
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
