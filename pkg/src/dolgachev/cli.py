"""Command-line verifier.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse error,
3 a bounded search ran out of candidates.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from dolgachev import claims as claims_mod
from dolgachev import monodromy as mono
from dolgachev.exccol import (
    k_relation_holds,
    pair_scan,
    verify_numerically_exceptional,
    vial_search,
)
from dolgachev.lattice import (
    DEFAULT_HEIGHT,
    BoundedSearchExhausted,
    Lattice,
    UnsupportedClassificationError,
    classify_odd_unimodular,
    is_unimodular,
    parity,
)
from dolgachev.ratmat import DomainError, format_rational, signature
from dolgachev.ratmat import det as mdet
from dolgachev.rroch import Collection, bundled_collection, collection_to_json, k0_generation_check, load_collection
from dolgachev.surface import (
    ModelParseError,
    SurfaceModel,
    bundled_path,
    class_to_json,
    is_integral,
    load_model,
    pic_lattice,
    validate_model,
)
from dolgachev.vanish import DEFAULT_BOUND, vanishing_sweep
from dolgachev.xmodel import derive_table, div3_certificate, i9_sum, load_xmodel

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _model(args) -> SurfaceModel:
    return load_model(args.model or bundled_path("dolgachev23.json"))


def _collection(args, m: SurfaceModel) -> Collection:
    if args.collection:
        return load_collection(args.collection, m)
    return bundled_collection(m)


def _emit(args, report: dict, text: list[str]) -> None:
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print("\n".join(text))


def _mark(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


# --- lattice-info ----------------------------------------------------------

def _lattice_summary(l: Lattice) -> dict:
    out = {"det": format_rational(mdet(l.gram)), "signature": str(signature(l.gram)),
           "integral": l.is_integral}
    if l.is_integral:
        out["parity"] = parity(l)
        out["unimodular"] = is_unimodular(l)
        try:
            out["class"] = classify_odd_unimodular(l)
        except UnsupportedClassificationError as e:
            out["class"] = f"unsupported: {e}"
    return out


def cmd_lattice_info(args) -> int:
    m = _model(args)
    checks = validate_model(m)
    if not m.gram.is_symmetric():
        bad = [c for c in checks if not c.passed]
        report = {"model": m.name, "validation": [c.as_dict() for c in bad], "passed": False}
        text = [f"model: {m.name}"] + [f"  FAIL {c.name}: {c.expected} vs {c.computed}" for c in bad] + ["FAIL"]
        _emit(args, report, text)
        return EXIT_FAIL
    gram = _lattice_summary(m.lattice)
    pic = _lattice_summary(pic_lattice(m))
    basis_det = format_rational(mdet(m.pic_basis_change))
    ok = all(c.passed for c in checks) and pic["integral"] and pic.get("unimodular", False)
    report = {"model": m.name, "gram": gram, "pic_basis_change_det": basis_det, "pic_gram": pic,
              "validation": [c.as_dict() for c in checks if not c.passed],
              "validation_checks": len(checks), "passed": ok}
    text = [f"model: {m.name}",
            f"gram: det {gram['det']}, signature {gram['signature']}, "
            f"parity {gram.get('parity', '-')}, unimodular {str(gram.get('unimodular', False)).lower()}",
            f"pic basis change: det {basis_det}",
            f"pic gram: det {pic['det']}, signature {pic['signature']}, integral {str(pic['integral']).lower()}, "
            f"parity {pic.get('parity', '-')}, unimodular {str(pic.get('unimodular', False)).lower()}, "
            f"class {pic.get('class', '-')}",
            f"validation: {len(checks) - len(report['validation'])}/{len(checks)} checks pass"]
    text += [f"  FAIL {c.name}: expected {c.expected}, got {c.computed}" for c in checks if not c.passed]
    text.append(_mark(ok))
    _emit(args, report, text)
    return EXIT_OK if ok else EXIT_FAIL


# --- verify-collection -----------------------------------------------------

def cmd_verify_collection(args) -> int:
    m = _model(args)
    col = _collection(args, m)
    names = m.basis_names
    report: dict = {"model": m.name, "collection": col.name, "size": len(col), "bound": args.bound}
    text = [f"model: {m.name}", f"collection: {col.name} ({len(col)} members)"]
    failed = None

    non_integral = [n for n, c in col if not is_integral(m, c)]
    report["integral"] = {"passed": not non_integral, "non_integral": non_integral}
    text.append(f"integrality: {_mark(not non_integral)}" +
                (f" (not integral: {', '.join(non_integral)})" if non_integral else ""))
    if non_integral:
        failed = "integrality"

    verdict = verify_numerically_exceptional(m, col)
    report["numerically_exceptional"] = {
        "passed": verdict.passed,
        "position": list(verdict.position) if verdict.position else None,
        "value": None if verdict.value is None else format_rational(verdict.value)}
    text.append(f"chi matrix: {verdict}")
    if failed is None and not verdict.passed:
        failed = "chi matrix"

    if not non_integral:
        try:
            _, d = k0_generation_check(m, col)
            k0_ok = abs(d) == 1
            report["k0"] = {"det": format_rational(d), "passed": k0_ok}
            text.append(f"k0 generation: det {format_rational(d)} {_mark(k0_ok)}")
        except DomainError as e:
            k0_ok = False
            report["k0"] = {"det": None, "passed": False, "error": str(e)}
            text.append(f"k0 generation: FAIL ({e})")
        if failed is None and not k0_ok:
            failed = "k0 generation"

        hits = pair_scan(m, col)
        report["pair_scan"] = [{"i": h.i, "j": h.j, "difference": h.difference.format(names),
                                "witness": h.witness} for h in hits]
        text.append("vertical differences: " +
                    (", ".join(f"({h.i},{h.j}) {h.difference.format(names)}" for h in hits) or "none"))

        sw = vanishing_sweep(m, col, args.bound, split_extension=args.split_extension)
        report["sweep"] = sw.as_dict(names)
        text.append(f"sweep (bound {args.bound}): SURVIVING {sw.surviving_total}, "
                    f"mechanically closed witnesses {sw.mechanically_closed}")
        text.append("axiom-closed: " + (", ".join(f"({i},{j}) {k}" for i, j, k in sw.axiom_closed) or "none"))
        if sw.bound_insufficient:
            text.append("bound insufficient, required components unmet: " +
                        ", ".join(f"({i},{j}) {k}" for i, j, k in sw.bound_insufficient))
        if sw.unsupported:
            text.append("unsupported witnesses: " + ", ".join(f"({i},{j}) {k}" for i, j, k in sw.unsupported))
        if args.verbose:
            for p in sw.pairs:
                for w in p.witnesses:
                    line = f"  ({p.i},{p.j}) {w.kind}: {w.status.value}"
                    if w.counts:
                        line += " " + ", ".join(f"{k} {v}" for k, v in sorted(w.counts.items()))
                    if w.profile:
                        line += f"; residual^2 = {w.profile}"
                    if w.detail:
                        line += f"; {w.detail}"
                    text.append(line)
        if failed is None and not sw.passed:
            failed = "sweep"

    report["failed"] = failed
    report["passed"] = failed is None
    text.append("PASS" if failed is None else f"FAIL: {failed}")
    _emit(args, report, text)
    return EXIT_OK if failed is None else EXIT_FAIL


# --- run-claims ------------------------------------------------------------

def cmd_run_claims(args) -> int:
    m = _model(args)
    col = _collection(args, m)
    ledger = claims_mod.load_claims(args.claims or bundled_path("quoted_claims.json"))
    try:
        results = claims_mod.run_claims(claims_mod.ClaimContext(m, col), ledger)
    except KeyError as e:
        raise UsageError(f"unresolved operand: {e.args[0] if e.args else e}") from None
    ok = all(r.passed for r in results)
    passed = sum(r.passed for r in results)
    report = {"claims": [r.as_dict() for r in results], "passed": ok,
              "total": len(results), "passing": passed}
    text = [f"{_mark(r.passed)} {r.id}: {r.description} expected {r.expected}, computed {r.computed}"
            for r in results]
    text.append(f"{passed}/{len(results)} claims pass")
    _emit(args, report, text)
    return EXIT_OK if ok else EXIT_FAIL


# --- derive-table ----------------------------------------------------------

def cmd_derive_table(args) -> int:
    x = load_xmodel(args.xmodel)
    y = _model(args)
    t = derive_table(x, y)
    cert = div3_certificate(x)
    fiber = x["F_X"] if "F_X" in x.classes else None
    i9_ok = fiber is not None and i9_sum(x) == fiber
    ok = t.passed and cert.ok and i9_ok
    report = {"table": t.as_dict(),
              "div3": {"divisor": cert.divisor.format(x.basis_names),
                       "witness": cert.witness.format(x.basis_names) if cert.ok else None},
              "i9_sum_is_fiber": i9_ok, "passed": ok}
    text = [f"{e.row}.{e.col} = {format_rational(e.derived)} "
            f"(table {'-' if e.expected is None else format_rational(e.expected)}) {_mark(e.matches)}"
            for e in t.entries]
    text.append(f"{t.matched}/{len(t.entries)} entries match")
    text += [f"note: {n}" for n in t.notes]
    text.append(f"D = {cert.divisor.format(x.basis_names)}")
    text.append(f"D/3 = {cert.witness.format(x.basis_names)}" if cert.ok else "D is not divisible by 3")
    text.append(f"I9 components sum to the fiber class: {str(i9_ok).lower()}")
    text.append(_mark(ok))
    _emit(args, report, text)
    return EXIT_OK if ok else EXIT_FAIL


# --- vial-search -----------------------------------------------------------

def cmd_vial_search(args) -> int:
    m = _model(args)
    try:
        r = vial_search(m, args.height)
    except BoundedSearchExhausted as e:
        report = {"found": False, "height": args.height, "message": str(e)}
        _emit(args, report, [f"bounded search exhausted: {e}"])
        return EXIT_EXHAUSTED
    names = m.basis_names
    verdict = verify_numerically_exceptional(m, r.collection)
    rel = k_relation_holds(m, r.collection)
    ok = verdict.passed and rel
    report = {"found": True, "height": args.height, "route": r.route,
              "e0": list(r.e0), "negatives": [list(e) for e in r.negatives],
              "collection": [{"name": n, "class": class_to_json(c, names)} for n, c in r.collection],
              "numerically_exceptional": verdict.passed, "k_relation": rel, "passed": ok}
    text = [f"route: {r.route}", f"e0 (pic coordinates): {list(r.e0)}"]
    text += [f"{n} = {c.format(names)}" for n, c in r.collection]
    text.append(f"chi matrix: {verdict}")
    text.append(f"K = A2 + ... + A10 - 3A11: {str(rel).lower()}")
    text.append(_mark(ok))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(collection_to_json(r.collection, m) + "\n")
    _emit(args, report, text)
    return EXIT_OK if ok else EXIT_FAIL


# --- monodromy -------------------------------------------------------------

def _bool_result(args, name: str, value, extra: dict | None = None) -> int:
    report = {"operation": name, "result": value, **(extra or {})}
    shown = str(value).lower() if isinstance(value, bool) else str(value)
    _emit(args, report, [shown])
    return EXIT_OK if value is not False else EXIT_FAIL


def cmd_monodromy(args) -> int:
    op = args.mono_op
    try:
        if op == "in-gamma":
            return _bool_result(args, op, mono.in_gamma(args.level, mono.SL2.parse(args.matrix)))
        if op == "index":
            idx = mono.gamma_index(args.level)
            extra = {}
            if args.brute_force:
                extra["brute_force"] = mono.count_sl2_mod(args.level)
                if extra["brute_force"] != idx:
                    _emit(args, {"operation": op, "result": idx, **extra},
                          [f"{idx} (brute force {extra['brute_force']})"])
                    return EXIT_FAIL
            return _bool_result(args, op, idx, extra)
        if op == "relation":
            gs = [mono.SL2.parse(s) for s in args.matrices]
            return _bool_result(args, op, mono.relation_check(gs))
        if op == "euler":
            cfg = mono.FiberConfig.parse(args.fibers)
            return _bool_result(args, op, mono.euler_check(cfg, args.c2))
        if op == "canonical":
            return _bool_result(args, op, format_rational(mono.canonical_formula(args.chi, args.mult)))
        if op == "find-relation":
            found = mono.find_conjugate_relation(args.k, args.count, args.length)
            if found is None:
                _emit(args, {"operation": op, "result": None}, ["no relation within the word bound"])
                return EXIT_EXHAUSTED
            gs = [mono.SL2.identity()] + found
            report = {"operation": op, "result": [g.as_rows() for g in gs],
                      "product_is_identity": mono.relation_check(gs)}
            _emit(args, report, [str(g) for g in gs] + [f"product is identity: {str(report['product_is_identity']).lower()}"])
            return EXIT_OK if report["product_is_identity"] else EXIT_FAIL
    except (DomainError, ValueError) as e:
        raise UsageError(str(e)) from None
    raise UsageError(f"unknown monodromy operation {op!r}")


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="surface model JSON (default: bundled dolgachev23)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="dolgachev", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lattice-info", parents=[common], help="determinant, signature and unimodularity")
    s.set_defaults(func=cmd_lattice_info)

    s = sub.add_parser("verify-collection", parents=[common], help="full check of a collection")
    s.add_argument("--collection", help="collection JSON (default: bundled twelve bundles)")
    s.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="multiplicity bound (default 4)")
    s.add_argument("--split-extension", action="store_true",
                   help="also run the single-horizontal-component test on K-degree 2 witnesses")
    s.add_argument("-v", "--verbose", action="store_true", help="one line per witness")
    s.set_defaults(func=cmd_verify_collection)

    s = sub.add_parser("run-claims", parents=[common], help="execute a claims ledger")
    s.add_argument("--collection")
    s.add_argument("--claims", help="claims JSON (default: bundled ledger)")
    s.set_defaults(func=cmd_run_claims)

    s = sub.add_parser("derive-table", parents=[common], help="pairings from the blow-up model")
    s.add_argument("--xmodel", help="blow-up model JSON (default: bundled halphen_x)")
    s.set_defaults(func=cmd_derive_table)

    s = sub.add_parser("vial-search", parents=[common], help="collection from a diagonal Picard basis")
    s.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="coordinate bound (default 4)")
    s.add_argument("--output", help="write the collection JSON here")
    s.set_defaults(func=cmd_vial_search)

    s = sub.add_parser("monodromy", help="SL2(Z) utilities")
    msub = s.add_subparsers(dest="mono_op", required=True)
    t = msub.add_parser("in-gamma", parents=[common])
    t.add_argument("level", type=int)
    t.add_argument("matrix", help='"a,b,c,d"')
    t = msub.add_parser("index", parents=[common])
    t.add_argument("level", type=int)
    t.add_argument("--brute-force", action="store_true")
    t = msub.add_parser("relation", parents=[common])
    t.add_argument("matrices", nargs="+")
    t = msub.add_parser("euler", parents=[common])
    t.add_argument("--fibers", required=True, help='e.g. "I9,I1x3"')
    t.add_argument("--c2", type=int, default=12)
    t = msub.add_parser("canonical", parents=[common])
    t.add_argument("--chi", type=int, default=1)
    t.add_argument("--mult", type=int, nargs="*", default=[])
    t = msub.add_parser("find-relation", parents=[common])
    t.add_argument("--k", type=int, default=3)
    t.add_argument("--count", type=int, default=4)
    t.add_argument("--length", type=int, default=3)
    s.set_defaults(func=cmd_monodromy)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ModelParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
