"""Command-line interface.

Exit codes: 0 success, 1 a verified failure (e.g. a check came out false),
2 undecided within the step budget or window.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable

from . import free_points as fp
from .config import FORMATS, Config
from .core import DEFAULT_BUDGET, BudgetExhausted, MonoidPresentation, are_equal, support_mask
from .graded import (
    check_proj_finiteness,
    degree_zero_localization,
    graded_filtered_check,
    graded_free,
)
from .io import (
    SchemaError,
    corpus_names,
    dumps,
    element_from_json,
    graded_from_json,
    is_graded,
    load_json,
    mset_from_json,
    presentation_from_json,
    presentation_to_json,
)
from .msets import (
    ClassificationError,
    WindowInstability,
    classify_point,
    endomorphism_monoid,
    is_filtered,
    localization_at,
    points,
    tensor,
)
from .schemes import (
    MonoidScheme,
    affine,
    counit_isomorphism,
    is_isomorphic,
    line_bundle_check,
    open_subscheme,
    proj,
    qc_points,
    reconstruct,
    stable_global_sections,
    twisting_sheaf,
)
from .spectrum import alpha, hasse_dot, mask_names, prime_meet, semilattice_elements, spec

OK, FAILED, UNKNOWN = 0, 1, 2


class Outcome:
    def __init__(self, report: dict, status: int = OK, dot: str | None = None):
        self.report = report
        self.status = status
        self.dot = dot


def _render_text(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {dumps(v) if isinstance(v, (dict, list)) else v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, list) and not any(isinstance(x, (dict, list)) for x in v):
                lines.append(f"{pad}- {dumps(v)}")
            elif isinstance(v, (dict, list)):
                sub = _render_text(v, indent + 1)
                lines.append(f"{pad}-" + (" " + sub[0].strip() if sub else ""))
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def _load_presentation(path: str) -> MonoidPresentation:
    return presentation_from_json(load_json(path))


def _load_scheme(path: str, cover: list[str] | None) -> MonoidScheme:
    d = load_json(path)
    if is_graded(d) and any(x > 0 for x in graded_from_json(d).degrees):
        return proj(graded_from_json(d))
    M = presentation_from_json(d)
    if cover:
        return open_subscheme(M, [M.gen(g) for g in cover])
    return affine(M)


# ---------------------------------------------------------------- commands


def cmd_spec(args, cfg: Config) -> Outcome:
    M = _load_presentation(args.monoid)
    L = spec(M, cfg.cap)
    report = L.to_json()
    report["labels"] = [p.label for p in L.primes]
    return Outcome(report, dot=hasse_dot(L))


def cmd_semilattice(args, cfg: Config) -> Outcome:
    M = _load_presentation(args.monoid)
    L = spec(M, cfg.cap)
    elems = semilattice_elements(M)
    images = [alpha(M, v, L).mask for v in elems]
    bijective = len(set(images)) == len(elems) == len(L)
    report = {"elements": [M.word(v) for v in elems], "size": len(elems), "spec_size": len(L),
              "alpha": dict(zip([M.word(v) for v in elems], images)), "bijective": bijective}
    return Outcome(report, OK if bijective else FAILED)


def cmd_alpha(args, cfg: Config) -> Outcome:
    M = _load_presentation(args.monoid)
    L = spec(M, cfg.cap)
    v = element_from_json(M, load_json_arg(args.element), "/element")
    p = alpha(M, v, L)
    return Outcome({"element": M.word(v), "prime": p.mask, "label": p.label})


def load_json_arg(s: str) -> Any:
    try:
        return json.loads(s)
    except ValueError:
        return load_json(s)


def cmd_points(args, cfg: Config) -> Outcome:
    M = _load_presentation(args.monoid)
    rep = points(M, cfg.budget, cfg.cap, tensors=not args.no_tensors)
    pts = [{"prime": P.prime.mask, "label": P.prime.label, "carrier": P.carrier.describe(),
            "end": repr(endomorphism_monoid(P, cfg.budget))} for P in rep.points]
    table = sorted([p, q, r] for (p, q), r in rep.tensor_table.items())
    ok = rep.verified()
    return Outcome({"points": pts, "count": len(pts), "tensor_table": table, "verified": ok}, OK if ok else FAILED)


def _prime_arg(M, L, s: str):
    if s.isdigit():
        return L.prime(int(s))
    names = [x for x in s.strip("()").split(",") if x and x != "∅"]
    mask = support_mask(M.element({n: 1 for n in names}))
    return L.prime(mask)


def cmd_tensor(args, cfg: Config) -> Outcome:
    M = _load_presentation(args.monoid)
    L = spec(M, cfg.cap)
    p, q = _prime_arg(M, L, args.p), _prime_arg(M, L, args.q)
    c = classify_point(tensor(localization_at(p, cfg.budget), localization_at(q, cfg.budget)), cfg.budget)
    expected = prime_meet(p, q, L).mask
    return Outcome({"p": p.label, "q": q.label, "tensor": c.prime.label, "mask": c.prime.mask, "window": c.window},
                   OK if c.prime.mask == expected else FAILED)


def cmd_classify(args, cfg: Config) -> Outcome:
    M = _load_presentation(args.monoid)
    if args.mset:
        A = mset_from_json(M, load_json(args.mset))
    else:
        L = spec(M, cfg.cap)
        A = localization_at(_prime_arg(M, L, args.prime or "0"), cfg.budget)
    try:
        c = classify_point(A, cfg.budget)
    except ClassificationError as e:
        return Outcome({"classified": False, "stage": e.stage, "reason": str(e)}, FAILED)
    return Outcome({"classified": True, "prime": c.prime.mask, "label": c.prime.label, "source": str(c.source)})


def cmd_filtered(args, cfg: Config) -> Outcome:
    M = _load_presentation(args.monoid)
    A = mset_from_json(M, load_json(args.mset))
    v = is_filtered(A, cfg.budget)
    status = OK if v.status else (UNKNOWN if v.status is None else FAILED)
    return Outcome({"filtered": v.status, "reason": v.reason, "exhaustive": v.exhaustive}, status)


def cmd_graded(args, cfg: Config) -> Outcome:
    G = graded_from_json(load_json(args.monoid))
    if args.action == "check":
        r = check_proj_finiteness(G, cfg.budget)
        rep = {"ok": r.ok, "degree_zero": r.degree_zero_generators, "degree_one": r.degree_one_generators,
               "failure": r.failure, "offending": r.offending}
        return Outcome(rep, OK if r.ok else FAILED)
    if args.action == "filtered":
        v = graded_filtered_check(graded_free(G, args.shift))
        return Outcome({"filtered": v.ok, "condition": v.condition}, OK if v.ok else FAILED)
    if not args.f:
        raise SchemaError("/f", "d0loc needs --f")
    f = G.base.element({g: 1 for g in args.f.split(",")})
    Z = degree_zero_localization(graded_free(G, args.shift), f)
    w = min(cfg.window, 4)
    elems = [G.base.word(v) for _, v in Z.elements(w)]
    return Outcome({"f": G.base.word(f), "shift": args.shift, "window": w, "elements": elems, "count": len(elems)})


def cmd_proj(args, cfg: Config) -> Outcome:
    G = graded_from_json(load_json(args.monoid))
    X = proj(G)
    rep = {"points": X.point_masks, "labels": [mask_names(X.base, m) for m in X.point_masks], "order": X.order()}
    if args.sections:
        secs = stable_global_sections(twisting_sheaf(X, args.twist), cfg.window)
        rep["twist"] = args.twist
        rep["sections"] = [G.base.word(fam[0][1]) if fam else "1" for fam in secs]
        rep["section_count"] = len(secs)
    return Outcome(rep)


def cmd_sheaf(args, cfg: Config) -> Outcome:
    G = graded_from_json(load_json(args.monoid))
    X = proj(G)
    F = twisting_sheaf(X, args.twist)
    secs = stable_global_sections(F, cfg.window)
    lb = line_bundle_check(F)
    rep = {"twist": args.twist, "section_count": len(secs), "line_bundle": lb}
    status = OK if lb else FAILED
    if args.counit:
        c = counit_isomorphism(F)
        rep["counit_isomorphism"] = c
        status = status if c else FAILED
    return Outcome(rep, status)


def cmd_stalks(args, cfg: Config) -> Outcome:
    X = _load_scheme(args.monoid, args.cover)
    pts = qc_points(X, cfg.budget)
    rep = {"kind": X.kind, "count": len(pts),
           "stalks": [{"prime": P.mask, "label": P.label, "monoid": repr(X.stalk_presentation(P.mask)),
                       "charts": sorted(P.carriers)} for P in pts]}
    return Outcome(rep)


def cmd_reconstruct(args, cfg: Config) -> Outcome:
    X = _load_scheme(args.monoid, args.cover)
    R = reconstruct(qc_points(X, cfg.budget), cfg.budget)
    rep = {"points": len(R.data), "order": R.data.order, "stalks": [repr(s) for s in R.data.stalks],
           "labels": R.data.labels}
    status = OK
    if args.verify:
        iso = is_isomorphic(R, X, cfg.budget)
        rep["isomorphic"] = iso.isomorphic
        rep["poset_isomorphisms"] = iso.poset_isomorphisms
        status = OK if iso.isomorphic else (UNKNOWN if iso.isomorphic is None else FAILED)
    return Outcome(rep, status)


def cmd_free_points(args, cfg: Config) -> Outcome:
    act = args.action
    if act == "gamma":
        basis = fp.COUNTABLE if not args.basis else tuple(args.basis.split(","))

        def idx(names: str) -> frozenset[int]:
            out = set()
            for n in names.split(","):
                if not n:
                    continue
                if basis != fp.COUNTABLE and n in basis:
                    out.add(basis.index(n))
                else:
                    out.add(int(n.lstrip("p")))
            return frozenset(out)

        if args.cofinite is not None:
            T = fp.Cofinite(idx(args.cofinite))
        else:
            T = fp.Finite(idx(args.finite or ""))
        c = fp.gamma_of_subset(T, basis)
        return Outcome({"class": fp.to_json(c.representative), "hidden": fp.is_hidden(c)})
    fs = [fp.from_json(load_json(p)) for p in args.functions]
    if act == "eq":
        if len(fs) != 2:
            raise SchemaError("", "eq needs two functions")
        e = fp.equivalent(*fs)
        return Outcome({"equivalent": e}, OK if e else FAILED)
    if act == "add":
        if len(fs) != 2:
            raise SchemaError("", "add needs two functions")
        return Outcome({"sum": fp.to_json(fp.add(*fs))})
    if act == "hidden":
        if len(fs) != 1:
            raise SchemaError("", "hidden needs one function")
        return Outcome({"hidden": fp.is_hidden(fp.SigmaClass.of(fs[0])),
                        "class": fp.to_json(fp.SigmaClass.of(fs[0]).representative)})
    raise SchemaError("", f"unknown free-points action {act}")


def cmd_corpus_run(args, cfg: Config) -> Outcome:
    rows = []
    status = OK
    for name in corpus_names():
        d = load_json(f"{name}.json")
        M = presentation_from_json(d)
        L = spec(M, cfg.cap)
        sl = semilattice_elements(M)
        alpha_ok = len({alpha(M, v, L).mask for v in sl}) == len(sl) == len(L)
        row = {"name": name, "primes": len(L), "semilattice": len(sl), "alpha_bijective": alpha_ok}
        if not args.quick and M.rank <= 2:
            row["points_verified"] = points(M, cfg.budget, cfg.cap).verified()
        if is_graded(d):
            G = graded_from_json(d)
            if check_proj_finiteness(G).ok and any(G.degrees):
                row["proj_points"] = len(proj(G).point_masks)
        if not alpha_ok or row.get("points_verified") is False:
            status = FAILED
        # sanity: the identity equals itself under the oracle
        if not are_equal(M, M.identity, M.identity, cfg.budget).is_equal:
            status = FAILED
        rows.append(row)
    return Outcome({"corpus": rows}, status)


def cmd_show(args, cfg: Config) -> Outcome:
    d = load_json(args.monoid)
    if is_graded(d):
        G = graded_from_json(d)
        return Outcome(presentation_to_json(G.base, G.degrees))
    return Outcome(presentation_to_json(presentation_from_json(d)))


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input (exit 1); argparse's own 2 would read as "unknown"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(FAILED, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # flags may come before or after the subcommand; the subcommand copy must
        # not overwrite values given before it with its own defaults
        g = _Parser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET))
        g.add_argument("--window", type=int, default=d(6))
        g.add_argument("--cap", type=int, default=d(20))
        g.add_argument("--format", choices=FORMATS, default=d("text"))
        g.add_argument("--dot", action="store_true", default=d(False), help="emit Graphviz (same as --format dot)")
        return g

    common = global_flags(suppress=True)
    p = _Parser(prog="monoid-points", description="Spectra, points and schemes of commutative monoids.",
                parents=[global_flags(suppress=False)])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    for name, fn, h in [("spec", cmd_spec, "prime spectrum"), ("semilattice", cmd_semilattice, "universal semilattice"),
                        ("show", cmd_show, "parse and re-emit a presentation")]:
        add(name, fn, h).add_argument("monoid")
    sp = add("alpha", cmd_alpha, "prime attached to an element")
    sp.add_argument("monoid")
    sp.add_argument("--element", required=True, help='JSON monomial, e.g. {"x":1}')
    sp = add("points", cmd_points, "topos points and tensor table")
    sp.add_argument("monoid")
    sp.add_argument("--no-tensors", action="store_true")
    sp = add("tensor", cmd_tensor, "classify the tensor of two localizations")
    sp.add_argument("monoid")
    sp.add_argument("--p", required=True, help="prime as mask or (x,y)")
    sp.add_argument("--q", required=True)
    sp = add("classify", cmd_classify, "classify a point")
    sp.add_argument("monoid")
    sp.add_argument("--mset")
    sp.add_argument("--prime")
    sp = add("filtered-check", cmd_filtered, "filteredness of a finite M-set")
    sp.add_argument("monoid")
    sp.add_argument("mset")
    sp = add("graded", cmd_graded, "graded monoid checks")
    sp.add_argument("action", choices=["check", "d0loc", "filtered"])
    sp.add_argument("monoid")
    sp.add_argument("--f")
    sp.add_argument("--shift", type=int, default=0)
    sp = add("proj", cmd_proj, "Proj of a graded monoid")
    sp.add_argument("monoid")
    sp.add_argument("--sections", action="store_true")
    sp.add_argument("--twist", type=int, default=0)
    sp = add("sheaf", cmd_sheaf, "twisting sheaves on Proj")
    sp.add_argument("monoid")
    sp.add_argument("--twist", type=int, default=0)
    sp.add_argument("--counit", action="store_true")
    for name, fn, h in [("stalks", cmd_stalks, "stalk points"), ("reconstruct", cmd_reconstruct, "rebuild from points")]:
        sp = add(name, fn, h)
        sp.add_argument("monoid")
        sp.add_argument("--cover", action="append", help="generator f of a basic open D(f); repeatable")
        if name == "reconstruct":
            sp.add_argument("--verify", action="store_true")
    sp = add("free-points", cmd_free_points, "points of free monoids")
    sp.add_argument("action", choices=["eq", "add", "hidden", "gamma"])
    sp.add_argument("functions", nargs="*")
    sp.add_argument("--cofinite")
    sp.add_argument("--finite")
    sp.add_argument("--basis", help="comma-separated finite basis (default countable)")
    sp = add("corpus-run", cmd_corpus_run, "quick checks over the bundled corpus")
    sp.add_argument("--quick", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = "dot" if args.dot else args.format
    try:
        cfg = Config(args.budget, args.window, args.cap, fmt)
    except ValueError as e:
        parser.error(str(e))
    try:
        out = args.fn(args, cfg)
    except (BudgetExhausted, WindowInstability) as e:
        print(dumps({"error": "unknown", "reason": str(e)}) if fmt == "json" else f"unknown: {e}")
        return UNKNOWN
    except (SchemaError, FileNotFoundError, ValueError) as e:
        print(dumps({"error": "invalid input", "reason": str(e)}) if fmt == "json" else f"error: {e}", file=sys.stderr)
        return FAILED
    if fmt == "dot":
        if out.dot is None:
            print("error: this command has no DOT output", file=sys.stderr)
            return FAILED
        sys.stdout.write(out.dot)
    elif fmt == "json":
        print(dumps(out.report))
    else:
        print("\n".join(_render_text(out.report)))
    return out.status


if __name__ == "__main__":
    sys.exit(main())
