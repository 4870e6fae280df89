"""JSON reading and writing for presentations, graded monoids and finite M-sets."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from .core import MonoidPresentation, PresentationError, Vec
from .graded import GradedMonoid, GradingError
from .msets import FiniteMSet


class SchemaError(ValueError):
    """Invalid input, with a JSON pointer to the offending location."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


CORPUS = ("free1", "free2", "free3", "n", "x2y2", "xeqy", "idem", "xy1", "p1", "graded_idem")


def corpus_names() -> list[str]:
    return list(CORPUS)


def corpus_path(name: str):
    return resources.files("monoid_points") / "corpus" / f"{name}.json"


def load_json(path: str | Path) -> Any:
    p = Path(path)
    if not p.exists():
        # fall back to the bundled corpus by file name
        bundled = corpus_path(p.stem)
        if not bundled.is_file():
            raise FileNotFoundError(str(path))
        return json.loads(bundled.read_text())
    return json.loads(p.read_text())


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _monomial(M_gens: list[str], d: Any, ptr: str) -> Vec:
    if not isinstance(d, dict):
        raise SchemaError(ptr, "monomial must be an object {generator: exponent}")
    v = [0] * len(M_gens)
    for g, e in d.items():
        if g not in M_gens:
            raise SchemaError(f"{ptr}/{g}", "unknown generator")
        if isinstance(e, bool) or not isinstance(e, int) or e < 0:
            raise SchemaError(f"{ptr}/{g}", "exponent must be a non-negative integer")
        v[M_gens.index(g)] = e
    return tuple(v)


def presentation_from_json(d: Any) -> MonoidPresentation:
    if not isinstance(d, dict):
        raise SchemaError("", "expected an object")
    gens = d.get("generators")
    if not isinstance(gens, list) or not all(isinstance(g, str) and g for g in gens):
        raise SchemaError("/generators", "expected a list of generator names")
    if len(set(gens)) != len(gens):
        raise SchemaError("/generators", "duplicate generator names")
    rels = []
    for n, r in enumerate(d.get("relations", [])):
        if not isinstance(r, list) or len(r) != 2:
            raise SchemaError(f"/relations/{n}", "relation must be a pair of monomials")
        rels.append((_monomial(gens, r[0], f"/relations/{n}/0"), _monomial(gens, r[1], f"/relations/{n}/1")))
    try:
        return MonoidPresentation(tuple(gens), tuple(rels))
    except PresentationError as e:
        raise SchemaError("/relations", str(e)) from None


def graded_from_json(d: Any) -> GradedMonoid:
    M = presentation_from_json(d)
    degs = d.get("degrees")
    if not isinstance(degs, dict):
        raise SchemaError("/degrees", "graded input needs a degrees object")
    for g, x in degs.items():
        if g not in M.generators:
            raise SchemaError(f"/degrees/{g}", "unknown generator")
        if isinstance(x, bool) or not isinstance(x, int):
            raise SchemaError(f"/degrees/{g}", "degree must be an integer")
    try:
        return GradedMonoid.from_map(M, degs)
    except GradingError as e:
        raise SchemaError("/degrees", str(e)) from None


def is_graded(d: Any) -> bool:
    return isinstance(d, dict) and isinstance(d.get("degrees"), dict)


def monomial_json(M: MonoidPresentation, v: Vec) -> dict:
    return {g: int(e) for g, e in zip(M.generators, v) if e}


def presentation_to_json(M: MonoidPresentation, degrees: tuple[int, ...] | None = None) -> dict:
    out = {
        "generators": list(M.generators),
        "relations": [[monomial_json(M, u), monomial_json(M, v)] for u, v in M.relations],
    }
    if degrees is not None:
        out["degrees"] = dict(zip(M.generators, degrees))
    return out


def graded_to_json(G: GradedMonoid) -> dict:
    return presentation_to_json(G.base, G.degrees)


def element_from_json(M: MonoidPresentation, d: Any, ptr: str = "") -> Vec:
    return _monomial(list(M.generators), d, ptr)


def mset_from_json(M: MonoidPresentation, d: Any) -> FiniteMSet:
    if not isinstance(d, dict):
        raise SchemaError("", "expected an object")
    elems = d.get("elements")
    if not isinstance(elems, list) or not elems:
        raise SchemaError("/elements", "expected a non-empty list")
    action = d.get("action", {})
    if not isinstance(action, dict):
        raise SchemaError("/action", "expected an object")
    for g in M.generators:
        if g not in action:
            raise SchemaError(f"/action/{g}", "missing action of generator")
    maps = {}
    for g, m in action.items():
        if g not in M.generators:
            raise SchemaError(f"/action/{g}", "unknown generator")
        if isinstance(m, list):
            if len(m) != len(elems):
                raise SchemaError(f"/action/{g}", "list length differs from the number of elements")
            bad = [i for i, x in enumerate(m) if x not in elems]
            if bad:
                raise SchemaError(f"/action/{g}/{bad[0]}", "image is not an element")
            maps[g] = m
        elif isinstance(m, dict):
            for k, x in m.items():
                if x not in elems:
                    raise SchemaError(f"/action/{g}/{k}", "image is not an element")
            maps[g] = {_find(elems, k, f"/action/{g}/{k}"): v for k, v in m.items()}
            missing = [e for e in elems if e not in maps[g]]
            if missing:
                raise SchemaError(f"/action/{g}/{missing[0]}", "element has no image")
        else:
            raise SchemaError(f"/action/{g}", "expected a list or an object")
    try:
        return FiniteMSet.from_maps(M, elems, maps)
    except ValueError as e:
        raise SchemaError("/action", str(e)) from None


def _find(elems: list, key: str, ptr: str):
    for e in elems:
        if str(e) == key:
            return e
    raise SchemaError(ptr, "unknown element")


def mset_to_json(A: FiniteMSet) -> dict:
    gens = A.acting.base.generators
    return {
        "elements": list(A.labels),
        "action": {g: [A.labels[A.table[i][a]] for a in range(len(A))] for i, g in enumerate(gens)},
    }
