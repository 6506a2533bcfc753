"""JSON formats for rings, ring maps, coalgebras and case files.

Ring spec::

    {"kind": "zmod", "n": 6}
    {"kind": "gf", "p": 2, "poly": [1, 1, 1]}        # constant term first, monic
    {"kind": "product", "factors": [<ring>, ...]}
    {"kind": "tables", "add": [[...]], "mul": [[...]]}

Hom spec: "canonical", "identity", "diagonal", {"basis_images": [...]} (target
indices of the source basis elements) or {"table": [...]} (image of every
source element).

Coalgebra spec::

    {"kind": "grouplike", "n": 3, "field": {"p": 3}}
    {"field": {"p": 2, "poly": [1, 1, 1]}, "dim": d, "delta": d x d^2 rows, "counit": [...]}

Coalgebra map spec: "identity", {"set_map": [...]} or {"matrix": [[...]]}.

Every object is audited before it is handed back.  Failures raise SpecError
carrying a JSON path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .coalgebra import CoalgebraMorphism, FiniteCoalgebra, FiniteField, grouplike_coalgebra
from .errors import DescentKitError, SpecError
from .rings import (DEFAULT_BOUND, FiniteRing, RingHom, canonical_hom, diagonal, mk_galois_field,
                    mk_product_many, mk_zmod, ring_from_tables)

KINDS = ("seq5", "invertible_seq", "dual_seq", "amitsur_h1", "pic_kernel", "brb", "hilbert90")


class PositionedError(SpecError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{message} (at {path})")
        self.path = path


def _get(obj: dict, key: str, path: str, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise PositionedError(f"missing field '{key}'", path)
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise PositionedError(f"field '{key}' has the wrong type", f"{path}.{key}")
    return val


def parse_ring(spec: Any, path: str = "$", bound: int = DEFAULT_BOUND) -> FiniteRing:
    try:
        kind = _get(spec, "kind", path, str)
        if kind == "zmod":
            R = mk_zmod(int(_get(spec, "n", path, int)), bound)
        elif kind == "gf":
            R = mk_galois_field(int(_get(spec, "p", path, int)), _get(spec, "poly", path, list), bound)
        elif kind == "product":
            factors = _get(spec, "factors", path, list)
            R = mk_product_many([parse_ring(f, f"{path}.factors[{i}]", bound) for i, f in enumerate(factors)], bound)
        elif kind == "tables":
            R = ring_from_tables(_get(spec, "add", path, list), _get(spec, "mul", path, list), bound)
        else:
            raise PositionedError(f"unknown ring kind '{kind}'", f"{path}.kind")
        R.audit()
    except PositionedError:
        raise
    except (DescentKitError, ValueError, AssertionError) as exc:
        raise PositionedError(f"{type(exc).__name__}: {exc}", path) from exc
    return R


def parse_hom(spec: Any, source: FiniteRing, target: FiniteRing, path: str = "$") -> RingHom:
    try:
        if spec == "canonical":
            h = canonical_hom(source, target)
        elif spec == "identity":
            if source.order != target.order:
                raise PositionedError("identity needs equal rings", path)
            h = RingHom(source, target, np.eye(source.m, dtype=np.int64))
        elif spec == "diagonal":
            h = diagonal(source)
            if h.target.order != target.order:
                raise PositionedError("diagonal target must be the square of the source", path)
            h = RingHom(source, target, h.matrix)
        elif isinstance(spec, dict) and "basis_images" in spec:
            h = RingHom.from_images(source, target, spec["basis_images"])
        elif isinstance(spec, dict) and "table" in spec:
            tab = np.asarray(spec["table"], dtype=np.int64)
            basis = [int(source.index(v)) for v in np.eye(source.m, dtype=np.int64)]
            h = RingHom.from_images(source, target, tab[basis])
            if not np.array_equal(h.table, tab):
                raise PositionedError("table is not additive", path)
        else:
            raise PositionedError("unknown hom spec", path)
    except PositionedError:
        raise
    except (DescentKitError, ValueError, IndexError) as exc:
        raise PositionedError(f"{type(exc).__name__}: {exc}", path) from exc
    if not h.check():
        raise PositionedError("not a unital ring homomorphism", path)
    return h


def parse_field(spec: Any, path: str) -> FiniteField:
    try:
        return FiniteField(int(_get(spec, "p", path, int)), spec.get("poly"))
    except PositionedError:
        raise
    except DescentKitError as exc:
        raise PositionedError(f"{type(exc).__name__}: {exc}", path) from exc


def parse_coalgebra(spec: Any, path: str = "$", fld: FiniteField | None = None) -> FiniteCoalgebra:
    F = parse_field(_get(spec, "field", path), f"{path}.field") if (isinstance(spec, dict) and "field" in spec) else fld
    if F is None:
        raise PositionedError("missing field 'field'", path)
    try:
        if spec.get("kind") == "grouplike":
            C = grouplike_coalgebra(int(_get(spec, "n", path, int)), F)
        else:
            d = int(_get(spec, "dim", path, int))
            delta = np.asarray(_get(spec, "delta", path, list), dtype=np.int64)
            counit = np.asarray(_get(spec, "counit", path, list), dtype=np.int64)
            if delta.shape != (d, d * d) or counit.shape != (d,):
                raise PositionedError("delta must be d x d^2 and counit of length d", path)
            if np.any((delta < 0) | (delta >= F.q)) or np.any((counit < 0) | (counit >= F.q)):
                raise PositionedError("entries must be field element indices", path)
            C = FiniteCoalgebra(F, delta.reshape(d, d, d), counit, name=spec.get("name", f"C{d}"))
        C.audit()
    except PositionedError:
        raise
    except (DescentKitError, ValueError, AssertionError) as exc:
        raise PositionedError(f"{type(exc).__name__}: {exc}", path) from exc
    if not C.cocommutative:
        raise PositionedError("coalgebra is not cocommutative", path)
    return C


def parse_coalgebra_map(spec: Any, D: FiniteCoalgebra, C: FiniteCoalgebra, path: str = "$") -> CoalgebraMorphism:
    try:
        if spec == "identity":
            f = CoalgebraMorphism(D, C, D.field.eye(D.dim))
        elif isinstance(spec, dict) and "set_map" in spec:
            f = CoalgebraMorphism.from_set_map(D, C, spec["set_map"])
        elif isinstance(spec, dict) and "matrix" in spec:
            f = CoalgebraMorphism(D, C, spec["matrix"])
        else:
            raise PositionedError("unknown coalgebra map spec", path)
    except PositionedError:
        raise
    except (ValueError, IndexError) as exc:
        raise PositionedError(f"{type(exc).__name__}: {exc}", path) from exc
    if not f.check():
        raise PositionedError("not a coalgebra morphism", path)
    return f


@dataclass
class CaseSpec:
    id: str
    kind: str
    raw: dict
    seed: int = 0
    bound: int = DEFAULT_BOUND
    description: str = ""

    def ring_hom(self) -> RingHom:
        A = parse_ring(_get(self.raw, "source", "$"), "$.source", self.bound)
        B = parse_ring(_get(self.raw, "target", "$"), "$.target", self.bound)
        return parse_hom(self.raw.get("hom", "canonical"), A, B, "$.hom")

    def coalgebra_map(self) -> CoalgebraMorphism:
        fld = None
        if "field" in self.raw:
            fld = parse_field(self.raw["field"], "$.field")
        D = parse_coalgebra(_get(self.raw, "domain", "$"), "$.domain", fld)
        C = parse_coalgebra(_get(self.raw, "codomain", "$"), "$.codomain", D.field)
        if C.field.q != D.field.q or C.field.poly != D.field.poly:
            raise PositionedError("domain and codomain live over different fields", "$.codomain")
        C.field = D.field
        return parse_coalgebra_map(self.raw.get("map", "identity"), D, C, "$.map")


def parse_case(obj: Any, bound: int | None = None, seed: int | None = None, default_id: str = "case") -> CaseSpec:
    if not isinstance(obj, dict):
        raise PositionedError("case spec must be an object", "$")
    kind = _get(obj, "kind", "$", str)
    if kind not in KINDS:
        raise PositionedError(f"unknown case kind '{kind}'", "$.kind")
    b = bound if bound is not None else int(obj.get("bounds", {}).get("elements", DEFAULT_BOUND))
    s = seed if seed is not None else int(obj.get("seed", 0))
    return CaseSpec(str(obj.get("id", default_id)), kind, obj, s, b, obj.get("description", ""))


def load_case(path: str | Path, bound: int | None = None, seed: int | None = None) -> CaseSpec:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {p}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PositionedError(f"invalid JSON: {exc.msg}", f"{p}:{exc.lineno}:{exc.colno}") from exc
    return parse_case(obj, bound, seed, default_id=p.stem)


def bundled_cases_dir() -> Path:
    return Path(__file__).parent / "cases"


def bundled_cases() -> list[Path]:
    return sorted(bundled_cases_dir().glob("*.json"))

