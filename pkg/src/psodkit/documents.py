"""Structured-text (JSON) encodings of every value the CLI reads or writes.

One document per object.  A preorder is {"elements": [...], "leq": [[...]]},
a map is {"source": ..., "target": ..., "map": {label: label}}, a diagram
lists vertices, arrows, and data.  Residues print as "-p/q" ("0" for zero),
tuples as arrays.  Parsing raises ParseError; semantic validation of the
decoded values raises the library's usual errors.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .abelian import FgAbGroup, GradedGroup, GradedHom, IntMatrix
from .engine import (
    FactorDescriptor,
    FiltrationResult,
    GlueResult,
    GluingScenario,
    KTheoryReport,
    PsodIndex,
)
from .errors import ParseError
from .factorial import CharTuple, FactorialForm, Residue
from .preorders import (
    CONTRAVARIANT,
    COVARIANT,
    DiagramArrow,
    FinitePreorder,
    OrderReflectingMap,
    PreorderDiagram,
    VerifyResult,
)
from .strata import Chart, ChartAtlas, Overlap, Stratification, Stratum


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)


def _need(doc: Mapping, key: str, what: str) -> Any:
    if not isinstance(doc, Mapping) or key not in doc:
        raise ParseError(f"{what} document needs field {key!r}")
    return doc[key]


# -- preorders ---------------------------------------------------------------


def preorder_to_doc(p: FinitePreorder) -> dict:
    return {"elements": list(p.elements), "leq": [list(row) for row in p.leq]}


def preorder_from_doc(doc: Mapping) -> FinitePreorder:
    elements = _need(doc, "elements", "preorder")
    leq = _need(doc, "leq", "preorder")
    if not isinstance(elements, list) or not all(isinstance(x, str) for x in elements):
        raise ParseError("preorder elements must be strings")
    if not isinstance(leq, list):
        raise ParseError("preorder leq must be a matrix")
    return FinitePreorder(
        tuple(elements), tuple(tuple(bool(v) for v in row) for row in leq)
    )


def map_to_doc(m: OrderReflectingMap) -> dict:
    return {
        "source": preorder_to_doc(m.source),
        "target": preorder_to_doc(m.target),
        "map": dict(m.mapping),
    }


def map_from_doc(doc: Mapping) -> OrderReflectingMap:
    return OrderReflectingMap(
        preorder_from_doc(_need(doc, "source", "map")),
        preorder_from_doc(_need(doc, "target", "map")),
        dict(_need(doc, "map", "map")),
    )


def diagram_to_doc(d: PreorderDiagram) -> dict:
    return {
        "vertices": list(d.vertices),
        "preorders": {v: preorder_to_doc(d.preorders[v]) for v in d.vertices},
        "arrows": [
            {
                "name": a.name,
                "src": a.src,
                "tgt": a.tgt,
                "orientation": a.orientation,
                "map": dict(a.map.mapping),
            }
            for a in d.arrows
        ],
    }


def diagram_from_doc(doc: Mapping) -> PreorderDiagram:
    vertices = list(_need(doc, "vertices", "diagram"))
    pre = {
        v: preorder_from_doc(p)
        for v, p in _need(doc, "preorders", "diagram").items()
    }
    arrows = []
    for a in doc.get("arrows", []):
        name = _need(a, "name", "arrow")
        src, tgt = _need(a, "src", "arrow"), _need(a, "tgt", "arrow")
        orientation = a.get("orientation", COVARIANT)
        if orientation not in (COVARIANT, CONTRAVARIANT):
            raise ParseError(f"unknown orientation {orientation!r}")
        s, t = (src, tgt) if orientation == COVARIANT else (tgt, src)
        if s not in pre or t not in pre:
            raise ParseError(f"arrow {name!r} mentions unknown vertices")
        arrows.append(
            DiagramArrow(
                name,
                src,
                tgt,
                OrderReflectingMap(pre[s], pre[t], dict(_need(a, "map", "arrow"))),
                orientation,
            )
        )
    return PreorderDiagram(tuple(vertices), pre, tuple(arrows))


def verify_to_doc(v: VerifyResult) -> dict:
    out: dict[str, Any] = {"ok": v.ok}
    if not v.ok:
        out["reason"] = v.reason
        out["witness"] = v.witness
    return out


# -- characters --------------------------------------------------------------


def char_tuple_to_doc(c: CharTuple) -> list[str]:
    return [str(x) for x in c.components]


def char_tuple_from_doc(doc: Any) -> CharTuple:
    if isinstance(doc, str):
        return CharTuple.parse(doc)
    if isinstance(doc, list):
        return CharTuple(tuple(Residue.parse(x) for x in doc))
    raise ParseError("character tuple must be a string or an array of residues")


def factorial_form_to_doc(f: FactorialForm) -> dict:
    return {"level": f.level, "numerators": list(f.numerators)}


# -- stratifications ---------------------------------------------------------


def stratification_to_doc(s: Stratification) -> dict:
    return {
        "strata": [
            {"id": t.id, "codim": t.codim, "norm_components": list(t.norm_components)}
            for t in s.strata
        ],
        "closure": [list(pair) for pair in s.closure],
    }


def stratification_from_doc(doc: Mapping) -> Stratification:
    strata = tuple(
        Stratum(
            _need(t, "id", "stratum"),
            int(_need(t, "codim", "stratum")),
            tuple(_need(t, "norm_components", "stratum")),
        )
        for t in _need(doc, "strata", "stratification")
    )
    closure = tuple(
        (pair[0], pair[1]) for pair in doc.get("closure", [])
    )
    return Stratification(strata, closure)


def atlas_from_doc(doc: Mapping) -> ChartAtlas:
    charts = tuple(
        Chart(_need(c, "id", "chart"), tuple(_need(c, "branches", "chart")))
        for c in _need(doc, "charts", "atlas")
    )
    overlaps = tuple(
        Overlap(
            _need(o, "charts", "overlap")[0],
            _need(o, "charts", "overlap")[1],
            dict(_need(o, "map", "overlap")),
        )
        for o in doc.get("overlaps", [])
    )
    return ChartAtlas(charts, overlaps)


def atlas_to_doc(a: ChartAtlas) -> dict:
    return {
        "charts": [{"id": c.id, "branches": list(c.branches)} for c in a.charts],
        "overlaps": [
            {"charts": [o.chart_a, o.chart_b], "map": dict(o.mapping)}
            for o in a.overlaps
        ],
    }


# -- groups ------------------------------------------------------------------


def group_to_doc(g: FgAbGroup) -> dict:
    return {"rank": g.rank, "torsion": list(g.torsion)}


def group_from_doc(doc: Mapping) -> FgAbGroup:
    return FgAbGroup(
        int(_need(doc, "rank", "group")), tuple(doc.get("torsion", []))
    )


def matrix_to_doc(m: IntMatrix) -> list[list[int]]:
    return [list(row) for row in m.entries]


def matrix_from_doc(doc: Any, rows: int | None = None, cols: int | None = None) -> IntMatrix:
    if not isinstance(doc, list):
        raise ParseError("matrix must be a nested integer array")
    r = len(doc)
    c = len(doc[0]) if doc else (cols or 0)
    return IntMatrix(r if rows is None else rows, c, tuple(tuple(row) for row in doc))


def graded_group_to_doc(g: GradedGroup) -> dict:
    return {
        "index": preorder_to_doc(g.index),
        "pieces": {x: group_to_doc(g.pieces[x]) for x in g.index.elements},
    }


def graded_group_from_doc(doc: Mapping) -> GradedGroup:
    index = preorder_from_doc(_need(doc, "index", "graded group"))
    pieces = {
        x: group_from_doc(p) for x, p in _need(doc, "pieces", "graded group").items()
    }
    return GradedGroup(index, pieces)


# -- psod indices ------------------------------------------------------------


def factor_to_doc(f: FactorDescriptor) -> dict:
    out: dict[str, Any] = {
        "stratum": f.stratum_id,
        "character": char_tuple_to_doc(f.character),
        "target": f.target_label,
    }
    out["kdata"] = group_to_doc(f.kdata) if f.kdata is not None else None
    return out


def factor_from_doc(doc: Mapping) -> FactorDescriptor:
    kdata = doc.get("kdata")
    return FactorDescriptor(
        _need(doc, "stratum", "factor"),
        char_tuple_from_doc(_need(doc, "character", "factor")),
        _need(doc, "target", "factor"),
        group_from_doc(kdata) if kdata is not None else None,
    )


def psod_to_doc(p: PsodIndex) -> dict:
    return {
        "index": preorder_to_doc(p.index),
        "factors": {x: factor_to_doc(p.factors[x]) for x in p.index.elements},
        "annotations": dict(p.annotations),
    }


def psod_from_doc(doc: Mapping) -> PsodIndex:
    return PsodIndex(
        preorder_from_doc(_need(doc, "index", "psod")),
        {x: factor_from_doc(f) for x, f in _need(doc, "factors", "psod").items()},
        dict(doc.get("annotations", {})),
    )


def scenario_from_doc(doc: Mapping) -> GluingScenario:
    diagram = diagram_from_doc(_need(doc, "diagram", "scenario"))
    psods = {
        v: psod_from_doc(p) for v, p in _need(doc, "psods", "scenario").items()
    }
    graded = {
        v: graded_group_from_doc(g) for v, g in doc.get("graded", {}).items()
    }
    homs = {}
    if doc.get("graded_homs") and not graded:
        raise ParseError("graded_homs given without graded vertex data")
    for name, h in doc.get("graded_homs", {}).items():
        arrow = next((a for a in diagram.arrows if a.name == name), None)
        if arrow is None:
            raise ParseError(f"graded hom for unknown arrow {name!r}")
        src_g, tgt_g = graded[arrow.src], graded[arrow.tgt]
        blocks = {}
        for entry in _need(h, "blocks", "graded hom"):
            x = _need(entry, "source_grade", "graded hom block")
            y = _need(entry, "target_grade", "graded hom block")
            blocks[(x, y)] = matrix_from_doc(
                _need(entry, "matrix", "graded hom block"),
                rows=tgt_g.pieces[y].ngens,
                cols=src_g.pieces[x].ngens,
            )
        reindex = OrderReflectingMap(
            tgt_g.index, src_g.index, dict(_need(h, "reindex", "graded hom"))
        )
        homs[name] = GradedHom(src_g, tgt_g, reindex, blocks)
    return GluingScenario(diagram, psods, graded, homs)


# -- result documents --------------------------------------------------------


def glue_result_to_doc(res: GlueResult) -> dict:
    out: dict[str, Any] = {
        "kind": res.kind,
        "directed": res.verdict.ok,
        "psod": psod_to_doc(res.psod),
        "fibers": {w: [list(p) for p in up] for w, up in res.fibers.items()},
    }
    if not res.verdict.ok:
        out["witness"] = res.verdict.witness()
    if res.graded is not None:
        out["graded"] = graded_group_to_doc(res.graded.graded)
        out["ungraded_total"] = group_to_doc(res.graded.ungraded)
    return out


def filtration_to_doc(res: FiltrationResult) -> dict:
    return {
        "steps": [
            {
                "grade": s.grade,
                "component": list(s.component),
                "residual_support": list(s.residual_support),
            }
            for s in res.steps
        ]
    }


def ktheory_to_doc(rep: KTheoryReport) -> dict:
    mode: dict[str, Any] = {"kind": rep.mode.kind}
    for key in ("r", "level", "p"):
        val = getattr(rep.mode, key)
        if val is not None:
            mode[key] = val
    return {
        "mode": mode,
        "ambient": group_to_doc(rep.ambient),
        "rows": [
            {
                "stratum": r.stratum_id,
                "codim": r.codim,
                "summand": group_to_doc(r.summand),
                "multiplicity": r.multiplicity,
                "symbolic_multiplicity": r.symbolic_multiplicity,
                "contribution": group_to_doc(r.contribution),
            }
            for r in rep.rows
        ],
        "total": group_to_doc(rep.total),
        "truncated": rep.truncated,
    }
