"""Command-line front end.

Documents are JSON (see documents.py); inputs come from file paths or '-'
for standard input.  Exit codes: 0 success, 1 parse error, 2 precondition or
input error, 3 resource cap exceeded.  Directedness violations during gluing
are reported in-band and exit 0: the semiorthogonal family is still valid
output, it just is not known to generate.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Sequence

from . import documents as docs
from .config import Caps, Config
from .engine import (
    KTheoryMode,
    build_infinite_psod,
    build_root_psod,
    filtration,
    glue,
    ktheory_report,
)
from .errors import InputError, ParseError, PsodkitError
from .factorial import (
    CharTuple,
    cmp_bang,
    enumerate_characters,
    to_factorial_form,
)
from .preorders import (
    coproduct,
    colimit,
    directed_numbering,
    is_directed,
    pushout,
    verify_colimit,
)
from .strata import strata_from_atlas, validate


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _load(path: str) -> Any:
    return docs.loads(_read(path))


def _emit(cfg: Config, doc: Any, human: str) -> None:
    if cfg.output == "machine":
        print(docs.dumps(doc))
    else:
        print(human)


# -- preorder ----------------------------------------------------------------


def _cmd_preorder(cfg: Config, args: argparse.Namespace) -> int:
    sub = args.subcommand
    if sub == "coproduct":
        parts = [docs.preorder_from_doc(_load(p)) for p in args.inputs]
        out, injections = coproduct(parts)
        doc = {
            "preorder": docs.preorder_to_doc(out),
            "injections": [dict(i.mapping) for i in injections],
        }
        _emit(cfg, doc, _render_preorder(out))
    elif sub == "pushout":
        body = _load(args.inputs[0])
        left = docs.map_from_doc(body["left"]) if "left" in body else None
        right = docs.map_from_doc(body["right"]) if "right" in body else None
        if left is None or right is None:
            raise ParseError("pushout document needs 'left' and 'right' maps")
        out, p1, p2 = pushout(left, right)
        doc = {
            "preorder": docs.preorder_to_doc(out),
            "maps": [dict(p1.mapping), dict(p2.mapping)],
        }
        _emit(cfg, doc, _render_preorder(out))
    elif sub == "colimit":
        diagram = docs.diagram_from_doc(_load(args.inputs[0]))
        res = colimit(diagram)
        doc = {
            "preorder": docs.preorder_to_doc(res.preorder),
            "cocones": {v: dict(m.mapping) for v, m in res.cocones.items()},
        }
        _emit(cfg, doc, _render_preorder(res.preorder))
    elif sub == "verify":
        body = _load(args.inputs[0])
        diagram = docs.diagram_from_doc(body["diagram"])
        candidate = docs.preorder_from_doc(body["candidate"])
        cocones = body["cocones"]
        res = verify_colimit(diagram, candidate, cocones, cfg.caps)
        _emit(cfg, docs.verify_to_doc(res), "verified" if res.ok else f"failed: {res.reason}")
    elif sub == "directed":
        p = docs.preorder_from_doc(_load(args.inputs[0]))
        ok = is_directed(p)
        _emit(cfg, {"directed": ok}, "true" if ok else "false")
    elif sub == "number":
        p = docs.preorder_from_doc(_load(args.inputs[0]))
        numbering = directed_numbering(p)
        _emit(cfg, {"numbering": list(numbering)}, " < ".join(numbering))
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown preorder subcommand {sub!r}")
    return 0


def _render_preorder(p) -> str:
    lines = ["elements: " + ", ".join(p.elements)]
    for i, x in enumerate(p.elements):
        below = [y for j, y in enumerate(p.elements) if p.leq[i][j] and i != j]
        if below:
            lines.append(f"  {x} <= " + ", ".join(below))
    lines.append(f"transitive: {'yes' if p.is_transitive else 'no'}")
    return "\n".join(lines)


# -- order -------------------------------------------------------------------


def _cmd_order(cfg: Config, args: argparse.Namespace) -> int:
    sub = args.subcommand
    if sub == "factform":
        chi = CharTuple.parse(args.inputs[0])
        form = to_factorial_form(chi, cfg.caps)
        _emit(
            cfg,
            docs.factorial_form_to_doc(form),
            f"level {form.level}, numerators ({', '.join(map(str, form.numerators))})",
        )
    elif sub == "cmp":
        a = CharTuple.parse(args.inputs[0])
        b = CharTuple.parse(args.inputs[1])
        verdict = cmp_bang(a, b, cfg.caps)
        _emit(cfg, {"comparison": verdict}, verdict)
    elif sub == "enumerate":
        chars = enumerate_characters(args.arity, args.level, args.coprime_to, cfg.caps)
        _emit(
            cfg,
            {"characters": [docs.char_tuple_to_doc(c) for c in chars]},
            "\n".join(str(c) for c in chars) if chars else "(none)",
        )
    else:  # pragma: no cover
        raise InputError(f"unknown order subcommand {sub!r}")
    return 0


# -- psod --------------------------------------------------------------------


def _load_stratification(path: str):
    body = _load(path)
    if "charts" in body:
        return strata_from_atlas(docs.atlas_from_doc(body))
    return docs.stratification_from_doc(body)


def _render_psod(psod) -> str:
    rows = psod.factor_rows()
    width = max((len(x) for x, _ in rows), default=0)
    lines = [f"{len(rows)} factors" + (f" ({psod.annotations['kind']})" if "kind" in psod.annotations else "")]
    for pos, (x, f) in enumerate(rows):
        lines.append(f"  {pos:>3}  {x:<{width}}  stratum={f.stratum_id}  target={f.target_label}")
    return "\n".join(lines)


def _cmd_psod(cfg: Config, args: argparse.Namespace) -> int:
    sub = args.subcommand
    if sub == "build":
        strat = _load_stratification(args.inputs[0])
        problems = validate(strat)
        if problems:
            raise InputError("invalid stratification: " + "; ".join(problems))
        psod = build_root_psod(strat, args.root, cfg.caps, totalize=cfg.totalize)
        _emit(cfg, docs.psod_to_doc(psod), _render_psod(psod))
    elif sub == "infinite":
        strat = _load_stratification(args.inputs[0])
        psod = build_infinite_psod(
            strat, args.level, args.coprime_to, cfg.caps, totalize=cfg.totalize
        )
        _emit(cfg, docs.psod_to_doc(psod), _render_psod(psod))
    elif sub == "glue":
        scenario = docs.scenario_from_doc(_load(args.inputs[0]))
        res = glue(scenario, cfg.caps)
        human = [_render_psod(res.psod), f"verdict: {res.kind}"]
        if not res.verdict.ok:
            human.append(f"witness: {res.verdict.witness()}")
        elif res.psod.index == scenario.diagram.preorders[scenario.diagram.vertices[0]]:
            human.append("index preserved")
        _emit(cfg, docs.glue_result_to_doc(res), "\n".join(human))
    elif sub == "filtrate":
        body = _load(args.inputs[0])
        psod = docs.psod_from_doc(body["psod"])
        obj = {k: tuple(v) for k, v in body["object"].items()}
        res = filtration(psod, obj)
        human = "\n".join(
            f"  step {t}: grade {s.grade} component {list(s.component)}"
            for t, s in enumerate(res.steps)
        )
        _emit(cfg, docs.filtration_to_doc(res), human + "\n  residual: zero")
    elif sub == "ktheory":
        strat = _load_stratification(args.inputs[0])
        kdata = {
            label: docs.group_from_doc(g) for label, g in _load(args.kdata).items()
        }
        if args.mode == "finite":
            mode = KTheoryMode.finite(args.root)
        elif args.mode == "infinite":
            mode = KTheoryMode.infinite(args.level)
        else:
            mode = KTheoryMode.kummer_etale(args.p, args.level)
        rep = ktheory_report(strat, kdata, mode, cfg.caps)
        human = [f"K-theory decomposition ({rep.mode.kind})", f"  ambient: {rep.ambient}"]
        for row in rep.rows:
            human.append(
                f"  {row.stratum_id} (codim {row.codim}): {row.multiplicity} x [{row.summand}]"
                + (f"  [{row.symbolic_multiplicity}]" if rep.truncated else "")
            )
        human.append(f"  total: {rep.total} (rank {rep.total.rank})")
        _emit(cfg, docs.ktheory_to_doc(rep), "\n".join(human))
    else:  # pragma: no cover
        raise InputError(f"unknown psod subcommand {sub!r}")
    return 0


# -- driver ------------------------------------------------------------------


def _parse_caps(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, val = item.partition("=")
        if key not in ("carrier", "factorial_level", "nerve_depth", "verify_total"):
            raise InputError(f"unknown cap {key!r}")
        try:
            out[key] = int(val)
        except ValueError as exc:
            raise InputError(f"cap {key!r} needs an integer value") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psodkit",
        description="Exact combinatorics of preordered semi-orthogonal decompositions.",
    )
    parser.add_argument("--output", choices=("human", "machine"), default="human")
    parser.add_argument("--totalize", action="store_true",
                        help="relate incomparable same-stratum characters both ways")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed reserved for randomized exploration commands")
    parser.add_argument("--caps", default="",
                        help="comma-separated caps, e.g. carrier=1000,factorial_level=6")
    sub = parser.add_subparsers(dest="group", required=True)

    pre = sub.add_parser("preorder", help="preorder constructions and checks")
    pre.add_argument("subcommand",
                     choices=("coproduct", "pushout", "colimit", "verify", "directed", "number"))
    pre.add_argument("inputs", nargs="+", help="document paths ('-' for stdin)")

    order = sub.add_parser("order", help="factorial forms and character order")
    order.add_argument("subcommand", choices=("factform", "cmp", "enumerate"))
    order.add_argument("inputs", nargs="*", help="residue or tuple expressions")
    order.add_argument("--arity", type=int, default=1)
    order.add_argument("--level", type=int, default=2)
    order.add_argument("--coprime-to", type=int, default=None, dest="coprime_to")

    psod = sub.add_parser("psod", help="decomposition indices and reports")
    psod.add_argument("subcommand",
                      choices=("build", "infinite", "glue", "filtrate", "ktheory"))
    psod.add_argument("inputs", nargs="+", help="document paths ('-' for stdin)")
    psod.add_argument("--root", type=int, default=2, help="root order r")
    psod.add_argument("--level", type=int, default=2, help="factorial truncation level")
    psod.add_argument("--coprime-to", type=int, default=None, dest="coprime_to")
    psod.add_argument("--kdata", help="path to a {component: group} document")
    psod.add_argument("--mode", choices=("finite", "infinite", "kummer"), default="finite")
    psod.add_argument("--p", type=int, default=2, help="residue characteristic for kummer mode")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        caps = Caps(**_parse_caps(args.caps)) if args.caps else Caps()
        cfg = Config(caps=caps, output=args.output, totalize=args.totalize, seed=args.seed)
        if args.group == "preorder":
            return _cmd_preorder(cfg, args)
        if args.group == "order":
            if args.subcommand == "factform" and not args.inputs:
                raise InputError("factform needs an expression")
            if args.subcommand == "cmp" and len(args.inputs) != 2:
                raise InputError("cmp needs exactly two expressions")
            return _cmd_order(cfg, args)
        if args.group == "psod":
            if args.subcommand == "ktheory" and not args.kdata:
                raise InputError("ktheory needs --kdata")
            return _cmd_psod(cfg, args)
        raise InputError(f"unknown command group {args.group!r}")
    except PsodkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 2)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
