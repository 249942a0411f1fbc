"""Command-line entry points.

Subcommands: validate (data + constraints -> report, exit 0/1/2), infer
(emit the materialized closure as N-Triples), translate (.shex -> RCF text,
.rcf -> DL text), catalog (classification matrix and per-type rows).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import catalog as catalog_mod
from . import inference, rcf, rdf, shex, validator
from .model import (
    ClassRef, ConstraintError, Severity, resolve, render_dl,
    NotDlExpressible, MODE_DEFINE,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT_ERROR = 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_graph(paths) -> rdf.Graph:
    triples = []
    prefixes: dict = {}
    for path in paths:
        text = _read(path)
        try:
            if path.endswith(".nt"):
                g = rdf.parse_ntriples(text)
            else:
                g = rdf.parse_turtle(text)
        except rdf.RdfSyntaxError as exc:
            raise InputError(f"{path}: {exc}") from exc
        triples.extend(g.triples)
        prefixes.update(g.prefixes)
    return rdf.Graph(triples, prefixes)


def _load_constraints(rcf_paths, shex_paths):
    rows = []
    for path in rcf_paths:
        try:
            rows.extend(rcf.parse_rcf(_read(path)))
        except rcf.RcfSyntaxError as exc:
            raise InputError(f"{path}: {exc}") from exc
    for path in shex_paths:
        try:
            shapes = shex.parse_shexc(_read(path))
            rows.extend(shex.compile_shapes(shapes))
        except (shex.ShexSyntaxError, shex.UnsupportedFeature) as exc:
            raise InputError(f"{path}: {exc}") from exc
    try:
        return resolve(rows)
    except ConstraintError as exc:
        raise InputError(str(exc)) from exc


def _report_json(report: validator.Report) -> str:
    doc = {
        "conforms": report.conforms,
        "config": {
            "cwa": report.config.cwa,
            "una": report.config.una,
            "infer": report.config.infer,
        },
        "violations": [
            {
                "constraint": v.constraint_id,
                "type": v.type_name,
                "focus": rdf.n3(v.focus),
                "severity": v.severity.name.lower(),
                "detail": v.detail,
            }
            for v in report.violations
        ],
        "counts": report.counts(),
    }
    return json.dumps(doc, indent=2) + "\n"


def _report_text(report: validator.Report) -> str:
    lines = []
    for v in report.violations:
        lines.append(f"{v.severity.name:7} {v.constraint_id} "
                     f"[{v.type_name}] {rdf.n3(v.focus)}: {v.detail}")
    counts = report.counts()
    lines.append(f"conforms: {'yes' if report.conforms else 'no'} "
                 f"(info {counts['info']}, warning {counts['warning']}, "
                 f"error {counts['error']})")
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _prepare(args):
    graph = _load_graph(args.data)
    cset = _load_constraints(args.constraints, args.shex)
    config = validator.ValidationConfig(
        cwa=args.cwa, una=args.una, infer=args.infer,
        severity_floor=Severity.parse(args.severity_floor))
    partition = None
    if config.infer:
        inf_config = inference.InferenceConfig(una=config.una)
        graph = inference.apply_default_values(graph, cset)
        graph, partition = inference.materialize(graph, cset, inf_config)
    return graph, cset, config, partition


def cmd_validate(args) -> int:
    try:
        graph, cset, config, partition = _prepare(args)
    except (InputError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    report = validator.validate(graph, cset, config, partition)
    text = _report_json(report) if args.format == "json" \
        else _report_text(report)
    _emit(text, args.out)
    return EXIT_OK if report.conforms else EXIT_VIOLATIONS


def cmd_infer(args) -> int:
    try:
        graph, cset, config, _ = _prepare(args)
    except (InputError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    if not args.infer:
        # the subcommand itself implies materialization
        graph = inference.apply_default_values(graph, cset)
        inf_config = inference.InferenceConfig(una=config.una)
        graph, _ = inference.materialize(graph, cset, inf_config)
    _emit(rdf.serialize_ntriples(graph), args.out)
    return EXIT_OK


def cmd_translate(args) -> int:
    path = args.input
    try:
        text = _read(path)
        if path.endswith(".shex"):
            shapes = shex.parse_shexc(text)
            rows = shex.compile_shapes(shapes)
            resolve(rows)      # surface unresolved references early
            out = rcf.serialize_rcf(rows)
        elif path.endswith(".rcf"):
            rows = rcf.parse_rcf(text)
            cset = resolve(rows)
            lines = []
            for row in rows:
                try:
                    lines.append(f"{row.id}: {render_dl(row, cset)}")
                except NotDlExpressible:
                    lines.append(f"{row.id}: (not expressible in DL)")
            out = "\n".join(lines) + ("\n" if lines else "")
        else:
            raise InputError(f"unsupported input type: {path}")
    except (InputError, ConstraintError, rcf.RcfSyntaxError,
            shex.ShexSyntaxError, shex.UnsupportedFeature) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    _emit(out, args.out)
    return EXIT_OK


def _matrix_text(matrix: dict, entries) -> str:
    lines = []
    labels = [
        ("context", "property", "Property Constraints"),
        ("context", "class", "Class Constraints"),
        ("context", "both", "Property and Class Constraints"),
        ("complexity", "simple", "Simple Constraints"),
        ("complexity", "sugar", "Simple Constraints (Syntactic Sugar)"),
        ("complexity", "complex", "Complex Constraints"),
        ("dl", "expressible", "DL Expressible"),
        ("dl", "not_expressible", "DL Not Expressible"),
    ]
    for dim, key, label in labels:
        cell = matrix[dim][key]
        lines.append(f"{label} {cell['count']} {cell['percent']}%")
    lines.append(f"Total {matrix['total']} 100%")
    lines.append("")
    for e in entries:
        flags = []
        if e.inference_pre_pass:
            flags.append("inference")
        if e.cwa_dependent:
            flags.append("cwa")
        if e.una_dependent:
            flags.append("una")
        elems = ", ".join(el.value for el in e.constraining_elements) or "-"
        lines.append(
            f"{e.type_name} | {e.context_dim} | {e.complexity_dim} | "
            f"dl={'yes' if e.dl_expressible else 'no'} | "
            f"{'+'.join(flags) or '-'} | {elems} | "
            f"implemented={'yes' if e.implemented else 'no'}")
    return "\n".join(lines) + "\n"


def _matrix_json(matrix: dict, entries) -> str:
    def cell(c):
        return {"count": c["count"], "percent": float(c["percent"])}

    doc = {
        "context": {k: cell(v) for k, v in matrix["context"].items()},
        "complexity": {k: cell(v) for k, v in matrix["complexity"].items()},
        "dl": {k: cell(v) for k, v in matrix["dl"].items()},
        "total": matrix["total"],
        "types": [
            {
                "name": e.type_name,
                "context": e.context_dim,
                "complexity": e.complexity_dim,
                "dlExpressible": e.dl_expressible,
                "cwaDependent": e.cwa_dependent,
                "unaDependent": e.una_dependent,
                "inferencePrePass": e.inference_pre_pass,
                "languageSupport": e.language_support,
                "constrainingElements": [
                    el.value for el in e.constraining_elements],
                "implemented": e.implemented,
            }
            for e in entries
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_catalog(args) -> int:
    entries = catalog_mod.catalog()
    if args.dl_only:
        entries = [e for e in entries if e.dl_expressible]
    matrix = catalog_mod.classification_matrix()
    text = _matrix_json(matrix, entries) if args.format == "json" \
        else _matrix_text(matrix, entries)
    _emit(text, args.out)
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--data", action="append", default=[],
                        help="data file (.ttl or .nt); repeatable")
    parser.add_argument("--constraints", action="append", default=[],
                        help="constraint file (.rcf); repeatable")
    parser.add_argument("--shex", action="append", default=[],
                        help="shape file (.shex); repeatable")
    parser.add_argument("--cwa", dest="cwa", action="store_true",
                        default=True)
    parser.add_argument("--no-cwa", dest="cwa", action="store_false")
    parser.add_argument("--una", dest="una", action="store_true",
                        default=True)
    parser.add_argument("--no-una", dest="una", action="store_false")
    parser.add_argument("--infer", action="store_true", default=False)
    parser.add_argument("--severity-floor", default="error",
                        choices=["info", "warning", "error"])
    parser.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdfcheck",
        description="Validate RDF data against generic constraint rows")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check data and report")
    _add_common(p_validate)
    p_validate.add_argument("--format", default="text",
                            choices=["text", "json"])
    p_validate.set_defaults(func=cmd_validate, needs_input=True)

    p_infer = sub.add_parser("infer", help="emit the materialized closure")
    _add_common(p_infer)
    p_infer.set_defaults(func=cmd_infer, needs_input=True)

    p_translate = sub.add_parser(
        "translate", help="shex -> constraint rows, rcf -> DL text")
    p_translate.add_argument("input")
    p_translate.add_argument("--out", default=None)
    p_translate.set_defaults(func=cmd_translate, needs_input=False)

    p_catalog = sub.add_parser("catalog", help="classification matrix")
    p_catalog.add_argument("--format", default="text",
                           choices=["text", "json"])
    p_catalog.add_argument("--dl-only", action="store_true", default=False)
    p_catalog.add_argument("--out", default=None)
    p_catalog.set_defaults(func=cmd_catalog, needs_input=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.needs_input and args.command == "validate":
        if not args.data or not (args.constraints or args.shex):
            sys.stderr.write(
                "error: validate needs --data and --constraints/--shex\n")
            return EXIT_INPUT_ERROR
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
