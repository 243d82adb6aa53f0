"""Batch command-line interface.

One subcommand per library operation family: parse, clean, split, extract,
select, histogram, dist, doc-dist, convert, gold-validate.  Inputs are file
paths (``-`` reads standard input); all output is written to standard output
and is byte-deterministic for a given input set.

Exit codes: 0 success, 1 domain error (malformed input, missing branch,
tool failure, ...), 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, TextIO

from . import core, gold, query, similarity
from .convert import convert as run_converter
from .convert import load_converters, stub_registry
from .errors import MmlError

_FEATURE_ALIASES = {name.replace("_", "-"): name for name in core.CLEANABLE_FEATURES}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose messages go to an injectable stream."""

    stream: Optional[TextIO] = None

    def _print_message(self, message, file=None):
        if message:
            (self.stream or sys.stderr).write(message)


def format_number(value: float) -> str:
    """Render a measure value with 10 significant digits; integral values
    keep a trailing ``.0`` so the output stays visibly a float."""
    text = f"{value:.10g}"
    if not any(c in text for c in ".eE") and text.lstrip("+-").isdigit():
        text += ".0"
    return text


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _check_paths_exist(paths, parser):
    for path in paths:
        if path != "-" and not os.path.exists(path):
            parser.error(f"input file not found: {path}")


def _parse_mode(args) -> str:
    return "strict" if args.strict else "lenient"


def _parse_features(text: str) -> set[str]:
    features = set()
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        normalized = token.replace("_", "-")
        if normalized not in _FEATURE_ALIASES:
            raise ValueError(f"unknown feature {token!r}")
        features.add(_FEATURE_ALIASES[normalized])
    if not features:
        raise ValueError("no features given")
    return features


def _parse_costs(text: str) -> similarity.CostConfig:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError("costs must be three comma-separated numbers: ins,del,ren")
    ins, dele, ren = (float(p) for p in parts)
    return similarity.CostConfig(insert=ins, delete=dele, rename=ren)


def _build_parser(stream: TextIO) -> _Parser:
    parser = _Parser(prog="mml", description="parallel-markup MathML toolkit")
    parser.stream = stream

    def add_mode_flags(sub):
        group = sub.add_mutually_exclusive_group()
        group.add_argument("--lenient", action="store_true", default=False,
                           help="repair recoverable defects (default)")
        group.add_argument("--strict", action="store_true", default=False,
                           help="reject inputs needing repair")

    subs = parser.add_subparsers(dest="command", metavar="subcommand",
                                 parser_class=_Parser)
    subs.required = True

    sub = subs.add_parser("parse", help="parse inputs and print canonical XML")
    add_mode_flags(sub)
    sub.add_argument("--pretty", action="store_true", help="indented output")
    sub.add_argument("inputs", nargs="+", metavar="input")

    sub = subs.add_parser("clean",
                          help="remove markup features and print the result")
    add_mode_flags(sub)
    sub.add_argument("--features", required=True,
                     help="comma-separated: cross-references, content-branch, "
                          "presentation-branch, annotations")
    sub.add_argument("--pretty", action="store_true")
    sub.add_argument("inputs", nargs="+", metavar="input")

    sub = subs.add_parser("split",
                          help="extract one branch as a standalone document")
    add_mode_flags(sub)
    sub.add_argument("--branch", required=True, choices=("presentation", "content"))
    sub.add_argument("--pretty", action="store_true")
    sub.add_argument("inputs", nargs="+", metavar="input")

    sub = subs.add_parser("extract",
                          help="list identifier elements as name<TAB>text")
    add_mode_flags(sub)
    sub.add_argument("--branch", default="both",
                     choices=("presentation", "content", "both"))
    sub.add_argument("inputs", nargs="+", metavar="input")

    sub = subs.add_parser("select", help="print nodes matching a path query")
    add_mode_flags(sub)
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--expr", help="inline query, e.g. \"//mi | //ci\"")
    group.add_argument("--lib", help="named query from the built-in catalog")
    sub.add_argument("inputs", nargs="+", metavar="input")

    sub = subs.add_parser("histogram", help="print an element-name histogram")
    add_mode_flags(sub)
    sub.add_argument("--scope", default="whole",
                     choices=("whole", "presentation", "content"))
    sub.add_argument("--include-structural", action="store_true")
    sub.add_argument("inputs", nargs="+", metavar="input")

    sub = subs.add_parser("dist",
                          help="distance or similarity between two documents")
    add_mode_flags(sub)
    sub.add_argument("--measure", required=True,
                     choices=("hist-abs", "hist-rel", "ted", "emd", "cosine"))
    sub.add_argument("--scope", default="whole",
                     choices=("whole", "presentation", "content"))
    sub.add_argument("--include-structural", action="store_true")
    sub.add_argument("--costs", default=None, metavar="INS,DEL,REN",
                     help="tree edit costs (ted only), default 1,1,1")
    sub.add_argument("--label-mode", default="name", choices=("name", "name-text"),
                     help="tree edit labels (ted only)")
    sub.add_argument("inputs", nargs=2, metavar="input")

    sub = subs.add_parser("doc-dist",
                          help="distance between two document collections")
    add_mode_flags(sub)
    sub.add_argument("--measure", required=True, choices=("emd", "cosine"))
    sub.add_argument("--scope", default="whole",
                     choices=("whole", "presentation", "content"))
    sub.add_argument("--include-structural", action="store_true")
    sub.add_argument("-a", "--left", action="append", required=True, metavar="FILE",
                     help="document on the left side (repeatable)")
    sub.add_argument("-b", "--right", action="append", required=True, metavar="FILE",
                     help="document on the right side (repeatable)")

    sub = subs.add_parser("convert",
                          help="run a registered TeX-to-MathML converter")
    sub.add_argument("--name", required=True, help="converter name")
    sub.add_argument("--converters", metavar="FILE",
                     help="JSON file describing additional converters")
    sub.add_argument("--tex", help="TeX source (default: read from input file)")
    sub.add_argument("--pretty", action="store_true")
    sub.add_argument("inputs", nargs="?", default=None, metavar="input",
                     help="file holding TeX source, or - for stdin")

    sub = subs.add_parser("gold-validate",
                          help="check a gold collection and report findings")
    sub.add_argument("--gold", required=True, metavar="FILE",
                     help="gold collection JSON file")

    for sub in subs.choices.values():
        sub.stream = stream
    return parser


def _load_docs(paths, mode):
    return [core.parse(_read_input(p), mode)[0] for p in paths]


def _cmd_parse(args, out):
    for path in args.inputs:
        doc, _ = core.parse(_read_input(path), _parse_mode(args))
        out.write(core.serialize(doc, pretty=args.pretty) + "\n")
    return 0


def _cmd_clean(args, out):
    try:
        features = _parse_features(args.features)
    except ValueError as exc:
        raise _UsageError(str(exc))
    for path in args.inputs:
        doc, _ = core.parse(_read_input(path), _parse_mode(args))
        out.write(core.serialize(core.clean(doc, features), pretty=args.pretty) + "\n")
    return 0


def _cmd_split(args, out):
    splitter = core.split_presentation if args.branch == "presentation" else core.split_content
    for path in args.inputs:
        doc, _ = core.parse(_read_input(path), _parse_mode(args))
        out.write(core.serialize(splitter(doc), pretty=args.pretty) + "\n")
    return 0


def _cmd_extract(args, out):
    for path in args.inputs:
        doc, _ = core.parse(_read_input(path), _parse_mode(args))
        for name, text, _handle in core.extract_identifiers(doc, args.branch):
            out.write(f"{name}\t{text}\n")
    return 0


def _cmd_select(args, out):
    if args.expr is not None:
        selector = query.parse_selector(args.expr)
    else:
        selector = query.library_get(args.lib)
    for path in args.inputs:
        doc, _ = core.parse(_read_input(path), _parse_mode(args))
        for handle in query.select(doc, selector):
            out.write(core.serialize_node(doc.node(handle)) + "\n")
    return 0


def _cmd_histogram(args, out):
    histograms = [
        similarity.histogram(doc, args.scope, args.include_structural)
        for doc in _load_docs(args.inputs, _parse_mode(args))
    ]
    out.write(similarity.accumulate(histograms).to_text())
    return 0


def _cmd_dist(args, out):
    mode = _parse_mode(args)
    doc_a, doc_b = _load_docs(args.inputs, mode)
    if args.measure == "ted":
        costs = similarity.CostConfig()
        if args.costs is not None:
            try:
                costs = _parse_costs(args.costs)
            except ValueError as exc:
                raise _UsageError(str(exc))
        if args.scope == "whole":
            trees = (doc_a, doc_b)
        elif args.scope == "presentation":
            trees = (core.split_presentation(doc_a), core.split_presentation(doc_b))
        else:
            trees = (core.split_content(doc_a), core.split_content(doc_b))
        value = similarity.tree_edit_distance(*trees, costs=costs,
                                              label_mode=args.label_mode)
    else:
        if args.costs is not None:
            raise _UsageError("--costs only applies to --measure ted")
        hist_a = similarity.histogram(doc_a, args.scope, args.include_structural)
        hist_b = similarity.histogram(doc_b, args.scope, args.include_structural)
        if args.measure == "hist-abs":
            value = similarity.hist_distance_absolute(hist_a, hist_b)
        elif args.measure == "hist-rel":
            value = similarity.hist_distance_relative(hist_a, hist_b)
        elif args.measure == "emd":
            value = similarity.emd(hist_a, hist_b)
        else:
            value = similarity.cosine_similarity(hist_a, hist_b)
    out.write(format_number(value) + "\n")
    return 0


def _cmd_doc_dist(args, out):
    mode = _parse_mode(args)
    value = similarity.document_distance(
        _load_docs(args.left, mode),
        _load_docs(args.right, mode),
        measure=args.measure,
        scope=args.scope,
        include_structural=args.include_structural,
    )
    out.write(format_number(value) + "\n")
    return 0


def _cmd_convert(args, out):
    registry = stub_registry()
    if args.converters:
        load_converters(_read_input(args.converters), registry)
    if args.tex is not None:
        tex = args.tex
    elif args.inputs is not None:
        tex = _read_input(args.inputs)
    else:
        raise _UsageError("convert needs --tex or an input file")
    result = run_converter(args.name, tex, registry)
    out.write(core.serialize(result.mathml, pretty=args.pretty) + "\n")
    return 0


def _cmd_gold_validate(args, out):
    entries = gold.load_gold(_read_input(args.gold))
    for entry in entries:
        findings = gold.validate_entry(entry)
        if not findings:
            out.write(f"{entry.id}\tok\n")
        for finding in findings:
            out.write(f"{entry.id}\t{finding.kind}\t{finding.detail}\n")
    return 0


_COMMANDS = {
    "parse": _cmd_parse,
    "clean": _cmd_clean,
    "split": _cmd_split,
    "extract": _cmd_extract,
    "select": _cmd_select,
    "histogram": _cmd_histogram,
    "dist": _cmd_dist,
    "doc-dist": _cmd_doc_dist,
    "convert": _cmd_convert,
    "gold-validate": _cmd_gold_validate,
}


class _UsageError(Exception):
    pass


def _input_paths(args) -> list[str]:
    paths = list(getattr(args, "inputs", None) or [])
    if isinstance(getattr(args, "inputs", None), str):
        paths = [args.inputs]
    paths += getattr(args, "left", None) or []
    paths += getattr(args, "right", None) or []
    if getattr(args, "converters", None):
        paths.append(args.converters)
    if getattr(args, "gold", None):
        paths.append(args.gold)
    return paths


def run(argv, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """Run the CLI on an argument vector; returns the exit code."""
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = _build_parser(err)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _check_paths_exist(_input_paths(args), parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except _UsageError as exc:
        err.write(f"mml {args.command}: error: {exc}\n")
        return 2
    except MmlError as exc:
        err.write(f"mml {args.command}: error: {exc}\n")
        return 1
    except OSError as exc:
        err.write(f"mml {args.command}: error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
