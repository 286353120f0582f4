"""Command-line interface: ``roughreason <check|verify|enumerate|approximate|parse>``.

Exit codes: 0 ran clean, 1 ran and refuted, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from .partial import StructureError, read_structure, write_structure
from .rough import CorpusError, iterate_operator, induced_structure, load_corpus
from .suites import (
    SUITES, EnumerationBoundError, EnumerationTask, SuiteReport, Verdict,
    enumerate_models, get_suite, run_suite,
)
from .terms import TermSyntaxError, parse_relation, parse_term
from .verifier import Rubric, ScriptSyntaxError, ledger_markdown

EXIT_OK, EXIT_REFUTED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass(frozen=True)
class CommandConfig:
    subcommand: str
    paths: tuple = ()
    suite: Optional[str] = None
    size: Optional[int] = None
    operator: Optional[str] = None
    element: Optional[str] = None
    iterations: int = 1
    format: str = "markdown"
    rubric: Optional[Path] = None

    def __post_init__(self):
        for p in self.paths:
            if not Path(p).exists():
                raise InputError(f"{p}: no such file or directory")
        if self.rubric is not None and not Path(self.rubric).exists():
            raise InputError(f"{self.rubric}: no such file")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def suite_markdown(report: SuiteReport) -> str:
    lines = [f"## {report.suite}: {report.verdict.value}", ""]
    if report.verdict is Verdict.NOT_APPLICABLE:
        lines.append(f"missing from the structure: {', '.join(report.missing)}")
        return "\n".join(lines) + "\n"
    lines += ["| group | policy | axiom | index | holds | witness |", "|---|---|---|---|---|---|"]
    for g in report.groups:
        for r in g.reports:
            witness = "" if r.witness is None else ", ".join(f"{k}={v}" for k, v in r.witness.items())
            idx = "" if r.index is None else str(r.index)
            lines.append(f"| {g.name} | {g.policy} | {r.name} | {idx} | {'yes' if r.holds else 'NO'} | {witness} |")
    return "\n".join(lines) + "\n"


def _rubric(cfg: CommandConfig) -> Optional[Rubric]:
    if cfg.rubric is None:
        return None
    try:
        return Rubric.load(cfg.rubric)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{cfg.rubric}: {exc}") from None


def cmd_check(cfg: CommandConfig, out) -> int:
    try:
        S = read_structure(cfg.paths[0])
        suite = get_suite(cfg.suite)
    except (StructureError, ValueError, KeyError) as exc:
        raise InputError(f"{cfg.paths[0]}: {exc}") from None
    report = run_suite(S, suite)
    out.write(_dump(report.to_json()) + "\n" if cfg.format == "json" else suite_markdown(report))
    if report.verdict is Verdict.NOT_APPLICABLE:
        return EXIT_INPUT
    return EXIT_OK if report.holds else EXIT_REFUTED


def cmd_verify(cfg: CommandConfig, out) -> int:
    try:
        corpus = load_corpus(cfg.paths[0], _rubric(cfg))
    except (ScriptSyntaxError, CorpusError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if cfg.format == "json":
        out.write(_dump([lg.to_json() for lg in corpus.ledgers]) + "\n")
    else:
        out.write(ledger_markdown(corpus.ledgers) + "\n")
    return EXIT_OK


def cmd_enumerate(cfg: CommandConfig, args, out) -> int:
    free = tuple(args.free.split(",")) if args.free else (
        ("n",) if cfg.suite in ("negation", "strong-negation") else ("l", "u"))
    base = None
    if args.base:
        try:
            base = read_structure(args.base)
        except (StructureError, ValueError, OSError) as exc:
            raise InputError(f"{args.base}: {exc}") from None
    partial = frozenset(args.partial.split(",")) if args.partial else frozenset()
    task = EnumerationTask(cfg.size, cfg.suite, free, base, partial, count_only=not args.emit)
    try:
        get_suite(cfg.suite)
        result = enumerate_models(task, prune=not args.naive)
    except (EnumerationBoundError, ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None
    if args.emit:
        target = Path(args.emit)
        target.mkdir(parents=True, exist_ok=True)
        for i, model in enumerate(result.models):
            write_structure(model, target / f"model-{i:04d}.json")
    summary = {"suite": cfg.suite, "size": cfg.size, "free": list(free),
               "mode": "naive" if args.naive else "pruned", "count": result.count}
    if cfg.format == "json":
        out.write(_dump(summary) + "\n")
    else:
        out.write(f"{cfg.suite}, size {cfg.size}, free {','.join(free)} "
                  f"({summary['mode']}): {result.count} model(s)\n")
    return EXIT_OK


def cmd_approximate(cfg: CommandConfig, args, out) -> int:
    try:
        space = load_corpus(cfg.paths[0], _rubric(cfg)).space()
        traj = iterate_operator(space, cfg.operator, cfg.element, cfg.iterations)
    except (ScriptSyntaxError, CorpusError, KeyError, ValueError) as exc:
        raise InputError(str(exc.args[0]) if exc.args else str(exc)) from None
    report = None
    if args.induce:
        S = induced_structure(space)
        write_structure(S, args.induce)
        report = run_suite(S, "er-companion")
    if cfg.format == "json":
        doc = {"trajectory": traj.to_json()}
        if report is not None:
            doc["er-companion"] = report.to_json()
        out.write(_dump(doc) + "\n")
    else:
        out.write(f"{traj}\n")
        if report is not None:
            out.write("\n" + suite_markdown(report))
    if report is not None and not report.holds:
        return EXIT_REFUTED
    return EXIT_OK


def cmd_parse(cfg: CommandConfig, args, out) -> int:
    try:
        node = parse_relation(args.text) if any(s in args.text for s in "=≤≥<>") else parse_term(args.text)
    except TermSyntaxError as exc:
        raise InputError(str(exc)) from None
    out.write(f"{node!r}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "markdown"), default=argparse.SUPPRESS)
    common.add_argument("--rubric", type=Path, default=argparse.SUPPRESS,
                        help="JSON file overriding the severity rubric")
    p = argparse.ArgumentParser(prog="roughreason", parents=[common],
                                description="Partial rough algebras and equational reasoning checks.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("check", parents=[common], help="check a structure against an axiom suite")
    c.add_argument("structure", type=Path)
    c.add_argument("--suite", required=True, choices=sorted(SUITES))

    v = sub.add_parser("verify", parents=[common], help="verify a corpus directory of solution scripts")
    v.add_argument("corpus", type=Path)

    e = sub.add_parser("enumerate", parents=[common], help="count models of a suite")
    e.add_argument("--size", type=int, required=True)
    e.add_argument("--suite", required=True, choices=sorted(SUITES))
    e.add_argument("--free", help="comma-separated operations to enumerate (default l,u or n)")
    e.add_argument("--partial", help="comma-separated free operations that may be undefined")
    e.add_argument("--base", type=Path, help="structure file fixing everything else")
    e.add_argument("--naive", action="store_true", help="brute force without pruning")
    e.add_argument("--emit", type=Path, help="directory to write the models into")

    a = sub.add_parser("approximate", parents=[common], help="iterate an approximation operator")
    a.add_argument("corpus", type=Path)
    a.add_argument("--operator", required=True)
    a.add_argument("--element", required=True)
    a.add_argument("-k", "--iterations", type=int, default=1)
    a.add_argument("--induce", type=Path, help="write the induced structure here and check er-companion")

    t = sub.add_parser("parse", parents=[common], help="print the syntax tree of a term or relation")
    t.add_argument("text")
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    fmt = getattr(args, "format", "markdown")
    try:
        paths: List[Path] = []
        for name in ("structure", "corpus"):
            if getattr(args, name, None) is not None:
                paths.append(getattr(args, name))
        cfg = CommandConfig(
            args.subcommand, tuple(paths), getattr(args, "suite", None), getattr(args, "size", None),
            getattr(args, "operator", None), getattr(args, "element", None),
            getattr(args, "iterations", 1), fmt, getattr(args, "rubric", None),
        )
        if cfg.subcommand == "check":
            return cmd_check(cfg, out)
        if cfg.subcommand == "verify":
            return cmd_verify(cfg, out)
        if cfg.subcommand == "enumerate":
            return cmd_enumerate(cfg, args, out)
        if cfg.subcommand == "approximate":
            return cmd_approximate(cfg, args, out)
        return cmd_parse(cfg, args, out)
    except InputError as exc:
        err.write(f"roughreason: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
