"""Command-line front end.

Subcommands: ``classify``, ``reason``, ``query``, ``oracle``, ``check``.
Exit codes: 0 success, 1 negative verdict (query false / check found
differences), 2 input error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis, reasoner, syntax
from .errors import CapExceeded, InputError
from .intervals import parse_rational
from .reasoner import Model

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_CAP = 3


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_program(args) -> syntax.Program:
    return syntax.parse_program(_read(args.program))


def _load_database(args) -> Model:
    if args.database is None:
        return Model()
    return syntax.parse_database(_read(args.database))


def _prepare(args) -> tuple[syntax.Program, Model]:
    """Parse, normalize, and ground the program against the database."""
    program = syntax.to_normal_form(_load_program(args))
    database = _load_database(args)
    return syntax.ground(program, database), database


def _emit(args, human: str, structured: dict) -> None:
    if args.format == "json":
        print(json.dumps(structured, indent=2, sort_keys=True))
    else:
        print(human)


def _model_dict(model: Model) -> list[dict]:
    return [
        {"atom": str(atom), "intervals": [str(p) for p in ivs]}
        for atom, ivs in model.items()
    ]


def cmd_classify(args) -> int:
    program = syntax.to_normal_form(_load_program(args))
    database = _load_database(args) if args.database else None
    report = analysis.classify_rules(program, database, cycle_cap=args.cycle_cap)

    lines = ["fragments:"]
    for name in ("bounded", "union_free", "temporal_linear", "forward_propagating"):
        lines.append(f"  {name}: {getattr(report, name)}")
    lines.append(f"  harmless_program: {report.harmless_program}")
    if report.pattern_len is not None:
        lines.append(f"  pattern_length: {report.pattern_len}")
    if report.warning:
        lines.append(f"warning: {report.warning}")
    lines.append("nodes:")
    graph = analysis.dependency_graph(program)
    for node in graph.nodes:
        case = report.finite_nodes.get(node)
        status = f"finite ({case})" if case else "not finite"
        lines.append(f"  {node}: {status}")
    lines.append("rules:")
    for rule in program.rules:
        lines.append(f"  {rule.id}: {report.rule_classes[rule.id].value}  {rule}")

    structured = {
        "fragments": {
            "bounded": report.bounded,
            "union_free": report.union_free,
            "temporal_linear": report.temporal_linear,
            "forward_propagating": report.forward_propagating,
        },
        "harmless_program": report.harmless_program,
        "pattern_length": str(report.pattern_len) if report.pattern_len is not None else None,
        "warning": report.warning,
        "finite_nodes": {n: report.finite_nodes.get(n) for n in graph.nodes},
        "rule_classes": {r.id: report.rule_classes[r.id].value for r in program.rules},
        "cycles": [
            {"nodes": list(c.nodes), "shift_sum": str(c.shift_sum), "weight": str(c.weight)}
            for c in report.cycles
        ],
    }
    _emit(args, "\n".join(lines), structured)
    return EXIT_OK


def cmd_reason(args) -> int:
    program, database = _prepare(args)
    pm = reasoner.reason(
        program, database, window_cap=args.window_cap, cycle_cap=args.cycle_cap
    )
    lines = [
        f"type: {pm.representation_type()}",
        f"period: {pm.period}",
        f"horizon: {pm.horizon}",
        "facts:",
    ]
    for atom, ivs in pm.facts.items():
        lines.append(f"  {atom}@{ivs}")
    lines.append("patterns:")
    for pat in pm.patterns:
        lines.append(f"  {pat}")
    _emit(args, "\n".join(lines), pm.to_dict())
    return EXIT_OK


def cmd_query(args) -> int:
    program, database = _prepare(args)
    fact = syntax.parse_fact(args.query)
    pm = reasoner.reason(
        program, database, window_cap=args.window_cap, cycle_cap=args.cycle_cap
    )
    verdict = pm.entails(fact)
    _emit(args, "true" if verdict else "false", {"query": str(fact), "entailed": verdict})
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_oracle(args) -> int:
    program, database = _prepare(args)
    horizon = parse_rational(args.horizon)
    model = reasoner.naive_fixpoint_bounded(program, database, horizon)
    lines = [f"{atom}@{ivs}" for atom, ivs in model.items()]
    _emit(args, "\n".join(lines) or "(empty)", {"facts": _model_dict(model)})
    return EXIT_OK


def cmd_check(args) -> int:
    program, database = _prepare(args)
    pm = reasoner.reason(
        program, database, window_cap=args.window_cap, cycle_cap=args.cycle_cap
    )
    if args.horizon is not None:
        horizon = parse_rational(args.horizon)
    else:
        horizon = reasoner.max_time_point(database) + 3 * pm.period
    unrolled = pm.unroll(horizon)
    oracle = reasoner.naive_fixpoint_bounded(program, database, horizon)

    differences: list[str] = []
    for atom in sorted(set(unrolled.atoms()) | set(oracle.atoms()), key=str):
        left, right = unrolled.get(atom), oracle.get(atom)
        if left != right:
            differences.append(f"{atom}: reason={left} oracle={right}")
    human = (
        f"checked through {horizon}: no differences"
        if not differences
        else "\n".join(["differences:"] + [f"  {d}" for d in differences])
    )
    _emit(
        args,
        human,
        {"horizon": str(horizon), "differences": differences},
    )
    return EXIT_OK if not differences else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronolog",
        description="DatalogMTL reasoning over finite model representations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def positive_int(text: str) -> int:
        value = int(text)
        if value <= 0:
            raise argparse.ArgumentTypeError("cap must be positive")
        return value

    def common(p, database_required: bool):
        p.add_argument("--program", required=True, help="program file")
        p.add_argument(
            "--database",
            required=database_required,
            default=None,
            help="database file of facts",
        )
        p.add_argument("--format", choices=("human", "json"), default="human")
        p.add_argument("--cycle-cap", type=positive_int, default=100_000)
        p.add_argument("--window-cap", type=positive_int, default=10_000)

    p = sub.add_parser("classify", help="fragment flags, finite nodes, rule classes")
    common(p, database_required=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reason", help="compute the periodic representation")
    common(p, database_required=True)
    p.set_defaults(func=cmd_reason)

    p = sub.add_parser("query", help="fact entailment against the representation")
    common(p, database_required=True)
    p.add_argument("--query", required=True, help="fact, e.g. 'A(c)@[1,2]'")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("oracle", help="bounded naive fixpoint (ground truth)")
    common(p, database_required=True)
    p.add_argument("--horizon", required=True, help="clip derivations to (-inf, horizon]")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="diff unrolled reason output against the oracle")
    common(p, database_required=True)
    p.add_argument("--horizon", default=None, help="defaults to maxTimePoint + 3 periods")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
