"""Command-line entry point.

One binary, four groups of subcommands:

    fimeq fim eval a~ab            print the Scheiblich pair of a word
    fimeq fim eq a~aa a            EQUAL or DIFFER, exit 0 or 1
    fimeq fim solve-idem FILE      decide a system in idempotent variables
    fimeq fim lift FILE GAMMA      lift a group solution to the monoid
    fimeq langeq solve FILE        decide a language-equation system
    fimeq surgery run FILE --stage s1|s2|sprime|fim|all [--report json]
    fimeq onevar classify FILE     balance report, one line per equation
    fimeq onevar solve FILE [--C 4]

Exit codes: 0 for SAT, true, or EQUAL; 1 for UNSAT_WITHIN_BOUND, false, or
DIFFER; 2 for UNKNOWN; 64 for usage errors; 65 for unreadable or invalid
input.  Global flags --format text|json, --max-len, --max-branches,
--time-limit-ms, --seed, and --trace may come before or after the
subcommand.  The seed is recorded in JSON output; no subcommand draws
random numbers itself.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from .equations import TypedSystem, VarSymbol
from .errors import FimeqError, ParseError
from .fim import format_pair, word_problem, word_to_fim
from .langeq import LangSystem, system_size
from .onevar import decide_onevar, is_unbalanced_untyped, reduce_to_strong, strong_unbalance_kind
from .pipeline import decide_idempotent_system, decide_lifting
from .serialize import (
    format_system,
    format_value,
    load_system,
    parse_group_assignment,
    system_to_json,
    verdict_to_json,
)
from .solver import SAT, UNKNOWN, UNSAT_WITHIN_BOUND, SolverBudget, Verdict, bounded_solve, solve_over_group
from .surgery import SurgeryReport, alphabet_control, fim_encode, full_hardness_chain, normalize_s1, pad_s2
from .words import InvAlphabet, parse_word

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65
_STATUS_EXIT = {SAT: EXIT_OK, UNSAT_WITHIN_BOUND: EXIT_NO, UNKNOWN: EXIT_UNKNOWN}


class UsageError(FimeqError):
    """A flag value outside its documented range."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    paths: tuple[str, ...]
    budget: SolverBudget
    format: str = "text"
    seed: "int | None" = None
    trace: bool = False

    def __post_init__(self) -> None:
        if self.budget.max_len < 1 or self.budget.max_branches < 1:
            raise UsageError("budget values must be positive")
        if self.budget.time_limit_ms is not None and self.budget.time_limit_ms < 1:
            raise UsageError("budget values must be positive")


def _config(args: argparse.Namespace) -> RunConfig:
    budget = SolverBudget(
        max_len=getattr(args, "max_len", 3),
        max_branches=getattr(args, "max_branches", 10_000),
        time_limit_ms=getattr(args, "time_limit_ms", None),
        max_group_len=getattr(args, "max_group_len", None),
    )
    paths = tuple(
        p for p in (getattr(args, "file", None), getattr(args, "gamma", None)) if p
    )
    return RunConfig(
        subcommand=f"{args.group} {args.action}",
        paths=paths,
        budget=budget,
        format=getattr(args, "format", "text"),
        seed=getattr(args, "seed", None),
        trace=getattr(args, "trace", False),
    )


def parse_input(path: str) -> "tuple[InvAlphabet, TypedSystem | LangSystem]":
    with open(path, "r", encoding="utf-8") as handle:
        system = load_system(handle.read())
    return system.alphabet, system


def _emit_json(config: RunConfig, payload: dict) -> None:
    if config.seed is not None:
        payload = {**payload, "seed": config.seed}
    print(json.dumps(payload, indent=2))


def _report_verdict(config: RunConfig, verdict: Verdict) -> int:
    if config.format == "json":
        _emit_json(config, verdict_to_json(verdict))
    else:
        print(verdict.status)
        if verdict.witness is not None:
            items = sorted(verdict.witness.items(), key=lambda kv: kv[0].display())
            for var, value in items:
                print(f"{var.display()} = {format_value(value)}")
        if config.trace:
            for step in verdict.trace:
                print(f"trace: {step}")
    return _STATUS_EXIT[verdict.status]


def _infer_alphabet(texts: Sequence[str], letters: "str | None") -> InvAlphabet:
    """Single-character base letters from the words, unless declared."""
    if letters is not None:
        names = tuple(letters.replace(",", " ").split())
        if not names:
            raise UsageError("--letters names no letters")
        return InvAlphabet.from_base(names)
    seen = sorted({c for t in texts for c in t if c != "~"})
    if not seen:
        seen = ["a"]
    return InvAlphabet.from_base(tuple(seen))


def _cmd_fim_eval(args: argparse.Namespace, config: RunConfig) -> int:
    alphabet = _infer_alphabet([args.word], args.letters)
    pair = word_to_fim(parse_word(alphabet, args.word))
    if config.format == "json":
        _emit_json(config, {"value": {"tree": [format_value(w) for w in pair.tree],
                                      "group": format_value(pair.group)}})
    else:
        print(format_pair(pair))
    return EXIT_OK


def _cmd_fim_eq(args: argparse.Namespace, config: RunConfig) -> int:
    alphabet = _infer_alphabet([args.left, args.right], args.letters)
    equal = word_problem(parse_word(alphabet, args.left), parse_word(alphabet, args.right))
    if config.format == "json":
        _emit_json(config, {"equal": equal})
    else:
        print("EQUAL" if equal else "DIFFER")
    return EXIT_OK if equal else EXIT_NO


def _typed_input(path: str) -> TypedSystem:
    _, system = parse_input(path)
    if not isinstance(system, TypedSystem):
        raise ParseError(f"{path} holds a language system, expected a typed one")
    return system


def _lang_input(path: str) -> LangSystem:
    _, system = parse_input(path)
    if not isinstance(system, LangSystem):
        raise ParseError(f"{path} holds a typed system, expected a language one")
    return system


def _cmd_fim_solve_idem(args: argparse.Namespace, config: RunConfig) -> int:
    system = _typed_input(args.file)
    return _report_verdict(config, decide_idempotent_system(system, config.budget))


def _cmd_fim_lift(args: argparse.Namespace, config: RunConfig) -> int:
    system = _typed_input(args.file)
    with open(args.gamma, "r", encoding="utf-8") as handle:
        gamma = parse_group_assignment(handle.read(), system)
    return _report_verdict(config, decide_lifting(system, gamma, config.budget))


def _cmd_langeq_solve(args: argparse.Namespace, config: RunConfig) -> int:
    system = _lang_input(args.file)
    if system.interp == "group" and not any(eq.marked for eq in system.equations):
        verdict = solve_over_group(system, config.budget)
    else:
        # exact within bounds; also covers marked group systems
        verdict = bounded_solve(system, config.budget)
    return _report_verdict(config, verdict)


_STAGES = ("s1", "s2", "sprime", "fim")
_STEPS: "dict[str, Callable]" = {
    "s1": normalize_s1,
    "s2": pad_s2,
    "sprime": alphabet_control,
    "fim": fim_encode,
}


def _run_stages(system: LangSystem, upto: str) -> "tuple[object, list[SurgeryReport]]":
    if upto in ("fim", "all"):
        return full_hardness_chain(system)
    reports: list[SurgeryReport] = []
    current: object = system
    for stage in _STAGES[: _STAGES.index(upto) + 1]:
        after = _STEPS[stage](current)
        before_names = {v.name for v in _variables(current)}
        fresh = tuple(v for v in _variables(after) if v.name not in before_names)
        reports.append(SurgeryReport(stage, current, after, fresh))
        current = after
    return current, reports


def _variables(system: object) -> "tuple[VarSymbol, ...]":
    if isinstance(system, TypedSystem):
        return system.variables
    return tuple(system.variables())  # type: ignore[union-attr]


def _stage_summary(report: SurgeryReport) -> dict:
    after = report.after
    summary = {
        "stage": report.stage,
        "equations": len(after.equations),  # type: ignore[union-attr]
        "variables": len(_variables(after)),
        "fresh": [v.name for v in report.fresh],
        "size": system_size(after) if isinstance(after, LangSystem) else None,
    }
    return summary


def _cmd_surgery_run(args: argparse.Namespace, config: RunConfig) -> int:
    system = _lang_input(args.file)
    final, reports = _run_stages(system, args.stage)
    if args.report == "json" or config.format == "json":
        _emit_json(config, {
            "stages": [_stage_summary(r) for r in reports],
            "result": system_to_json(final),
        })
    elif args.stage == "all":
        for report in reports:
            print(f"== {report.stage} ==")
            print(format_system(report.after), end="")
    else:
        print(format_system(final), end="")
    return EXIT_OK


def _classification(lhs, rhs) -> str:
    tokens = [t for side in (lhs, rhs) for t in side.tokens if isinstance(t, VarSymbol)]
    if any(t.kind == "general" for t in tokens):
        return "unbalanced" if is_unbalanced_untyped(lhs, rhs) else "balanced"
    kind = strong_unbalance_kind(lhs, rhs)
    if kind == "none":
        return "not-strongly-unbalanced"
    return f"strongly-unbalanced {kind}"


def _cmd_onevar_classify(args: argparse.Namespace, config: RunConfig) -> int:
    system = _typed_input(args.file)
    labels = [_classification(lhs, rhs) for lhs, rhs in system.equations]
    if config.format == "json":
        _emit_json(config, {"equations": labels})
    else:
        for k, label in enumerate(labels, start=1):
            print(f"{k}: {label}")
    return EXIT_OK


def _cmd_onevar_solve(args: argparse.Namespace, config: RunConfig) -> int:
    system = _typed_input(args.file)
    steps: tuple[str, ...] = ()
    if any(v.kind == "general" for v in system.variables):
        system = reduce_to_strong(system)
        steps = ("reduced to a strongly unbalanced typed system",)
    verdict = decide_onevar(system, config.budget, C=args.C)
    verdict = Verdict(verdict.status, verdict.witness, steps + verdict.trace)
    return _report_verdict(config, verdict)


_HANDLERS = {
    ("fim", "eval"): _cmd_fim_eval,
    ("fim", "eq"): _cmd_fim_eq,
    ("fim", "solve-idem"): _cmd_fim_solve_idem,
    ("fim", "lift"): _cmd_fim_lift,
    ("langeq", "solve"): _cmd_langeq_solve,
    ("surgery", "run"): _cmd_surgery_run,
    ("onevar", "classify"): _cmd_onevar_classify,
    ("onevar", "solve"): _cmd_onevar_solve,
}


def _global_flags() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS,
                        help="output format (default text)")
    shared.add_argument("--max-len", type=int, default=argparse.SUPPRESS,
                        help="solution length bound (default 3)")
    shared.add_argument("--max-branches", type=int, default=argparse.SUPPRESS,
                        help="search branch cap (default 10000)")
    shared.add_argument("--time-limit-ms", type=int, default=argparse.SUPPRESS,
                        help="wall-clock budget in milliseconds")
    shared.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="recorded in JSON output for reproducibility")
    shared.add_argument("--trace", action="store_true", default=argparse.SUPPRESS,
                        help="print solver trace lines in text output")
    return shared


def build_parser() -> argparse.ArgumentParser:
    shared = _global_flags()
    parser = argparse.ArgumentParser(prog="fimeq", parents=[shared],
                                     description=__doc__.split("\n\n")[0])
    groups = parser.add_subparsers(dest="group", required=True)

    fim = groups.add_parser("fim", help="free inverse monoid values and systems")
    fim_actions = fim.add_subparsers(dest="action", required=True)
    p = fim_actions.add_parser("eval", parents=[shared], help="print the Scheiblich pair")
    p.add_argument("word")
    p.add_argument("--letters", help="base letters, comma or space separated")
    p = fim_actions.add_parser("eq", parents=[shared], help="word problem, EQUAL/DIFFER")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--letters", help="base letters, comma or space separated")
    p = fim_actions.add_parser("solve-idem", parents=[shared],
                               help="decide a system in idempotent variables")
    p.add_argument("file")
    p = fim_actions.add_parser("lift", parents=[shared],
                               help="extend a group solution to the monoid")
    p.add_argument("file")
    p.add_argument("gamma", help="name = reduced-word lines")

    langeq = groups.add_parser("langeq", help="language-equation systems")
    langeq_actions = langeq.add_subparsers(dest="action", required=True)
    p = langeq_actions.add_parser("solve", parents=[shared],
                                  help="decide under the declared interpretation")
    p.add_argument("file")

    surgery = groups.add_parser("surgery", help="hardness-chain transformations")
    surgery_actions = surgery.add_subparsers(dest="action", required=True)
    p = surgery_actions.add_parser("run", parents=[shared], help="run chain stages")
    p.add_argument("file")
    p.add_argument("--stage", choices=(*_STAGES, "all"), default="all")
    p.add_argument("--report", choices=("json",), help="emit a stage report")

    onevar = groups.add_parser("onevar", help="one-variable equations")
    onevar_actions = onevar.add_subparsers(dest="action", required=True)
    p = onevar_actions.add_parser("classify", parents=[shared],
                                  help="balance report per equation")
    p.add_argument("file")
    p = onevar_actions.add_parser("solve", parents=[shared],
                                  help="decide via strong unbalance")
    p.add_argument("file")
    p.add_argument("--C", type=int, default=4, help="family length cap multiplier")
    p.add_argument("--max-group-len", type=int,
                   help="cap on candidate word lengths in the group sweep")
    return parser


def main(argv: "Sequence[str] | None" = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_OK if exit_.code in (0, None) else EXIT_USAGE
    try:
        config = _config(args)
    except FimeqError as err:
        # a budget rejected at construction is a flag problem, not bad data
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[(args.group, args.action)](args, config)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (FimeqError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
