"""Command line front end.

Exit codes: 0 success or conformance, 1 unreadable or invalid input,
2 generation budget exceeded, 3 test failure or violation, 4 SUT protocol
error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from .conformance import AlphabetMismatch, check_strong_reduction
from .distinguish import DEFAULT_CLIQUE_CAP, RdVariant, collect_rd_sets, compute_sd_family
from .fsm import FsmError, export_dot, format_trace, load_fsm
from .generate import (
    DEFAULT_MAX_TRACES,
    POLICIES,
    BudgetExceeded,
    compute_traversal,
    generate_test_suite,
    parse_suite,
)
from .harness import FairnessConfig, HarnessError, ProcessSut, format_log, run_suite, serve_stream
from .reach import compute_state_cover

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_FAIL = 3
EXIT_PROTOCOL = 4
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _add_model_options(p, variant=True):
    if variant:
        p.add_argument("--rd", choices=[v.value for v in RdVariant], default="rd1",
                       help="r-distinguishability variant (default: rd1)")
    p.add_argument("--prune", action="store_true", help="drop unreachable states instead of rejecting the model")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="strongred", description="Complete test suites for strong reduction of FSMs.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate an m-complete test suite")
    g.add_argument("model", help="FSM file")
    g.add_argument("-sr", "--sr", action="store_true", help="strong reduction (the only supported relation)")
    g.add_argument("-a", "--additional-states", dest="a", type=_non_negative, default=0,
                   help="extra states an implementation may have; m = model states + a")
    g.add_argument("-o", "--output", help="write the suite here instead of standard output")
    g.add_argument("--max-traces", type=_positive, default=DEFAULT_MAX_TRACES,
                   help="abort once traversal holds this many traces")
    g.add_argument("--clique-cap", type=_positive, default=DEFAULT_CLIQUE_CAP)
    g.add_argument("--policy", choices=POLICIES, default=POLICIES[0])
    g.add_argument("--json", action="store_true", help="print statistics as JSON")
    _add_model_options(g)

    c = sub.add_parser("check", help="decide whether IMPL is a strong reduction of MODEL")
    c.add_argument("impl")
    c.add_argument("model")
    c.add_argument("--json", action="store_true")
    _add_model_options(c, variant=False)

    r = sub.add_parser(
        "run",
        help="execute a suite against a SUT process",
        usage="strongred run [options] SUITE MODEL -- SUT_COMMAND [ARG ...]",
    )
    r.add_argument("suite")
    r.add_argument("model")
    r.add_argument("-k", "--fairness", dest="k", type=_positive, default=50, help="repetitions per test case")
    r.add_argument("--timeout", type=float, default=10.0, help="seconds to wait for each SUT reply")
    r.add_argument("--log", help="execution log path (a temporary file on failure otherwise)")
    r.add_argument("--json", action="store_true")
    _add_model_options(r, variant=False)

    i = sub.add_parser("inspect", help="print cover, distinguishing sets, terminating sets and traversal statistics")
    i.add_argument("model")
    i.add_argument("-a", "--additional-states", dest="a", type=_non_negative, default=0)
    i.add_argument("--section", choices=("all", "cover", "table", "sd", "traversal", "dot"), default="all")
    i.add_argument("--clique-cap", type=_positive, default=DEFAULT_CLIQUE_CAP)
    _add_model_options(i)

    s = sub.add_parser("serve", help="serve an FSM over the SUT protocol on standard streams")
    s.add_argument("model")
    s.add_argument("--seed", type=int, default=0)
    _add_model_options(s, variant=False)
    return parser


def _emit(text: str, path=None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    model = load_fsm(args.model, prune=args.prune)
    m = len(model) + args.a
    try:
        suite = generate_test_suite(model, m, args.rd, args.max_traces, args.clique_cap, args.policy)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"model": model.name, "m": m, "variant": args.rd, "aborted": True, **exc.stats}))
        return EXIT_BUDGET
    _emit(suite.format(), args.output)
    stats_out = sys.stdout if args.output else sys.stderr
    if args.json:
        record = {
            "model": model.name, "m": m, "variant": suite.variant, "policy": suite.policy,
            "cases": len(suite), "inputs": suite.total_inputs, **suite.stats,
        }
        print(json.dumps(record, sort_keys=True), file=stats_out)
    else:
        print(suite.stats_line(), file=stats_out)
    return EXIT_OK


def cmd_check(args) -> int:
    impl = load_fsm(args.impl, prune=args.prune)
    model = load_fsm(args.model, prune=args.prune)
    verdict = check_strong_reduction(impl, model)
    if args.json:
        print(json.dumps({
            "conforms": verdict.conforms,
            "kind": None if verdict.conforms else str(verdict.kind),
            "witness": None if verdict.conforms else format_trace(verdict.witness),
        }))
    else:
        print(verdict.describe())
    return EXIT_OK if verdict.conforms else EXIT_FAIL


def cmd_run(args) -> int:
    argv = args.sut
    if not argv:
        raise _UsageError("run needs a SUT command after --")
    model = load_fsm(args.model, prune=args.prune)
    cases = parse_suite(Path(args.suite).read_text(encoding="utf-8"))
    try:
        with ProcessSut(argv, timeout=args.timeout) as sut:
            verdict, log = run_suite(sut, model, cases, FairnessConfig(args.k))
    except HarnessError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except OSError as exc:
        print(f"cannot start SUT: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    log_path = args.log
    if log_path is None and not verdict.conforms:
        fd, log_path = tempfile.mkstemp(prefix="strongred-", suffix=".log")
        with open(fd, "w", closefd=True):
            pass
    if log_path:
        Path(log_path).write_text(format_log(log), encoding="utf-8")
    if verdict.conforms:
        line = f"PASS runs={len(log.runs)}"
    else:
        line = f"FAIL {verdict.kind}: {format_trace(verdict.witness)}"
    if args.json:
        print(json.dumps({
            "pass": verdict.conforms, "runs": len(log.runs), "log": log_path,
            "kind": None if verdict.conforms else str(verdict.kind),
            "witness": None if verdict.conforms else format_trace(verdict.witness),
        }))
    else:
        print(line)
        if log_path:
            print(f"log: {log_path}")
    return EXIT_OK if verdict.conforms else EXIT_FAIL


def inspect_report(model, variant="rd1", a=0, section="all", clique_cap=DEFAULT_CLIQUE_CAP) -> str:
    parts = []
    want = lambda name: section in ("all", name)
    cover = compute_state_cover(model)
    if want("cover"):
        parts.append("# state cover\n" + cover.format())
    table = collect_rd_sets(model, variant)
    if want("table"):
        parts.append(f"# r-distinguishing sets ({variant})\n" + table.format(model))
    sd = compute_sd_family(model, table, cap=clique_cap)
    if want("sd"):
        note = "" if sd.complete else " (covering subfamily)"
        parts.append(f"# maximal r-distinguishable sets{note}\n" + sd.format(model))
    if want("traversal"):
        m = len(model) + a
        lines = [f"# traversal sets (m={m})"]
        for s in cover.states:
            tr, terminated = compute_traversal(model, cover, sd, s, m)
            maximal = tr.maximal()
            longest = max((len(x) for x in maximal), default=0)
            lines.append(f"{s}\tsequences={len(maximal)}\tterminated={len(terminated)}\tmax_length={longest}")
        parts.append("\n".join(lines) + "\n")
    if want("dot"):
        parts.append(export_dot(model))
    return "\n".join(parts)


def cmd_inspect(args) -> int:
    model = load_fsm(args.model, prune=args.prune)
    sys.stdout.write(inspect_report(model, args.rd, args.a, args.section, args.clique_cap))
    return EXIT_OK


def cmd_serve(args) -> int:
    model = load_fsm(args.model, prune=args.prune)
    serve_stream(model, args.seed, sys.stdin, sys.stdout)
    return EXIT_OK


class _UsageError(Exception):
    pass


COMMANDS = {
    "generate": cmd_generate,
    "check": cmd_check,
    "run": cmd_run,
    "inspect": cmd_inspect,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # everything after the first "--" is the SUT command line
    sut = []
    if "--" in argv:
        cut = argv.index("--")
        argv, sut = argv[:cut], argv[cut + 1:]
    args = parser.parse_args(argv)
    args.sut = sut
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"strongred: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FsmError, AlphabetMismatch, ValueError, OSError) as exc:
        print(f"strongred: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
