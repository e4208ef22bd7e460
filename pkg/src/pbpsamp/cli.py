"""Command-line entry point.

Exit codes: 0 when every gate passes, 1 when a mathematical gate fails (a
counterexample was found), 2 on usage or config errors.  Every subcommand
accepts ``--seed``, ``--config`` (a JSON file whose keys supply option
defaults) and ``--out``.  The enumeration budget can be raised or lowered
through the ``PBPSAMP_ENUM_BUDGET`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .adversaries import (
    match_length,
    parity_adversary,
    prefix_adversary,
    prefix_length,
    prefix_match_adversary,
    witness_verify,
)
from .bp import accept_prob_bruteforce, accept_prob_exact, dumps_program, read_program, write_program
from .family import BUDGET_ENV, BudgetExceeded, FamilySpec
from .graphs import cycle_graph, graph_to_bp, random_consistent_graph, read_graph, walk_prob_matrix, write_graph
from .hitprog import (
    WidthLawViolation,
    build_hit_program,
    hit_approx_error,
    restriction_masks,
    verify_hitter_on_restrictions,
)
from .report import ExperimentReport, rational
from .samplers import (
    QuerySet,
    hitter_from_masks,
    hitter_from_sampler,
    minimal_hitter_search,
    random_query_set,
    read_query_set,
    verify_hitter,
    verify_sampler,
    write_query_set,
)
from .scenario import ConfigError, bundled_scenarios, load_config, run_scenario

EXIT_OK, EXIT_GATE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _family(text: str) -> FamilySpec:
    """``n,w[,accepts[,perm|general]]`` where accepts is ``all`` or an int."""
    parts = [p.strip() for p in text.split(",")]
    try:
        n, w = int(parts[0]), int(parts[1])
        accepts = parts[2] if len(parts) > 2 else "all"
        accepts = accepts if accepts == "all" else int(accepts)
        perm = parts[3] != "general" if len(parts) > 3 else True
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"family must look like 'n,w[,a|all[,perm|general]]', got {text!r}")
    return FamilySpec(n, w, 2, perm, "all", accepts)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _verdict_line(label: str, ok: bool, detail: str = "") -> str:
    return f"{label}: {'pass' if ok else 'FAIL'}{' ' + detail if detail else ''}"


# -- subcommands ---------------------------------------------------------------


def cmd_gen_graph(args) -> int:
    if args.kind == "cycle":
        G = cycle_graph(args.vertices)
    else:
        G = random_consistent_graph(args.vertices, args.d, args.seed)
    if args.out:
        write_graph(args.out, G)
    else:
        print(json.dumps(G.to_dict(), separators=(",", ":")))
    return EXIT_OK


def cmd_graph_to_bp(args) -> int:
    G = read_graph(args.graph)
    B = graph_to_bp(G, args.u, args.v, args.n)
    prov = {"kind": "graph-walk", "vertices": G.vertices, "u": args.u, "v": args.v}
    if args.out:
        write_program(args.out, B, prov)
    else:
        print(dumps_program(B, prov))
    if args.check:
        ok = walk_prob_matrix(G, args.u, args.v, args.n) == accept_prob_exact(B)
        print(_verdict_line("walk-matrix-vs-dp", ok), file=sys.stderr)
        return EXIT_OK if ok else EXIT_GATE
    return EXIT_OK


def cmd_exact_prob(args) -> int:
    B = read_program(args.program)
    p = accept_prob_exact(B)
    print(rational(p.value))
    if args.bruteforce:
        ok = accept_prob_bruteforce(B) == p
        print(_verdict_line("dp-vs-enumeration", ok), file=sys.stderr)
        return EXIT_OK if ok else EXIT_GATE
    return EXIT_OK


def cmd_build_hitter(args) -> int:
    prov: dict = {"method": args.method, "seed": args.seed}
    if args.method == "random":
        if args.n is None or args.size is None:
            raise UsageError("--method random needs --n and --size")
        H = random_query_set(args.n, 2, args.size, args.seed)
    elif args.method == "full":
        if args.n is None:
            raise UsageError("--method full needs --n")
        H = QuerySet.full_cube(args.n)
    elif args.method == "from-sampler":
        if not args.sampler:
            raise UsageError("--method from-sampler needs --sampler")
        H = hitter_from_sampler(read_query_set(args.sampler))
    elif args.programs:
        programs = [read_program(p) for p in args.programs]
        masks = [m for B in programs for _, m in restriction_masks(B, args.epsilon)]
        H = hitter_from_masks(masks, programs[0].n, programs[0].d).hitter
        prov["targets"] = list(args.programs)
    elif args.family:
        res = minimal_hitter_search(args.family, args.epsilon, exact=args.minimal)
        H = res.hitter
        prov.update(family=args.family.__dict__, minimal=res.minimal, greedy_size=res.greedy_size)
    else:
        raise UsageError("--method greedy needs --program or --family")
    if args.out:
        write_query_set(args.out, H, "hitter", args.epsilon, prov)
    else:
        sys.stdout.write("".join(f"{''.join(map(str, x))}\n" for x in H))
    print(f"hitter size {len(H)} digest {H.digest()}", file=sys.stderr)
    return EXIT_OK


def cmd_hit_program(args) -> int:
    B = read_program(args.program)
    H = read_query_set(args.hitter, B.n, B.d)
    hp = build_hit_program(B, H)
    prov = {"kind": "hit-program", "hitter": H.digest(), "pad": hp.pad_size}
    text = dumps_program(hp.explicit_bp, prov) + "\n"
    _emit(text, args.out)
    if args.state_map:
        Path(args.state_map).write_text(hp.state_map_csv())
    err = hit_approx_error(B, H, hp)
    print(f"width {hp.width} (bound {len(H) * (B.n + 2) * B.a}); approx error {rational(err)}", file=sys.stderr)
    return EXIT_OK if hp.width_law_holds() else EXIT_GATE


def cmd_adversary(args) -> int:
    H = read_query_set(args.hitter)
    if args.kind == "parity":
        B, bound, params = parity_adversary(H), Fraction(1, 2), {}
    elif args.kind == "prefix":
        if args.epsilon is None:
            raise UsageError("prefix adversary needs --epsilon")
        try:
            l = prefix_length(args.a, args.epsilon)
        except ValueError as exc:
            raise UsageError(str(exc))
        B = prefix_adversary(H, args.a, args.epsilon)
        bound = args.a * Fraction(1, 2 ** min(l, H.n))
        params = {"a": args.a, "epsilon": rational(args.epsilon), "l": l}
    else:
        if args.epsilon is None:
            raise UsageError("prefix-match adversary needs --epsilon")
        try:
            l = match_length(args.epsilon)
        except ValueError as exc:
            raise UsageError(str(exc))
        B = prefix_match_adversary(H, args.epsilon)
        bound = Fraction(1, 2 ** min(l, H.n))
        params = {"epsilon": rational(args.epsilon), "l": l}
    if B is None:
        print(json.dumps({"witness": None, "kind": args.kind, "hitter": H.digest(), **params}))
        return EXIT_OK
    verdict = witness_verify(B, H, bound)
    prov = {"kind": args.kind, "hitter": H.digest(), "parameters": params}
    summary = {
        "witness": args.out or "stdout",
        "rejects_hitter": verdict.rejects_hitter,
        "probability": rational(verdict.probability),
        "bound": rational(verdict.bound),
        "is_permutation": verdict.is_permutation,
        "width": verdict.width,
        "ok": verdict.ok,
    }
    if args.out:
        write_program(args.out, B, prov)
        Path(str(args.out) + ".verdict.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    else:
        print(dumps_program(B, prov))
    print(json.dumps(summary, sort_keys=True), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK if verdict.ok else EXIT_GATE


def cmd_sample(args) -> int:
    source = args.config or args.scenario
    if source is None:
        raise UsageError("sample needs --config or a scenario name")
    cfg = load_config(source)
    if args.seed is not None:
        cfg["seed"] = args.seed
    report = run_scenario(cfg)
    out = args.out or "reports"
    paths = report.write(out, cfg.get("name"), ndjson=args.ndjson)
    agg = report.aggregate
    print(f"run {report.run_id}: {'pass' if report.passed else 'FAIL'}")
    for k in sorted(agg):
        print(f"  {k}: {agg[k]}")
    for kind, p in sorted(paths.items()):
        print(f"  wrote {kind}: {p}")
    return EXIT_OK if report.passed else EXIT_GATE


def cmd_verify(args) -> int:
    Q = read_query_set(args.queries)
    if args.program:
        targets = [read_program(p) for p in args.program]
        if args.what == "hitter" and args.restrictions:
            results = [verify_hitter_on_restrictions(Q, B, args.epsilon) for B in targets]
            v = next((r for r in results if not r), results[0])
        elif args.what == "hitter":
            v = verify_hitter(Q, targets, args.epsilon)
        else:
            v = verify_sampler(Q, targets, args.epsilon)
    elif args.family:
        fn = verify_hitter if args.what == "hitter" else verify_sampler
        v = fn(Q, args.family, args.epsilon, seed=args.seed or 0)
    else:
        raise UsageError("verify needs --program or --family")
    print(_verdict_line(f"{args.what} at eps={rational(args.epsilon)}", v.ok, f"({v.coverage}, {v.checked} checked)"))
    if not v.ok:
        print(f"  counterexample: estimate {rational(v.estimate)} truth {rational(v.truth)}")
        if args.out and v.counterexample is not None:
            write_program(args.out, v.counterexample, {"kind": "counterexample", "queries": Q.digest()})
            print(f"  wrote {args.out}")
    return EXIT_OK if v.ok else EXIT_GATE


def cmd_report(args) -> int:
    report = ExperimentReport.read(args.report)
    if args.format == "csv":
        _emit(report.to_csv(), args.out)
    elif args.format == "ndjson":
        _emit(report.to_ndjson(), args.out)
    elif args.format == "json":
        _emit(report.to_json(), args.out)
    else:
        lines = [f"run {report.run_id} ({report.schema}): {'pass' if report.passed else 'FAIL'}"]
        lines += [f"  {k}: {report.aggregate[k]}" for k in sorted(report.aggregate)]
        lines.append(f"  rows: {len(report.rows)}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_GATE


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master RNG seed")
    common.add_argument("--config", help="JSON file; its keys provide option defaults")
    common.add_argument("--out", help="output file or directory")

    p = argparse.ArgumentParser(
        prog="pbpsamp",
        description="Deterministic samplers for permutation branching programs.",
        epilog=f"Set {BUDGET_ENV} to change the exhaustive enumeration budget.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", metavar="command")

    s = sub.add_parser("gen-graph", parents=[common], help="generate a consistently labelled digraph")
    s.add_argument("--vertices", type=int, required=True)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--kind", choices=("random", "cycle"), default="random")
    s.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("graph-to-bp", parents=[common], help="walk program of a graph")
    s.add_argument("graph")
    s.add_argument("--u", type=int, default=0)
    s.add_argument("--v", type=int, default=0)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--check", action="store_true", help="cross-check against the matrix-power oracle")
    s.set_defaults(func=cmd_graph_to_bp)

    s = sub.add_parser("exact-prob", parents=[common], help="exact acceptance probability")
    s.add_argument("program")
    s.add_argument("--bruteforce", action="store_true", help="also compare with input enumeration")
    s.set_defaults(func=cmd_exact_prob)

    s = sub.add_parser("build-hitter", parents=[common], help="build a hitting set")
    s.add_argument("--method", choices=("greedy", "random", "full", "from-sampler"), default="greedy")
    s.add_argument("--program", dest="programs", action="append", help="target program (repeatable)")
    s.add_argument("--family", type=_family, help="n,w[,a|all[,perm|general]]")
    s.add_argument("--epsilon", type=_frac, default=Fraction(1, 4), help="hitter quality")
    s.add_argument("--minimal", action="store_true", help="try an exact minimum after greedy")
    s.add_argument("--n", type=int)
    s.add_argument("--size", type=int)
    s.add_argument("--sampler", help="query-set file of an averaging sampler")
    s.set_defaults(func=cmd_build_hitter)

    s = sub.add_parser("hit-program", parents=[common], help="explicit induced hit program")
    s.add_argument("program")
    s.add_argument("--hitter", required=True)
    s.add_argument("--state-map", help="write the state-map CSV here")
    s.set_defaults(func=cmd_hit_program)

    s = sub.add_parser("adversary", parents=[common], help="witness program missed by a hitter")
    s.add_argument("kind", choices=("parity", "prefix", "prefix-match"))
    s.add_argument("--hitter", required=True)
    s.add_argument("--a", type=int, default=1)
    s.add_argument("--epsilon", type=_frac)
    s.set_defaults(func=cmd_adversary)

    s = sub.add_parser("sample", parents=[common], help="run a scenario and write its report")
    s.add_argument("scenario", nargs="?", help=f"bundled scenario ({', '.join(bundled_scenarios())}) or config path")
    s.add_argument("--ndjson", action="store_true", help="also stream rows as NDJSON")
    s.set_defaults(func=cmd_sample, _config_is_input=True)

    s = sub.add_parser("verify", parents=[common], help="verify a query set as sampler or hitter")
    s.add_argument("what", choices=("sampler", "hitter"))
    s.add_argument("--queries", required=True)
    s.add_argument("--program", action="append")
    s.add_argument("--family", type=_family)
    s.add_argument("--epsilon", type=_frac, required=True)
    s.add_argument("--restrictions", action="store_true", help="hitter: check the programs' single-accept restrictions")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("report", parents=[common], help="summarize or re-emit a report")
    s.add_argument("report")
    s.add_argument("--format", choices=("summary", "csv", "ndjson", "json"), default="summary")
    s.set_defaults(func=cmd_report)
    return p


def _apply_config_defaults(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        raise UsageError("a command is required")
    if args.config and not getattr(args, "_config_is_input", False):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in subparser._actions}
        unknown = sorted(k for k in cfg if k.replace("-", "_") not in known)
        if unknown:
            raise ConfigError(f"unknown config keys for {args.command}: {unknown}")
        defaults = {}
        for k, v in cfg.items():
            action = known[k.replace("-", "_")]
            if action.type and isinstance(v, str):
                v = action.type(v)
            defaults[action.dest] = v
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config_defaults(parser, argv)
        return args.func(args)
    except SystemExit as exc:
        # argparse reports usage errors with exit status 2
        return int(exc.code or 0)
    except WidthLawViolation as exc:
        print(f"gate failed: {exc}", file=sys.stderr)
        return EXIT_GATE
    except BudgetExceeded as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ConfigError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
