"""Command-line entry point: ``petrismt <subcommand> ...``.

Exit status is 0 on success, 1 on domain errors (unsafe net, unparsable
model, ...) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

from . import bench
from .concurrency import chromatic_number, format_conc, net_relation, parse_conc
from .decompose import (
    assignment_from_model,
    emit_nupn,
    ffd_repair,
    find_min_units,
    oracle_decider,
    solver_decider,
    validate_partition,
)
from .encoder import (
    FRAGMENTS,
    EncodingConfig,
    encode,
    formula_stats,
    oracle_sat,
    parse_smtlib,
    print_smtlib,
)
from .errors import DomainError, InvalidPartition
from .net import numbering, parse_net
from .solver import SAT, load_solver_config, parse_model, run_many, run_solver


def _fragment(value: str) -> str:
    frag = value.upper()
    if frag not in FRAGMENTS:
        raise argparse.ArgumentTypeError(
            f"unknown fragment {value!r} (choose from {', '.join(f.lower() for f in FRAGMENTS)})"
        )
    return frag


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _load_instance(args):
    path = Path(args.net)
    net = parse_net(path.read_text(encoding="utf-8"), default_name=path.stem)
    if getattr(args, "conc", None):
        rel = parse_conc(Path(args.conc).read_text(encoding="utf-8"), net.places)
    else:
        rel = net_relation(net, args.state_limit)
    return net, rel, numbering(net)


def _emit(text: str, out: str | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    if target.is_dir() or out.endswith(("/", "\\")):
        target.mkdir(parents=True, exist_ok=True)
        target = target / name
    target.write_text(text, encoding="utf-8")
    print(target)


def cmd_relation(args) -> int:
    net, rel, num = _load_instance(args)
    _emit(format_conc(rel, num), args.out, f"{net.name}.conc")
    return 0


def cmd_encode(args) -> int:
    net, rel, num = _load_instance(args)
    if args.min_units:
        units = find_min_units(net.places, rel, oracle_decider(net.places, rel, num, args.fragment))
    elif args.units is None:
        raise _UsageError("encode needs --units N or --min-units")
    else:
        units = args.units
    cfg = EncodingConfig(args.fragment, units, emit_status_hint=args.status_hint)
    text = print_smtlib(encode(net.places, rel, num, cfg))
    out = args.out if args.out is not None else "."
    _emit(text, out if out != "-" else None, f"{net.name}_{cfg.fragment}_n{units}.smt2")
    return 0


def cmd_stats(args) -> int:
    columns = ["logic", "#variables", "card", "card_in", "card_out", "#asserts", "#ops"]
    print("\t".join(["file", *columns]))
    for name in args.files:
        row = formula_stats(parse_smtlib(Path(name).read_text(encoding="utf-8"))).row()
        print("\t".join([name, *(row[c] for c in columns)]))
    return 0


def cmd_solve(args) -> int:
    specs = load_solver_config(args.solvers)
    for run in run_many(specs, args.files, jobs=args.jobs):
        print(f"{run.path}\t{run.solver}\t{run.status}\t{run.wall_time:.3f}")
    return 0


def cmd_decompose(args) -> int:
    net, rel, num = _load_instance(args)
    cfg = EncodingConfig(args.fragment, args.units)
    script = encode(net.places, rel, num, cfg)
    if args.model:
        raw = Path(args.model).read_text(encoding="utf-8")
    elif args.solvers:
        spec = next((s for s in load_solver_config(args.solvers) if s.produces_models), None)
        if spec is None:
            raise _UsageError("no solver in the config has produces_models set")
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / f"{net.name}.smt2"
            path.write_text(print_smtlib(script))
            run = run_solver(spec, path)
        if run.status != SAT:
            print(f"solver {spec.name} answered {run.status}; no decomposition", file=sys.stderr)
            return 1
        raw = run.raw_model
    else:
        raise _UsageError("decompose needs --model FILE or --solvers FILE")
    model = parse_model(raw, cfg, script, net.places, num)
    part = ffd_repair(assignment_from_model(model, cfg, num), rel, num)
    problems = validate_partition(part, rel, cfg.num_units, net.places)
    if problems:
        raise InvalidPartition("; ".join(map(str, problems)))
    _emit(emit_nupn(part, net, rel, cfg.num_units), args.out, f"{net.name}.nupn")
    return 0


def cmd_min_units(args) -> int:
    net, rel, num = _load_instance(args)
    if args.solvers:
        spec = load_solver_config(args.solvers)[0]
        with tempfile.TemporaryDirectory() as tmp:
            n = find_min_units(
                net.places, rel, solver_decider(net.places, rel, num, args.fragment, spec, tmp)
            )
    else:
        n = find_min_units(net.places, rel, oracle_decider(net.places, rel, num, args.fragment))
    if args.check:
        chi = chromatic_number(net.places, rel)
        if chi != n:
            print(f"mismatch: search found {n}, chromatic number is {chi}", file=sys.stderr)
            return 1
    print(n)
    return 0


def cmd_select(args) -> int:
    records, rejected = bench.read_records(Path(args.records).read_text(encoding="utf-8"))
    selections = bench.select_all(records, args.target)
    _emit(bench.format_selection(selections), args.out, "selection.csv")
    for sel in selections:
        print(sel.summary(), file=sys.stderr if args.out is None else sys.stdout)
    if rejected:
        print(f"rejected {len(rejected)} formulas with inconsistent records", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    net, rel, num = _load_instance(args)
    print(oracle_sat(net.places, rel, num, EncodingConfig(args.fragment, args.units)))
    return 0


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="petrismt",
        description="Encode safe Petri net decomposition as SMT, solve it, and curate benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def net_args(p):
        p.add_argument("net", help=".pnet file")
        p.add_argument("--conc", help="read the concurrency relation from a .conc file")
        p.add_argument("--state-limit", type=_positive, default=1_000_000)

    p = sub.add_parser("relation", help="write the concurrency relation (.conc)")
    net_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_relation)

    p = sub.add_parser("encode", help="write an SMT-LIB formula")
    net_args(p)
    p.add_argument("--fragment", type=_fragment, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--units", type=_positive)
    group.add_argument("--min-units", action="store_true")
    p.add_argument("--status-hint", action="store_true")
    p.add_argument("--out", help="output directory or file ('-' for stdout); default '.'")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("stats", help="column metrics of .smt2 files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("solve", help="run configured solvers on .smt2 files")
    p.add_argument("files", nargs="+")
    p.add_argument("--solvers", required=True)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decompose", help="turn a model into a validated flat NUPN")
    net_args(p)
    p.add_argument("--fragment", type=_fragment, required=True)
    p.add_argument("--units", type=_positive, required=True)
    p.add_argument("--model", help="solver get-model output")
    p.add_argument("--solvers", help="solver config; the first model-producing solver is used")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("min-units", help="smallest satisfiable number of units")
    net_args(p)
    p.add_argument("--fragment", type=_fragment, default="QF_DT")
    p.add_argument("--solvers", help="use the first configured solver instead of the oracle")
    p.add_argument("--check", action="store_true", help="compare with the exact chromatic number")
    p.set_defaults(func=cmd_min_units)

    p = sub.add_parser("select", help="pick benchmark families from timing records")
    p.add_argument("records")
    p.add_argument("--target", type=_positive, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("oracle", help="decide satisfiability by exhaustive search")
    net_args(p)
    p.add_argument("--units", type=_positive, required=True)
    p.add_argument("--fragment", type=_fragment, default="QF_DT")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except (DomainError, ValueError, OSError) as exc:
        print(f"petrismt: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
