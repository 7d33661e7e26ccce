"""Command-line front end.

Subcommands: encode, solve, verify-n3, oracle-check, remark1-check, stats,
decode-model. The solve command prints SAT-competition style output
('s <VERDICT>' and 'v' model lines) and uses the matching exit codes:
0 for UNSAT, 10 for SAT, 20 for UNKNOWN.
"""

import argparse
import os
import sys

from . import campaigns, cnf, model, solver

EXIT_UNSAT = 0
EXIT_SAT = 10
EXIT_UNKNOWN = 20


def _add_encode(sub):
    p = sub.add_parser("encode", help="write a formula as DIMACS CNF plus a variable-map sidecar")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", choices=("F", "Fprime"), default="F")
    p.add_argument("--sym", choices=("on", "off"), default="on",
                   help="include the symmetry-breaking unit clauses (default on)")
    p.add_argument("--output", help="output path (default: <variant>_n<n>.cnf)")
    p.add_argument("--stats-only", action="store_true",
                   help="print the closed-form sizes without writing anything")
    return p


def _cmd_encode(args) -> int:
    n = args.n
    symmetry = args.sym == "on"
    # the extra unit placing a_2 ahead of a_1 in c_1's row is justified only
    # while every smaller size is known to admit a stable matching
    include_c1 = symmetry and n <= 6
    stats = cnf.predict_sizes(n, args.variant, include_c1, symmetry)
    if args.stats_only:
        print("\n".join(stats.lines()))
        return 0
    out = args.output or f"{args.variant.lower()}_n{n}.cnf"
    map_path = out + ".map"
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fp:
            cnf.stream_dimacs(fp, n, args.variant, include_c1, symmetry)
        with open(map_path, "w", encoding="utf-8", newline="\n") as fp:
            cnf.write_varmap(fp, n, args.variant)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print("\n".join(stats.lines()))
    print(f"dimacs: {out}")
    print(f"varmap: {map_path}")
    return 0


def _add_solve(sub):
    p = sub.add_parser("solve", help="decide a DIMACS file and report the verdict")
    p.add_argument("input")
    p.add_argument("--engine", choices=("internal", "external"), default="internal")
    p.add_argument("--solver-cmd", help="external command template containing {file}")
    p.add_argument("--timeout", type=float, help="wall-clock budget in seconds")
    p.add_argument("--max-conflicts", type=int, help="conflict budget for the internal engine")
    p.add_argument("--output", help="write the model (and decoded instance) here on SAT")
    return p


def _model_lines(model_vals, per_line=25):
    lits = [v if model_vals[v] else -v for v in range(1, len(model_vals))]
    lits.append(0)
    lines = []
    for i in range(0, len(lits), per_line):
        lines.append("v " + " ".join(map(str, lits[i:i + per_line])))
    return lines


def _cmd_solve(args) -> int:
    if args.engine == "external":
        if not args.solver_cmd:
            print("error: --engine external requires --solver-cmd", file=sys.stderr)
            return 2
        try:
            res = solver.solve_external(args.input, args.solver_cmd, args.timeout)
        except (solver.ExternalSolverError, OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    else:
        try:
            with open(args.input, "r", encoding="utf-8") as fp:
                formula = cnf.read_dimacs(fp)
        except (OSError, cnf.DimacsError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        res = solver.solve(formula, max_seconds=args.timeout,
                           max_conflicts=args.max_conflicts)
    st = res.stats
    print(f"c engine={args.engine} file={args.input}")
    print(f"c decisions={st.decisions} conflicts={st.conflicts} "
          f"propagations={st.propagations} restarts={st.restarts} "
          f"time={st.wall_time:.3f}s")
    if res.verdict == solver.SAT:
        print("s SATISFIABLE")
        lines = _model_lines(res.model)
        print("\n".join(lines))
        decoded = None
        map_path = args.input + ".map"
        if os.path.exists(map_path):
            try:
                with open(map_path, "r", encoding="utf-8") as fp:
                    vm = cnf.read_varmap(fp)
                decoded = cnf.decode_model(vm, res.model)
            except (cnf.DimacsError, cnf.DecodeError, ValueError) as exc:
                print(f"c instance decode failed: {exc}")
            if decoded is not None:
                for line in model.serialize_instance(decoded).rstrip("\n").splitlines():
                    print(f"c instance | {line}")
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fp:
                fp.write("\n".join(lines) + "\n")
            if decoded is not None:
                with open(args.output + ".instance", "w", encoding="utf-8", newline="\n") as fp:
                    fp.write(model.serialize_instance(decoded))
        return EXIT_SAT
    if res.verdict == solver.UNSAT:
        print("s UNSATISFIABLE")
        return EXIT_UNSAT
    print("s UNKNOWN")
    return EXIT_UNKNOWN


def _add_campaigns(sub):
    p = sub.add_parser("verify-n3", help="exhaustively sweep all canonical n=3 instances")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--min-required", type=int, default=2,
                   help="stable matchings required per instance (default 2)")

    p = sub.add_parser("oracle-check", help="cross-check brute force against the CNF semantics")
    p.add_argument("--n", type=int, default=3, choices=(3, 4))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("remark1-check", help="verify the mutual-top-triple reduction property")
    p.add_argument("--n", type=int, default=4, choices=(3, 4, 5))
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)


def _add_stats(sub):
    p = sub.add_parser("stats", help="print formula sizes and instance counts per n")
    p.add_argument("--n", required=True,
                   help="single size like 5 or an inclusive range like 3-6")
    p.add_argument("--variant", choices=("F", "Fprime"), default="F")


def _parse_n_range(text: str):
    if "-" in text:
        lo, hi = text.split("-", 1)
        values = list(range(int(lo), int(hi) + 1))
    else:
        values = [int(text)]
    if not values:
        raise ValueError(f"empty size range {text!r}")
    return values


def _add_decode(sub):
    p = sub.add_parser("decode-model", help="decode a model file into an instance via a variable map")
    p.add_argument("model_file")
    p.add_argument("--map", required=True, help="variable-map sidecar written by encode")
    p.add_argument("--output", help="write the instance text here instead of stdout")


def _cmd_decode(args) -> int:
    try:
        with open(args.map, "r", encoding="utf-8") as fp:
            vm = cnf.read_varmap(fp)
        with open(args.model_file, "r", encoding="utf-8") as fp:
            lits = solver.parse_model_literals(fp.read())
        mvals = {abs(l): l > 0 for l in lits}
        inst = cnf.decode_model(vm, mvals)
    except (OSError, ValueError, solver.ExternalSolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = model.serialize_instance(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(text)
    else:
        print(text, end="")
    return 0


def _report_exit(report) -> int:
    print(report.format(), end="")
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="c3dsm",
        description="Verification toolkit for three-dimensional stable matching "
                    "with cyclic preferences.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_encode(sub)
    _add_solve(sub)
    _add_campaigns(sub)
    _add_stats(sub)
    _add_decode(sub)
    args = parser.parse_args(argv)

    if args.command == "encode":
        return _cmd_encode(args)
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "verify-n3":
        return _report_exit(campaigns.verify_exhaustive(
            3, jobs=args.jobs, min_required=args.min_required))
    if args.command == "oracle-check":
        return _report_exit(campaigns.oracle_equivalence(
            args.n, trials=args.trials, seed=args.seed, jobs=args.jobs))
    if args.command == "remark1-check":
        return _report_exit(campaigns.remark1_check(
            args.n, trials=args.trials, seed=args.seed))
    if args.command == "stats":
        try:
            values = _parse_n_range(args.n)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(campaigns.stats_report(values, args.variant), end="")
        return 0
    if args.command == "decode-model":
        return _cmd_decode(args)
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
