"""Command line interface: ``levy-opt <subcommand> <config.json> [options]``.

Exit codes: 0 success, 1 model validation failure, 2 numerical failure,
64 usage error.  Results go to stdout as CSV; with ``--out DIR`` a CSV file
and a JSON sidecar (full precision plus run metadata) are written instead.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from . import __version__
from .discrete import McConfig, QuadConfig, discrete_value_function, eval_gN, optimal_discrete
from .harness import (DEFAULT_GRID, ModelInvalid, csv_text, method_description, report_payload,
                      require_valid, run_convergence_study, run_metadata, run_property_checks,
                      write_outputs)
from .model import ModelError, load_model, validate_model
from .objective import ObjectiveDomainError, continuous_value
from .optimizer import UnboundedProblemError, optimal_continuous
from .wealth_sim import gaps_from, simulate_coupled_terminals

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 64

SOLVE_COLUMNS = ("constraint", "pi_star", "objective", "value", "boundary", "residual", "iterations")
DISCRETE_COLUMNS = ("N", "method", "pi_star", "objective", "objective_se", "value", "boundary",
                    "residual", "iterations")
VALIDATE_COLUMNS = ("assumption", "status", "message")
GAP_COLUMNS = ("pair", "estimate", "stderr")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _columns_help(cols: Sequence[str]) -> str:
    return "CSV columns: " + ",".join(cols)


def _add_method_args(p: argparse.ArgumentParser, default: str = "quad") -> None:
    p.add_argument("--method", choices=("mc", "quad"), default=default,
                   help=f"expectation method for g^N (default {default})")
    p.add_argument("--paths", type=int, default=100_000, help="Monte Carlo paths (default 100000)")
    p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    p.add_argument("--antithetic", action="store_true", help="antithetic Gaussian draws (mc only)")
    p.add_argument("--nodes", type=int, default=64, help="Gauss-Hermite nodes (default 64)")
    p.add_argument("--k-max", type=int, default=None, help="jump-count cutoff (default: from tail bound)")


def _method(args) -> McConfig | QuadConfig:
    if args.method == "mc":
        return McConfig(args.paths, args.seed, args.antithetic)
    return QuadConfig(args.k_max, args.nodes)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="levy-opt", description=__doc__.splitlines()[0],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"levy-opt {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check the model assumptions",
                       epilog=_columns_help(VALIDATE_COLUMNS))
    p.add_argument("config")
    p.add_argument("--out")

    p = sub.add_parser("solve", help="continuous-time optimal constant strategy",
                       epilog=_columns_help(SOLVE_COLUMNS))
    p.add_argument("config")
    p.add_argument("--constraint", choices=("unit", "none"), default="none")
    p.add_argument("--out")

    p = sub.add_parser("solve-discrete", help="N-period optimal strategy",
                       epilog=_columns_help(DISCRETE_COLUMNS))
    p.add_argument("config")
    p.add_argument("--N", type=int, required=True, dest="N")
    _add_method_args(p)
    p.add_argument("--out")

    p = sub.add_parser("converge", help="convergence study over a list of N",
                       epilog=_columns_help(("N", "pi_star", "objective", "value", "sup_gap",
                                             "value_gap", "l2_gap", "l2_gap_se"))
                       + "; last row N=inf holds the constrained continuous-time reference")
    p.add_argument("config")
    p.add_argument("--N-list", type=_int_list, required=True, dest="n_list")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID,
                   help=f"sup-norm grid {{0, 1/G, ..., 1}} (default G={DEFAULT_GRID})")
    _add_method_args(p)
    p.add_argument("--l2-paths", type=int, default=None,
                   help="paths for the L2 wealth gap (default: --paths); 0 disables it")
    p.add_argument("--out", required=True)

    p = sub.add_parser("properties", help="sign and monotonicity in p",
                       epilog=_columns_help(("p", "pi_star", "pi_star_N", "sign_check",
                                             "monotonicity_check")))
    p.add_argument("config")
    p.add_argument("--p-list", type=_float_list, required=True, dest="p_list")
    p.add_argument("--N", type=int, default=256, dest="N")
    _add_method_args(p)
    p.add_argument("--out")

    p = sub.add_parser("wealth-gap", help="coupled L2 gaps of terminal wealth",
                       epilog=_columns_help(GAP_COLUMNS)
                       + "; pairs product_euler, euler_exact, product_exact")
    p.add_argument("config")
    p.add_argument("--N", type=int, required=True, dest="N")
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--pi-d", type=float, default=None, help="discrete strategy (default pi*_N)")
    p.add_argument("--pi-c", type=float, default=None, help="continuous strategy (default pi*_C)")
    p.add_argument("--out")
    return parser


def _emit(args, stem: str, body: str, payload: dict) -> None:
    if getattr(args, "out", None):
        write_outputs(args.out, stem, body, payload)
    else:
        sys.stdout.write(body)


def _cmd_validate(args) -> int:
    model = load_model(args.config)
    report = validate_model(model)
    rows = [(name, "pass" if ok else "fail", msg) for name, ok, msg in report.checks]
    payload = run_metadata("validate", model, {"ok": report.ok,
                                               "checks": [dict(zip(VALIDATE_COLUMNS, r)) for r in rows]})
    _emit(args, "validate", csv_text(VALIDATE_COLUMNS, rows), payload)
    if not report.ok:
        for name, msg in report.failures:
            print(f"validation failed: {name}: {msg}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def _cmd_solve(args) -> int:
    model = load_model(args.config)
    require_valid(model)
    res = optimal_continuous(model, args.constraint)
    value = continuous_value(model, res.pi)
    row = (args.constraint, res.pi, res.value, value, res.boundary, res.residual, res.iterations)
    _emit(args, "solve", csv_text(SOLVE_COLUMNS, [row]),
          run_metadata("solve", model, {"result": dict(zip(SOLVE_COLUMNS, row))}))
    return EXIT_OK


def _cmd_solve_discrete(args) -> int:
    model = load_model(args.config)
    require_valid(model)
    method = _method(args)
    res = optimal_discrete(model, args.N, method)
    gv = eval_gN(model, args.N, res.pi, method)
    value = discrete_value_function(model, args.N, res.pi, method)
    row = (args.N, gv.method, res.pi, gv.value, gv.stderr, value, res.boundary, res.residual,
           res.iterations)
    _emit(args, "solve-discrete", csv_text(DISCRETE_COLUMNS, [row]),
          run_metadata("solve-discrete", model, {**method_description(method),
                                                  "result": dict(zip(DISCRETE_COLUMNS, row))}))
    return EXIT_OK


def _cmd_converge(args) -> int:
    model = load_model(args.config)
    method = _method(args)
    l2_paths = args.paths if args.l2_paths is None else args.l2_paths
    l2 = McConfig(l2_paths, args.seed) if l2_paths else None
    report = run_convergence_study(model, args.n_list, args.grid, method, l2)
    body = csv_text(report.COLUMNS, report.table())
    write_outputs(args.out, "converge", body, run_metadata("converge", model, report_payload(report)))
    return EXIT_OK


def _cmd_properties(args) -> int:
    model = load_model(args.config)
    require_valid(model)
    report = run_property_checks(model, args.p_list, args.N, _method(args))
    payload = run_metadata("properties", model, {"all_checks_pass": report.ok, **report_payload(report)})
    _emit(args, "properties", csv_text(report.COLUMNS, report.table()), payload)
    return EXIT_OK


def _cmd_wealth_gap(args) -> int:
    model = load_model(args.config)
    require_valid(model)
    pi_d = args.pi_d if args.pi_d is not None else optimal_discrete(model, args.N).pi
    pi_c = args.pi_c if args.pi_c is not None else optimal_continuous(model, "unit").pi
    sim = simulate_coupled_terminals(model, pi_d, pi_c, args.N, McConfig(args.paths, args.seed))
    scale = model.x0 ** 2
    gaps = gaps_from(sim)
    rows = [(name, est.estimate * scale, est.stderr * scale) for name, est in gaps.items()]
    payload = run_metadata("wealth-gap", model, {
        "N": args.N, "paths": args.paths, "seed": args.seed, "pi_d": pi_d, "pi_c": pi_c,
        "euler_nonpositive": sim.euler_nonpositive, "coupling_error": sim.coupling_error,
        "gaps": {name: {"estimate": e, "stderr": s} for name, e, s in rows},
    })
    _emit(args, "wealth-gap", csv_text(GAP_COLUMNS, rows), payload)
    return EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "solve": _cmd_solve,
    "solve-discrete": _cmd_solve_discrete,
    "converge": _cmd_converge,
    "properties": _cmd_properties,
    "wealth-gap": _cmd_wealth_gap,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ModelInvalid as exc:
        print(f"validation failed:\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UnboundedProblemError, ObjectiveDomainError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
