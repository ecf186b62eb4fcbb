#!/usr/bin/env python3
"""
Command-line interface for the incompressible membrane simulator

    simulate     --config PATH --out DIR
    decompose    --mesh PATH --field PATH --out PATH [--strict]
    check        [--report PATH]
    convergence  --spec PATH [--report PATH]

Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 failed checks.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from ..config.scenario import load_convergence_spec, load_scenario
from ..config.settings import settings
from ..core import oracle
from ..core.decomposition import decompose
from ..core.engine import MembraneSimulator
from ..core.errors import ConfigError, MembraneError
from ..core.geometry import build_geometry
from ..core.models import CheckReport, SolverMethod
from ..core.operators import build_operators
from ..utils.fields import load_field
from ..utils.helpers import save_json_file
from ..utils.meshes import load_mesh

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_CHECKS_FAILED = 3


def _print_report(report: CheckReport):
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        detail = f"  ({check.detail})" if check.detail else ""
        print(f"[{status}] {check.name}: {check.measured:.3e} <= {check.tolerance:.1e}{detail}")
    print(f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed")


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.config)
    simulator = MembraneSimulator(scenario, base_dir=os.path.dirname(os.path.abspath(args.config)))
    summary = simulator.simulate(args.out)
    print(f"steps: {summary['steps']}  final time: {summary['final_time']:.6g}")
    print(f"relative energy drift: {summary['relative_energy_drift']:.3e}")
    print(f"max |rho - 1|: {summary['max_density_error']:.3e}")
    print(f"max |c(v)|: {summary['max_constraint_residual']:.3e}")
    print(f"wrote {summary['outputs']['trajectory']} and {summary['outputs']['diagnostics']}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    mesh = load_mesh(args.mesh)
    field = load_field(args.field, mesh.positions)
    cache = build_geometry(mesh)
    ops = build_operators(cache, mesh)
    result = decompose(ops, cache, field, method=SolverMethod(args.solver), strict=args.strict)
    save_json_file(args.out, result.to_dict())
    print(f"|c(X_mu)|: {result.constraint_residual_norm:.3e}  orthogonality: {result.orthogonality_defect:.3e}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_check(args) -> int:
    report = oracle.run_check_suite()
    _print_report(report)
    if args.report:
        save_json_file(args.report, report.to_dict())
    return EXIT_OK if report.passed else EXIT_CHECKS_FAILED


def cmd_convergence(args) -> int:
    spec = load_convergence_spec(args.spec)
    reports, checks = oracle.convergence_study(
        spec.radius, spec.modes, spec.resolutions, spec.expected_order, spec.order_tolerance
    )
    for report in reports:
        order = "exact" if report.order is None else f"{report.order:.3f}"
        print(f"k={report.mode}: errors {', '.join(f'{e:.3e}' for e in report.errors)}  order {order}")
    _print_report(checks)
    if args.report:
        payload = checks.to_dict()
        payload["studies"] = [report.to_dict() for report in reports]
        save_json_file(args.report, payload)
    return EXIT_OK if checks.passed else EXIT_CHECKS_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="membrane", description=settings.APP_DESCRIPTION)
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="logging level (default: %(default)s)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run a scenario file")
    simulate.add_argument("--config", required=True, help="scenario JSON")
    simulate.add_argument("--out", required=True, help="output directory")
    simulate.set_defaults(handler=cmd_simulate)

    decomposition = commands.add_parser("decompose", help="Helmholtz-Hodge decomposition of one field")
    decomposition.add_argument("--mesh", required=True, help="curve JSON or OBJ surface")
    decomposition.add_argument("--field", required=True, help="field JSON")
    decomposition.add_argument("--out", required=True, help="result JSON")
    decomposition.add_argument("--strict", action="store_true", help="require nonzero mean curvature at every vertex")
    decomposition.add_argument("--solver", choices=[m.value for m in SolverMethod], default=SolverMethod.AUTO.value)
    decomposition.set_defaults(handler=cmd_decompose)

    check = commands.add_parser("check", help="run the validation suite")
    check.add_argument("--report", help="JSON report path")
    check.set_defaults(handler=cmd_check)

    convergence = commands.add_parser("convergence", help="manufactured-solution resolution sweep")
    convergence.add_argument("--spec", required=True, help="convergence spec JSON")
    convergence.add_argument("--report", help="JSON report path")
    convergence.set_defaults(handler=cmd_convergence)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except MembraneError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
