"""
The biham command line: verify, evolve and reduce.

Exit codes: 0 on success, 1 when an identity fails or a point leaves the
regular set, 2 on configuration or input errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, TextIO

import numpy as np

from ..dynamics.hierarchy import Trajectory, integrate_reduced
from ..dynamics.reduction import ReducedPoint, project
from ..errors import BihamError, ConfigurationError, InvarianceViolatedError, NotRegularError
from ..linalg.codec import dumps, encode_complex, encode_matrix, load_matrices
from ..monitoring.metrics import get_metrics_collector
from ..poisson.observables import Observable, PhasePoint, parse_observable
from ..verify.suites import run_suites
from .config import RunConfig, SliceChoice, Suite, resolve_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, default=None,
                        help='JSON file with default settings')
    common.add_argument('--n', type=int, default=None,
                        help='Matrix size (default: 3)')
    common.add_argument('--seed', type=int, default=None,
                        help='Root seed of all random trials (default: 42)')
    common.add_argument('--trials', type=int, default=None,
                        help='Random trials per identity (default: 100)')
    common.add_argument('--tol', type=float, default=None,
                        help='Tolerance of floating-point identities (default: 1e-10)')
    common.add_argument('--tol-reg', type=float, default=None,
                        help='Minimal eigenvalue gap of regular elements (default: 1e-8)')
    common.add_argument('--fd-step', type=float, default=None,
                        help='Finite-difference step (default: 1e-5 * (1 + |p|))')
    common.add_argument('--out', type=Path, default=None,
                        help='Output file (default: stdout)')
    common.add_argument('--format', type=str, default=None,
                        help='Output format (default: json)')
    common.add_argument('--log-level', type=str, default=None,
                        help='Logging level (default: INFO)')
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the verify, evolve and reduce subcommands."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog='biham',
        description='Numerical verification of the bi-Hamiltonian holomorphic spin '
                    'Sutherland hierarchy')
    commands = parser.add_subparsers(dest='command', required=True)

    verify = commands.add_parser('verify', parents=[common],
                                 help='Run verification suites and print a JSON report')
    verify.add_argument('--suite', type=str, choices=[s.value for s in Suite], default=None,
                        help='Suite to run (default: all)')
    verify.add_argument('--slice', type=str, choices=[s.value for s in SliceChoice],
                        default=None, help='Real slice for the realforms suite (default: both)')
    verify.add_argument('--radius', type=float, default=None,
                        help='Sampling radius around the identity on the double (default: 0.2)')
    verify.add_argument('--workers', type=int, default=None,
                        help='Worker processes (default: 1)')
    verify.add_argument('--max-triples', type=int, default=None,
                        help='Check a seeded subset of Jacobi triples (default: all)')
    verify.add_argument('--metrics-file', type=Path, default=None,
                        help='Write Prometheus metrics to this file (default: none)')

    evolve = commands.add_parser('evolve', parents=[common],
                                 help='Integrate a reduced flow and write a JSON-lines trajectory')
    evolve.add_argument('--initial', type=Path, default=None,
                        help='Initial point file with {"g", "L"} or {"Q", "L"}')
    evolve.add_argument('--m', type=int, default=None,
                        help='Hamiltonian index of the flow (default: 1)')
    evolve.add_argument('--z-end', type=str, default=None,
                        help='Flow endpoint as RE or RE,IM (default: 0.5)')
    evolve.add_argument('--steps', type=int, default=None,
                        help='Integrator steps (default: 1000)')
    evolve.add_argument('--observable', dest='observables', action='append', default=None,
                        help='Invariant observable to record, e.g. glGl (repeatable)')

    reduce = commands.add_parser('reduce', parents=[common],
                                 help='Project a point onto sorted diagonal g')
    reduce.add_argument('--point', type=Path, default=None,
                        help='Point file with {"g", "L"}')
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                        format=LOG_FORMAT, stream=sys.stderr, force=True)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    logger.info(f"Wrote {out}")


def artifact_path(out: Optional[Path], suffix: str) -> Path:
    """Certificates go next to the report as <stem>-<suffix>."""
    if out is None:
        return Path(f"biham-{suffix}")
    return out.parent / f"{out.stem}-{suffix}"


def _read_point(path: Optional[Path], what: str) -> Dict[str, np.ndarray]:
    if path is None:
        raise ConfigurationError(f"{what} needs a point file")
    try:
        matrices = load_matrices(path)
    except (OSError, ValueError) as e:
        raise ConfigurationError(f"Cannot read point file {path}: {e}") from e
    if "L" not in matrices or not ({"g", "Q"} & set(matrices)):
        raise ConfigurationError(f"{path} must hold L and one of g, Q")
    return matrices


def load_reduced_point(path: Optional[Path], tol_reg: float) -> ReducedPoint:
    """
    Initial point of a reduced flow.

    A {"Q", "L"} file is taken as it is; a {"g", "L"} file is projected first.
    """
    matrices = _read_point(path, "evolve")
    if "Q" in matrices:
        try:
            return ReducedPoint(matrices["Q"], matrices["L"], tol_reg)
        except ValueError as e:
            raise ConfigurationError(f"Invalid reduced point in {path}: {e}") from e
    rp, _ = project(PhasePoint(matrices["g"], matrices["L"]), tol_reg)
    return rp


def cmd_verify(config: RunConfig) -> int:
    """Run the configured suites; exit 0 iff every identity passed."""
    report, artifacts = run_suites(config)
    _emit(report.to_json(), config.out)
    for suffix, text in sorted(artifacts.items()):
        path = artifact_path(config.out, suffix)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info(f"Certificate written to {path}")
    if config.metrics_file is not None:
        get_metrics_collector().write(config.metrics_file)

    failed = [f"{r.tag} ({r.identity})" for r in report.results if not r.passed]
    if failed:
        logger.error(f"{len(failed)} identities failed: {', '.join(failed)}")
        return EXIT_FAILED
    logger.info(f"All {len(report.results)} identities passed")
    return EXIT_OK


def _trajectory_lines(traj: Trajectory, labels: List[str]) -> List[str]:
    lines = []
    for s in traj.samples:
        record = {
            "z": encode_complex(s.z),
            "Q": [encode_complex(q) for q in s.point.q],
            "L": encode_matrix(s.point.L),
            "invariants": [encode_complex(v) for v in s.invariants],
            "observables": {label: encode_complex(v) for label, v in zip(labels, s.observables)},
        }
        lines.append(dumps(record))
    return lines


def cmd_evolve(config: RunConfig, stream: Optional[TextIO] = None) -> int:
    """
    Integrate the reduced flow of h_m and write the trajectory as JSON lines.

    The summary {steps, z_end, invariant_drift, hermiticity_drift} is printed
    as the last line on stdout; hermiticity_drift is null unless the initial
    L is Hermitian.
    """
    stream = stream or sys.stdout
    rp0 = load_reduced_point(config.initial, config.tol_reg)
    try:
        observables: List[Observable] = [parse_observable(t) for t in config.observables]
    except ValueError as e:
        raise ConfigurationError(f"Bad observable: {e}") from e

    try:
        traj = integrate_reduced(rp0, config.m, config.z_end_complex, config.steps,
                                 observables)
    except InvarianceViolatedError as e:
        raise ConfigurationError(str(e)) from e
    get_metrics_collector().record_integration(config.m, config.steps)

    lines = _trajectory_lines(traj, [obs.label for obs in observables])
    summary = {
        "steps": config.steps,
        "z_end": encode_complex(config.z_end_complex),
        "invariant_drift": traj.invariant_drift(),
        "hermiticity_drift": traj.hermiticity_drift() if traj.starts_hermitian() else None,
    }
    if config.out is not None:
        _emit("\n".join(lines) + "\n", config.out)
    else:
        stream.write("\n".join(lines) + "\n")
    stream.write(json.dumps(summary) + "\n")
    stream.flush()
    logger.info(f"Trajectory of h_{config.m} to z={config.z_end_complex} "
                f"with drift {summary['invariant_drift']:.3e}")
    return EXIT_OK


def cmd_reduce(config: RunConfig) -> int:
    """Project a point and print {"Q", "L", "eta"}."""
    matrices = _read_point(config.point, "reduce")
    g = matrices["g"] if "g" in matrices else matrices["Q"]
    rp, eta = project(PhasePoint(g, matrices["L"]), config.tol_reg)
    payload = {"Q": encode_matrix(rp.Q), "L": encode_matrix(rp.L), "eta": encode_matrix(eta)}
    _emit(json.dumps(payload) + "\n", config.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'verify': cmd_verify,
    'evolve': cmd_evolve,
    'reduce': cmd_reduce,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, resolve the configuration and run one command."""
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ('command', 'config')}

    try:
        config = resolve_config(flags, args.config)
    except ConfigurationError as e:
        configure_logging('INFO')
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    configure_logging(config.log_level)

    try:
        return COMMANDS[args.command](config)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except NotRegularError as e:
        where = f" at z={e.z}" if e.z is not None else ""
        logger.error(f"Point is not regular{where}: {e}")
        return EXIT_FAILED
    except BihamError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> None:
    """Console entry point."""
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
