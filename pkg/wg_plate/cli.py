""" wg-plate command line driver """
# pylint: disable=too-many-instance-attributes

import argparse
import csv
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from matplotlib.tri import Triangulation

from . import __version__
from ._adaptivity import MODES, AdaptConfig, parse_flag, adapt_loop
from ._basis import CellBasis, check_degree
from ._cases import CASES, case_names, get_case
from ._linsolve import SOLVERS
from ._mesh_io import write_mesh

LOGGER = logging.getLogger("wg_plate")

THREADS_ENV = "WG_PLATE_THREADS"
GRID_SIZE = 201

EXIT_OK = 0
EXIT_INVALID_RUN = 2
EXIT_SOLVER_FAILURE = 3


@dataclass(frozen=True)
class RunSpec:
    """ One experiment: the case, discretization and loop settings, output directory """

    case: str
    k: int = 2
    eps: Optional[float] = None
    theta: Optional[float] = None
    mode: str = "adaptive"
    max_dof: int = 20000
    max_levels: int = 30
    out: str = "."
    threads: int = 1
    deterministic: bool = False
    solver: str = "direct"
    boundary_jumps: bool = False
    pin_tangential: bool = False

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(
                "Unknown case '{case}', use one of {names}".format(
                    case=self.case, names=", ".join(case_names())
                )
            )

    @classmethod
    def from_options(cls, options):
        """ Build from a dict of string options; unknown keys are rejected """

        options = dict(options)
        if "case" not in options:
            raise ValueError("Must provide a case")
        eps = options.pop("eps", None)
        theta = options.pop("theta", None)
        spec = cls(
            case=options.pop("case"),
            k=int(options.pop("k", "2")),
            eps=None if eps is None else float(eps),
            theta=None if theta is None else float(theta),
            mode=options.pop("mode", "adaptive"),
            max_dof=int(options.pop("max_dof", "20000")),
            max_levels=int(options.pop("max_levels", "30")),
            out=options.pop("out", "."),
            threads=int(options.pop("threads", "1")),
            deterministic=parse_flag(options.pop("deterministic", "false")),
            solver=options.pop("solver", "direct"),
            boundary_jumps=parse_flag(options.pop("boundary_jumps", "false")),
            pin_tangential=parse_flag(options.pop("pin_tangential", "false")),
        )
        if options:
            raise ValueError("Unknown run options: {names}".format(names=", ".join(sorted(options))))
        return spec

    def resolve(self):
        """ Case and loop configuration of this run; ValueError when either is invalid """

        check_degree(self.k)
        case = get_case(self.case, eps=self.eps, theta=self.theta)
        config = AdaptConfig(
            theta=case.theta,
            max_dof=self.max_dof,
            max_levels=self.max_levels,
            mode=self.mode,
            solver=self.solver,
            threads=self.threads,
            deterministic=self.deterministic,
            boundary_jumps=self.boundary_jumps,
            pin_tangential=self.pin_tangential,
        )
        return case, config


def sample_solution(solution, size=GRID_SIZE):
    """u0 on a size x size lattice of the unit square.

    Returns (x, y, values); lattice points no cell claims are NaN."""

    mesh = solution.mesh
    lattice = np.linspace(0.0, 1.0, size)
    x, y = (axis.ravel() for axis in np.meshgrid(lattice, lattice, indexing="xy"))
    finder = Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.cells).get_trifinder()
    cells = np.asarray(finder(x, y))
    missing = cells < 0
    if missing.any():
        # points on the outer boundary, moved a hair towards the centre
        nudged = 0.5 + (1.0 - 1e-12) * (np.column_stack((x, y))[missing] - 0.5)
        cells[missing] = finder(nudged[:, 0], nudged[:, 1])

    values = np.full(x.size, np.nan)
    points = np.column_stack((x, y))
    v0 = solution.v0
    for cell in np.unique(cells[cells >= 0]):
        where = cells == cell
        basis = CellBasis.for_cell(mesh, cell, solution.k)
        values[where] = basis.evaluate_polynomial(v0[cell], points[where])
    return x, y, values


def write_solution_grid(solution, path, size=GRID_SIZE):
    """ CSV with columns x, y, u0 """

    x, y, values = sample_solution(solution, size)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("x", "y", "u0"))
        for row in zip(x, y, values):
            writer.writerow([repr(float(value)) for value in row])


def run(spec):
    """ Run one experiment and write its artifacts; returns the exit code """

    case, config = spec.resolve()
    LOGGER.info(
        "Running {case} with k={k}, eps={eps:g}, theta={theta:g}, mode={mode}".format(
            case=case.name, k=spec.k, eps=case.eps, theta=case.theta, mode=spec.mode
        )
    )
    history = adapt_loop(case, spec.k, case.eps, config)

    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    history.write_json(out / "history.json")
    history.write_csv(out / "history.csv")
    if history.mesh is not None:
        write_mesh(history.mesh, out / "mesh_final.wgmesh")
    if history.indicators is not None:
        history.indicators.write_csv(out / "indicators.csv")
    if history.solution is not None:
        write_solution_grid(history.solution, out / "solution_grid.csv")
    LOGGER.info(
        "Stopped after {levels} levels ({status}), artifacts in {out}".format(
            levels=len(history), status=history.status, out=out
        )
    )

    if history.status == "solver-failure":
        return EXIT_SOLVER_FAILURE
    return EXIT_OK


def _parser():
    parser = argparse.ArgumentParser(
        prog="wg-plate",
        description="Adaptive weak Galerkin solver for eps^2 bilap u - lap u = f on the unit square.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    runner = commands.add_parser("run", help="Run one experiment")
    runner.add_argument("--case", required=True, help="Case name, see 'wg-plate cases'")
    runner.add_argument("--k", type=int, default=2, help="Polynomial degree (2, 3 or 4)")
    runner.add_argument("--eps", type=float, help="Perturbation parameter (case default)")
    runner.add_argument("--theta", type=float, help="Marking fraction (case default)")
    runner.add_argument("--mode", choices=MODES, default="adaptive")
    runner.add_argument("--max-dof", type=int, default=20000, help="Free DOF budget")
    runner.add_argument("--max-levels", type=int, default=30)
    runner.add_argument("--out", default=".", help="Output directory")
    runner.add_argument(
        "--threads", type=int, help="Worker threads (default ${env} or 1)".format(env=THREADS_ENV)
    )
    runner.add_argument("--deterministic", action="store_true", help="Serial, reproducible output")
    runner.add_argument("--solver", choices=SOLVERS, default="direct")
    runner.add_argument("--boundary-jumps", action="store_true", help="Add jumps on boundary edges")
    runner.add_argument(
        "--pin-tangential", action="store_true", help="Also constrain tangential g on the boundary"
    )
    verbosity = runner.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true")
    verbosity.add_argument("--quiet", "-q", action="store_true")

    commands.add_parser("cases", help="List the available cases")
    return parser


def _configure_logging(verbose=False, quiet=False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    LOGGER.handlers[:] = [handler]
    LOGGER.setLevel(level)


def _list_cases():
    for name in case_names():
        case = get_case(name)
        print(
            "{name:24s} eps={eps:<8g} theta={theta:<4g} exact={exact}  {description}".format(
                name=name,
                eps=case.eps,
                theta=case.theta,
                exact="yes" if case.has_exact else "no",
                description=case.description,
            )
        )


def main(argv=None):
    """ Entry point of the wg-plate command """

    args = _parser().parse_args(argv)
    if args.command == "cases":
        _list_cases()
        return EXIT_OK

    _configure_logging(verbose=args.verbose, quiet=args.quiet)
    threads = args.threads
    if threads is None:
        threads = os.environ.get(THREADS_ENV, "1")

    options = {
        "case": args.case,
        "k": str(args.k),
        "mode": args.mode,
        "max_dof": str(args.max_dof),
        "max_levels": str(args.max_levels),
        "out": args.out,
        "threads": str(threads),
        "deterministic": str(args.deterministic),
        "solver": args.solver,
        "boundary_jumps": str(args.boundary_jumps),
        "pin_tangential": str(args.pin_tangential),
    }
    if args.eps is not None:
        options["eps"] = str(args.eps)
    if args.theta is not None:
        options["theta"] = str(args.theta)

    try:
        spec = RunSpec.from_options(options)
        spec.resolve()
    except ValueError as exception:
        LOGGER.error("Invalid run: {exception}".format(exception=exception))
        return EXIT_INVALID_RUN
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
