""" Doerfler marking and the solve, estimate, mark, refine loop """
# pylint: disable=too-many-instance-attributes, too-many-locals

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ._assembly import assemble, check_eps, free_dof_count
from ._errors import FactorizationError
from ._estimator import estimate, true_error
from ._linsolve import SOLVERS, solve_spd
from ._mesh import refine, refine_uniform, unit_square_mesh

LOGGER = logging.getLogger(__name__)

MODES = ("adaptive", "uniform")
HISTORY_FIELDS = (
    "level",
    "dofs",
    "h_min",
    "h_max",
    "eta_h",
    "error",
    "effectivity",
    "marked",
    "seconds",
)


def parse_flag(value):
    """ Boolean from an option string (true/false, yes/no, on/off, 1/0) """
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ValueError("Expected a boolean option, got '{value}'".format(value=value))


@dataclass(frozen=True)
class AdaptConfig:
    """ Marking fraction, stopping rules and execution options of the loop """

    theta: float = 0.3
    max_dof: int = 20000
    max_levels: int = 30
    mode: str = "adaptive"
    initial_n: int = 4
    solver: str = "direct"
    threads: int = 1
    deterministic: bool = False
    boundary_jumps: bool = False
    pin_tangential: bool = False

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError("theta must lie in (0, 1], got {theta}".format(theta=self.theta))
        if self.mode not in MODES:
            raise ValueError(
                "Unknown mode '{mode}', use one of {modes}".format(mode=self.mode, modes=MODES)
            )
        if self.solver not in SOLVERS:
            raise ValueError(
                "Unknown solver '{solver}', use one of {solvers}".format(
                    solver=self.solver, solvers=SOLVERS
                )
            )
        if self.max_dof < 1 or self.max_levels < 1 or self.initial_n < 1 or self.threads < 1:
            raise ValueError("max_dof, max_levels, initial_n and threads must be positive")

    @classmethod
    def from_options(cls, options):
        """ Build from a dict of string options; unknown keys are rejected """

        options = dict(options)
        config = cls(
            theta=float(options.pop("theta", "0.3")),
            max_dof=int(options.pop("max_dof", "20000")),
            max_levels=int(options.pop("max_levels", "30")),
            mode=options.pop("mode", "adaptive"),
            initial_n=int(options.pop("initial_n", "4")),
            solver=options.pop("solver", "direct"),
            threads=int(options.pop("threads", "1")),
            deterministic=parse_flag(options.pop("deterministic", "false")),
            boundary_jumps=parse_flag(options.pop("boundary_jumps", "false")),
            pin_tangential=parse_flag(options.pop("pin_tangential", "false")),
        )
        if options:
            raise ValueError(
                "Unknown adaptivity options: {names}".format(names=", ".join(sorted(options)))
            )
        return config

    @property
    def workers(self):
        """ Thread count actually used; deterministic runs stay serial """
        return 1 if self.deterministic else self.threads


@dataclass(frozen=True)
class LevelRecord:
    """ Summary of one solved level """

    level: int
    dofs: int
    h_min: float
    h_max: float
    eta_h: float
    error: Optional[float]
    effectivity: Optional[float]
    marked: int
    seconds: Optional[float]


@dataclass
class AdaptHistory:
    """Level records, the mesh of every solved level, and the final solution
    and indicators.

    ``status`` tells why the loop stopped: converged (eta_h = 0), budget
    (the next level would exceed max_dof), levels (max_levels reached) or
    solver-failure."""

    records: list = field(default_factory=list)
    status: str = "levels"
    mesh: object = None
    solution: object = None
    indicators: object = None
    reports: list = field(default_factory=list)
    meshes: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def final(self):
        """ Last record, or None before the first solve """
        return self.records[-1] if self.records else None

    def to_json(self):
        """ JSON array of level records """
        return json.dumps([asdict(record) for record in self.records], indent=2) + "\n"

    def write_json(self, path):
        """ Write the JSON history """
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json())

    def write_csv(self, path):
        """ Write the history as CSV; absent values are empty cells """

        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(HISTORY_FIELDS)
            for record in self.records:
                row = asdict(record)
                writer.writerow(["" if row[name] is None else row[name] for name in HISTORY_FIELDS])


def dorfler_mark(indicators, theta):
    """Smallest set of cells whose squared indicators sum to at least theta
    times the total. Cells are taken by descending indicator, ties by
    ascending id. Returns sorted cell ids; empty when every indicator is 0."""

    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1], got {theta}".format(theta=theta))
    indicators = np.asarray(indicators, dtype=float).reshape(-1)
    if not np.all(np.isfinite(indicators)) or np.any(indicators < 0.0):
        raise ValueError("Indicators must be finite and non negative")
    if not indicators.size or not np.any(indicators > 0.0):
        return np.zeros(0, dtype=np.int64)

    order = np.lexsort((np.arange(indicators.size), -indicators))
    cumulative = np.cumsum(indicators[order] ** 2)
    count = int(np.searchsorted(cumulative, theta * cumulative[-1], side="left")) + 1
    return np.sort(order[:count]).astype(np.int64)


def adapt_loop(case, k, eps, config):
    """Solve on a sequence of meshes starting from unit_square_mesh(initial_n).

    Every level assembles, solves, estimates, measures the true error when
    the case knows its solution, then marks (all cells in uniform mode) and
    refines. A level whose system would exceed ``max_dof`` is never solved,
    except the first. A solver failure stops the loop with the levels solved
    so far."""

    eps = case.eps if eps is None else check_eps(eps)
    workers = config.workers
    mesh = unit_square_mesh(config.initial_n)
    history = AdaptHistory()
    start = time.perf_counter()
    level = 0

    while True:
        dofs = free_dof_count(mesh, k, pin_tangential=config.pin_tangential)
        if level > 0 and dofs > config.max_dof:
            history.status = "budget"
            break

        system = assemble(
            mesh, k, eps, case.f, threads=workers, pin_tangential=config.pin_tangential
        )
        try:
            report = solve_spd(system.K, system.F, method=config.solver)
        except FactorizationError as exception:
            LOGGER.error(
                "Solve of level {level} ({dofs} dofs) failed: {exception}".format(
                    level=level, dofs=dofs, exception=exception
                )
            )
            history.status = "solver-failure"
            break

        solution = system.dof_map.expand(report.solution)
        indicators = estimate(
            mesh,
            solution,
            case.f,
            eps,
            k,
            operators=system.operators,
            threads=workers,
            boundary_jumps=config.boundary_jumps,
        )
        errors = true_error(
            mesh, solution, case, eps, k, eta_h=indicators.eta_h, operators=system.operators
        )

        converged = indicators.eta_h == 0.0
        if converged:
            marked = np.zeros(0, dtype=np.int64)
        elif config.mode == "uniform":
            marked = np.arange(mesh.n_cells)
        else:
            marked = dorfler_mark(indicators.eta_T, config.theta)

        elapsed = time.perf_counter() - start
        history.records.append(
            LevelRecord(
                level=level,
                dofs=int(system.dof_map.free_count),
                h_min=mesh.h_min,
                h_max=mesh.h_max,
                eta_h=indicators.eta_h,
                error=errors.discrete_error,
                effectivity=errors.effectivity,
                marked=int(len(marked)),
                seconds=None if config.deterministic else elapsed,
            )
        )
        history.reports.append(errors)
        history.meshes.append(mesh)
        history.mesh, history.solution, history.indicators = mesh, solution, indicators
        LOGGER.info(
            "Level {level}: {dofs} dofs, eta_h={eta:.6e}, error={error}, {seconds:.2f}s".format(
                level=level,
                dofs=system.dof_map.free_count,
                eta=indicators.eta_h,
                error="n/a" if errors.discrete_error is None else "{:.6e}".format(errors.discrete_error),
                seconds=elapsed,
            )
        )

        if converged:
            history.status = "converged"
            break
        if level + 1 >= config.max_levels:
            history.status = "levels"
            break
        LOGGER.debug("Level {level}: marked {count} cells".format(level=level, count=len(marked)))
        mesh = refine(mesh, marked) if config.mode == "adaptive" else refine_uniform(mesh)
        level += 1

    if history.status == "solver-failure" and not history.records:
        history.mesh = mesh
    return history
