""" Sparse symmetric positive definite solves """
# pylint: disable=too-many-arguments

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csc_matrix, diags, identity
from scipy.sparse.linalg import cg, splu

from ._errors import ContractError, FactorizationError

LOGGER = logging.getLogger(__name__)

RESIDUAL_TARGET = 1e-10
MAX_REFINEMENTS = 3
SOLVERS = ("direct", "cg")


@dataclass(frozen=True)
class SolveReport:
    """ Solution with its relative residual and solver statistics """

    solution: np.ndarray
    residual: float
    method: str
    statistics: dict = field(default_factory=dict)


def _relative_residual(K, x, F, norm):
    return float(np.linalg.norm(F - K @ x) / norm)


def _factorize(K):
    return splu(
        K,
        permc_spec="MMD_AT_PLUS_A",
        diag_pivot_thresh=0.0,
        options={"SymmetricMode": True},
    )


def _breakdown_pivot(K):
    """Unknown whose pivot vanishes, found by refactorizing with a unit
    roundoff diagonal shift; None when that fails too"""

    shift = np.finfo(float).eps * max(float(np.abs(K.diagonal()).max()), 1.0)
    try:
        lu = _factorize(csc_matrix(K + shift * identity(K.shape[0], format="csc")))
    except RuntimeError:
        return None
    pivots = lu.U.diagonal()
    small = np.flatnonzero(pivots <= 16.0 * shift)
    step = int(small[0]) if small.size else int(np.argmin(np.abs(pivots)))
    return int(np.argsort(lu.perm_c)[step])


def _direct(K, F, norm):
    try:
        lu = _factorize(K)
    except RuntimeError as exception:
        pivot = _breakdown_pivot(K)
        raise FactorizationError(
            "Factorization of {n}x{n} system broke down at unknown {pivot}: {exception}".format(
                n=K.shape[0], pivot=pivot, exception=exception
            ),
            pivot=pivot,
        ) from exception

    pivots = lu.U.diagonal()
    bad = np.flatnonzero(~(pivots > 0.0))
    if bad.size:
        step = int(bad[0])
        pivot = int(np.argsort(lu.perm_c)[step])
        raise FactorizationError(
            "Non positive pivot {value:.3e} at unknown {pivot}: matrix is not positive definite".format(
                value=pivots[step], pivot=pivot
            ),
            pivot=pivot,
        )

    x = lu.solve(F)
    residual = _relative_residual(K, x, F, norm)
    refinements = 0
    while residual > RESIDUAL_TARGET and refinements < MAX_REFINEMENTS:
        x = x + lu.solve(F - K @ x)
        residual = _relative_residual(K, x, F, norm)
        refinements += 1
    statistics = {
        "nnz_L": int(lu.L.nnz),
        "nnz_U": int(lu.U.nnz),
        "refinements": refinements,
    }
    return x, residual, statistics


def _conjugate_gradient(K, F, norm, rtol, maxiter):
    diagonal = K.diagonal()
    bad = np.flatnonzero(~(diagonal > 0.0))
    if bad.size:
        pivot = int(bad[0])
        raise FactorizationError(
            "Non positive diagonal {value:.3e} at unknown {pivot}".format(
                value=diagonal[pivot], pivot=pivot
            ),
            pivot=pivot,
        )
    iterations = []
    x, info = cg(
        K,
        F,
        rtol=rtol,
        maxiter=maxiter,
        M=diags(1.0 / diagonal),
        callback=lambda _: iterations.append(1),
    )
    if info < 0:
        raise FactorizationError("Conjugate gradient breakdown (info={info})".format(info=info))
    if info > 0:
        LOGGER.warning(
            "Conjugate gradient stopped after {count} iterations without reaching rtol={rtol}".format(
                count=info, rtol=rtol
            )
        )
    return x, _relative_residual(K, x, F, norm), {"iterations": len(iterations)}


def solve_spd(K, F, method="direct", rtol=1e-12, maxiter=None):
    """Solve K x = F for a sparse symmetric positive definite K.

    ``direct`` factorizes with diagonal pivoting only and rejects any non
    positive pivot; ``cg`` runs Jacobi preconditioned conjugate gradients."""

    if method not in SOLVERS:
        raise ValueError(
            "Unknown solver '{method}', use one of {solvers}".format(method=method, solvers=SOLVERS)
        )
    K = csc_matrix(K, dtype=float)
    F = np.asarray(F, dtype=float).reshape(-1)
    if K.shape[0] != K.shape[1] or K.shape[0] != F.size:
        raise ContractError(
            "Matrix of shape {shape} does not match a right hand side of length {n}".format(
                shape=K.shape, n=F.size
            )
        )

    norm = float(np.linalg.norm(F))
    if norm == 0.0:
        return SolveReport(solution=np.zeros(F.size), residual=0.0, method=method)

    if method == "direct":
        x, residual, statistics = _direct(K, F, norm)
    else:
        x, residual, statistics = _conjugate_gradient(K, F, norm, rtol, maxiter)

    if residual > RESIDUAL_TARGET:
        LOGGER.warning(
            "Relative residual {residual:.3e} of {n} unknowns is above {target:.0e}".format(
                residual=residual, n=F.size, target=RESIDUAL_TARGET
            )
        )
    LOGGER.debug(
        "Solved {n} unknowns with {method}: residual {residual:.3e}, {statistics}".format(
            n=F.size, method=method, residual=residual, statistics=statistics
        )
    )
    return SolveReport(solution=x, residual=residual, method=method, statistics=statistics)
