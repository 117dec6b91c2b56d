""" Residual a posteriori error estimator and true errors for manufactured solutions """
# pylint: disable=too-many-arguments, too-many-locals, too-many-instance-attributes

import csv
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._assembly import check_eps, energy_sums, local_energy
from ._basis import CellBasis
from ._errors import ContractError
from ._quadrature import cell_quadrature, edge_quadrature, map_cell_rule, map_edge_rule
from ._weak_ops import Projector, build_local_operators, embed_exact, local_operators, ordered_map

LOGGER = logging.getLogger(__name__)

INDICATOR_COLUMNS = ("cell_id", "eta_T1", "eta_T2", "eta_e1", "eta_e2", "s1", "s2", "eta_T")


@dataclass(frozen=True)
class Weights:
    """ Cell and edge weights of the indicators """

    alpha_T: np.ndarray
    alpha_e1: np.ndarray
    alpha_e2: np.ndarray


def compute_weights(mesh, eps):
    """alpha_T = min(h_T^2 / eps, h_T), alpha_e1 = min(h_e^1.5 / eps, h_e^0.5),
    alpha_e2 = min(h_e^0.5 / eps, h_e^-0.5)"""

    eps = check_eps(eps)
    h_T = mesh.cell_diameters
    h_e = mesh.edge_lengths
    return Weights(
        alpha_T=np.minimum(h_T ** 2 / eps, h_T),
        alpha_e1=np.minimum(h_e ** 1.5 / eps, np.sqrt(h_e)),
        alpha_e2=np.minimum(np.sqrt(h_e) / eps, 1.0 / np.sqrt(h_e)),
    )


@dataclass(frozen=True)
class CellFields:
    """Polynomial fields of a discrete solution on one cell, as basis coefficients.

    moment = eps^2 D_w u (2, 2, dim); flux = div(eps^2 D_w u) - grad_w u
    (2, dim); residual = f_h - div div(eps^2 D_w u) + div grad_w u (dim,)."""

    cell: int
    basis: CellBasis
    moment: np.ndarray
    flux: np.ndarray
    residual: Optional[np.ndarray] = None
    f_h: Optional[np.ndarray] = None


def _divergence(dx, dy, field):
    """ Row-wise divergence of coefficient fields whose last two axes are (component, dim) """
    return np.einsum("mn,...n->...m", dx, field[..., 0, :]) + np.einsum(
        "mn,...n->...m", dy, field[..., 1, :]
    )


def cell_fields(ops, local, eps, f_h=None):
    """ Moment, flux and (when f_h is given) residual of a local DOF vector """

    dim = ops.dim
    hessian = (ops.dw2 @ local).reshape(2, 2, dim)
    gradient = (ops.gw @ local).reshape(2, dim)
    dx, dy = ops.basis.derivative_matrices()
    eps2 = eps * eps
    div_hessian = _divergence(dx, dy, hessian)
    residual = None
    if f_h is not None:
        residual = f_h - eps2 * _divergence(dx, dy, div_hessian) + _divergence(dx, dy, gradient)
    return CellFields(
        cell=ops.cell,
        basis=ops.basis,
        moment=eps2 * hessian,
        flux=eps2 * div_hessian - gradient,
        residual=residual,
        f_h=f_h,
    )


class ElementResidual(NamedTuple):
    """ Cell fields with the residual norm and the data oscillation """

    fields: CellFields
    residual_norm: float
    oscillation: float


def _element_residual(mesh, ops, local, f, eps, k):
    projector = Projector(mesh, ops.cell, k, exactness=2 * k + 4)
    samples = np.reshape(f(projector.points), (-1,))
    f_h = projector.project_samples(samples)
    fields = cell_fields(ops, local, eps, f_h=f_h)
    weights = projector.weights
    residual = projector.values @ fields.residual
    oscillation = samples - projector.values @ f_h
    return ElementResidual(
        fields=fields,
        residual_norm=float(np.sqrt(weights @ residual ** 2)),
        oscillation=float(np.sqrt(weights @ oscillation ** 2)),
    )


def element_residual(cell, u_h, f, eps, k, ops=None):
    """R_T = f_h - div div(eps^2 D_w u_h) + div grad_w u_h on one cell, with
    ||R_T||_T and ||f - f_h||_T, f_h being the L2 projection of f onto P_k(T)"""

    eps = check_eps(eps)
    if ops is None:
        ops = build_local_operators(u_h.mesh, cell, k)
    return _element_residual(u_h.mesh, ops, u_h.local(cell), f, eps, k)


def _jump_norms(mesh, edge, plus, minus, k):
    start, end = mesh.vertices[mesh.edges[edge]]
    points, weights, _ = map_edge_rule(start, end, edge_quadrature(2 * k + 2))
    normal = mesh.normals[edge]

    flux = plus.basis.evaluate_polynomial(plus.flux, points)
    moment = plus.basis.evaluate_polynomial(plus.moment, points)
    if minus is not None:
        flux = flux - minus.basis.evaluate_polynomial(minus.flux, points)
        moment = moment - minus.basis.evaluate_polynomial(minus.moment, points)
    first = normal @ flux
    second = np.einsum("ijq,j->iq", moment, normal)
    return (
        float(np.sqrt(weights @ first ** 2)),
        float(np.sqrt(weights @ np.sum(second ** 2, axis=0))),
    )


def edge_jumps(edge, u_h, eps, fields=None, boundary_jumps=False):
    """L2 norms of J_1 = [flux . n] and J_2 = [moment n] on an edge.

    Jumps are trace from cell_plus minus trace from cell_minus along the
    edge's fixed normal. Boundary edges are rejected unless
    ``boundary_jumps``, in which case the missing neighbour counts as 0.
    ``fields`` optionally maps cell ids to precomputed CellFields."""

    mesh = u_h.mesh
    k = u_h.k
    eps = check_eps(eps)
    plus_id, minus_id = (int(c) for c in mesh.edge_cells[edge])
    if minus_id < 0 and not boundary_jumps:
        raise ContractError(
            "Edge {edge} lies on the boundary and boundary jumps are disabled".format(edge=edge)
        )

    def lookup(cell):
        if fields is not None and cell in fields:
            return fields[cell]
        return cell_fields(build_local_operators(mesh, cell, k), u_h.local(cell), eps)

    minus = lookup(minus_id) if minus_id >= 0 else None
    return _jump_norms(mesh, edge, lookup(plus_id), minus, k)


@dataclass
class ErrorIndicators:
    """Per-cell indicator parts and the global estimator.

    eta_T1, eta_T2, eta_e1 and eta_e2 are norms; s1 and s2 are the cell's
    stabilizer values S(u_h, u_h)|_T and enter eta_T unsquared."""

    eta_T1: np.ndarray
    eta_T2: np.ndarray
    eta_e1: np.ndarray
    eta_e2: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    eta_T: np.ndarray
    eta_h: float
    fields: list

    def write_csv(self, path):
        """ One row per cell """

        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(INDICATOR_COLUMNS)
            for cell in range(len(self.eta_T)):
                writer.writerow(
                    [cell]
                    + [
                        repr(float(column[cell]))
                        for column in (
                            self.eta_T1,
                            self.eta_T2,
                            self.eta_e1,
                            self.eta_e2,
                            self.s1,
                            self.s2,
                            self.eta_T,
                        )
                    ]
                )


def estimate(mesh, u_h, f, eps, k, operators=None, threads=1, boundary_jumps=False):
    """ All indicator parts of every cell and eta_h """

    eps = check_eps(eps)
    if u_h.mesh is not mesh and u_h.mesh != mesh:
        raise ContractError("Discrete solution does not live on the estimated mesh")
    if operators is None:
        operators = local_operators(mesh, k, threads=threads)
    weights = compute_weights(mesh, eps)
    local = u_h.local_table()

    def cell_part(ops):
        element = _element_residual(mesh, ops, local[ops.cell], f, eps, k)
        energy = local_energy(ops, local[ops.cell], local[ops.cell], eps)
        return element, energy.S1, energy.S2

    parts = ordered_map(cell_part, operators, threads)
    fields = [element.fields for element, _, _ in parts]
    alpha_T = weights.alpha_T
    eta_T1 = alpha_T * np.array([element.oscillation for element, _, _ in parts])
    eta_T2 = alpha_T * np.array([element.residual_norm for element, _, _ in parts])
    s1 = np.array([max(value, 0.0) for _, value, _ in parts])
    s2 = np.array([max(value, 0.0) for _, _, value in parts])

    edges = mesh.interior_edge_ids if not boundary_jumps else np.arange(mesh.n_edges)

    def edge_part(edge):
        plus, minus = mesh.edge_cells[edge]
        return _jump_norms(mesh, edge, fields[plus], fields[minus] if minus >= 0 else None, k)

    jumps = ordered_map(edge_part, edges, threads)
    e1_sq = np.zeros(mesh.n_cells)
    e2_sq = np.zeros(mesh.n_cells)
    for edge, (first, second) in zip(edges, jumps):
        contribution1 = (weights.alpha_e1[edge] * first) ** 2
        contribution2 = (weights.alpha_e2[edge] * second) ** 2
        for cell in mesh.edge_cells[edge]:
            if cell >= 0:
                e1_sq[cell] += contribution1
                e2_sq[cell] += contribution2

    eta_T = np.sqrt(eta_T1 ** 2 + eta_T2 ** 2 + e1_sq + e2_sq + s1 + s2)
    eta_h = float(np.sqrt(np.sum(eta_T ** 2)))
    LOGGER.debug(
        "Estimated {cells} cells: eta_h={eta:.6e}".format(cells=mesh.n_cells, eta=eta_h)
    )
    return ErrorIndicators(
        eta_T1=eta_T1,
        eta_T2=eta_T2,
        eta_e1=np.sqrt(e1_sq),
        eta_e2=np.sqrt(e2_sq),
        s1=s1,
        s2=s2,
        eta_T=eta_T,
        eta_h=eta_h,
        fields=fields,
    )


@dataclass(frozen=True)
class TrueErrorReport:
    """Errors against a known solution u.

    discrete_error = |||Q_h u - u_h|||; field_error_sq = eps^2 ||D^2 u - D_w u_h||^2
    + ||grad u - grad_w u_h||^2; effectivity = eta_h / sqrt(field_error_sq + S1 + S2).
    Every error field is None when the case has no exact solution."""

    discrete_error: Optional[float]
    field_error_sq: Optional[float]
    effectivity: Optional[float]
    s1: float = 0.0
    s2: float = 0.0
    eta_h: Optional[float] = None

    @property
    def has_error(self):
        """ False for cases without an exact solution """
        return self.discrete_error is not None


def true_error(mesh, u_h, case, eps, k, eta_h=None, operators=None):
    """ Discrete and field errors of u_h against the case's exact solution """

    eps = check_eps(eps)
    if not case.has_exact:
        return TrueErrorReport(discrete_error=None, field_error_sq=None, effectivity=None, eta_h=eta_h)
    if operators is None:
        operators = local_operators(mesh, k)

    projected = embed_exact(case.u, case.grad_u, mesh, k)
    difference = projected - u_h
    discrete = energy_sums(operators, difference, difference, eps).norm
    stabilizers = energy_sums(operators, u_h, u_h, eps)

    rule = cell_quadrature(2 * k + 4)
    local = u_h.local_table()
    field_sq = 0.0
    for ops in operators:
        points, weights = map_cell_rule(mesh.corners(ops.cell), rule)
        hessian = ops.basis.evaluate_polynomial((ops.dw2 @ local[ops.cell]).reshape(2, 2, -1), points)
        gradient = ops.basis.evaluate_polynomial((ops.gw @ local[ops.cell]).reshape(2, -1), points)
        hessian_error = np.moveaxis(np.reshape(case.hess_u(points), (-1, 2, 2)), 0, -1) - hessian
        gradient_error = np.reshape(case.grad_u(points), (-1, 2)).T - gradient
        field_sq += eps * eps * float(np.sum(hessian_error ** 2 * weights))
        field_sq += float(np.sum(gradient_error ** 2 * weights))

    s1 = max(stabilizers.S1, 0.0)
    s2 = max(stabilizers.S2, 0.0)
    denominator = np.sqrt(field_sq + s1 + s2)
    effectivity = None
    if eta_h is not None and denominator > 0.0:
        effectivity = float(eta_h / denominator)
    return TrueErrorReport(
        discrete_error=discrete,
        field_error_sq=field_sq,
        effectivity=effectivity,
        s1=s1,
        s2=s2,
        eta_h=eta_h,
    )
