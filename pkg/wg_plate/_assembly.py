""" Global system of the weak Galerkin scheme """
# pylint: disable=too-many-arguments, too-many-locals

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix

from ._basis import cell_dim, check_degree
from ._errors import ContractError
from ._weak_ops import WeakFunction, local_dof_table, local_operators, ordered_map, raw_size

LOGGER = logging.getLogger(__name__)


def free_dof_count(mesh, k, pin_tangential=False):
    """ Size of the system assembled on a mesh, without assembling it """

    removed = (3 if pin_tangential else 2) * (k + 1) * len(mesh.boundary_edge_ids)
    return raw_size(mesh, k) - removed


class DofMap:
    """Coefficient numbering and the homogeneous boundary conditions.

    Raw coefficients follow WeakFunction.values. On a boundary edge v_b is
    removed and g = t g_t keeps only its tangential component (also removed
    with ``pin_tangential``). ``prolongation`` P maps free coefficients to raw
    ones; its columns are orthonormal, so P^T restricts."""

    def __init__(self, mesh, k, pin_tangential=False):
        check_degree(k)
        self.mesh = mesh
        self.k = k
        self.pin_tangential = pin_tangential
        n = k + 1
        self.cell_offsets = np.arange(mesh.n_cells) * cell_dim(k)
        self.vb_offsets = mesh.n_cells * cell_dim(k) + np.arange(mesh.n_edges) * 3 * n
        self.vg_offsets = self.vb_offsets + n
        self.raw_count = raw_size(mesh, k)
        self.local_dofs = local_dof_table(mesh, k)

        boundary = mesh.boundary_edge_ids
        plain = np.ones(self.raw_count, dtype=bool)
        plain[(self.vb_offsets[boundary][:, None] + np.arange(3 * n)).ravel()] = False
        plain_ids = np.flatnonzero(plain)

        rows = [plain_ids]
        cols = [np.arange(len(plain_ids))]
        vals = [np.ones(len(plain_ids))]
        free = len(plain_ids)
        if not pin_tangential and len(boundary):
            gx = self.vg_offsets[boundary][:, None] + np.arange(n)
            tangential = free + np.arange(len(boundary) * n)
            tangents = mesh.tangents[boundary]
            rows.extend((gx.ravel(), (gx + n).ravel()))
            cols.extend((tangential, tangential))
            vals.extend((np.repeat(tangents[:, 0], n), np.repeat(tangents[:, 1], n)))
            free += len(tangential)

        self.free_count = free
        self.prolongation = coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.raw_count, free),
        ).tocsr()

    @property
    def eliminated_count(self):
        """ Raw coefficients fixed by the boundary conditions """
        return self.raw_count - self.free_count

    def expand(self, free_values):
        """ WeakFunction of a free coefficient vector """

        free_values = np.asarray(free_values, dtype=float).reshape(-1)
        if free_values.size != self.free_count:
            raise ContractError(
                "Expected {expected} free coefficients, got {got}".format(
                    expected=self.free_count, got=free_values.size
                )
            )
        return WeakFunction(self.mesh, self.k, self.prolongation @ free_values)

    def restrict(self, function):
        """ Free coefficients of a WeakFunction (boundary constrained parts dropped) """

        if function.k != self.k or (function.mesh is not self.mesh and function.mesh != self.mesh):
            raise ContractError("Weak function does not live on this DOF map's mesh")
        return self.prolongation.T @ function.values


class EnergyProducts(NamedTuple):
    """ Contributions of the bilinear form; their sum is the squared triple bar norm """

    B: float
    A: float
    S1: float
    S2: float

    @property
    def norm(self):
        """ Square root of the sum of the four parts """
        return float(np.sqrt(max(self.B + self.A + self.S1 + self.S2, 0.0)))


def local_forms(ops, eps):
    """ Element matrices (B, A, S1, S2) of one cell """

    dim = ops.dim
    dw2 = ops.dw2.reshape(4, dim, -1)
    gw = ops.gw.reshape(2, dim, -1)
    hessian = np.einsum("cml,mn,cnq->lq", dw2, ops.mass, dw2)
    gradient = np.einsum("cml,mn,cnq->lq", gw, ops.mass, gw)
    grad_jump = ops.jump_grad.T @ ops.jump_grad
    value_jump = ops.jump_value.T @ ops.jump_value
    h = ops.h
    eps2 = eps * eps
    return (
        eps2 * hessian,
        gradient,
        eps2 * (grad_jump / h + value_jump / h ** 3),
        h * grad_jump + value_jump / h,
    )


def local_energy(ops, u, v, eps):
    """ (B, A, S1, S2) of two local DOF vectors on one cell """

    dim = ops.dim
    hu = (ops.dw2 @ u).reshape(4, dim)
    hv = (ops.dw2 @ v).reshape(4, dim)
    gu = (ops.gw @ u).reshape(2, dim)
    gv = (ops.gw @ v).reshape(2, dim)
    ju, jv = ops.jump_grad @ u, ops.jump_grad @ v
    vu, vv = ops.jump_value @ u, ops.jump_value @ v
    h = ops.h
    eps2 = eps * eps
    return EnergyProducts(
        B=eps2 * float(np.einsum("cm,mn,cn->", hu, ops.mass, hv)),
        A=float(np.einsum("cm,mn,cn->", gu, ops.mass, gv)),
        S1=eps2 * (float(ju @ jv) / h + float(vu @ vv) / h ** 3),
        S2=h * float(ju @ jv) + float(vu @ vv) / h,
    )


@dataclass
class AssembledSystem:
    """ K u = F on the free coefficients, with what produced it """

    K: object
    F: np.ndarray
    dof_map: DofMap
    eps: float
    operators: list

    @property
    def mesh(self):
        """ Mesh the system was assembled on """
        return self.dof_map.mesh

    @property
    def k(self):
        """ Polynomial degree """
        return self.dof_map.k


def check_eps(eps):
    """ Validated eps as a float """
    eps = float(eps)
    if not eps > 0.0 or not np.isfinite(eps):
        raise ValueError("eps must be a positive number, got {eps}".format(eps=eps))
    return eps


def assemble(mesh, k, eps, f, threads=1, pin_tangential=False, operators=None):
    """Assemble the stiffness matrix and load vector on the free coefficients.

    ``f`` maps (P, 2) points to (P,) values; the load pairs it with v0 only.
    Element contributions are gathered in cell order, so the result does not
    depend on ``threads``."""

    check_degree(k)
    eps = check_eps(eps)
    dof_map = DofMap(mesh, k, pin_tangential=pin_tangential)
    if operators is None:
        operators = local_operators(mesh, k, threads=threads)

    def element(ops):
        matrix = sum(local_forms(ops, eps))
        matrix = 0.5 * (matrix + matrix.T)
        load = ops.quad_values.T @ (ops.quad_weights * np.reshape(f(ops.quad_points), (-1,)))
        return matrix, load

    elements = ordered_map(element, operators, threads)

    table = dof_map.local_dofs
    size = table.shape[1]
    rows = np.repeat(table, size, axis=1).ravel()
    cols = np.tile(table, (1, size)).ravel()
    data = np.concatenate([matrix.ravel() for matrix, _ in elements])
    raw = coo_matrix((data, (rows, cols)), shape=(dof_map.raw_count,) * 2).tocsr()

    raw_load = np.zeros(dof_map.raw_count)
    dim = cell_dim(k)
    for cell, (_, load) in enumerate(elements):
        raw_load[table[cell, :dim]] += load

    prolongation = dof_map.prolongation
    K = (prolongation.T @ raw @ prolongation).tocsr()
    F = prolongation.T @ raw_load
    LOGGER.debug(
        "Assembled {free} free of {raw} coefficients, {nnz} nonzeros".format(
            free=dof_map.free_count, raw=dof_map.raw_count, nnz=K.nnz
        )
    )
    return AssembledSystem(K=K, F=F, dof_map=dof_map, eps=eps, operators=operators)


def energy_sums(operators, u_h, v_h, eps):
    """ (B, A, S1, S2) summed over all cells in cell order """

    if u_h.k != v_h.k or (u_h.mesh is not v_h.mesh and u_h.mesh != v_h.mesh):
        raise ContractError("Weak functions live on different meshes or degrees")
    if len(operators) != u_h.mesh.n_cells:
        raise ContractError(
            "{count} local operators for a mesh of {cells} cells".format(
                count=len(operators), cells=u_h.mesh.n_cells
            )
        )
    u_local = u_h.local_table()
    v_local = v_h.local_table()
    totals = np.zeros(4)
    for ops in operators:
        totals += local_energy(ops, u_local[ops.cell], v_local[ops.cell], eps)
    return EnergyProducts(*map(float, totals))


def energy_products(u_h, v_h, system):
    """ (B_value, A_value, S1_value, S2_value) of two weak functions on the system's mesh """

    for function in (u_h, v_h):
        if function.mesh is not system.mesh and function.mesh != system.mesh:
            raise ContractError("Weak function does not live on the assembled mesh")
    return energy_sums(system.operators, u_h, v_h, system.eps)
