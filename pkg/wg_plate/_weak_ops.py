""" Local projections and discrete weak Hessian / weak gradient operators """
# pylint: disable=too-many-locals, too-many-instance-attributes

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ._basis import CellBasis, cell_dim, check_degree, edge_basis_values
from ._errors import ContractError, GeometryError
from ._quadrature import cell_quadrature, edge_quadrature, map_cell_rule, map_edge_rule

LOGGER = logging.getLogger(__name__)


def local_size(k):
    """Length of a cell's local DOF vector.

    Layout: v0 (dim), then v_b on local edges 0..2 (k+1 each), then g on
    local edges 0..2 ([g_x, g_y], 2(k+1) each)."""

    return cell_dim(k) + 9 * (k + 1)


def raw_size(mesh, k):
    """ Number of unconstrained coefficients: one v0 block per cell, [v_b, g_x, g_y] per edge """
    return mesh.n_cells * cell_dim(k) + mesh.n_edges * 3 * (k + 1)


def local_dof_table(mesh, k):
    """ (cells, local_size) raw coefficient index of every local DOF """

    dim = cell_dim(k)
    n = k + 1
    n_cells = mesh.n_cells
    v0 = np.arange(n_cells)[:, None] * dim + np.arange(dim)
    base = n_cells * dim + mesh.cell_edges * 3 * n
    vb = (base[:, :, None] + np.arange(n)).reshape(n_cells, 3 * n)
    gx = base[:, :, None] + n + np.arange(n)
    vg = np.concatenate((gx, gx + n), axis=2).reshape(n_cells, 6 * n)
    return np.hstack((v0, vb, vg)).astype(np.int64)


def _edge_slices(k, local_edge):
    dim = cell_dim(k)
    n = k + 1
    vb = slice(dim + local_edge * n, dim + (local_edge + 1) * n)
    start = dim + 3 * n + 2 * local_edge * n
    return vb, (slice(start, start + n), slice(start + n, start + 2 * n))


def ordered_map(function, items, threads=1):
    """ map() over items, on a thread pool when threads > 1; results keep input order """

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(function, items))
    return [function(item) for item in items]


def _factor(matrix, what):
    try:
        return cho_factor(0.5 * (matrix + matrix.T))
    except LinAlgError as exception:
        raise GeometryError(
            "{what} Gram matrix is not positive definite: {exception}".format(
                what=what, exception=exception
            )
        ) from exception


@dataclass(frozen=True)
class LocalOperators:
    """Per-cell matrices acting on the local DOF vector.

    ``dw2`` has 4 dim rows ordered by Hessian component (xx, xy, yx, yy);
    ``gw`` has 2 dim rows (x, y). ``jump_value`` and ``jump_grad`` evaluate
    v0 - v_b and grad v0 - g at the boundary quadrature points, scaled by the
    square root of the weights, so that (J u) . (J v) is the boundary pairing.
    """

    cell: int
    degree: int
    basis: CellBasis
    dw2: np.ndarray
    gw: np.ndarray
    mass: np.ndarray
    mass_factor: tuple
    jump_value: np.ndarray
    jump_grad: np.ndarray
    h: float
    area: float
    edges: np.ndarray
    normals: np.ndarray
    quad_points: np.ndarray
    quad_weights: np.ndarray
    quad_values: np.ndarray

    @property
    def dim(self):
        """ Dimension of the cell polynomial space """
        return self.basis.dim

    @property
    def size(self):
        """ Length of the local DOF vector """
        return self.gw.shape[1]


def build_local_operators(mesh, cell, k):
    """Weak Hessian and weak gradient of one cell.

    For every polynomial test matrix p in [P_k(T)]^{2x2} the weak Hessian
    satisfies (D_w v, p)_T = (v0, div div p)_T - <v_b, (div p) . n> + <g, p n>
    on the cell boundary; the weak gradient satisfies
    (grad_w v, q)_T = -(v0, div q)_T + <v_b, q . n> for q in [P_k(T)]^2.
    Both are obtained by solving the cell mass matrix against the right hand
    side moments."""

    check_degree(k)
    area = float(mesh.areas[cell])
    if not area > 0.0:
        raise GeometryError("Cell {cell} has non positive area {area}".format(cell=cell, area=area))

    basis = CellBasis.for_cell(mesh, cell, k)
    dim = basis.dim
    size = local_size(k)

    points, weights = map_cell_rule(mesh.corners(cell), cell_quadrature(2 * k + 2))
    values, gradients, hessians = basis.evaluate(points)
    weighted = weights[:, None] * values
    mass = values.T @ weighted
    factor = _factor(mass, "Cell {cell}".format(cell=cell))
    if LOGGER.isEnabledFor(logging.DEBUG):
        LOGGER.debug(
            "Cell {cell} mass matrix condition number {cond:.3e}".format(
                cell=cell, cond=np.linalg.cond(mass)
            )
        )

    hess_rhs = np.zeros((2, 2, dim, size))
    grad_rhs = np.zeros((2, dim, size))
    for i in range(2):
        grad_rhs[i, :, :dim] = -gradients[:, :, i].T @ weighted
        for j in range(2):
            hess_rhs[i, j, :, :dim] = hessians[:, :, i, j].T @ weighted

    edge_rule = edge_quadrature(2 * k + 1)
    value_rows, grad_rows = [], []
    normals = np.empty((3, 2))
    for local_edge in range(3):
        edge = mesh.cell_edges[cell, local_edge]
        start, end = mesh.vertices[mesh.edges[edge]]
        edge_points, edge_weights, params = map_edge_rule(start, end, edge_rule)
        psi = edge_basis_values(k, params)
        trace, trace_grad, _ = basis.evaluate(edge_points)
        normal = mesh.outward_normal(cell, local_edge)
        normals[local_edge] = normal
        vb, vg = _edge_slices(k, local_edge)

        weighted_psi = edge_weights[:, None] * psi
        trace_psi = trace.T @ weighted_psi
        for i in range(2):
            grad_rhs[i, :, vb] += normal[i] * trace_psi
            for j in range(2):
                hess_rhs[i, j, :, vb] -= normal[i] * (trace_grad[:, :, j].T @ weighted_psi)
                hess_rhs[i, j, :, vg[i]] += normal[j] * trace_psi

        root = np.sqrt(edge_weights)[:, None]
        rows = np.zeros((len(edge_weights), size))
        rows[:, :dim] = trace
        rows[:, vb] = -psi
        value_rows.append(root * rows)
        for i in range(2):
            rows = np.zeros((len(edge_weights), size))
            rows[:, :dim] = trace_grad[:, :, i]
            rows[:, vg[i]] = -psi
            grad_rows.append(root * rows)

    dw2 = np.vstack([cho_solve(factor, hess_rhs[i, j]) for i in range(2) for j in range(2)])
    gw = np.vstack([cho_solve(factor, grad_rhs[i]) for i in range(2)])

    return LocalOperators(
        cell=int(cell),
        degree=k,
        basis=basis,
        dw2=dw2,
        gw=gw,
        mass=mass,
        mass_factor=factor,
        jump_value=np.vstack(value_rows),
        jump_grad=np.vstack(grad_rows),
        h=float(mesh.cell_diameters[cell]),
        area=area,
        edges=np.array(mesh.cell_edges[cell]),
        normals=normals,
        quad_points=points,
        quad_weights=weights,
        quad_values=values,
    )


def local_operators(mesh, k, threads=1):
    """ Local operators of every cell, in cell order """
    return ordered_map(lambda cell: build_local_operators(mesh, cell, k), range(mesh.n_cells), threads)


def _check_local(ops, dofs):
    dofs = np.asarray(dofs, dtype=float).reshape(-1)
    if dofs.size != ops.size:
        raise ContractError(
            "Cell {cell} expects {expected} local DOFs, got {got}".format(
                cell=ops.cell, expected=ops.size, got=dofs.size
            )
        )
    return dofs


def apply_weak_hessian(ops, dofs):
    """ (2, 2, dim) coefficients of the weak Hessian of a local DOF vector """
    return (ops.dw2 @ _check_local(ops, dofs)).reshape(2, 2, ops.dim)


def apply_weak_gradient(ops, dofs):
    """ (2, dim) coefficients of the weak gradient of a local DOF vector """
    return (ops.gw @ _check_local(ops, dofs)).reshape(2, ops.dim)


class Projector:
    """L2 projections onto P_k(T), [P_k(T)]^2 and [P_k(T)]^{2x2} of one cell.

    Callbacks take an (P, 2) array of points and return values of shape (P,),
    (P, 2) or (P, 2, 2)."""

    def __init__(self, mesh, cell, k, exactness=None):
        check_degree(k)
        self.cell = cell
        self.basis = CellBasis.for_cell(mesh, cell, k)
        exactness = 2 * k + 2 if exactness is None else exactness
        self.points, self.weights = map_cell_rule(mesh.corners(cell), cell_quadrature(exactness))
        self.values = self.basis.values(self.points)
        self.factor = _factor(
            self.values.T @ (self.weights[:, None] * self.values), "Cell {cell}".format(cell=cell)
        )

    def project_samples(self, samples):
        """ Project values sampled at ``self.points``; trailing axes are components """

        samples = np.asarray(samples, dtype=float)
        shape = samples.shape[1:]
        flat = samples.reshape(len(self.weights), -1)
        moments = self.values.T @ (self.weights[:, None] * flat)
        coefficients = cho_solve(self.factor, moments)
        return np.moveaxis(coefficients.reshape((-1,) + shape), 0, -1)

    def project_scalar(self, function):
        """ Q_0: coefficients (dim,) """
        return self.project_samples(np.reshape(function(self.points), (-1,)))

    def project_vector(self, function):
        """ Q_h: coefficients (2, dim) """
        return self.project_samples(np.reshape(function(self.points), (-1, 2)))

    def project_matrix(self, function):
        """ Matrix projection: coefficients (2, 2, dim) """
        return self.project_samples(np.reshape(function(self.points), (-1, 2, 2)))


class EdgeProjector:
    """ L2 projections onto P_k(e) and [P_k(e)]^2 of one edge, in the edge basis """

    def __init__(self, mesh, edge, k, exactness=None):
        check_degree(k)
        self.edge = edge
        exactness = 2 * k + 2 if exactness is None else exactness
        start, end = mesh.vertices[mesh.edges[edge]]
        self.points, self.weights, params = map_edge_rule(start, end, edge_quadrature(exactness))
        self.values = edge_basis_values(k, params)
        self.factor = _factor(
            self.values.T @ (self.weights[:, None] * self.values), "Edge {edge}".format(edge=edge)
        )

    def _project(self, samples):
        weights = self.weights.reshape((-1,) + (1,) * (samples.ndim - 1))
        moments = self.values.T @ (weights * samples)
        return cho_solve(self.factor, moments)

    def project_scalar(self, function):
        """ Q_b: coefficients (k+1,) """
        return self._project(np.reshape(function(self.points), (-1,)))

    def project_vector(self, function):
        """ Q_g: coefficients (2, k+1) """
        return self._project(np.reshape(function(self.points), (-1, 2))).T


class WeakFunction:
    """A member of the weak finite element space on a mesh.

    Coefficients are kept in one flat ``values`` vector: all cell v0 blocks,
    then for every edge [v_b, g_x, g_y]. ``v0``, ``vb`` and ``vg`` are
    writable views into it."""

    def __init__(self, mesh, k, values=None):
        check_degree(k)
        self.mesh = mesh
        self.k = k
        size = raw_size(mesh, k)
        if values is None:
            values = np.zeros(size)
        else:
            values = np.array(values, dtype=float).reshape(-1)
        if values.size != size:
            raise ContractError(
                "Weak function on {mesh} with k={k} needs {size} coefficients, got {got}".format(
                    mesh=mesh, k=k, size=size, got=values.size
                )
            )
        self.values = values

    @property
    def _split(self):
        return self.mesh.n_cells * cell_dim(self.k)

    @property
    def v0(self):
        """ (cells, dim) cell coefficients """
        return self.values[: self._split].reshape(self.mesh.n_cells, cell_dim(self.k))

    @property
    def _edge_blocks(self):
        return self.values[self._split :].reshape(self.mesh.n_edges, 3, self.k + 1)

    @property
    def vb(self):
        """ (edges, k+1) edge trace coefficients """
        return self._edge_blocks[:, 0]

    @property
    def vg(self):
        """ (edges, 2, k+1) edge gradient coefficients """
        return self._edge_blocks[:, 1:]

    @cached_property
    def _dof_table(self):
        return local_dof_table(self.mesh, self.k)

    def local(self, cell):
        """ Local DOF vector of one cell """
        return self.values[self._dof_table[cell]]

    def local_table(self):
        """ (cells, local_size) local DOF vectors of every cell """
        return self.values[self._dof_table]

    def _check_compatible(self, other):
        if not isinstance(other, WeakFunction):
            return False
        if self.k != other.k or (self.mesh is not other.mesh and self.mesh != other.mesh):
            raise ContractError("Weak functions live on different meshes or degrees")
        return True

    def __add__(self, other):
        if not self._check_compatible(other):
            return NotImplemented
        return WeakFunction(self.mesh, self.k, self.values + other.values)

    def __sub__(self, other):
        if not self._check_compatible(other):
            return NotImplemented
        return WeakFunction(self.mesh, self.k, self.values - other.values)

    def __repr__(self):
        return "WeakFunction(k={k}, {mesh})".format(k=self.k, mesh=self.mesh)


def embed_exact(u, grad_u, mesh, k):
    """Q_h u: cell projections of u, edge projections of u and grad u.

    ``u`` maps (P, 2) points to (P,) values, ``grad_u`` to (P, 2)."""

    function = WeakFunction(mesh, k)
    v0, vb, vg = function.v0, function.vb, function.vg
    for cell in range(mesh.n_cells):
        v0[cell] = Projector(mesh, cell, k).project_scalar(u)
    for edge in range(mesh.n_edges):
        projector = EdgeProjector(mesh, edge, k)
        vb[edge] = projector.project_scalar(u)
        vg[edge] = projector.project_vector(grad_u)
    return function
