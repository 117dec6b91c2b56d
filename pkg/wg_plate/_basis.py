""" Scaled monomial bases on cells and edges """

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

SUPPORTED_DEGREES = (2, 3, 4)


def cell_dim(k):
    """ Dimension of P_k on a triangle """
    return (k + 1) * (k + 2) // 2


@lru_cache(maxsize=None)
def monomial_exponents(k):
    """Exponent pairs (a, b) of the degree-k monomials, ordered by total degree.

    Index m of the basis is the m-th pair: (0,0), (1,0), (0,1), (2,0), (1,1), ..."""

    exponents = [(degree - j, j) for degree in range(k + 1) for j in range(degree + 1)]
    array = np.array(exponents, dtype=int)
    array.flags.writeable = False
    return array


def check_degree(k):
    """ Validate a polynomial degree """
    if k not in SUPPORTED_DEGREES:
        raise ValueError(
            "Polynomial degree k={k} not supported, use one of {supported}".format(
                k=k, supported=SUPPORTED_DEGREES
            )
        )


def _powers(values, k):
    """ values**p, p*values**(p-1), p*(p-1)*values**(p-2) for p = 0..k """

    p = np.arange(k + 1)
    base = values[:, None] ** p
    first = np.zeros_like(base)
    second = np.zeros_like(base)
    first[:, 1:] = p[1:] * base[:, :-1]
    second[:, 2:] = p[2:] * (p[2:] - 1) * base[:, :-2]
    return base, first, second


@dataclass(frozen=True)
class CellBasis:
    """((x - x_T)/h_T)^a ((y - y_T)/h_T)^b for a + b <= k, centered at the centroid"""

    degree: int
    center: np.ndarray
    scale: float
    exponents: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "exponents", monomial_exponents(self.degree))

    @classmethod
    def for_cell(cls, mesh, cell, k):
        """ Basis on a mesh cell """
        return cls(degree=k, center=mesh.centroids[cell], scale=float(mesh.cell_diameters[cell]))

    @property
    def dim(self):
        """ Number of basis functions """
        return cell_dim(self.degree)

    def evaluate(self, points):
        """Values (P, dim), gradients (P, dim, 2) and hessians (P, dim, 2, 2) at points (P, 2)"""

        points = np.atleast_2d(np.asarray(points, dtype=float))
        h = self.scale
        xi = (points[:, 0] - self.center[0]) / h
        eta = (points[:, 1] - self.center[1]) / h
        px, dpx, ddpx = _powers(xi, self.degree)
        py, dpy, ddpy = _powers(eta, self.degree)
        a, b = self.exponents[:, 0], self.exponents[:, 1]

        values = px[:, a] * py[:, b]
        gradients = np.stack((dpx[:, a] * py[:, b], px[:, a] * dpy[:, b]), axis=-1) / h
        hessians = np.empty(values.shape + (2, 2))
        hessians[..., 0, 0] = ddpx[:, a] * py[:, b]
        hessians[..., 0, 1] = dpx[:, a] * dpy[:, b]
        hessians[..., 1, 0] = hessians[..., 0, 1]
        hessians[..., 1, 1] = px[:, a] * ddpy[:, b]
        return values, gradients, hessians / h ** 2

    def values(self, points):
        """ Basis values only """
        return self.evaluate(points)[0]

    def derivative_matrices(self):
        """Exact differentiation on coefficients.

        Returns (Dx, Dy) with d/dx p = Dx @ c for p = sum_m c_m phi_m; the
        derivative (degree <= k - 1) is expressed in the same basis."""

        return _derivative_matrices(self.degree, self.scale)

    def evaluate_polynomial(self, coefficients, points):
        """ Value of sum_m c_m phi_m at points; coefficients may carry leading component axes """
        values = self.values(points)
        return np.asarray(coefficients) @ values.T


def _derivative_matrices(k, h):
    exponents = monomial_exponents(k)
    lookup = {(int(a), int(b)): index for index, (a, b) in enumerate(exponents)}
    dim = len(exponents)
    dx = np.zeros((dim, dim))
    dy = np.zeros((dim, dim))
    for column, (a, b) in enumerate(exponents):
        if a > 0:
            dx[lookup[(a - 1, b)], column] = a / h
        if b > 0:
            dy[lookup[(a, b - 1)], column] = b / h
    return dx, dy


def edge_basis_values(k, parameters):
    """Edge basis (t - 1/2)^j, j = 0..k, at reference parameters t in [0, 1].

    t runs from the first to the second vertex of the edge as stored in the
    mesh, so both neighbouring cells see the same functions."""

    shifted = np.asarray(parameters, dtype=float) - 0.5
    return shifted[:, None] ** np.arange(k + 1)


def eval_cell_basis(basis, point):
    """ Values, gradients and hessians of every basis function at one point """
    values, gradients, hessians = basis.evaluate(np.reshape(point, (1, 2)))
    return values[0], gradients[0], hessians[0]
