""" Gauss quadrature on the reference triangle and the unit interval """

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from ._errors import QuadratureError

MAX_EXACTNESS = 40


@dataclass(frozen=True)
class QuadRule:
    """A quadrature rule on a reference domain.

    Cell rules live on the triangle {(0,0),(1,0),(0,1)} (points are (xi, eta),
    weights sum to 1/2). Edge rules live on [0, 1] (weights sum to 1)."""

    points: np.ndarray
    weights: np.ndarray
    exactness: int

    @property
    def barycentric(self):
        """ Barycentric coordinates of cell rule points """
        xi, eta = self.points[:, 0], self.points[:, 1]
        return np.column_stack((1.0 - xi - eta, xi, eta))

    def __len__(self):
        return len(self.weights)


def _check_exactness(exactness):
    if exactness < 0:
        raise QuadratureError(
            "Quadrature exactness must be non negative, got {exactness}".format(
                exactness=exactness
            )
        )
    if exactness > MAX_EXACTNESS:
        raise QuadratureError(
            "Quadrature exactness {exactness} not supported, maximum is {maximum}".format(
                exactness=exactness, maximum=MAX_EXACTNESS
            )
        )


def _frozen(array):
    array = np.ascontiguousarray(array, dtype=float)
    array.flags.writeable = False
    return array


@lru_cache(maxsize=None)
def edge_quadrature(exactness):
    """ Gauss-Legendre rule on [0, 1] exact for polynomials of degree <= exactness """

    _check_exactness(exactness)
    count = exactness // 2 + 1
    points, weights = leggauss(count)
    return QuadRule(
        points=_frozen((1.0 + points) / 2.0), weights=_frozen(weights / 2.0), exactness=exactness
    )


@lru_cache(maxsize=None)
def cell_quadrature(exactness):
    """Collapsed (Duffy) Gauss rule on the reference triangle.

    The square [0,1]^2 is mapped by (u, v) -> (u, (1-u) v). A bivariate
    polynomial of total degree m becomes degree m + 1 in u (Jacobian included)
    and m in v, so ceil((m + 2) / 2) Gauss points per direction suffice."""

    _check_exactness(exactness)
    count = (exactness + 3) // 2
    nodes, weights = leggauss(count)
    nodes = (1.0 + nodes) / 2.0
    weights = weights / 2.0

    u, v = np.meshgrid(nodes, nodes, indexing="ij")
    wu, wv = np.meshgrid(weights, weights, indexing="ij")
    xi = u.ravel()
    eta = ((1.0 - u) * v).ravel()
    w = (wu * wv * (1.0 - u)).ravel()
    return QuadRule(points=_frozen(np.column_stack((xi, eta))), weights=_frozen(w), exactness=exactness)


def map_cell_rule(corners, rule):
    """ Physical points and weights of a cell rule on the triangle with the given corners """

    corners = np.asarray(corners, dtype=float)
    jacobian = np.column_stack((corners[1] - corners[0], corners[2] - corners[0]))
    det = jacobian[0, 0] * jacobian[1, 1] - jacobian[0, 1] * jacobian[1, 0]
    points = corners[0] + rule.points @ jacobian.T
    return points, rule.weights * abs(det)


def map_edge_rule(start, end, rule):
    """ Physical points, weights and reference parameters of an edge rule on [start, end] """

    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    length = float(np.hypot(*(end - start)))
    points = start + np.outer(rule.points, end - start)
    return points, rule.weights * length, rule.points
