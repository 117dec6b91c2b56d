""" Manufactured and benchmark problems on the unit square """
# pylint: disable=too-many-instance-attributes

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.hermite import hermval

from ._assembly import check_eps

ORDERS = 5


@dataclass(frozen=True)
class ManufacturedCase:
    """A problem eps^2 bilap u - lap u = f on (0,1)^2.

    Every callback takes (P, 2) points. ``u`` returns (P,), ``grad_u`` (P, 2),
    ``hess_u`` (P, 2, 2). Exact callbacks are None when the solution is not
    known."""

    name: str
    eps: float
    theta: float
    f: Callable
    u: Optional[Callable] = None
    grad_u: Optional[Callable] = None
    hess_u: Optional[Callable] = None
    laplacian: Optional[Callable] = None
    bilaplacian: Optional[Callable] = None
    description: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def has_exact(self):
        """ True when u, grad_u and hess_u are available """
        return self.u is not None


def _leibniz(first, second):
    """ Derivatives 0..4 of a product from the derivatives of its factors """
    return np.array(
        [sum(math.comb(n, j) * first[j] * second[n - j] for j in range(n + 1)) for n in range(ORDERS)]
    )


def _polynomial_jet(coefficients, x):
    """ Derivatives 0..4 of sum_i c_i x^i """

    polynomial = np.polynomial.Polynomial(coefficients)
    return np.array([polynomial.deriv(n)(x) if n else polynomial(x) for n in range(ORDERS)])


def _gaussian_jet(x, center, rate):
    """ Derivatives of exp(-rate (x - center)^2) through Hermite polynomials """

    root = math.sqrt(rate)
    z = root * (x - center)
    base = np.exp(-(z ** 2))
    return np.array(
        [(-root) ** n * hermval(z, [0] * n + [1]) * base for n in range(ORDERS)]
    )


def _tanh_jet(x, beta, gamma):
    """ Derivatives of 1 - tanh((beta - x) / gamma) """

    t = np.tanh((beta - x) / gamma)
    s = 1.0 - t ** 2
    tanh_derivatives = (t, s, -2.0 * t * s, s * (6.0 * t ** 2 - 2.0), s * (16.0 * t - 24.0 * t ** 3))
    jet = [1.0 - t]
    for n in range(1, ORDERS):
        jet.append(-((-1.0 / gamma) ** n) * tanh_derivatives[n])
    return np.array(jet)


def _decay_jet(x, eps, sign, shift):
    """Derivatives of exp(sign (x - shift) / eps), each computed as one
    exponential of n log(1/eps) + sign (x - shift) / eps"""

    exponent = sign * (x - shift) / eps
    scale = math.log(1.0 / eps)
    return np.array([sign ** n * np.exp(n * scale + exponent) for n in range(ORDERS)])


class _Separable:
    """ u(x, y) = a(x) b(y) from the derivative jets of its factors """

    def __init__(self, jet_x, jet_y, eps):
        self.jet_x = jet_x
        self.jet_y = jet_y
        self.eps = eps

    def _jets(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self.jet_x(points[:, 0]), self.jet_y(points[:, 1])

    def u(self, points):
        """ Value """
        a, b = self._jets(points)
        return a[0] * b[0]

    def grad_u(self, points):
        """ Gradient """
        a, b = self._jets(points)
        return np.stack((a[1] * b[0], a[0] * b[1]), axis=-1)

    def hess_u(self, points):
        """ Hessian """
        a, b = self._jets(points)
        mixed = a[1] * b[1]
        return np.stack(
            (np.stack((a[2] * b[0], mixed), axis=-1), np.stack((mixed, a[0] * b[2]), axis=-1)),
            axis=-2,
        )

    def laplacian(self, points):
        """ Laplacian """
        a, b = self._jets(points)
        return a[2] * b[0] + a[0] * b[2]

    def bilaplacian(self, points):
        """ Bilaplacian """
        a, b = self._jets(points)
        return a[4] * b[0] + 2.0 * a[2] * b[2] + a[0] * b[4]

    def f(self, points):
        """ eps^2 bilap u - lap u """
        a, b = self._jets(points)
        bilaplacian = a[4] * b[0] + 2.0 * a[2] * b[2] + a[0] * b[4]
        return self.eps ** 2 * bilaplacian - (a[2] * b[0] + a[0] * b[2])


def _boundary_metadata(solution, samples=401):
    """ Largest |u| and |grad u . n| found on the boundary of the unit square """

    s = np.linspace(0.0, 1.0, samples)
    zeros, ones = np.zeros_like(s), np.ones_like(s)
    sides = (
        (np.column_stack((s, zeros)), (0.0, -1.0)),
        (np.column_stack((ones, s)), (1.0, 0.0)),
        (np.column_stack((s, ones)), (0.0, 1.0)),
        (np.column_stack((zeros, s)), (-1.0, 0.0)),
    )
    value = max(float(np.max(np.abs(solution.u(points)))) for points, _ in sides)
    normal = max(
        float(np.max(np.abs(solution.grad_u(points) @ np.array(n)))) for points, n in sides
    )
    return {"boundary_value_max": value, "normal_derivative_max": normal}


def _case(name, eps, theta, solution, description, **metadata):
    metadata.update(_boundary_metadata(solution))
    return ManufacturedCase(
        name=name,
        eps=eps,
        theta=theta,
        f=solution.f,
        u=solution.u,
        grad_u=solution.grad_u,
        hess_u=solution.hess_u,
        laplacian=solution.laplacian,
        bilaplacian=solution.bilaplacian,
        description=description,
        metadata=metadata,
    )


def example_1(eps=1.0, theta=0.3):
    """ Sharp internal peak: xy(1-x)(1-y) exp(-1000((x-0.5)^2 + (y-0.117)^2)) """

    eps = check_eps(eps)
    solution = _Separable(
        lambda x: _leibniz(_polynomial_jet((0.0, 1.0, -1.0), x), _gaussian_jet(x, 0.5, 1000.0)),
        lambda y: _leibniz(_polynomial_jet((0.0, 1.0, -1.0), y), _gaussian_jet(y, 0.117, 1000.0)),
        eps,
    )
    return _case(
        "internal-peak", eps, theta, solution, "sharp peak centred at (0.5, 0.117)", center=(0.5, 0.117)
    )


def example_2(eps=1.0, theta=0.3, beta=0.5, gamma=0.05):
    """ Interior layer: 0.5 x(1-x)(1-y)(1 - tanh((beta - x)/gamma)) """

    eps = check_eps(eps)
    if not gamma > 0.0:
        raise ValueError("gamma must be positive, got {gamma}".format(gamma=gamma))
    solution = _Separable(
        lambda x: _leibniz(_polynomial_jet((0.0, 0.5, -0.5), x), _tanh_jet(x, beta, gamma)),
        lambda y: _polynomial_jet((1.0, -1.0), y),
        eps,
    )
    return _case(
        "interior-layer",
        eps,
        theta,
        solution,
        "tanh layer along x = {beta} of width {gamma}".format(beta=beta, gamma=gamma),
        beta=beta,
        gamma=gamma,
    )


def _boundary_layer_factors(eps):
    """ Derivative jets of the x and y factors of the boundary layer product """

    tail = math.exp(-1.0 / eps)
    l = 1.0 - tail
    q = 2.0 - l
    d = 1.0 / (q - 2.0 * eps * l)
    amplitude = math.pi * eps / l

    def jet_x(x):
        trig = np.array([math.pi ** n * np.sin(math.pi * x + n * math.pi / 2.0) for n in range(ORDERS)])
        layers = _decay_jet(x, eps, -1.0, 0.0) + _decay_jet(x, eps, 1.0, 1.0)
        layers[0] -= 1.0 + tail
        return 0.5 * (trig + amplitude * layers)

    def jet_y(y):
        jet = _polynomial_jet((0.0, 2.0, 0.0, -2.0), y)
        jet[0] += eps * (l * d * (1.0 - 2.0 * y) - 3.0 * q / l)
        jet[1] += -2.0 * eps * l * d
        jet += eps * (3.0 / l - d) * _decay_jet(y, eps, -1.0, 0.0)
        jet += eps * (3.0 / l + d) * _decay_jet(y, eps, 1.0, 1.0)
        return jet

    return jet_x, jet_y, {"l": l, "q": q, "d": d}


def example_3(eps=1e-6, theta=0.5):
    """ Product of boundary layer profiles g(x) p(y) """

    eps = check_eps(eps)
    jet_x, jet_y, constants = _boundary_layer_factors(eps)
    return _case(
        "boundary-layer-product",
        eps,
        theta,
        _Separable(jet_x, jet_y, eps),
        "boundary layers of width eps on all four sides",
        **constants
    )


def example_4(eps=1e-6, theta=0.3):
    """ f = 2 pi^2 (1 - cos 2 pi x cos 2 pi y), solution unknown """

    eps = check_eps(eps)

    def f(points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return 2.0 * math.pi ** 2 * (
            1.0 - np.cos(2.0 * math.pi * points[:, 0]) * np.cos(2.0 * math.pi * points[:, 1])
        )

    return ManufacturedCase(
        name="four-layers",
        eps=eps,
        theta=theta,
        f=f,
        description="four boundary layers, no closed form solution",
    )


CASES = {
    "internal-peak": example_1,
    "interior-layer": example_2,
    "boundary-layer-product": example_3,
    "four-layers": example_4,
}


def case_names():
    """ Registered case names """
    return list(CASES)


def get_case(name, eps=None, theta=None, **parameters):
    """ Build a registered case; eps and theta default to the case's own values """

    try:
        factory = CASES[name]
    except KeyError:
        raise ValueError(
            "Unknown case '{name}', use one of {names}".format(name=name, names=", ".join(CASES))
        ) from None
    if eps is not None:
        parameters["eps"] = eps
    if theta is not None:
        parameters["theta"] = theta
    return factory(**parameters)
