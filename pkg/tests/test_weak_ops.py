""" Weak Hessian, weak gradient and the projections behind them """
# pylint: disable=missing-function-docstring

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import degrees, triangles
from wg_plate import (
    ContractError,
    EdgeProjector,
    Projector,
    WeakFunction,
    apply_weak_gradient,
    apply_weak_hessian,
    build_local_operators,
    embed_exact,
    example_1,
    unit_square_mesh,
)
from wg_plate._basis import edge_basis_values
from wg_plate._quadrature import cell_quadrature, edge_quadrature, map_cell_rule, map_edge_rule
from wg_plate._weak_ops import local_size


def monomial(a, b, origin=(0.0, 0.0)):
    """ (x - x0)^a (y - y0)^b with its gradient and hessian, as point callbacks """

    def power(values, p):
        return values ** p if p >= 0 else np.zeros_like(values)

    def shifted(points):
        points = np.asarray(points) - np.asarray(origin)
        return points[:, 0], points[:, 1]

    def value(points):
        x, y = shifted(points)
        return power(x, a) * power(y, b)

    def gradient(points):
        x, y = shifted(points)
        return np.column_stack((a * power(x, a - 1) * power(y, b), b * power(x, a) * power(y, b - 1)))

    def hessian(points):
        x, y = shifted(points)
        result = np.empty((len(points), 2, 2))
        result[:, 0, 0] = a * (a - 1) * power(x, a - 2) * power(y, b)
        result[:, 0, 1] = result[:, 1, 0] = a * b * power(x, a - 1) * power(y, b - 1)
        result[:, 1, 1] = b * (b - 1) * power(x, a) * power(y, b - 2)
        return result

    return value, gradient, hessian


def sample_points(mesh, cell):
    corners = mesh.corners(cell)
    weights = np.array([[0.6, 0.2, 0.2], [0.1, 0.7, 0.2], [0.25, 0.25, 0.5], [1 / 3, 1 / 3, 1 / 3]])
    return weights @ corners


@pytest.mark.parametrize(
    "a, b, expected_hessian, expected_gradient",
    [
        (1, 0, [[0.0, 0.0], [0.0, 0.0]], [1.0, 0.0]),
        (2, 0, [[2.0, 0.0], [0.0, 0.0]], None),
        (1, 1, [[0.0, 1.0], [1.0, 0.0]], None),
    ],
)
def test_embedded_monomials(a, b, expected_hessian, expected_gradient):
    mesh = unit_square_mesh(2)
    value, gradient, _ = monomial(a, b)
    function = embed_exact(value, gradient, mesh, 2)
    for cell in range(mesh.n_cells):
        ops = build_local_operators(mesh, cell, 2)
        local = function.local(cell)
        hessian = apply_weak_hessian(ops, local)
        np.testing.assert_allclose(hessian[:, :, 0], expected_hessian, atol=1e-10)
        np.testing.assert_allclose(hessian[:, :, 1:], 0.0, atol=1e-10)
        if expected_gradient is not None:
            weak_gradient = apply_weak_gradient(ops, local)
            np.testing.assert_allclose(weak_gradient[:, 0], expected_gradient, atol=1e-10)
            np.testing.assert_allclose(weak_gradient[:, 1:], 0.0, atol=1e-10)


def test_zero_maps_to_zero():
    mesh = unit_square_mesh(1)
    ops = build_local_operators(mesh, 0, 3)
    zero = np.zeros(local_size(3))
    assert not np.any(apply_weak_hessian(ops, zero))
    assert not np.any(apply_weak_gradient(ops, zero))


def test_wrong_local_size():
    ops = build_local_operators(unit_square_mesh(1), 0, 2)
    with pytest.raises(ContractError):
        apply_weak_hessian(ops, np.zeros(local_size(2) + 1))


@given(mesh=triangles(), k=degrees, data=st.data())
@settings(max_examples=100, deadline=None)
def test_weak_derivatives_of_polynomials_are_exact(mesh, k, data):
    degree = data.draw(st.integers(0, k))
    a = data.draw(st.integers(0, degree))
    value, gradient, hessian = monomial(a, degree - a, origin=mesh.vertices[0])

    function = embed_exact(value, gradient, mesh, k)
    ops = build_local_operators(mesh, 0, k)
    local = function.local(0)
    points = sample_points(mesh, 0)

    weak_hessian = ops.basis.evaluate_polynomial(apply_weak_hessian(ops, local), points)
    exact = np.moveaxis(hessian(points), 0, -1)
    scale = max(1.0, np.abs(exact).max())
    np.testing.assert_allclose(weak_hessian, exact, rtol=1e-8, atol=1e-8 * scale)

    weak_gradient = ops.basis.evaluate_polynomial(apply_weak_gradient(ops, local), points)
    exact = gradient(points).T
    scale = max(1.0, np.abs(exact).max())
    np.testing.assert_allclose(weak_gradient, exact, rtol=1e-8, atol=1e-8 * scale)


def integration_by_parts(mesh, cell, k):
    """Independently integrated moments (dim, local_size) of the defining identities.

    Returns the weak Hessian moments per component (i, j) and the weak
    gradient moments per component i."""

    ops = build_local_operators(mesh, cell, k)
    basis, dim, size = ops.basis, ops.dim, ops.size
    n = k + 1
    points, weights = map_cell_rule(mesh.corners(cell), cell_quadrature(2 * k + 4))
    values, gradients, hessians = basis.evaluate(points)

    hess = np.zeros((2, 2, dim, size))
    grad = np.zeros((2, dim, size))
    for i in range(2):
        grad[i, :, :dim] = -(weights[:, None] * gradients[:, :, i]).T @ values
        for j in range(2):
            hess[i, j, :, :dim] = (weights[:, None] * hessians[:, :, i, j]).T @ values

    for local_edge in range(3):
        edge = mesh.cell_edges[cell, local_edge]
        start, end = mesh.vertices[mesh.edges[edge]]
        edge_points, edge_weights, params = map_edge_rule(start, end, edge_quadrature(2 * k + 4))
        psi = edge_basis_values(k, params)
        trace, trace_grad, _ = basis.evaluate(edge_points)
        normal = mesh.outward_normal(cell, local_edge)
        vb = slice(dim + local_edge * n, dim + (local_edge + 1) * n)
        g_start = dim + 3 * n + 2 * local_edge * n
        for i in range(2):
            grad[i, :, vb] += normal[i] * (edge_weights[:, None] * trace).T @ psi
            for j in range(2):
                hess[i, j, :, vb] -= normal[i] * (edge_weights[:, None] * trace_grad[:, :, j]).T @ psi
                g = slice(g_start + i * n, g_start + (i + 1) * n)
                hess[i, j, :, g] += normal[j] * (edge_weights[:, None] * trace).T @ psi
    mass = (weights[:, None] * values).T @ values
    return ops, mass, hess, grad


@pytest.mark.parametrize("k", [2, 3, 4])
def test_defining_identities_hold(k):
    rng = np.random.default_rng(k)
    mesh = unit_square_mesh(3)
    for cell in (0, 7, 13):
        ops, mass, hess, grad = integration_by_parts(mesh, cell, k)
        vectors = rng.standard_normal((ops.size, 40))
        for i in range(2):
            for j in range(2):
                rows = slice((2 * i + j) * ops.dim, (2 * i + j + 1) * ops.dim)
                left = mass @ ops.dw2[rows] @ vectors
                right = hess[i, j] @ vectors
                np.testing.assert_allclose(left, right, atol=1e-9 * np.abs(right).max())
            rows = slice(i * ops.dim, (i + 1) * ops.dim)
            left = mass @ ops.gw[rows] @ vectors
            right = grad[i] @ vectors
            np.testing.assert_allclose(left, right, atol=1e-9 * np.abs(right).max())


@pytest.mark.parametrize("k", [2, 3, 4])
def test_projection_is_idempotent(k):
    rng = np.random.default_rng(11)
    mesh = unit_square_mesh(2)
    projector = Projector(mesh, 5, k)
    coefficients = rng.standard_normal((2, 2, projector.basis.dim))

    def polynomial(points):
        return np.moveaxis(projector.basis.evaluate_polynomial(coefficients, points), -1, 0)

    np.testing.assert_allclose(projector.project_matrix(polynomial), coefficients, atol=1e-9)
    np.testing.assert_allclose(
        projector.project_scalar(lambda points: polynomial(points)[:, 0, 0]),
        coefficients[0, 0],
        atol=1e-9,
    )


def test_edge_projection_of_traces():
    mesh = unit_square_mesh(2)
    value, gradient, _ = monomial(2, 1)
    projector = EdgeProjector(mesh, 3, 3)
    start, end = mesh.vertices[mesh.edges[3]]
    t = np.array([0.0, 0.3, 1.0])
    points = start + np.outer(t, end - start)
    psi = edge_basis_values(3, t)
    assert projector.project_scalar(value).shape == (4,)
    assert projector.project_vector(gradient).shape == (2, 4)
    np.testing.assert_allclose(psi @ projector.project_scalar(value), value(points), atol=1e-12)
    np.testing.assert_allclose(
        psi @ projector.project_vector(gradient).T, gradient(points), atol=1e-12
    )


def test_embedding_of_constants():
    mesh = unit_square_mesh(2)
    function = embed_exact(
        lambda points: np.ones(len(points)), lambda points: np.zeros((len(points), 2)), mesh, 2
    )
    expected = np.zeros(function.v0.shape[1])
    expected[0] = 1.0
    np.testing.assert_allclose(function.v0, np.tile(expected, (mesh.n_cells, 1)), atol=1e-12)
    np.testing.assert_allclose(function.vb, np.tile([1.0, 0.0, 0.0], (mesh.n_edges, 1)), atol=1e-12)
    np.testing.assert_allclose(function.vg, 0.0, atol=1e-12)


def test_embedding_reproduces_polynomials():
    mesh = unit_square_mesh(2)
    value, gradient, _ = monomial(2, 0)

    def quadratic(points):
        return value(points) + points[:, 1]

    def quadratic_gradient(points):
        return gradient(points) + np.array([0.0, 1.0])

    function = embed_exact(quadratic, quadratic_gradient, mesh, 2)
    for cell in range(mesh.n_cells):
        points = sample_points(mesh, cell)
        ops = build_local_operators(mesh, cell, 2)
        np.testing.assert_allclose(
            ops.basis.evaluate_polynomial(function.v0[cell], points), quadratic(points), atol=1e-12
        )


def projection_error(case, n, k=2):
    mesh = unit_square_mesh(n)
    total = 0.0
    for cell in range(mesh.n_cells):
        projector = Projector(mesh, cell, k, exactness=2 * k + 4)
        coefficients = projector.project_scalar(case.u)
        difference = case.u(projector.points) - projector.values @ coefficients
        total += projector.weights @ difference ** 2
    return np.sqrt(total)


def test_projection_error_decreases():
    case = example_1()
    coarse, fine = projection_error(case, 32), projection_error(case, 64)
    assert fine < coarse / 4.0


def test_weak_function_views_and_arithmetic():
    mesh = unit_square_mesh(1)
    first = WeakFunction(mesh, 2)
    first.vb[0] = [1.0, 2.0, 3.0]
    first.vg[4, 1] = [4.0, 5.0, 6.0]
    assert first.values[12:15].tolist() == [1.0, 2.0, 3.0]
    assert first.values[-3:].tolist() == [4.0, 5.0, 6.0]

    total = first + first
    assert np.array_equal(total.values, 2.0 * first.values)
    assert not np.any((total - total).values)

    with pytest.raises(ContractError):
        first + WeakFunction(unit_square_mesh(2), 2)  # pylint: disable=expression-not-assigned
    with pytest.raises(ContractError):
        WeakFunction(mesh, 2, np.zeros(3))



def test_embedding_on_a_single_square():
    mesh = unit_square_mesh(1)
    function = embed_exact(
        lambda points: np.ones(len(points)), lambda points: np.zeros((len(points), 2)), mesh, 2
    )
    assert function.vb.shape == (mesh.n_edges, 3)
    np.testing.assert_allclose(function.vb[:, 0], 1.0, atol=1e-12)


def test_local_vectors_follow_the_values():
    mesh = unit_square_mesh(2)
    function = WeakFunction(mesh, 2, np.arange(mesh.n_cells * 6 + mesh.n_edges * 9))
    before = function.local(3)
    np.testing.assert_array_equal(before, function.local_table()[3])
    function.values *= 2.0
    np.testing.assert_array_equal(function.local(3), 2.0 * before)
