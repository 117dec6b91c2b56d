""" Mesh topology and newest vertex bisection """
# pylint: disable=missing-function-docstring

import math

import numpy as np
import pytest

from wg_plate import ContractError, GeometryError, Mesh, refine, refine_uniform, unit_square_mesh


def boundary_length(mesh):
    return float(mesh.edge_lengths[mesh.boundary_edge_ids].sum())


def test_unit_square_one():
    mesh = unit_square_mesh(1)
    assert (mesh.n_vertices, mesh.n_cells, mesh.n_edges) == (4, 2, 5)
    assert len(mesh.boundary_edge_ids) == 4
    assert len(mesh.interior_edge_ids) == 1
    assert mesh.h == pytest.approx(math.sqrt(2.0))


def test_unit_square_two():
    mesh = unit_square_mesh(2)
    assert (mesh.n_vertices, mesh.n_cells, mesh.n_edges) == (9, 8, 16)
    assert mesh.euler_characteristic() == 1


def test_unit_square_rejects_zero():
    with pytest.raises(ValueError):
        unit_square_mesh(0)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_unit_square_invariants(n):
    mesh = unit_square_mesh(n)
    assert np.all(mesh.areas > 0.0)
    assert mesh.areas.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.linalg.norm(mesh.normals, axis=1), 1.0, atol=1e-12)
    assert mesh.euler_characteristic() == 1
    partition = np.sort(np.concatenate((mesh.boundary_edge_ids, mesh.interior_edge_ids)))
    assert np.array_equal(partition, np.arange(mesh.n_edges))
    assert boundary_length(mesh) == pytest.approx(4.0)


def test_cell_and_edge_views():
    mesh = unit_square_mesh(2)
    cell = mesh.cell(3)
    assert cell.h_T == pytest.approx(math.sqrt(2.0) / 2.0)
    assert cell.area == pytest.approx(0.125)
    for edge_id in cell.edge_ids:
        assert set(mesh.edge(edge_id).vertex_ids) <= set(cell.vertex_ids)

    boundary = mesh.edge(int(mesh.boundary_edge_ids[0]))
    assert boundary.is_boundary and boundary.cell_minus is None
    interior = mesh.edge(int(mesh.interior_edge_ids[0]))
    assert not interior.is_boundary


def test_interior_normals_point_from_plus_to_minus():
    mesh = refine(unit_square_mesh(3), [0, 4, 7])
    for edge in mesh.interior_edge_ids:
        plus, minus = mesh.edge_cells[edge]
        assert plus < minus
        assert mesh.normals[edge] @ (mesh.centroids[minus] - mesh.centroids[plus]) > 0.0


def test_boundary_normals_point_outward():
    mesh = unit_square_mesh(2)
    for edge in mesh.boundary_edge_ids:
        midpoint = mesh.vertices[mesh.edges[edge]].mean(axis=0)
        assert mesh.normals[edge] @ (midpoint - np.array([0.5, 0.5])) > 0.0


def test_clockwise_cells_are_flipped():
    vertices = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    mesh = Mesh(vertices, [[0, 1, 2], [0, 3, 2]])
    assert np.all(mesh.areas > 0.0)
    assert list(mesh.cells[1]) == [0, 2, 3]


def test_degenerate_cell_rejected():
    with pytest.raises(GeometryError):
        Mesh([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [[0, 1, 2]])


def test_out_of_range_vertex_rejected():
    with pytest.raises(ContractError):
        Mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 3]])


def test_refine_both_cells_of_unit_square():
    mesh = refine(unit_square_mesh(1), [0, 1])
    assert (mesh.n_vertices, mesh.n_cells, mesh.n_edges) == (5, 4, 8)
    assert np.allclose(mesh.vertices[4], [0.5, 0.5])
    assert mesh.euler_characteristic() == 1


def test_refine_nothing_keeps_mesh():
    mesh = unit_square_mesh(3)
    assert refine(mesh, []) == mesh
    assert refine(mesh, set()).n_edges == mesh.n_edges


def test_refine_corner_cell_stays_conforming():
    mesh = refine(unit_square_mesh(2), [0])
    assert mesh.is_conforming()
    assert mesh.hanging_vertices() == []
    assert boundary_length(mesh) == pytest.approx(4.0)
    assert mesh.euler_characteristic() == 1
    assert mesh.areas.sum() == pytest.approx(1.0, abs=1e-12)


def test_refine_rejects_unknown_cells():
    with pytest.raises(ValueError):
        refine(unit_square_mesh(1), [2])


def test_parents_and_generation():
    coarse = unit_square_mesh(3)
    fine = refine(coarse, [4])
    assert len(fine.parents) == fine.n_cells
    assert np.allclose(np.bincount(fine.parents, weights=fine.areas), coarse.areas)
    assert fine.generation[fine.parents == 4].min() >= 1
    assert fine.generation.max() <= 2


def test_unmarked_untouched_cells_are_kept():
    coarse = unit_square_mesh(4)
    fine = refine(coarse, [10])
    counts = np.bincount(fine.parents, minlength=coarse.n_cells)
    assert counts[10] >= 2
    for cell in np.flatnonzero(counts == 1):
        child = int(np.flatnonzero(fine.parents == cell)[0])
        assert np.array_equal(fine.cells[child], coarse.cells[cell])
    assert np.count_nonzero(counts > 1) < coarse.n_cells


def test_minimum_angle_is_preserved_by_bisection():
    mesh = unit_square_mesh(1)
    initial = mesh.min_angles().min()
    for _ in range(10):
        mesh = refine(mesh, range(mesh.n_cells))
        assert mesh.min_angles().min() >= initial - 1e-12
        assert mesh.is_conforming()
    assert mesh.n_cells == 2 * 2 ** 10


def test_refine_uniform_halves_h():
    coarse = unit_square_mesh(2)
    fine = refine_uniform(coarse)
    assert fine.n_cells == 4 * coarse.n_cells
    assert fine.h == pytest.approx(coarse.h / 2.0)
    assert np.allclose(np.bincount(fine.parents, weights=fine.areas), coarse.areas)


def test_mesh_equality():
    assert unit_square_mesh(2) == unit_square_mesh(2)
    assert unit_square_mesh(2) != unit_square_mesh(3)
