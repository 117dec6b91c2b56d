""" Conforming triangular meshes and newest vertex bisection """
# pylint: disable=too-many-instance-attributes

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._errors import ContractError, GeometryError

LOGGER = logging.getLogger(__name__)


class Vertex(NamedTuple):
    """ Mesh vertex """

    x: float
    y: float


@dataclass(frozen=True)
class Cell:
    """ View of one triangle of a mesh """

    vertex_ids: tuple
    edge_ids: tuple
    refinement_edge: int
    h_T: float
    area: float


@dataclass(frozen=True)
class Edge:
    """ View of one edge of a mesh """

    vertex_ids: tuple
    cell_plus: int
    cell_minus: Optional[int]
    normal: tuple
    h_e: float

    @property
    def is_boundary(self):
        """ True for edges on the domain boundary """
        return self.cell_minus is None


def _readonly(array):
    array.flags.writeable = False
    return array


def _local_edges(cells):
    """ (M, 3, 2) vertex pairs; local edge i is opposite local vertex i """
    return np.stack(
        (cells[:, [1, 2]], cells[:, [2, 0]], cells[:, [0, 1]]),
        axis=1,
    )


class Mesh:
    """Conforming triangulation with edge topology and refinement ancestry.

    Cells are stored counterclockwise. Local edge i of a cell is the edge
    opposite its local vertex i; ``refinement_edges[c]`` names the local edge
    that newest vertex bisection splits next. Every edge carries a fixed unit
    normal pointing from ``cell_plus`` (the lower cell id) to ``cell_minus``,
    outward on the boundary. Instances are immutable; refinement builds a new
    mesh."""

    def __init__(self, vertices, cells, refinement_edges=None, parents=None, generation=None):
        vertices = np.array(vertices, dtype=float).reshape(-1, 2)
        cells = np.array(cells, dtype=np.int64).reshape(-1, 3)

        if not np.all(np.isfinite(vertices)):
            raise GeometryError("Mesh vertices must be finite")
        if cells.size and (cells.min() < 0 or cells.max() >= len(vertices)):
            raise ContractError(
                "Cell vertex indices must lie in [0, {count})".format(count=len(vertices))
            )
        if np.any(cells[:, 0] == cells[:, 1]) or np.any(cells[:, 1] == cells[:, 2]) or np.any(
            cells[:, 0] == cells[:, 2]
        ):
            raise GeometryError("Cells must reference three distinct vertices")

        if refinement_edges is not None:
            refinement_edges = np.array(refinement_edges, dtype=np.int64).reshape(-1)
            if len(refinement_edges) != len(cells):
                raise ContractError("One refinement edge is required per cell")
            if np.any((refinement_edges < 0) | (refinement_edges > 2)):
                raise ContractError("Refinement edges are local indices 0, 1 or 2")

        signed = self._signed_areas(vertices, cells)
        if np.any(signed == 0.0):
            bad = int(np.flatnonzero(signed == 0.0)[0])
            raise GeometryError("Cell {cell} has zero area".format(cell=bad))

        # clockwise cells: swap local vertices 1 and 2, which swaps local edges 1 and 2
        flipped = signed < 0
        if np.any(flipped):
            cells[flipped] = cells[flipped][:, [0, 2, 1]]
            if refinement_edges is not None:
                swap = np.array([0, 2, 1])
                refinement_edges[flipped] = swap[refinement_edges[flipped]]
            signed = np.abs(signed)

        lengths = self._local_edge_lengths(vertices, cells)
        if refinement_edges is None:
            refinement_edges = np.argmax(lengths, axis=1).astype(np.int64)

        self.vertices = _readonly(vertices)
        self.cells = _readonly(cells)
        self.refinement_edges = _readonly(refinement_edges)
        self.parents = _readonly(
            np.arange(len(cells), dtype=np.int64)
            if parents is None
            else np.array(parents, dtype=np.int64).reshape(-1)
        )
        self.generation = _readonly(
            np.zeros(len(cells), dtype=np.int64)
            if generation is None
            else np.array(generation, dtype=np.int64).reshape(-1)
        )
        self.areas = _readonly(signed)
        self.centroids = _readonly(vertices[cells].mean(axis=1))
        self.cell_diameters = _readonly(lengths.max(axis=1))
        self._build_topology()

    @staticmethod
    def _signed_areas(vertices, cells):
        p0, p1, p2 = vertices[cells[:, 0]], vertices[cells[:, 1]], vertices[cells[:, 2]]
        d1, d2 = p1 - p0, p2 - p0
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @staticmethod
    def _local_edge_lengths(vertices, cells):
        pairs = _local_edges(cells)
        diff = vertices[pairs[..., 1]] - vertices[pairs[..., 0]]
        return np.hypot(diff[..., 0], diff[..., 1])

    def _build_topology(self):
        n_cells = len(self.cells)
        pairs = np.sort(_local_edges(self.cells).reshape(-1, 2), axis=1)
        edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        counts = np.bincount(inverse, minlength=len(edges))
        if np.any(counts > 2):
            bad = int(np.flatnonzero(counts > 2)[0])
            raise GeometryError(
                "Edge {edge} is shared by {count} cells".format(edge=bad, count=int(counts[bad]))
            )

        order = np.argsort(inverse, kind="stable")
        owners = np.repeat(np.arange(n_cells), 3)[order]
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        edge_cells = np.full((len(edges), 2), -1, dtype=np.int64)
        edge_cells[:, 0] = owners[starts]
        two = counts == 2
        edge_cells[two, 1] = owners[starts[two] + 1]

        start, end = self.vertices[edges[:, 0]], self.vertices[edges[:, 1]]
        tangent = end - start
        lengths = np.hypot(tangent[:, 0], tangent[:, 1])
        tangent = tangent / lengths[:, None]
        normals = np.column_stack((tangent[:, 1], -tangent[:, 0]))
        outward = np.einsum("ij,ij->i", normals, 0.5 * (start + end) - self.centroids[edge_cells[:, 0]])
        normals[outward < 0] *= -1.0

        cell_edges = inverse.reshape(n_cells, 3)
        signs = np.where(edge_cells[cell_edges, 0] == np.arange(n_cells)[:, None], 1.0, -1.0)

        self.edges = _readonly(edges.astype(np.int64))
        self.edge_cells = _readonly(edge_cells)
        self.cell_edges = _readonly(cell_edges.astype(np.int64))
        self.edge_lengths = _readonly(lengths)
        self.normals = _readonly(normals)
        self.tangents = _readonly(tangent)
        self.normal_signs = _readonly(signs)
        self.boundary_edge_mask = _readonly(edge_cells[:, 1] < 0)
        self.boundary_edge_ids = _readonly(np.flatnonzero(self.boundary_edge_mask))
        self.interior_edge_ids = _readonly(np.flatnonzero(~self.boundary_edge_mask))

    @property
    def n_vertices(self):
        """ Number of vertices """
        return len(self.vertices)

    @property
    def n_cells(self):
        """ Number of cells """
        return len(self.cells)

    @property
    def n_edges(self):
        """ Number of edges """
        return len(self.edges)

    @property
    def h(self):
        """ Global mesh size max h_T """
        return float(self.cell_diameters.max())

    @property
    def h_max(self):
        """ Alias of h """
        return self.h

    @property
    def h_min(self):
        """ Smallest cell diameter """
        return float(self.cell_diameters.min())

    def vertex(self, index):
        """ Coordinates of one vertex """
        return Vertex(*map(float, self.vertices[index]))

    def cell(self, index):
        """ Cell view """
        return Cell(
            vertex_ids=tuple(int(v) for v in self.cells[index]),
            edge_ids=tuple(int(e) for e in self.cell_edges[index]),
            refinement_edge=int(self.refinement_edges[index]),
            h_T=float(self.cell_diameters[index]),
            area=float(self.areas[index]),
        )

    def edge(self, index):
        """ Edge view """
        minus = int(self.edge_cells[index, 1])
        return Edge(
            vertex_ids=tuple(int(v) for v in self.edges[index]),
            cell_plus=int(self.edge_cells[index, 0]),
            cell_minus=None if minus < 0 else minus,
            normal=tuple(float(n) for n in self.normals[index]),
            h_e=float(self.edge_lengths[index]),
        )

    def corners(self, cell):
        """ (3, 2) vertex coordinates of a cell """
        return self.vertices[self.cells[cell]]

    def outward_normal(self, cell, local_edge):
        """ Unit normal of a local edge pointing out of the cell """
        edge = self.cell_edges[cell, local_edge]
        return self.normal_signs[cell, local_edge] * self.normals[edge]

    def min_angles(self):
        """ Smallest interior angle of every cell, in radians """
        corners = self.vertices[self.cells]
        angles = []
        for i in range(3):
            a = corners[:, (i + 1) % 3] - corners[:, i]
            b = corners[:, (i + 2) % 3] - corners[:, i]
            cosine = np.einsum("ij,ij->i", a, b) / (
                np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
            )
            angles.append(np.arccos(np.clip(cosine, -1.0, 1.0)))
        return np.min(angles, axis=0)

    def euler_characteristic(self):
        """ V - E + F, 1 for a simply connected triangulated domain """
        return self.n_vertices - self.n_edges + self.n_cells

    def hanging_vertices(self):
        """Vertices lying strictly inside a boundary edge.

        On a conforming mesh of a polygon every such edge lies on the
        domain boundary, so a vertex in its relative interior is hanging."""

        hanging = set()
        for edge in self.boundary_edge_ids:
            start, end = self.vertices[self.edges[edge]]
            direction = end - start
            length2 = direction @ direction
            rel = self.vertices - start
            t = rel @ direction / length2
            cross = rel[:, 0] * direction[1] - rel[:, 1] * direction[0]
            inside = (t > 1e-12) & (t < 1 - 1e-12) & (np.abs(cross) <= 1e-12 * length2)
            hanging.update(int(v) for v in np.flatnonzero(inside))
        return sorted(hanging)

    def is_conforming(self):
        """ True when no vertex hangs on another cell's edge """
        return not self.hanging_vertices()

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            self.vertices.shape == other.vertices.shape
            and self.cells.shape == other.cells.shape
            and np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.cells, other.cells)
            and np.array_equal(self.refinement_edges, other.refinement_edges)
        )

    __hash__ = None

    def __repr__(self):
        return "Mesh(vertices={v}, cells={c}, edges={e}, h={h:.3g})".format(
            v=self.n_vertices, c=self.n_cells, e=self.n_edges, h=self.h
        )


def unit_square_mesh(n):
    """ 2 n^2 right triangles on (0,1)^2, every square split along its (0,0)-(1,1) diagonal """

    if int(n) != n or n < 1:
        raise ValueError("Subdivision count must be a positive integer, got {n}".format(n=n))
    n = int(n)
    coordinates = np.linspace(0.0, 1.0, n + 1)
    x, y = np.meshgrid(coordinates, coordinates, indexing="xy")
    vertices = np.column_stack((x.ravel(), y.ravel()))

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    i, j = i.ravel(), j.ravel()
    v00 = j * (n + 1) + i
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1
    lower = np.column_stack((v00, v10, v11))
    upper = np.column_stack((v00, v11, v01))
    cells = np.stack((lower, upper), axis=1).reshape(-1, 3)
    return Mesh(vertices, cells)


def _bisect(triangle, midpoints):
    """ Recursively bisect a triangle whose refinement edge is (p1, p2) """

    p0, p1, p2 = triangle
    mid = midpoints.get((min(p1, p2), max(p1, p2)))
    if mid is None:
        return [(triangle, 0)]
    children = []
    for child in ((mid, p0, p1), (mid, p2, p0)):
        children.extend((leaf, depth + 1) for leaf, depth in _bisect(child, midpoints))
    return children


def _closure(mesh, marked):
    """ Edges to split so that every marked cell is bisected and the result is conforming """

    cell_ids = np.arange(mesh.n_cells)
    refinement = mesh.cell_edges[cell_ids, mesh.refinement_edges]
    split = np.zeros(mesh.n_edges, dtype=bool)
    split[refinement[marked]] = True
    while True:
        touched = split[mesh.cell_edges].any(axis=1)
        pending = touched & ~split[refinement]
        if not pending.any():
            return split
        split[refinement[pending]] = True


def refine(mesh, marked):
    """Newest vertex bisection of the marked cells plus conformity closure.

    Returns a new mesh whose ``parents`` array maps every cell to the cell of
    ``mesh`` it descends from."""

    marked = np.unique(np.asarray(sorted(int(c) for c in marked), dtype=np.int64))
    if marked.size and (marked[0] < 0 or marked[-1] >= mesh.n_cells):
        raise ValueError(
            "Marked cells must lie in [0, {count})".format(count=mesh.n_cells)
        )
    if not marked.size:
        return Mesh(
            mesh.vertices,
            mesh.cells,
            mesh.refinement_edges,
            generation=mesh.generation,
        )

    split = _closure(mesh, marked)
    split_ids = np.flatnonzero(split)
    new_vertices = 0.5 * (
        mesh.vertices[mesh.edges[split_ids, 0]] + mesh.vertices[mesh.edges[split_ids, 1]]
    )
    midpoints = {
        (int(mesh.edges[e, 0]), int(mesh.edges[e, 1])): mesh.n_vertices + rank
        for rank, e in enumerate(split_ids)
    }

    cells, refinement_edges, parents, generation = [], [], [], []
    for cell in range(mesh.n_cells):
        r = int(mesh.refinement_edges[cell])
        vertices = [int(v) for v in mesh.cells[cell]]
        ordered = (vertices[r], vertices[(r + 1) % 3], vertices[(r + 2) % 3])
        leaves = _bisect(ordered, midpoints)
        if len(leaves) == 1:
            cells.append(vertices)
            refinement_edges.append(r)
            parents.append(cell)
            generation.append(int(mesh.generation[cell]))
            continue
        for leaf, depth in leaves:
            cells.append(leaf)
            refinement_edges.append(0)
            parents.append(cell)
            generation.append(int(mesh.generation[cell]) + depth)

    LOGGER.debug(
        "Refined {marked} marked cells into {cells} cells ({edges} edges split)".format(
            marked=len(marked), cells=len(cells), edges=len(split_ids)
        )
    )
    return Mesh(
        np.vstack((mesh.vertices, new_vertices)),
        cells,
        refinement_edges,
        parents=parents,
        generation=generation,
    )


def refine_uniform(mesh):
    """ Two full bisection sweeps: every cell is split into four and h halves """

    once = refine(mesh, range(mesh.n_cells))
    twice = refine(once, range(once.n_cells))
    return Mesh(
        twice.vertices,
        twice.cells,
        twice.refinement_edges,
        parents=once.parents[twice.parents],
        generation=twice.generation,
    )
