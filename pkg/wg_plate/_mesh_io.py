""" Plain text mesh files

    wgmesh 1
    vertices N
    x y                 (N lines, 17 significant digits)
    cells M
    v0 v1 v2 [r]        (M lines, optional local refinement edge r)
    boundary K
    va vb               (K lines)
"""
# pylint: disable=line-too-long

import numpy as np

from ._errors import MeshParseError
from ._mesh import Mesh

HEADER = "wgmesh 1"


def write_mesh(mesh, path):
    """ Write a mesh, each cell followed by its local refinement edge """

    with open(path, "w", encoding="utf-8") as handle:
        handle.write(HEADER + "\n")
        handle.write("vertices {count}\n".format(count=mesh.n_vertices))
        for x, y in mesh.vertices:
            handle.write("{x:.17g} {y:.17g}\n".format(x=x, y=y))
        handle.write("cells {count}\n".format(count=mesh.n_cells))
        for vertices, r in zip(mesh.cells, mesh.refinement_edges):
            handle.write(
                "{a} {b} {c} {r}\n".format(a=vertices[0], b=vertices[1], c=vertices[2], r=r)
            )
        handle.write("boundary {count}\n".format(count=len(mesh.boundary_edge_ids)))
        for edge in mesh.boundary_edge_ids:
            va, vb = mesh.edges[edge]
            handle.write("{va} {vb}\n".format(va=va, vb=vb))


class _Lines:
    """ Line cursor skipping blank lines and # comments """

    def __init__(self, text):
        self.lines = [
            (number, line.split("#", 1)[0].strip())
            for number, line in enumerate(text.splitlines(), start=1)
        ]
        self.lines = [(number, line) for number, line in self.lines if line]
        self.position = 0
        self.last = len(text.splitlines())

    def next(self, wanted):
        if self.position >= len(self.lines):
            raise MeshParseError(
                "missing section '{section}'".format(section=wanted), line=self.last + 1
            )
        line = self.lines[self.position]
        self.position += 1
        return line


def _section(lines, name):
    number, line = lines.next(name)
    fields = line.split()
    if len(fields) != 2 or fields[0] != name:
        raise MeshParseError(
            "expected section '{name} <count>', got '{line}'".format(name=name, line=line),
            line=number,
        )
    try:
        count = int(fields[1])
    except ValueError as exception:
        raise MeshParseError(
            "section '{name}' count is not an integer: {exception}".format(
                name=name, exception=exception
            ),
            line=number,
        ) from exception
    if count < 0:
        raise MeshParseError("section '{name}' count is negative".format(name=name), line=number)
    return number, count


def _rows(lines, name, count, parse, widths):
    rows = []
    for index in range(count):
        try:
            number, line = lines.next(name)
        except MeshParseError as exception:
            raise MeshParseError(
                "section '{name}' truncated after {index} of {count} rows".format(
                    name=name, index=index, count=count
                ),
                line=exception.line,
            ) from exception
        fields = line.split()
        if len(fields) not in widths:
            raise MeshParseError(
                "section '{name}' row has {got} fields, expected {widths}".format(
                    name=name, got=len(fields), widths=" or ".join(map(str, widths))
                ),
                line=number,
            )
        try:
            rows.append([parse(field) for field in fields])
        except ValueError as exception:
            raise MeshParseError(
                "section '{name}' row is malformed: {exception}".format(
                    name=name, exception=exception
                ),
                line=number,
            ) from exception
    return rows


def read_mesh(path):
    """ Read a mesh written by write_mesh (or by hand in the same format) """

    with open(path, "r", encoding="utf-8") as handle:
        lines = _Lines(handle.read())

    number, line = lines.next("header")
    if line != HEADER:
        raise MeshParseError(
            "expected header '{header}', got '{line}'".format(header=HEADER, line=line),
            line=number,
        )

    _, n_vertices = _section(lines, "vertices")
    vertices = _rows(lines, "vertices", n_vertices, float, (2,))

    cells_line, n_cells = _section(lines, "cells")
    cell_rows = _rows(lines, "cells", n_cells, int, (3, 4))
    if len({len(row) for row in cell_rows}) > 1:
        raise MeshParseError(
            "section 'cells' mixes rows with and without refinement edges", line=cells_line
        )

    boundary_line, n_boundary = _section(lines, "boundary")
    boundary = _rows(lines, "boundary", n_boundary, int, (2,))

    cells = np.array([row[:3] for row in cell_rows], dtype=np.int64).reshape(-1, 3)
    refinement = None
    if cell_rows and len(cell_rows[0]) == 4:
        refinement = [row[3] for row in cell_rows]

    try:
        mesh = Mesh(np.array(vertices).reshape(-1, 2), cells, refinement_edges=refinement)
    except ValueError as exception:
        raise MeshParseError(
            "section 'cells' is invalid: {exception}".format(exception=exception),
            line=cells_line,
        ) from exception

    declared = {tuple(sorted(pair)) for pair in boundary}
    actual = {tuple(int(v) for v in mesh.edges[e]) for e in mesh.boundary_edge_ids}
    if declared != actual:
        raise MeshParseError(
            "section 'boundary' lists {declared} edges that do not match the {actual} boundary edges of the cells".format(
                declared=len(declared), actual=len(actual)
            ),
            line=boundary_line,
        )
    return mesh
