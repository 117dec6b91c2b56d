""" Reading and writing mesh files """
# pylint: disable=missing-function-docstring

import numpy as np
import pytest

from wg_plate import MeshParseError, read_mesh, refine, unit_square_mesh, write_mesh

SQUARE = """wgmesh 1
vertices 4
0 0
1 0
1 1
0 1
# the second cell is listed clockwise
cells 2
0 1 2
0 3 2
boundary 4
0 1
1 2
2 3
3 0
"""


def write_text(tmp_path, text):
    path = tmp_path / "mesh.wgmesh"
    path.write_text(text, encoding="utf-8")
    return path


def test_written_mesh_reads_back(tmp_path):
    mesh = refine(unit_square_mesh(3), [2, 9, 11])
    path = tmp_path / "refined.wgmesh"
    write_mesh(mesh, path)
    loaded = read_mesh(path)
    assert loaded == mesh
    assert np.array_equal(loaded.refinement_edges, mesh.refinement_edges)

    # refining the reloaded mesh bisects the same edges
    assert refine(loaded, [0, 5]) == refine(mesh, [0, 5])


def test_hand_written_file(tmp_path):
    mesh = read_mesh(write_text(tmp_path, SQUARE))
    assert mesh.n_cells == 2
    assert np.all(mesh.areas > 0.0)
    assert len(mesh.boundary_edge_ids) == 4


def test_missing_section(tmp_path):
    text = SQUARE.split("boundary")[0]
    with pytest.raises(MeshParseError, match="missing section 'boundary'"):
        read_mesh(write_text(tmp_path, text))


def test_truncated_section(tmp_path):
    text = "wgmesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ncells 2\n0 1 2\n"
    with pytest.raises(MeshParseError, match="cells") as info:
        read_mesh(write_text(tmp_path, text))
    assert "truncated after 1 of 2" in str(info.value)
    assert info.value.line is not None


def test_malformed_number_names_the_line(tmp_path):
    text = SQUARE.replace("1 1\n", "1 one\n", 1)
    with pytest.raises(MeshParseError) as info:
        read_mesh(write_text(tmp_path, text))
    assert info.value.line == 5
    assert str(info.value).startswith("line 5: ")


def test_bad_header(tmp_path):
    with pytest.raises(MeshParseError, match="header"):
        read_mesh(write_text(tmp_path, SQUARE.replace("wgmesh 1", "mesh 2")))


def test_boundary_mismatch(tmp_path):
    text = SQUARE.replace("3 0\n", "0 2\n")
    with pytest.raises(MeshParseError, match="boundary"):
        read_mesh(write_text(tmp_path, text))


def test_vertex_out_of_range(tmp_path):
    text = SQUARE.replace("0 3 2\n", "0 7 2\n")
    with pytest.raises(MeshParseError, match="cells"):
        read_mesh(write_text(tmp_path, text))
