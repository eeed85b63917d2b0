import numpy as np
import pytest

from fdrisk.exceptions import InvalidInputError
from fdrisk.geometry import NeckPlane, TriangleMesh, clean_mesh
from fdrisk.synth import box, icosphere


def test_clean_merges_near_duplicates_and_drops_degenerate():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1e-12, 0, 0], [2, 0, 0]], dtype=float)
    t = np.array([[0, 1, 2], [3, 1, 2], [0, 1, 4]])
    mesh = clean_mesh(v, t)
    # [3,1,2] duplicates the first triangle after merging; [0,1,4] is collinear
    assert mesh.n_vertices == 3
    assert all(len(set(tri)) == 3 for tri in mesh.triangles.tolist())
    assert mesh.n_triangles >= 1


def test_out_of_range_index_rejected():
    with pytest.raises(InvalidInputError):
        TriangleMesh(np.zeros((3, 3)), np.array([[0, 1, 5]]))


def test_neck_plane_normal_unit():
    p = NeckPlane(np.zeros(3), np.array([0.0, 3.0, 4.0]))
    assert abs(np.linalg.norm(p.normal) - 1) < 1e-9
    with pytest.raises(InvalidInputError):
        NeckPlane(np.zeros(3), np.zeros(3))


def test_icosphere_vertex_count():
    for n in range(5):
        assert icosphere(1.0, n).n_vertices == 10 * 4 ** n + 2


def test_orientation_flip_detected():
    m = box()
    t = m.triangles.copy()
    t[0] = t[0][::-1]
    flipped = TriangleMesh(m.vertices, t)
    assert flipped.is_closed
    assert not flipped.is_consistently_oriented


def test_transformed_moves_neck_plane():
    m = box().with_neck_plane(NeckPlane(np.zeros(3), np.array([0.0, 0.0, 1.0])))
    moved = m.transformed(translation=np.array([1.0, 2.0, 3.0]), scale=2.0)
    assert np.allclose(moved.neck_plane.point, [1, 2, 3])
    assert np.allclose(moved.vertices.max(axis=0), [3, 4, 5])
