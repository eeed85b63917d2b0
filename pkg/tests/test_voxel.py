import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdrisk.exceptions import FormatError, InvalidArgumentError
from fdrisk.geometry import TriangleMesh, VoxelGrid, read_grid, voxelize_surface, write_grid
from fdrisk.synth import box, icosphere, perturbed_dome


def test_unit_cube_surface_exact_box():
    g = voxelize_surface(box(), 4, pad=False)
    assert g.occupied_count == 4 ** 3 - 2 ** 3


def test_padded_grid_needs_resolution_8():
    with pytest.raises(InvalidArgumentError):
        voxelize_surface(box(), 7)


def test_thin_segment_count_grows_linearly():
    mesh = TriangleMesh(np.array([[0.0, 0, 0], [1, 0, 0], [1, 1e-9, 0]]), np.array([[0, 1, 2]]))
    counts = [voxelize_surface(mesh, r).occupied_count for r in (16, 32, 64)]
    assert counts[1] / counts[0] == pytest.approx(2.0, rel=0.15)
    assert counts[2] / counts[1] == pytest.approx(2.0, rel=0.15)


def test_grid_is_cubic_and_isotropic():
    g = voxelize_surface(box((1.0, 2.0, 3.0)), 32)
    assert g.dims == (32, 32, 32)
    assert g.spacing == pytest.approx(3.0 / 30)


@given(st.integers(0, 1000), st.sampled_from([8, 16, 33]))
def test_conservative_coverage(seed, res):
    mesh = perturbed_dome(1.0, 2, 0.2, 3, seed=seed)
    g = voxelize_surface(mesh, res)
    tri = mesh.triangle_corners()
    cells = g.cell_of(tri.mean(axis=1))
    assert g.occupancy[cells[:, 0], cells[:, 1], cells[:, 2]].all()
    # every occupied cell touches the bounding box of some triangle
    occ = np.argwhere(g.occupancy)
    lo = g.origin + occ * g.spacing
    hi = lo + g.spacing
    tlo, thi = tri.min(axis=1), tri.max(axis=1)
    touch = ((lo[:, None] <= thi[None] + 1e-9) & (hi[:, None] >= tlo[None] - 1e-9)).all(-1).any(1)
    assert touch.all()


def test_occupied_count_matches_storage():
    occ = np.zeros((5, 6, 7), dtype=bool)
    occ[1, 2, 3] = occ[4, 5, 6] = True
    g = VoxelGrid(occ, origin=np.array([1.0, 2.0, 3.0]), spacing=0.5)
    assert g.occupied_count == 2 == int(g.occupancy.sum())


def test_invalid_spacing():
    with pytest.raises(InvalidArgumentError):
        VoxelGrid(np.ones((2, 2, 2), dtype=bool), spacing=0.0)


def test_grid_file_round_trip(tmp_path):
    g = voxelize_surface(icosphere(1.3, 2), 17)
    p = tmp_path / "g.fdgrid"
    write_grid(g, p)
    back = read_grid(p)
    assert back.dims == g.dims
    assert np.array_equal(back.occupancy, g.occupancy)
    assert np.array_equal(back.origin, g.origin)
    assert back.spacing == g.spacing
    data = p.read_bytes()
    p.write_bytes(data[:-3])
    with pytest.raises(FormatError):
        read_grid(p)


def test_grid_file_layout(tmp_path):
    occ = np.zeros((2, 2, 3), dtype=bool)
    occ[0, 0, 0] = occ[1, 1, 2] = True
    p = tmp_path / "tiny.fdgrid"
    write_grid(VoxelGrid(occ), p)
    data = p.read_bytes()
    header, payload = data.split(b"data\n", 1)
    assert header.startswith(b"FDGRID 1\ndims 2 2 3\n")
    # 12 cells, C order, LSB first: bit 0 and bit 11 set
    assert payload == bytes([0b00000001, 0b00001000])
