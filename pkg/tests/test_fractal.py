import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdrisk import fractal
from fdrisk.exceptions import (
    DegenerateFitError,
    EmptySetError,
    InsufficientScalesError,
    InvalidArgumentError,
)
from fdrisk.fractal import (
    BoxCountSeries,
    box_counts,
    fit_dimension,
    lacunarity,
    mean_lacunarity,
    minkowski_dimension,
)
from fdrisk.geometry import VoxelGrid, voxelize_surface
from fdrisk.synth import icosphere, line_grid, menger_grid


def _grid(occ):
    return VoxelGrid(np.asarray(occ, dtype=bool))


def test_single_voxel_counts():
    occ = np.zeros((8, 8, 8), dtype=bool)
    occ[3, 5, 1] = True
    assert box_counts(_grid(occ), [8, 4, 2, 1]).counts == (1, 1, 1, 1)


def test_solid_counts():
    assert box_counts(_grid(np.ones((8, 8, 8))), [8, 4, 2, 1]).counts == (1, 8, 64, 512)


def test_line_counts():
    assert box_counts(line_grid(64), [16, 8, 4, 2, 1]).counts == (4, 8, 16, 32, 64)


def test_partial_edge_boxes_count():
    occ = np.zeros((5, 5, 5), dtype=bool)
    occ[4, 4, 4] = True
    occ[0, 0, 0] = True
    assert box_counts(_grid(occ), [4, 2, 1]).counts == (2, 2, 2)


def test_box_count_errors():
    with pytest.raises(EmptySetError):
        box_counts(_grid(np.zeros((8, 8, 8))), [4, 2, 1])
    with pytest.raises(InsufficientScalesError):
        box_counts(_grid(np.ones((8, 8, 8))), [2, 1])
    with pytest.raises(InvalidArgumentError):
        box_counts(_grid(np.ones((8, 8, 8))), [2, 4, 1])


def test_exact_power_laws():
    fit = fit_dimension(BoxCountSeries((8, 4, 2, 1), (1, 8, 64, 512)))
    assert fit.dimension == pytest.approx(3.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    fit = fit_dimension(BoxCountSeries((16, 8, 4, 2, 1), (4, 8, 16, 32, 64)))
    assert fit.dimension == pytest.approx(1.0, abs=1e-12)
    assert fit.points_used == 5


def test_degenerate_fit():
    with pytest.raises(DegenerateFitError):
        fit_dimension(BoxCountSeries((2, 2, 2), (1, 2, 3)))


def test_plateau_trimming_reported():
    # a flat coarse plateau on top of a clean slope
    series = BoxCountSeries((32, 16, 8, 4, 2, 1), (1, 1, 8, 64, 512, 4096))
    trimmed = fit_dimension(series)
    untrimmed = fit_dimension(series, trim=False)
    assert trimmed.points_used < 6
    assert trimmed.r_squared > untrimmed.r_squared
    assert trimmed.dimension == pytest.approx(3.0, abs=1e-9)


def test_solid_grid_dimension():
    assert minkowski_dimension(_grid(np.ones((128, 128, 128)))).dimension == pytest.approx(3.0, abs=0.05)


def test_line_dimension():
    assert minkowski_dimension(line_grid(64)).dimension == pytest.approx(1.0, abs=0.1)


def test_plane_dimension():
    occ = np.zeros((64, 64, 64), dtype=bool)
    occ[:, :, 32] = True
    assert minkowski_dimension(_grid(occ)).dimension == pytest.approx(2.0, abs=0.1)


def test_sphere_surface_dimension():
    g = voxelize_surface(icosphere(1.0, 4), 128)
    assert minkowski_dimension(g).dimension == pytest.approx(2.0, abs=0.1)


def test_menger_sponge_dimension():
    g = menger_grid(4, edge=128)
    assert minkowski_dimension(g).dimension == pytest.approx(math.log(20) / math.log(3), abs=0.1)


def test_small_grid_rejected():
    with pytest.raises(InvalidArgumentError):
        minkowski_dimension(_grid(np.ones((8, 8, 8))))


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 0.5))
def test_count_refinement_bounds(seed, p):
    occ = np.random.default_rng(seed).random((20, 17, 23)) < p
    occ[0, 0, 0] = True
    c = box_counts(_grid(occ), [16, 8, 4, 2, 1]).counts
    for coarse, fine in zip(c, c[1:]):
        assert coarse <= fine <= 8 * coarse


@given(st.integers(0, 2 ** 32 - 1), st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)))
def test_translation_by_coarsest_box_is_exact(seed, blocks):
    # origin-anchored boxes: a shift by a multiple of the coarsest box size
    # maps the box lattice onto itself at every dyadic scale
    occ = np.zeros((64, 64, 64), dtype=bool)
    occ[:32, :32, :32] = np.random.default_rng(seed).random((32, 32, 32)) < 0.3
    occ[0, 0, 0] = True
    top = fractal.dyadic_scales(64)[0]
    moved = np.roll(occ, tuple(top * b for b in blocks), axis=(0, 1, 2))
    a = minkowski_dimension(_grid(occ))
    b = minkowski_dimension(_grid(moved))
    assert abs(a.dimension - b.dimension) <= 1e-9
    assert a.series.counts == b.series.counts


def test_translated_grid_keeps_world_position():
    occ = np.zeros((16, 16, 16), dtype=bool)
    occ[3, 4, 5] = True
    g = VoxelGrid(occ, origin=np.zeros(3), spacing=0.5)
    t = g.translated((2, 0, 1))
    assert t.dims == (18, 16, 17)
    assert np.argwhere(t.occupancy).tolist() == [[5, 4, 6]]
    assert np.allclose(t.origin + np.array([5, 4, 6]) * 0.5, [1.5, 2.0, 2.5])


def test_deterministic_fit():
    g = voxelize_surface(icosphere(1.0, 3), 64)
    assert minkowski_dimension(g) == minkowski_dimension(g)


def test_lacunarity_oracles():
    assert lacunarity(_grid(np.ones((8, 8, 8))), 3) == 1.0
    one = np.zeros((8, 8, 8), dtype=bool)
    one[2, 3, 4] = True
    assert lacunarity(_grid(one), 1) == pytest.approx(512.0, rel=1e-12)
    i, j, k = np.indices((8, 8, 8))
    checker = (i + j + k) % 2 == 0
    assert lacunarity(_grid(checker), 2) == pytest.approx(1.0, abs=1e-12)


def test_lacunarity_errors():
    with pytest.raises(EmptySetError):
        lacunarity(_grid(np.zeros((8, 8, 8))), 2)
    with pytest.raises(InvalidArgumentError):
        lacunarity(_grid(np.ones((8, 8, 8))), 9)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_lacunarity_at_least_one_and_matches_brute_force(seed, r):
    occ = np.random.default_rng(seed).random((7, 8, 9)) < 0.3
    occ[3, 3, 3] = True
    masses = np.array([occ[a:a + r, b:b + r, c:c + r].sum()
                       for a in range(8 - r) for b in range(9 - r) for c in range(10 - r)
                       if a + r <= 7 and b + r <= 8 and c + r <= 9], dtype=float)
    want = (masses ** 2).mean() / masses.mean() ** 2
    got = lacunarity(_grid(occ), r)
    assert got == pytest.approx(want, rel=1e-12)
    assert got >= 1 - 1e-12


def test_mean_lacunarity_uses_documented_scales():
    occ = np.random.default_rng(1).random((16, 16, 16)) < 0.2
    g = _grid(occ)
    assert fractal.LACUNARITY_SCALES == (2, 4, 8)
    assert mean_lacunarity(g) == pytest.approx(np.mean([lacunarity(g, r) for r in (2, 4, 8)]))
