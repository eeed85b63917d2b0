"""Box-counting (Minkowski) dimension and gliding-box lacunarity of voxel grids."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import (
    DegenerateFitError,
    EmptySetError,
    InsufficientScalesError,
    InvalidArgumentError,
)

#: box sizes averaged into the scalar ``lacunarity`` feature
LACUNARITY_SCALES = (2, 4, 8)

#: minimum r^2 gain required before dropping coarse scales from the fit
TRIM_GAIN = 1e-3


@dataclass(frozen=True)
class BoxCountSeries:
    scales: Tuple[int, ...]
    counts: Tuple[int, ...]

    def __post_init__(self):
        if len(self.scales) != len(self.counts):
            raise InvalidArgumentError("scales and counts differ in length")


@dataclass(frozen=True)
class DimensionFit:
    dimension: float
    intercept: float
    r_squared: float
    points_used: int
    series: BoxCountSeries

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "points_used": self.points_used,
            "scales": list(self.series.scales),
            "counts": list(self.series.counts),
        }


def _occupancy(grid):
    return grid.occupancy if hasattr(grid, "occupancy") else np.asarray(grid, dtype=bool)


def count_boxes(occ, scale):
    """Number of ``scale``^3 boxes anchored at the origin that hold an occupied voxel.

    Partial boxes at the far edges count as boxes.
    """
    s = int(scale)
    nx, ny, nz = occ.shape
    px, py, pz = -nx % s, -ny % s, -nz % s
    if px or py or pz:
        occ = np.pad(occ, ((0, px), (0, py), (0, pz)))
    a, b, c = occ.shape
    blocks = occ.reshape(a // s, s, b // s, s, c // s, s).any(axis=(1, 3, 5))
    return int(np.count_nonzero(blocks))


def box_counts(grid, scales):
    occ = _occupancy(grid)
    scales = [int(s) for s in scales]
    if len(scales) < 3:
        raise InsufficientScalesError(f"need at least 3 scales, got {len(scales)}")
    if any(s < 1 for s in scales):
        raise InvalidArgumentError("box sizes must be >= 1 voxel")
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise InvalidArgumentError(f"scales must be strictly decreasing, got {scales}")
    if not occ.any():
        raise EmptySetError("grid has no occupied voxels")
    return BoxCountSeries(tuple(scales), tuple(count_boxes(occ, s) for s in scales))


def _ols(x, y):
    xm = x.mean()
    ym = y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0:
        raise DegenerateFitError("no variance in log(1/scale)")
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    ss_tot = float(((y - ym) ** 2).sum())
    ss_res = float(((y - (intercept + slope * x)) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, intercept, min(max(r2, 0.0), 1.0)


def fit_dimension(series, trim=True):
    """Least-squares slope of log N against log(1/scale).

    With ``trim`` the one or two coarsest scales are dropped when that raises
    r^2 by more than :data:`TRIM_GAIN` (at least three points always remain).
    """
    scales = np.asarray(series.scales, dtype=float)
    counts = np.asarray(series.counts, dtype=float)
    if len(scales) < 3:
        raise InsufficientScalesError(f"need at least 3 points, got {len(scales)}")
    if np.any(counts <= 0):
        raise InvalidArgumentError("box counts must be positive")
    order = np.argsort(-scales, kind="stable")  # coarsest first
    x = np.log(1.0 / scales[order])
    y = np.log(counts[order])
    slope, intercept, r2 = _ols(x, y)
    best = (slope, intercept, r2, len(x))
    if trim:
        for drop in (1, 2):
            if len(x) - drop < 3:
                break
            s, i, r = _ols(x[drop:], y[drop:])
            if r - r2 > TRIM_GAIN and (r > best[2]):
                best = (s, i, r, len(x) - drop)
    slope, intercept, r2, used = best
    return DimensionFit(slope, intercept, r2, used, series)


def dyadic_scales(max_edge):
    top = 1
    while top * 2 <= max_edge / 2:
        top *= 2
    scales = []
    s = top
    while s >= 1:
        scales.append(s)
        s //= 2
    return scales


def minkowski_dimension(grid, trim=True):
    """Box-counting dimension over dyadic box sizes from half the largest edge down to 1."""
    occ = _occupancy(grid)
    if max(occ.shape) < 16:
        raise InvalidArgumentError(f"grid must have an edge >= 16 voxels, got {occ.shape}")
    return fit_dimension(box_counts(occ, dyadic_scales(max(occ.shape))), trim=trim)


def window_masses(occ, r):
    """Occupied count of every stride-1 ``r``^3 window fully inside the grid."""
    c = np.zeros(tuple(d + 1 for d in occ.shape), dtype=np.int64)
    c[1:, 1:, 1:] = occ.astype(np.int64).cumsum(0).cumsum(1).cumsum(2)
    return (
        c[r:, r:, r:]
        - c[:-r, r:, r:] - c[r:, :-r, r:] - c[r:, r:, :-r]
        + c[:-r, :-r, r:] + c[:-r, r:, :-r] + c[r:, :-r, :-r]
        - c[:-r, :-r, :-r]
    )


def lacunarity(grid, box_size):
    """Gliding-box lacunarity <M^2> / <M>^2 at window edge ``box_size``."""
    occ = _occupancy(grid)
    r = int(box_size)
    if r < 1 or r > min(occ.shape):
        raise InvalidArgumentError(f"box_size must be in [1, {min(occ.shape)}], got {box_size}")
    m = window_masses(occ, r)
    total = int(m.sum())
    if total == 0:
        raise EmptySetError("no occupied voxels in any window")
    n = m.size
    # integer sums keep the ratio exact up to the final division
    return float(int((m * m).sum()) * n) / float(total * total)


def mean_lacunarity(grid, box_sizes=LACUNARITY_SCALES):
    """Mean of :func:`lacunarity` over ``box_sizes`` (the feature-table scalar)."""
    return float(np.mean([lacunarity(grid, r) for r in box_sizes]))
