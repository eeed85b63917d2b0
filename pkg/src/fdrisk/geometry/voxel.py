"""Voxel grids and conservative surface voxelization."""
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exceptions import FormatError, InvalidArgumentError

_MAGIC = b"FDGRID"
_FORMAT_VERSION = 1


@dataclass(frozen=True)
class VoxelGrid:
    """Binary occupancy on a uniform grid.

    ``occupancy[i, j, k]`` covers the box ``origin + spacing * [i, i+1) x ...``.
    """

    occupancy: np.ndarray
    origin: np.ndarray = field(default_factory=lambda: np.zeros(3))
    spacing: float = 1.0

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupancy, dtype=bool)
        if occ.ndim != 3 or min(occ.shape) < 1:
            raise InvalidArgumentError(f"occupancy must be a nonempty 3D array, got shape {occ.shape}")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise InvalidArgumentError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float).reshape(3))
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "_count", int(np.count_nonzero(occ)))

    @property
    def dims(self):
        return tuple(int(d) for d in self.occupancy.shape)

    @property
    def occupied_count(self):
        return self._count

    def cell_of(self, points):
        """Integer cell index containing each point."""
        return np.floor((np.asarray(points, dtype=float) - self.origin) / self.spacing).astype(np.int64)

    def translated(self, shift):
        """Copy with occupancy rolled by whole voxels inside an enlarged grid."""
        shift = np.asarray(shift, dtype=int)
        if np.any(shift < 0):
            raise InvalidArgumentError("shift must be nonnegative")
        shape = tuple(np.array(self.dims) + shift)
        occ = np.zeros(shape, dtype=bool)
        occ[shift[0]:, shift[1]:, shift[2]:] = self.occupancy
        return VoxelGrid(occ, self.origin - shift * self.spacing, self.spacing)


def write_grid(grid, path):
    """Write a grid file.

    Layout: ASCII header lines ``FDGRID 1``, ``dims nx ny nz``,
    ``spacing s``, ``origin x y z``, ``data``, each ending in ``\\n``; then
    ``ceil(nx*ny*nz / 8)`` bytes of occupancy flattened in C order (last
    index fastest) and packed least-significant bit first.
    """
    nx, ny, nz = grid.dims
    header = (
        f"FDGRID {_FORMAT_VERSION}\n"
        f"dims {nx} {ny} {nz}\n"
        f"spacing {float(grid.spacing)!r}\n"
        f"origin {' '.join(repr(float(v)) for v in grid.origin)}\n"
        "data\n"
    ).encode("ascii")
    payload = np.packbits(grid.occupancy.reshape(-1), bitorder="little").tobytes()
    Path(path).write_bytes(header + payload)


def read_grid(path):
    data = Path(path).read_bytes()
    buf = io.BytesIO(data)
    lines = []
    for _ in range(5):
        line = buf.readline()
        if not line.endswith(b"\n"):
            raise FormatError("truncated grid header", offset=buf.tell())
        lines.append(line.decode("ascii", "replace").split())
    try:
        if lines[0][0].encode() != _MAGIC:
            raise FormatError("not a grid file (bad magic)", offset=0)
        if int(lines[0][1]) != _FORMAT_VERSION:
            raise FormatError(f"unsupported grid version {lines[0][1]}", offset=0)
        dims = tuple(int(v) for v in lines[1][1:4])
        spacing = float(lines[2][1])
        origin = np.array([float(v) for v in lines[3][1:4]])
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed grid header: {exc}", offset=0) from None
    start = buf.tell()
    n = int(np.prod(dims))
    need = (n + 7) // 8
    if len(data) - start < need:
        raise FormatError(f"truncated grid payload: need {need} bytes", offset=len(data))
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8, count=need, offset=start),
                         bitorder="little")[:n]
    return VoxelGrid(bits.astype(bool).reshape(dims), origin, spacing)


def _tri_box_overlap(v0, v1, v2, centers, half):
    """Separating-axis triangle/box test (Akenine-Moller), vectorized over pairs.

    Closed boxes: touching counts as overlap.
    """
    a = v0 - centers
    b = v1 - centers
    c = v2 - centers
    e0, e1, e2 = b - a, c - b, a - c
    ok = np.ones(len(a), dtype=bool)
    # 9 edge cross-product axes
    for e in (e0, e1, e2):
        for axis in range(3):
            # axis_k x e, written out
            u = np.zeros_like(e)
            j, k = (axis + 1) % 3, (axis + 2) % 3
            u[:, j] = -e[:, k]
            u[:, k] = e[:, j]
            pa = np.einsum("ij,ij->i", a, u)
            pb = np.einsum("ij,ij->i", b, u)
            pc = np.einsum("ij,ij->i", c, u)
            r = half * np.abs(u).sum(axis=1)
            lo = np.minimum(np.minimum(pa, pb), pc)
            hi = np.maximum(np.maximum(pa, pb), pc)
            ok &= ~((lo > r) | (hi < -r))
    # box face normals
    for axis in range(3):
        lo = np.minimum(np.minimum(a[:, axis], b[:, axis]), c[:, axis])
        hi = np.maximum(np.maximum(a[:, axis], b[:, axis]), c[:, axis])
        ok &= ~((lo > half) | (hi < -half))
    # triangle plane
    n = np.cross(e0, e1)
    d = np.einsum("ij,ij->i", n, a)
    r = half * np.abs(n).sum(axis=1)
    ok &= np.abs(d) <= r
    return ok


def voxelize_surface(mesh, resolution, pad=True, chunk=200_000):
    """Mark every cell of a cubic ``resolution``^3 grid that a triangle touches.

    The grid is isotropic and covers the mesh bounding box; with ``pad`` the
    box is enlarged by one voxel on every side and ``resolution`` must be at
    least 8; without it the grid spans exactly the bounding box and any
    positive resolution is accepted. The bounding box is centred on the
    shorter axes.
    """
    resolution = int(resolution)
    floor = 8 if pad else 1
    if resolution < floor:
        raise InvalidArgumentError(f"resolution must be >= {floor}, got {resolution}")
    verts = mesh.vertices
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    extent = float((hi - lo).max())
    if extent == 0:
        raise InvalidArgumentError("mesh has zero extent")
    inner = resolution - 2 if pad else resolution
    spacing = extent / inner
    centre = (lo + hi) / 2
    origin = centre - spacing * resolution / 2
    occ = np.zeros((resolution,) * 3, dtype=bool)

    tri = mesh.triangle_corners()
    # tiny expansion keeps the test conservative under rounding
    half = spacing / 2 * (1 + 1e-9)
    tlo = np.clip(np.floor((tri.min(axis=1) - origin) / spacing - 1e-9).astype(np.int64), 0, resolution - 1)
    thi = np.clip(np.floor((tri.max(axis=1) - origin) / spacing + 1e-9).astype(np.int64), 0, resolution - 1)
    span = thi - tlo + 1
    sizes = span.prod(axis=1)

    start = 0
    n = len(tri)
    while start < n:
        stop = start
        total = 0
        while stop < n and (total + sizes[stop] <= chunk or stop == start):
            total += sizes[stop]
            stop += 1
        sel = np.arange(start, stop)
        reps = sizes[sel]
        owner = np.repeat(sel, reps)
        # local offset of each candidate within its triangle's cell box
        local = np.arange(len(owner)) - np.repeat(np.cumsum(reps) - reps, reps)
        sy = span[owner, 1]
        sz = span[owner, 2]
        ix = local // (sy * sz)
        iy = (local // sz) % sy
        iz = local % sz
        cells = tlo[owner] + np.stack([ix, iy, iz], axis=1)
        centers = origin + (cells + 0.5) * spacing
        hit = _tri_box_overlap(tri[owner, 0], tri[owner, 1], tri[owner, 2], centers, half)
        c = cells[hit]
        occ[c[:, 0], c[:, 1], c[:, 2]] = True
        start = stop
    return VoxelGrid(occ, origin, spacing)
