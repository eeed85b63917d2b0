"""Synthetic geometry and tables with known ground truth."""
import math
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from . import _rng
from .dataset.schema import LOCATIONS, DEFAULT_COLUMNS
from .dataset.table import from_arrays
from .exceptions import RangeError
from .geometry.mesh import NeckPlane, TriangleMesh, clean_mesh
from .geometry.voxel import VoxelGrid

MESH_KINDS = ("icosphere", "box", "perturbed_dome", "hemisphere", "extrusion")
GRID_KINDS = ("menger_grid", "line_grid", "solid_grid")
TABULAR_KINDS = ("tabular",)


@dataclass
class SynthSpec:
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0


# ---------------------------------------------------------------- meshes

def icosphere(radius=1.0, subdivisions=4):
    """Geodesic sphere with ``10 * 4**subdivisions + 2`` vertices, outward winding."""
    if subdivisions < 0 or subdivisions > 7:
        raise RangeError(f"subdivisions must be in [0, 7], got {subdivisions}")
    if not radius > 0:
        raise RangeError(f"radius must be positive, got {radius}")
    t = (1 + math.sqrt(5)) / 2
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    v = np.array(verts, dtype=float)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = np.array(faces, dtype=np.int64)
    for _ in range(subdivisions):
        edges = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
        uniq, inv = np.unique(edges, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        mid = v[uniq[:, 0]] + v[uniq[:, 1]]
        mid /= np.linalg.norm(mid, axis=1, keepdims=True)
        base = len(v)
        v = np.concatenate([v, mid])
        m = len(f)
        a, b, c = inv[:m] + base, inv[m:2 * m] + base, inv[2 * m:] + base
        f = np.concatenate([
            np.stack([f[:, 0], a, c], 1), np.stack([f[:, 1], b, a], 1),
            np.stack([f[:, 2], c, b], 1), np.stack([a, b, c], 1),
        ])
    return TriangleMesh(v * radius, f)


def perturbed_dome(radius=1.0, subdivisions=4, amplitude=0.0, frequency=6, seed=0):
    """Icosphere with radial displacement ``R (1 + a sin(k theta + p1) sin(k phi + p2))``.

    Phases ``p1, p2`` come from the seed; ``amplitude=0`` gives the plain icosphere.
    """
    if not 0 <= amplitude < 1:
        raise RangeError(f"amplitude must be in [0, 1), got {amplitude}")
    base = icosphere(1.0, subdivisions)
    if amplitude == 0:
        return TriangleMesh(base.vertices * radius, base.triangles)
    u = base.vertices
    theta = np.arccos(np.clip(u[:, 2], -1, 1))
    phi = np.arctan2(u[:, 1], u[:, 0])
    p1, p2 = _rng.stream(seed, "perturbed_dome", "phase").uniform(0, 2 * np.pi, 2)
    r = radius * (1 + amplitude * np.sin(frequency * theta + p1) * np.sin(frequency * phi + p2))
    return TriangleMesh(u * r[:, None], base.triangles)


def box(size=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)):
    """Axis-aligned box as 12 outward-wound triangles."""
    sx, sy, sz = size
    ox, oy, oz = origin
    v = np.array([[ox + i * sx, oy + j * sy, oz + k * sz]
                  for i in (0, 1) for j in (0, 1) for k in (0, 1)], dtype=float)
    # index = 4i + 2j + k
    f = [(0, 1, 3), (0, 3, 2), (4, 6, 7), (4, 7, 5),
         (0, 4, 5), (0, 5, 1), (2, 3, 7), (2, 7, 6),
         (0, 2, 6), (0, 6, 4), (1, 5, 7), (1, 7, 3)]
    return TriangleMesh(v, np.array(f))


def _ear_clip(poly):
    """Triangulate a simple counter-clockwise polygon."""
    idx = list(range(len(poly)))
    tris = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * len(poly) ** 2:
            raise RangeError("polygon is not simple")
        for n in range(len(idx)):
            i, j, k = idx[n - 1], idx[n], idx[(n + 1) % len(idx)]
            a, b, c = poly[i], poly[j], poly[k]
            if cross(a, b, c) <= 0:
                continue
            inside = False
            for m in idx:
                if m in (i, j, k):
                    continue
                p = poly[m]
                if cross(a, b, p) >= 0 and cross(b, c, p) >= 0 and cross(c, a, p) >= 0:
                    inside = True
                    break
            if not inside:
                tris.append((i, j, k))
                idx.pop(n)
                break
    tris.append(tuple(idx))
    return tris


def extrusion(polygon, length=1.0):
    """Prism from a simple counter-clockwise polygon in the xz-plane, extruded along y.

    The polygon gives ``(x, z)`` pairs.
    """
    poly = [tuple(map(float, p)) for p in polygon]
    n = len(poly)
    area2 = sum(poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1] for i in range(n))
    if area2 < 0:
        poly = poly[::-1]
    verts = [(x, 0.0, z) for x, z in poly] + [(x, float(length), z) for x, z in poly]
    tris = []
    for a, b, c in _ear_clip(poly):
        # (x, z) counter-clockwise has normal -y, matching the y=0 cap
        tris.append((a, b, c))
        tris.append((a + n, c + n, b + n))
    for i in range(n):
        j = (i + 1) % n
        tris.append((i, i + n, j + n))
        tris.append((i, j + n, j))
    return TriangleMesh(np.array(verts), np.array(tris))


def notched_box(notch_width=0.4, notch_depth=0.25):
    """Unit cube with a slot of ``notch_width x 1 x notch_depth`` cut through the top.

    The slot leaves every cube corner intact, so the convex hull is the unit
    cube and the undulation index equals the removed volume.
    """
    if not (0 < notch_width < 1 and 0 < notch_depth < 1):
        raise RangeError("notch dimensions must lie in (0, 1)")
    x0 = (1 - notch_width) / 2
    x1 = x0 + notch_width
    z = 1 - notch_depth
    poly = [(0, 0), (1, 0), (1, 1), (x1, 1), (x1, z), (x0, z), (x0, 1), (0, 1)]
    return extrusion(poly, 1.0)


def dumbbell(lobe=1.0, waist=0.3, bar=1.0):
    """Two square lobes joined by a thin bar (an H-like extrusion)."""
    h = lobe
    w = waist
    lo, hi = (h - w) / 2, (h + w) / 2
    poly = [(0, 0), (h, 0), (h, lo), (h + bar, lo), (h + bar, 0), (2 * h + bar, 0),
            (2 * h + bar, h), (h + bar, h), (h + bar, hi), (h, hi), (h, h), (0, h)]
    return extrusion(poly, h)


def hemisphere(radius=1.0, n_rings=24, n_segments=48):
    """Closed dome: upper half of a UV sphere with a flat disk base at z=0.

    The neck plane (origin, +z) is attached.
    """
    if n_rings < 2 or n_segments < 3:
        raise RangeError("hemisphere needs n_rings >= 2 and n_segments >= 3")
    verts = [(0.0, 0.0, radius)]
    for i in range(1, n_rings + 1):
        theta = (math.pi / 2) * i / n_rings
        for j in range(n_segments):
            phi = 2 * math.pi * j / n_segments
            verts.append((radius * math.sin(theta) * math.cos(phi),
                          radius * math.sin(theta) * math.sin(phi),
                          radius * math.cos(theta) if i < n_rings else 0.0))
    centre = len(verts)
    verts.append((0.0, 0.0, 0.0))
    tris = []

    def ring(i, j):
        return 1 + (i - 1) * n_segments + (j % n_segments)

    for j in range(n_segments):
        tris.append((0, ring(1, j), ring(1, j + 1)))
    for i in range(1, n_rings):
        for j in range(n_segments):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            tris.append((a, c, d))
            tris.append((a, d, b))
    for j in range(n_segments):
        tris.append((centre, ring(n_rings, j + 1), ring(n_rings, j)))
    mesh = clean_mesh(np.array(verts), np.array(tris))
    return mesh.with_neck_plane(NeckPlane(np.zeros(3), np.array([0.0, 0.0, 1.0])))


def gen_mesh(spec):
    p = dict(spec.params)
    kind = spec.kind
    if kind == "icosphere":
        return icosphere(p.get("radius", 1.0), int(p.get("subdivisions", 4)))
    if kind == "perturbed_dome":
        return perturbed_dome(p.get("radius", 1.0), int(p.get("subdivisions", 4)),
                              p.get("amplitude", 0.1), int(p.get("frequency", 6)), spec.seed)
    if kind == "box":
        if "notch_width" in p or "notch_depth" in p:
            return notched_box(p.get("notch_width", 0.4), p.get("notch_depth", 0.25))
        return box(tuple(p.get("size", (1.0, 1.0, 1.0))))
    if kind == "hemisphere":
        return hemisphere(p.get("radius", 1.0), int(p.get("n_rings", 24)), int(p.get("n_segments", 48)))
    if kind == "extrusion":
        return extrusion(p["polygon"], p.get("length", 1.0))
    raise RangeError(f"unknown mesh kind {kind!r}; expected one of {MESH_KINDS}")


# ----------------------------------------------------------------- grids

_MENGER_KERNEL = np.array([[[(i == 1) + (j == 1) + (k == 1) < 2 for k in range(3)]
                            for j in range(3)] for i in range(3)])


def menger_grid(depth, edge=None):
    """Menger sponge occupancy.

    With ``edge=None`` the grid is ``3**depth`` on a side and holds exactly
    ``20**depth`` occupied cells. With an ``edge`` the depth-``depth`` sponge
    is sampled at voxel centres of an ``edge``^3 grid instead.
    """
    if depth < 0 or depth > 5:
        raise RangeError(f"menger depth must be in [0, 5], got {depth}")
    if edge is None:
        g = np.ones((1, 1, 1), dtype=bool)
        for _ in range(depth):
            g = np.kron(g, _MENGER_KERNEL).astype(bool)
        return VoxelGrid(g)
    c = (np.arange(int(edge)) + 0.5) / int(edge)
    occ = np.ones((int(edge),) * 3, dtype=bool)
    for level in range(1, depth + 1):
        mid = (np.floor(c * 3 ** level) % 3 == 1).astype(np.int8)
        occ &= (mid[:, None, None] + mid[None, :, None] + mid[None, None, :]) < 2
    return VoxelGrid(occ, spacing=1.0 / int(edge))


def line_grid(n, edge=None):
    """``n`` collinear voxels along the first axis, centred in an ``edge``^3 grid."""
    if n < 1:
        raise RangeError("line length must be >= 1")
    edge = n if edge is None else int(edge)
    if edge < n:
        raise RangeError("grid edge shorter than line")
    occ = np.zeros((edge,) * 3, dtype=bool)
    occ[:n, edge // 2, edge // 2] = True
    return VoxelGrid(occ)


def gen_grid(spec):
    p = dict(spec.params)
    if spec.kind == "menger_grid":
        return menger_grid(int(p.get("depth", 3)), p.get("edge"))
    if spec.kind == "line_grid":
        return line_grid(int(p.get("n", 64)), p.get("edge"))
    if spec.kind == "solid_grid":
        return VoxelGrid(np.ones((int(p.get("edge", 32)),) * 3, dtype=bool))
    raise RangeError(f"unknown grid kind {spec.kind!r}; expected one of {GRID_KINDS}")


# --------------------------------------------------------------- tables

FD_LOC, FD_SCALE = 2.2, 0.1
_LEADING = ("fd", "age", "size_mm")
NUMERIC_NAMES = _LEADING + tuple(
    c.name for c in DEFAULT_COLUMNS if c.kind == "numeric" and c.name not in _LEADING)


def _draws(rng, distribution, n):
    if distribution == "gaussian":
        return rng.standard_normal(n)
    if distribution == "uniform":
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), n)
    raise RangeError(f"distribution must be 'gaussian' or 'uniform', got {distribution!r}")


def gen_tabular(n_samples=178, n_features=10, balance=0.37, noise=0.5, distribution="gaussian",
                n_outliers=0, outlier_scale=8.0, n_duplicates=0, clinical=False, seed=0):
    """Synthetic feature table whose label depends on ``fd`` only.

    Columns are ``fd``, then ``age``, ``size_mm`` and the other numeric
    feature names, then ``x<i>`` once those run out; all are independent
    unit-variance draws (``fd`` is mapped to ``2.2 + 0.1 z``). The label
    marks the ``round(balance * n)`` largest values of
    ``z_fd + noise * e`` with ``e`` standard logistic, so P(ruptured | fd)
    is logistic in fd and ``noise=0`` separates the classes exactly.

    ``n_outliers`` cells in non-``fd`` columns are set to
    ``+-outlier_scale`` (one per column, round-robin); with the uniform
    distribution no other cell can exceed 2 sd. ``n_duplicates`` copies of
    outlier-free columns are appended as ``<name>_dup``. ``clinical`` adds
    binary ``HTN``/``prior_SAH`` and a categorical ``location`` drawn
    independently of the label. Ground truth is stored in ``meta``.
    """
    n = int(n_samples)
    if n < 4:
        raise RangeError("n_samples must be >= 4")
    if n_features < 1:
        raise RangeError("n_features must be >= 1")
    n_pos = int(round(balance * n))
    if not 0 < n_pos < n:
        raise RangeError(f"balance {balance} leaves a class empty at n={n}")
    if noise < 0:
        raise RangeError("noise must be >= 0")
    names = list(NUMERIC_NAMES[:n_features])
    names += [f"x{i}" for i in range(n_features - len(names))]
    z = {name: _draws(_rng.stream(seed, "tabular", "column", name), distribution, n) for name in names}
    latent = z["fd"] + noise * _rng.stream(seed, "tabular", "noise").logistic(size=n)
    order = np.lexsort((np.arange(n), -latent))
    label = np.zeros(n, dtype=np.int64)
    label[order[:n_pos]] = 1

    others = names[1:]
    if n_outliers and not others:
        raise RangeError("outlier injection needs columns besides fd")
    if n_outliers > len(others) * (n // 2):
        raise RangeError("too many outliers for the table size")
    outliers = []
    orng = _rng.stream(seed, "tabular", "outliers")
    per_col = {}
    for k in range(int(n_outliers)):
        per_col.setdefault(others[k % len(others)], []).append(k)
    for name, ks in per_col.items():
        rows = orng.choice(n, size=len(ks), replace=False)
        signs = orng.choice([-1.0, 1.0], size=len(ks))
        for row, sign in zip(rows, signs):
            z[name][row] = sign * outlier_scale
            outliers.append((int(row), name))
    clean = [c for c in names if c not in per_col]
    if n_duplicates > len(clean):
        raise RangeError(f"only {len(clean)} outlier-free columns available to duplicate")
    duplicates = {f"{src}_dup": src for src in clean[:int(n_duplicates)]}

    columns = {}
    for name in names:
        columns[name] = FD_LOC + FD_SCALE * z[name] if name == "fd" else z[name]
    for dup, src in duplicates.items():
        columns[dup] = columns[src].copy()
    if clinical:
        crng = _rng.stream(seed, "tabular", "clinical")
        columns["HTN"] = (crng.random(n) < 0.4).astype(float)
        columns["prior_SAH"] = (crng.random(n) < 0.1).astype(float)
        columns["location"] = np.array(crng.choice(LOCATIONS, size=n), dtype=object)
    table = from_arrays(columns, label)
    meta = {"kind": "tabular", "seed": seed, "informative": ["fd"], "n_positive": n_pos,
            "outlier_cells": sorted(outliers), "duplicates": duplicates,
            "rule": f"top {n_pos} of z_fd + {noise} * logistic noise"}
    return table.replace(meta=meta)


def generate(spec):
    """Dispatch a :class:`SynthSpec` to the mesh, grid or table generator."""
    if spec.kind in MESH_KINDS:
        return gen_mesh(spec)
    if spec.kind in GRID_KINDS:
        return gen_grid(spec)
    if spec.kind in TABULAR_KINDS:
        return gen_tabular(seed=spec.seed, **spec.params)
    raise RangeError(f"unknown synth kind {spec.kind!r}")
