"""Shape descriptors of closed triangle meshes.

Definitions used throughout the feature table:

======================  ================================================
sa                      sum of triangle areas
savol_ratio             sa / volume
sphericity              pi^(1/3) (6 V)^(2/3) / A
ui (undulation index)   1 - V / V_hull
Max 3D diameter         largest vertex-to-vertex distance (Feret)
size_mm                 Feret diameter
flatness                sqrt(smallest / largest vertex-covariance eigenvalue)
cp (compactness)        V / (sqrt(pi) A^(3/2))
neck_width_mm           longest chord of the neck cross-section
dome_height_mm          largest distance from the neck plane to a dome vertex
ar (aspect ratio)       dome height / neck width
bf (bulge factor)       widest dome extent parallel to the neck / neck width
======================  ================================================
"""
import math

import numpy as np

from ..exceptions import AnnotationError, InvalidInputError, NotClosedError
from .hull import convex_hull
from .mesh import triangle_areas


def surface_area(mesh):
    return float(triangle_areas(mesh.vertices, mesh.triangles).sum())


def signed_volume(mesh):
    p = mesh.triangle_corners()
    # subtract a reference point first to keep the sum well conditioned
    ref = mesh.vertices.mean(axis=0)
    a, b, c = p[:, 0] - ref, p[:, 1] - ref, p[:, 2] - ref
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def _require_closed(mesh):
    if not mesh.is_closed:
        raise NotClosedError("mesh is not closed: some edge is not shared by exactly two triangles")
    if not mesh.is_consistently_oriented:
        raise NotClosedError("mesh is closed but inconsistently oriented (triangle winding mismatch)")


def volume(mesh):
    """Enclosed volume (absolute value of the divergence-theorem sum)."""
    _require_closed(mesh)
    return abs(signed_volume(mesh))


def sphericity(mesh):
    V = volume(mesh)
    A = surface_area(mesh)
    return math.pi ** (1 / 3) * (6 * V) ** (2 / 3) / A


def compactness(mesh):
    V = volume(mesh)
    A = surface_area(mesh)
    return V / (math.sqrt(math.pi) * A ** 1.5)


def hull_volume(mesh):
    return convex_hull(mesh.vertices).volume()


def undulation_index(mesh):
    V = volume(mesh)
    return 1.0 - V / hull_volume(mesh)


def max_pairwise_distance(points, chunk=1024):
    """Exact diameter of a point set by chunked all-pairs differences."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise InvalidInputError("need at least two points for a diameter")
    best = 0.0
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        diff = block[:, None, :] - pts[None, start:, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        best = max(best, float(d2.max()))
    return math.sqrt(best)


def feret_diameter(mesh, use_hull=True):
    """Maximum vertex-to-vertex distance.

    With ``use_hull`` the search is restricted to hull vertices, which always
    contain a diametral pair; the value is bit-identical to the full search.
    """
    pts = mesh.vertices
    if use_hull and len(pts) > 64:
        try:
            pts = pts[convex_hull(pts).vertex_indices]
        except ValueError:
            pass
    return max_pairwise_distance(pts)


def flatness(mesh):
    cov = np.cov(mesh.vertices, rowvar=False)
    eig = np.linalg.eigvalsh(cov)
    if eig[-1] <= 0:
        raise InvalidInputError("vertex covariance is zero")
    return math.sqrt(max(eig[0], 0.0) / eig[-1])


def neck_section_points(mesh, neck_plane, tol=1e-9):
    """Points where the surface meets the neck plane (vertices on it plus edge crossings)."""
    dist = neck_plane.signed_distance(mesh.vertices)
    scale = max(1.0, float(np.abs(mesh.vertices).max()))
    on = np.abs(dist) <= tol * scale
    tri = mesh.triangles
    edges = np.unique(np.sort(np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1), axis=0)
    da, db = dist[edges[:, 0]], dist[edges[:, 1]]
    crossing = (da * db < 0) & ~on[edges[:, 0]] & ~on[edges[:, 1]]
    e = edges[crossing]
    t = (da[crossing] / (da[crossing] - db[crossing]))[:, None]
    pts = mesh.vertices[e[:, 0]] + t * (mesh.vertices[e[:, 1]] - mesh.vertices[e[:, 0]])
    return np.concatenate([mesh.vertices[on], pts])


def neck_features(mesh, neck_plane):
    """Neck width, dome height, aspect ratio and bulge factor for an annotated mesh."""
    section = neck_section_points(mesh, neck_plane)
    if len(section) < 2:
        raise AnnotationError("neck plane does not intersect the mesh")
    neck_width = max_pairwise_distance(section)
    if neck_width == 0:
        raise AnnotationError("neck cross-section is a single point")
    dist = neck_plane.signed_distance(mesh.vertices)
    dome = mesh.vertices[dist > 0]
    if len(dome) == 0:
        raise AnnotationError("no mesh vertices on the dome side of the neck plane")
    dome_height = float(dist.max())
    n = neck_plane.normal
    projected = np.concatenate([dome, section])
    projected = projected - np.outer(neck_plane.signed_distance(projected), n)
    max_width = max_pairwise_distance(projected)
    return {
        "neck_width_mm": neck_width,
        "dome_height_mm": dome_height,
        "ar": dome_height / neck_width,
        "bf": max_width / neck_width,
    }
