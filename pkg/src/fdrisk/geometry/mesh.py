"""Indexed triangle meshes."""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..exceptions import InvalidInputError

MERGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class NeckPlane:
    """Plane separating the aneurysm dome from the parent vessel.

    ``normal`` points towards the dome side.
    """

    point: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        point = np.asarray(self.point, dtype=float).reshape(3)
        normal = np.asarray(self.normal, dtype=float).reshape(3)
        length = np.linalg.norm(normal)
        if not np.isfinite(length) or length == 0:
            raise InvalidInputError("neck plane normal must be a nonzero vector")
        if abs(length - 1.0) > 1e-9:
            normal = normal / length
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "normal", normal)

    def signed_distance(self, points):
        return (np.asarray(points, dtype=float) - self.point) @ self.normal

    @classmethod
    def from_values(cls, values):
        values = [float(v) for v in values]
        if len(values) != 6:
            raise InvalidInputError(f"neck plane needs 6 reals (point, normal), got {len(values)}")
        return cls(np.array(values[:3]), np.array(values[3:]))


@dataclass
class TriangleMesh:
    """Triangle surface with vertices in mm.

    Construct through :func:`clean_mesh` (or :func:`fdrisk.geometry.load_mesh`)
    to get merged vertices and no zero-area triangles.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    neck_plane: Optional[NeckPlane] = None
    _edge_info: Optional[Tuple[bool, bool]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if len(self.triangles) and (
            self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)
        ):
            raise InvalidInputError("triangle vertex index out of range")
        if not np.all(np.isfinite(self.vertices)):
            raise InvalidInputError("mesh contains non-finite vertex coordinates")

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def _edges(self):
        if self._edge_info is None:
            self._edge_info = _edge_check(self.triangles)
        return self._edge_info

    @property
    def is_closed(self):
        """Every edge shared by exactly two triangles."""
        return self._edges()[0]

    @property
    def is_consistently_oriented(self):
        """Closed, and the two triangles on every edge traverse it in opposite directions."""
        return self._edges()[1]

    def triangle_corners(self):
        return self.vertices[self.triangles]

    def transformed(self, rotation=None, translation=None, scale=1.0):
        """Return a copy moved by ``x -> scale * R x + t`` (neck plane moved too)."""
        R = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        t = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)
        verts = scale * self.vertices @ R.T + t
        neck = None
        if self.neck_plane is not None:
            neck = NeckPlane(scale * R @ self.neck_plane.point + t, R @ self.neck_plane.normal)
        return TriangleMesh(verts, self.triangles.copy(), neck)

    def with_neck_plane(self, neck_plane):
        return TriangleMesh(self.vertices, self.triangles, neck_plane, self._edge_info)


def _edge_check(triangles):
    if len(triangles) == 0:
        return False, False
    directed = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]
    )
    undirected = np.sort(directed, axis=1)
    _, counts = np.unique(undirected, axis=0, return_counts=True)
    closed = bool(np.all(counts == 2))
    if not closed:
        return False, False
    # Consistent winding: each directed edge appears once and its reverse exists.
    uniq_directed = np.unique(directed, axis=0)
    oriented = len(uniq_directed) == len(directed)
    return closed, bool(oriented)


def triangle_areas(vertices, triangles):
    p = vertices[triangles]
    return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


def clean_mesh(vertices, triangles, neck_plane=None, tol=MERGE_TOLERANCE):
    """Merge vertices closer than ``tol`` and drop zero-area triangles."""
    vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
    triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    if len(vertices) == 0 or len(triangles) == 0:
        raise InvalidInputError("mesh is empty")
    if not np.all(np.isfinite(vertices)):
        raise InvalidInputError("mesh contains non-finite vertex coordinates")

    # exact duplicates first; near-duplicates via a KD-tree pass
    uniq, inverse = np.unique(vertices, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    pairs = cKDTree(uniq).query_pairs(tol, output_type="ndarray")
    if len(pairs):
        n = len(uniq)
        graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
        _, labels = connected_components(graph, directed=False)
        # representative = lowest-index member of each component
        first = np.full(labels.max() + 1, n, dtype=np.int64)
        np.minimum.at(first, labels, np.arange(n))
        order = np.unique(first)
        remap = np.searchsorted(order, first[labels])
        uniq = uniq[order]
        inverse = remap[inverse]
    tris = inverse[triangles]

    distinct = (tris[:, 0] != tris[:, 1]) & (tris[:, 1] != tris[:, 2]) & (tris[:, 0] != tris[:, 2])
    tris = tris[distinct]
    if len(tris):
        tris = tris[triangle_areas(uniq, tris) > 0.0]
    if len(tris) == 0:
        raise InvalidInputError("mesh has no non-degenerate triangles")

    # drop vertices no longer referenced
    used = np.unique(tris)
    remap = np.full(len(uniq), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return TriangleMesh(uniq[used], remap[tris], neck_plane)
