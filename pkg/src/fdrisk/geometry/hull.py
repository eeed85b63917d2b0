"""3D convex hull by incremental insertion with exact orientation tests.

A point is inserted when it lies strictly outside at least one current face;
the faces it sees strictly are removed and the horizon is coned to the point.
Strict visibility with exact signs never creates zero-area faces: a point
that sees a face strictly cannot be collinear with any of that face's edges.
"""
from dataclasses import dataclass

import numpy as np

from ..exceptions import DegenerateGeometryError
from .predicates import orient3d, orient3d_many


@dataclass(frozen=True)
class ConvexHull:
    points: np.ndarray
    faces: np.ndarray  # (m, 3) indices into points, outward (counter-clockwise) winding

    @property
    def vertex_indices(self):
        return np.unique(self.faces)

    def volume(self):
        p = self.points[self.faces]
        ref = self.points[self.faces[0, 0]]
        a, b, c = p[:, 0] - ref, p[:, 1] - ref, p[:, 2] - ref
        return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)

    def area(self):
        p = self.points[self.faces]
        return float(0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1).sum())


def _initial_simplex(pts):
    i0 = int(np.argmin(pts[:, 0]))
    d = np.linalg.norm(pts - pts[i0], axis=1)
    i1 = int(np.argmax(d))
    if d[i1] == 0:
        raise DegenerateGeometryError("convex hull input is a single point")
    u = pts[i1] - pts[i0]
    area = np.linalg.norm(np.cross(u, pts - pts[i0]), axis=1)
    order = np.argsort(-area, kind="stable")
    i2 = int(order[0])
    if area[i2] == 0:
        raise DegenerateGeometryError("convex hull input is collinear")
    normal = np.cross(u, pts[i2] - pts[i0])
    height = np.abs((pts - pts[i0]) @ normal)
    for j in np.argsort(-height, kind="stable"):
        s = orient3d(pts[i0], pts[i1], pts[i2], pts[j])
        if s != 0:
            i3 = int(j)
            break
    else:
        raise DegenerateGeometryError("convex hull input is coplanar")
    # orient so that i3 is below (i0, i1, i2): faces then wind outward
    if s > 0:
        i1, i2 = i2, i1
    return [(i0, i1, i2), (i0, i3, i1), (i1, i3, i2), (i2, i3, i0)], {i0, i1, i2, i3}


def convex_hull(points, seed=0):
    """Convex hull of a point cloud.

    Points are inserted in a seeded random order; the hull itself does not
    depend on the order.
    """
    pts = np.ascontiguousarray(points, dtype=float).reshape(-1, 3)
    if len(pts) < 4:
        raise DegenerateGeometryError("convex hull needs at least 4 points")
    faces, used = _initial_simplex(pts)

    cap = max(64, 4 * len(faces))
    F = np.zeros((cap, 3), dtype=np.int64)
    alive = np.zeros(cap, dtype=bool)
    m = len(faces)
    F[:m] = faces
    alive[:m] = True
    edge_face = {}
    for f, (a, b, c) in enumerate(faces):
        edge_face[(a, b)] = f
        edge_face[(b, c)] = f
        edge_face[(c, a)] = f

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pts))
    for p in order:
        if p in used:
            continue
        idx = np.nonzero(alive[:m])[0]
        tri = F[idx]
        signs = orient3d_many(pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]], pts[p])
        visible = idx[signs > 0]
        if len(visible) == 0:
            continue
        vis_set = set(visible.tolist())
        horizon = []
        dead_edges = []
        for f in visible:
            a, b, c = F[f].tolist()
            for e in ((a, b), (b, c), (c, a)):
                if edge_face[(e[1], e[0])] not in vis_set:
                    horizon.append(e)
                dead_edges.append(e)
        for e in dead_edges:
            del edge_face[e]
        alive[visible] = False
        needed = m + len(horizon)
        if needed > cap:
            cap = max(2 * cap, needed)
            F = np.resize(F, (cap, 3))
            alive = np.concatenate([alive, np.zeros(cap - len(alive), dtype=bool)])
        for a, b in horizon:
            F[m] = (a, b, p)
            alive[m] = True
            edge_face[(a, b)] = m
            edge_face[(b, p)] = m
            edge_face[(p, a)] = m
            m += 1
        used.add(int(p))
    return ConvexHull(pts, F[:m][alive[:m]].copy())
