"""Orientation predicate with a floating-point filter and exact fallback.

``orient3d(a, b, c, d)`` is positive when ``d`` lies on the side of the plane
through ``a, b, c`` that the right-handed normal ``(b-a) x (c-a)`` points to.
Signs the float filter cannot certify are recomputed with rationals, so the
result is always the exact sign for the given doubles.
"""
from fractions import Fraction

import numpy as np

_EPS = np.finfo(float).eps / 2
# Shewchuk's static error bound for the naive orient3d determinant
_ERRBOUND = (7.0 + 56.0 * _EPS) * _EPS


def _exact_sign(a, b, c, d):
    a = [Fraction(float(x)) for x in a]
    b = [Fraction(float(x)) for x in b]
    c = [Fraction(float(x)) for x in c]
    d = [Fraction(float(x)) for x in d]
    u = [b[i] - a[i] for i in range(3)]
    v = [c[i] - a[i] for i in range(3)]
    w = [d[i] - a[i] for i in range(3)]
    det = (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )
    return (det > 0) - (det < 0)


def orient3d_many(a, b, c, d):
    """Exact orientation signs for stacked triangles ``a, b, c`` (m, 3) against ``d``.

    ``d`` may be a single point (3,) or stacked (m, 3). Returns int8 array of
    -1/0/+1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    d = np.broadcast_to(np.asarray(d, dtype=float), a.shape)
    ad, bd, cd = a - d, b - d, c - d
    t1 = bd[:, 1] * cd[:, 2]
    t2 = bd[:, 2] * cd[:, 1]
    t3 = cd[:, 1] * ad[:, 2]
    t4 = cd[:, 2] * ad[:, 1]
    t5 = ad[:, 1] * bd[:, 2]
    t6 = ad[:, 2] * bd[:, 1]
    det = ad[:, 0] * (t1 - t2) + bd[:, 0] * (t3 - t4) + cd[:, 0] * (t5 - t6)
    permanent = (
        np.abs(ad[:, 0]) * (np.abs(t1) + np.abs(t2))
        + np.abs(bd[:, 0]) * (np.abs(t3) + np.abs(t4))
        + np.abs(cd[:, 0]) * (np.abs(t5) + np.abs(t6))
    )
    # det(a-d, b-d, c-d) has the opposite sign of det(b-a, c-a, d-a)
    sign = -np.sign(det).astype(np.int8)
    uncertain = np.nonzero(np.abs(det) <= _ERRBOUND * permanent)[0]
    for i in uncertain:
        sign[i] = _exact_sign(a[i], b[i], c[i], d[i])
    return sign


def orient3d(a, b, c, d):
    return int(orient3d_many(np.reshape(a, (1, 3)), np.reshape(b, (1, 3)),
                             np.reshape(c, (1, 3)), d)[0])
