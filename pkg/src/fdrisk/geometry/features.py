"""Per-mesh morphometric record and a transformer over collections of meshes."""
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .. import fractal
from . import measures
from .voxel import voxelize_surface

FERET_COLUMN = "Max 3D diameter (Feret diameter)"

#: record attribute -> feature-table column name
COLUMN_NAMES = {
    "ar": "ar",
    "bf": "bf",
    "cp": "cp",
    "fd": "fd",
    "flatness": "flatness",
    "lacunarity": "lacunarity",
    "max_3d_diameter": FERET_COLUMN,
    "neck_width_mm": "neck_width_mm",
    "sa": "sa",
    "savol_ratio": "savol_ratio",
    "size_mm": "size_mm",
    "sphericity": "sphericity",
    "ui": "ui",
    "dome_height_mm": "dome_height_mm",
}

NECK_FIELDS = ("ar", "bf", "neck_width_mm", "dome_height_mm")


@dataclass(frozen=True)
class MorphometricRecord:
    """Geometric features of one mesh; neck-dependent fields are ``None`` when unannotated."""

    sa: float
    savol_ratio: float
    sphericity: float
    ui: float
    max_3d_diameter: float
    size_mm: float
    flatness: float
    cp: float
    fd: float
    lacunarity: float
    ar: Optional[float] = None
    bf: Optional[float] = None
    neck_width_mm: Optional[float] = None
    dome_height_mm: Optional[float] = None

    def missing(self):
        return [k for k, v in asdict(self).items() if v is None]

    def as_columns(self):
        """Mapping keyed by feature-table column names."""
        return {COLUMN_NAMES[k]: v for k, v in asdict(self).items()}


def morphometrics(mesh, grid_resolution=128):
    """Compute every geometric feature of ``mesh``.

    Fractal dimension and lacunarity are measured on the surface voxelized at
    ``grid_resolution``. Neck features need ``mesh.neck_plane``.
    """
    A = measures.surface_area(mesh)
    V = measures.volume(mesh)
    feret = measures.feret_diameter(mesh)
    grid = voxelize_surface(mesh, grid_resolution)
    values = dict(
        sa=A,
        savol_ratio=A / V,
        sphericity=math.pi ** (1 / 3) * (6 * V) ** (2 / 3) / A,
        ui=1.0 - V / measures.hull_volume(mesh),
        max_3d_diameter=feret,
        size_mm=feret,
        flatness=measures.flatness(mesh),
        cp=V / (math.sqrt(math.pi) * A ** 1.5),
        fd=fractal.minkowski_dimension(grid).dimension,
        lacunarity=fractal.mean_lacunarity(grid),
    )
    if mesh.neck_plane is not None:
        values.update(measures.neck_features(mesh, mesh.neck_plane))
    return MorphometricRecord(**values)


class MorphometricExtractor(TransformerMixin, BaseEstimator):
    """Turn a sequence of meshes into a feature matrix.

    Stateless; ``fit`` only records the output column names. Missing neck
    features come out as NaN.

    Parameters
    ----------
    grid_resolution : int, default=128
        Voxel grid edge used for fractal dimension and lacunarity.
    """

    def __init__(self, grid_resolution=128):
        self.grid_resolution = grid_resolution

    def fit(self, meshes, y=None):
        self.feature_names_out_ = np.array(list(COLUMN_NAMES.values()), dtype=object)
        return self

    def transform(self, meshes):
        rows = []
        for mesh in meshes:
            cols = morphometrics(mesh, self.grid_resolution).as_columns()
            rows.append([np.nan if cols[c] is None else cols[c] for c in COLUMN_NAMES.values()])
        return np.array(rows, dtype=float).reshape(-1, len(COLUMN_NAMES))

    def get_feature_names_out(self, input_features=None):
        return np.array(list(COLUMN_NAMES.values()), dtype=object)
