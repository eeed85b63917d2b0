"""Triangle meshes, shape descriptors and surface voxelization."""
from .features import COLUMN_NAMES, MorphometricExtractor, MorphometricRecord, morphometrics
from .hull import ConvexHull, convex_hull
from .measures import (
    compactness,
    feret_diameter,
    flatness,
    hull_volume,
    neck_features,
    sphericity,
    surface_area,
    undulation_index,
    volume,
)
from .mesh import NeckPlane, TriangleMesh, clean_mesh
from .stl import load_mesh, read_neck_annotation, write_neck_annotation, write_stl
from .voxel import VoxelGrid, read_grid, voxelize_surface, write_grid

__all__ = [
    "COLUMN_NAMES", "ConvexHull", "MorphometricExtractor", "MorphometricRecord", "NeckPlane",
    "TriangleMesh", "VoxelGrid", "clean_mesh", "compactness", "convex_hull", "feret_diameter",
    "flatness", "hull_volume", "load_mesh", "morphometrics", "neck_features", "read_grid",
    "read_neck_annotation", "sphericity", "surface_area", "undulation_index", "volume",
    "voxelize_surface", "write_grid", "write_neck_annotation", "write_stl",
]
