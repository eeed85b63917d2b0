"""Fractal-dimension and morphometric features for aneurysm rupture-risk modelling.

Subpackages: :mod:`fdrisk.geometry` (meshes, hulls, voxelization and shape
descriptors), :mod:`fdrisk.fractal` (box-counting dimension, lacunarity),
:mod:`fdrisk.dataset` (feature tables and preprocessing),
:mod:`fdrisk.models` (classifiers), :mod:`fdrisk.eval` (cross-validation
protocol and statistics), :mod:`fdrisk.synth` (ground-truth generators)
and :mod:`fdrisk.cli`.
"""
__version__ = "0.1.0"
