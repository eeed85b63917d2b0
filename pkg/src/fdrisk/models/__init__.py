"""Binary classifiers, their specs, persistence and grid search."""
from .base import BinaryClassifier, schema_hash
from .forest import RandomForest
from .gbt import GradientBoostedTrees
from .io import load_model, save_model
from .logistic import LogisticRegression
from .mlp import MLPClassifier
from .search import GridSearchResult, expand_grid, grid_search
from .spec import DISPLAY_NAMES, ESTIMATORS, KIND_ORDER, ClassifierSpec, fit, predict_proba
from .svm import SVMClassifier
from .tree import Tree, grow_tree

__all__ = [
    "BinaryClassifier", "ClassifierSpec", "DISPLAY_NAMES", "ESTIMATORS", "GradientBoostedTrees",
    "GridSearchResult", "KIND_ORDER", "LogisticRegression", "MLPClassifier", "RandomForest",
    "SVMClassifier", "Tree", "expand_grid", "fit", "grid_search", "grow_tree", "load_model",
    "predict_proba", "save_model", "schema_hash",
]
