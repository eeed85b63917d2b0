"""Cross-validation protocol, metrics, significance tests and importance."""
from .cv import (
    EvaluationReport,
    ModelEvaluation,
    median_selection,
    pairwise_tests,
    pvalue_text,
    repeated_cv,
    metrics_table_text,
)
from .folds import FoldPlan, make_plan, stratified_folds
from .importance import heldout_permutation_importance, impurity_importance, permutation_importance
from .metrics import auc, classification_metrics, roc_curve
from .wilcoxon import WilcoxonResult, wilcoxon_signed_rank

__all__ = [
    "EvaluationReport", "FoldPlan", "ModelEvaluation", "WilcoxonResult", "auc",
    "classification_metrics", "heldout_permutation_importance", "impurity_importance",
    "make_plan", "median_selection", "pairwise_tests", "permutation_importance", "pvalue_text",
    "repeated_cv", "roc_curve", "stratified_folds", "metrics_table_text", "wilcoxon_signed_rank",
]
