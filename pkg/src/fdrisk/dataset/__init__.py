"""Feature tables, CSV ingestion and preprocessing."""
from .preprocess import (
    CorrelationPruner,
    LabeledMatrix,
    OutlierImputer,
    PreprocessReport,
    TableEncoder,
    class_weights,
    correlation_matrix,
    encode,
    impute_outliers,
    prune_correlated,
    resolve_sample_weight,
)
from .schema import DEFAULT_COLUMNS, ColumnSpec, Schema, parse_schema, read_schema, default_schema
from .table import FeatureTable, from_arrays, read_csv, summarize, write_csv

__all__ = [
    "DEFAULT_COLUMNS", "ColumnSpec", "CorrelationPruner", "FeatureTable", "LabeledMatrix",
    "OutlierImputer", "PreprocessReport", "Schema", "TableEncoder", "class_weights",
    "correlation_matrix", "encode", "from_arrays", "impute_outliers", "parse_schema",
    "prune_correlated", "read_csv", "read_schema", "resolve_sample_weight", "summarize",
    "default_schema", "write_csv",
]
