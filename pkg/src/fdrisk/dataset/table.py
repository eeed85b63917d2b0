"""Typed feature tables and CSV input/output."""
import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..exceptions import DegenerateLabelsError, ParseError, SchemaError
from .schema import DEFAULT_LABEL, ColumnSpec, Schema, default_schema

_TRUE = {"1", "true", "1.0"}
_FALSE = {"0", "false", "0.0"}


@dataclass(frozen=True)
class FeatureTable:
    """Columns of one kind each, plus an optional binary label.

    Numeric and binary columns are float arrays with NaN for missing;
    categorical columns are object arrays with ``None`` for missing.
    Tables are treated as immutable: operations return new tables.
    """

    columns: Tuple[ColumnSpec, ...]
    data: Dict[str, np.ndarray]
    label: Optional[np.ndarray] = None
    label_name: str = DEFAULT_LABEL
    unknown_columns: Tuple[str, ...] = ()
    meta: Dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate column names: {dup}")
        lengths = {len(self.data[name]) for name in names}
        if self.label is not None:
            lengths.add(len(self.label))
        if len(lengths) > 1:
            raise SchemaError(f"columns and label differ in length: {sorted(lengths)}")

    @property
    def names(self):
        return [c.name for c in self.columns]

    @property
    def n_rows(self):
        if self.columns:
            return len(self.data[self.columns[0].name])
        return 0 if self.label is None else len(self.label)

    def column(self, name):
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def kind_names(self, *kinds):
        return [c.name for c in self.columns if c.kind in kinds]

    def missing_mask(self, name):
        values = self.data[name]
        if self.column(name).kind == "categorical":
            return np.array([v is None for v in values], dtype=bool)
        return np.isnan(values)

    def require_label(self):
        if self.label is None:
            raise SchemaError(f"table has no label column {self.label_name!r}")
        if len(np.unique(self.label)) < 2:
            raise DegenerateLabelsError("label has a single class")
        return self.label

    def replace(self, data=None, columns=None, label=None, meta=None):
        columns = self.columns if columns is None else tuple(columns)
        new = dict(self.data) if data is None else data
        keep = {c.name for c in columns}
        return FeatureTable(
            columns,
            {k: v for k, v in new.items() if k in keep},
            self.label if label is None else label,
            self.label_name,
            tuple(n for n in self.unknown_columns if n in keep),
            dict(self.meta) if meta is None else meta,
        )

    def select(self, names):
        cols = [self.column(n) for n in names]
        return self.replace(columns=cols)

    def drop(self, names):
        names = set(names)
        return self.replace(columns=[c for c in self.columns if c.name not in names])

    def take(self, rows):
        rows = np.asarray(rows)
        data = {k: v[rows] for k, v in self.data.items()}
        label = None if self.label is None else self.label[rows]
        return FeatureTable(self.columns, data, label, self.label_name, self.unknown_columns,
                            dict(self.meta))

    def to_frame(self):
        import pandas as pd

        df = pd.DataFrame({c.name: self.data[c.name] for c in self.columns})
        if self.label is not None:
            df[self.label_name] = self.label
        return df


def from_arrays(columns, label=None, label_name=DEFAULT_LABEL, schema=None, kinds=None):
    """Build a table from ``{name: values}``; kinds come from ``kinds``, the schema, or default numeric."""
    schema = default_schema() if schema is None else schema
    specs = []
    data = {}
    unknown = []
    for name, values in columns.items():
        if kinds and name in kinds:
            spec = ColumnSpec(name, kinds[name])
        elif name in schema:
            spec = schema[name]
        else:
            spec = ColumnSpec(name, "numeric")
            unknown.append(name)
        specs.append(spec)
        if spec.kind == "categorical":
            data[name] = np.array(list(values), dtype=object)
        else:
            data[name] = np.asarray(values, dtype=float)
    lab = None if label is None else np.asarray(label, dtype=np.int64)
    return FeatureTable(tuple(specs), data, lab, label_name, tuple(unknown))


def _parse_cell(text, spec, row, line):
    s = text.strip()
    if s == "":
        return None
    if spec.kind == "binary":
        low = s.lower()
        if low in _TRUE:
            return 1.0
        if low in _FALSE:
            return 0.0
        raise ParseError(f"row {row} (line {line}), column {spec.name!r}: "
                         f"{text!r} is not a binary value (0/1/true/false)", row, spec.name)
    if spec.kind == "numeric":
        try:
            v = float(s)
        except ValueError:
            raise ParseError(f"row {row} (line {line}), column {spec.name!r}: "
                             f"{text!r} is not a number", row, spec.name) from None
        if not math.isfinite(v):
            raise ParseError(f"row {row} (line {line}), column {spec.name!r}: "
                             f"non-finite value {text!r}", row, spec.name)
        return v
    return s


def _looks_numeric(values):
    for v in values:
        s = v.strip()
        if s == "":
            continue
        try:
            if not math.isfinite(float(s)):
                return False
        except ValueError:
            return False
    return True


def read_csv(path_or_buffer, schema=None, label=None, require_label=False):
    """Read a comma-separated file with a header row into a :class:`FeatureTable`.

    Parameters
    ----------
    path_or_buffer : path-like or text file object
    schema : Schema, optional
        Defaults to the built-in feature schema. Columns not in the schema are kept,
        typed by inspection (numeric if every cell parses, else categorical)
        and listed in ``unknown_columns``.
    label : str, optional
        Label column name; defaults to ``schema.label`` (``"ruptured"``).
    """
    schema = default_schema() if schema is None else schema
    label_name = label or schema.label
    if hasattr(path_or_buffer, "read"):
        text = path_or_buffer.read()
    else:
        with open(path_or_buffer, encoding="utf-8-sig", newline="") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV file: no header row") from None
    header = [h.strip() for h in header]
    seen = set()
    for h in header:
        if h in seen:
            raise SchemaError(f"duplicate header column {h!r}")
        seen.add(h)
    rows = []
    for raw in reader:
        if not raw or all(c.strip() == "" for c in raw):
            continue
        if len(raw) != len(header):
            raise ParseError(f"line {reader.line_num}: expected {len(header)} cells, got {len(raw)}",
                             len(rows) + 1)
        rows.append((reader.line_num, raw))

    specs = []
    unknown = []
    for j, name in enumerate(header):
        if name == label_name:
            continue
        if name in schema:
            specs.append(schema[name])
        else:
            kind = "numeric" if _looks_numeric([r[j] for _, r in rows]) else "categorical"
            specs.append(ColumnSpec(name, kind))
            unknown.append(name)

    index = {name: j for j, name in enumerate(header)}
    data = {}
    for spec in specs:
        j = index[spec.name]
        vals = [_parse_cell(r[j], spec, i + 1, line) for i, (line, r) in enumerate(rows)]
        if spec.kind == "categorical":
            data[spec.name] = np.array(vals, dtype=object)
        else:
            data[spec.name] = np.array([np.nan if v is None else v for v in vals], dtype=float)

    lab = None
    if label_name in index:
        j = index[label_name]
        lspec = ColumnSpec(label_name, "binary")
        lab = []
        for i, (line, r) in enumerate(rows):
            v = _parse_cell(r[j], lspec, i + 1, line)
            if v is None:
                raise ParseError(f"row {i + 1} (line {line}): missing label {label_name!r}",
                                 i + 1, label_name)
            lab.append(int(v))
        lab = np.array(lab, dtype=np.int64)
    elif require_label:
        raise SchemaError(f"label column {label_name!r} not found")
    return FeatureTable(tuple(specs), data, lab, label_name, tuple(unknown))


def _format_cell(value, kind):
    if kind == "categorical":
        return "" if value is None else str(value)
    if np.isnan(value):
        return ""
    if kind == "binary":
        return "1" if value == 1 else "0" if value == 0 else repr(float(value))
    return repr(float(value))


def write_csv(table, path_or_buffer):
    """Write ``table`` so that :func:`read_csv` restores every finite value exactly."""
    out = io.StringIO(newline="")
    w = csv.writer(out, lineterminator="\n")
    header = table.names + ([table.label_name] if table.label is not None else [])
    w.writerow(header)
    for i in range(table.n_rows):
        row = [_format_cell(table.data[c.name][i], c.kind) for c in table.columns]
        if table.label is not None:
            row.append(str(int(table.label[i])))
        w.writerow(row)
    text = out.getvalue()
    if hasattr(path_or_buffer, "write"):
        path_or_buffer.write(text)
    else:
        with open(path_or_buffer, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def summarize(table):
    """Per-column summary statistics and label balance."""
    if table.n_rows == 0:
        raise SchemaError("cannot summarize an empty table")
    out = {"n_rows": table.n_rows, "columns": {}}
    for c in table.columns:
        values = table.data[c.name]
        missing = int(table.missing_mask(c.name).sum())
        if c.kind == "categorical":
            present = [v for v in values if v is not None]
            levels = {}
            for v in present:
                levels[v] = levels.get(v, 0) + 1
            ordered = sorted(levels.items(), key=lambda kv: (-kv[1], kv[0]))
            out["columns"][c.name] = {"kind": c.kind, "levels": dict(ordered), "missing": missing}
            continue
        v = values[~np.isnan(values)]
        entry = {"kind": c.kind, "missing": missing, "n": int(len(v))}
        if len(v):
            entry.update(
                mean=float(v.mean()),
                sd=float(v.std(ddof=1)) if len(v) > 1 else float("nan"),
                median=float(np.median(v)),
                min=float(v.min()),
                max=float(v.max()),
            )
        if c.kind == "binary":
            entry["count_1"] = int((v == 1).sum())
            entry["count_0"] = int((v == 0).sum())
        out["columns"][c.name] = entry
    if table.label is not None:
        n = len(table.label)
        n1 = int((table.label == 1).sum())
        out["label"] = {
            "name": table.label_name,
            "count_0": n - n1,
            "count_1": n1,
            "percent_0": 100.0 * (n - n1) / n,
            "percent_1": 100.0 * n1 / n,
        }
    return out
