"""Command-line entry point: ``fdrisk <verb> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.
"""
import argparse
import ast
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import plotting, synth
from .config import RunConfig, read_config
from .dataset import read_csv, read_schema, summarize, write_csv
from .dataset.schema import default_schema
from .dataset.table import from_arrays
from .eval import (
    EvaluationReport,
    heldout_permutation_importance,
    impurity_importance,
    make_plan,
    pairwise_tests,
    pvalue_text,
    repeated_cv,
    wilcoxon_signed_rank,
)
from .eval.importance import TREE_KINDS
from .exceptions import ConfigError, DataError, FdriskError, PairingError, PlotDataError, StageError
from .geometry import load_mesh, read_neck_annotation, write_neck_annotation, write_stl
from .geometry.features import COLUMN_NAMES, morphometrics
from .geometry.voxel import write_grid
from .models import DISPLAY_NAMES, ClassifierSpec, grid_search
from .pipeline import global_preprocess, make_pipeline

OUT_DIR_ENV = "FDRISK_OUT_DIR"


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=False) + "\n"


# ------------------------------------------------------------------ extract

def _annotation_for(mesh_path, explicit):
    if explicit is not None:
        return explicit
    side = Path(mesh_path).with_suffix(".neck")
    return side if side.exists() else None


def cmd_extract(meshes, out_csv, annotations=None, resolution=128, labels=None, schema=None):
    """One feature row per mesh, in input order; failures go to the ``errors`` column.

    Returns the number of meshes that failed.
    """
    if not meshes:
        raise UsageError("extract needs at least one mesh")
    if annotations and len(annotations) != len(meshes):
        raise UsageError("--annotations must list one file per mesh")
    if labels is not None and len(labels) != len(meshes):
        raise UsageError("--labels must give one label per mesh")
    feature_cols = list(COLUMN_NAMES.values())
    cols = {"mesh": [], **{c: [] for c in feature_cols}, "errors": []}
    failed = 0
    for i, path in enumerate(meshes):
        cols["mesh"].append(Path(path).name)
        try:
            ann = _annotation_for(path, annotations[i] if annotations else None)
            neck = read_neck_annotation(ann) if ann is not None else None
            values = morphometrics(load_mesh(path, neck_plane=neck), resolution).as_columns()
            err = None
        except FdriskError as exc:
            values, err = {}, f"{type(exc).__name__}: {exc}"
            failed += 1
        for c in feature_cols:
            v = values.get(c)
            cols[c].append(np.nan if v is None else v)
        cols["errors"].append(err)
    kinds = {"mesh": "categorical", "errors": "categorical"}
    schema = schema or default_schema()
    table = from_arrays(cols, labels, label_name=schema.label, schema=schema, kinds=kinds)
    Path(out_csv).parent.mkdir(parents=True, exist_ok=True)
    write_csv(table, out_csv)
    if failed == len(meshes):
        raise DataError(f"all {failed} meshes failed; see the errors column of {out_csv}")
    return failed


# --------------------------------------------------------------- preprocess

def _load_table(cfg):
    if cfg.csv is None:
        raise ConfigError("no input CSV configured ([data] csv or positional argument)")
    schema = read_schema(cfg.schema) if cfg.schema is not None else None
    table = read_csv(cfg.csv, schema=schema, label=cfg.label, require_label=True)
    drop = [c for c in cfg.id_columns if c in table.names]
    return table.drop(drop) if drop else table


def cmd_preprocess(cfg, out_dir):
    """Global outlier replacement and correlation pruning; writes the cleaned CSV and report."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = _load_table(cfg)
    clean, report = global_preprocess(table, cfg.outlier_sigma, cfg.corr_threshold)
    write_csv(clean, out_dir / "preprocessed.csv")
    _write(out_dir / "preprocess_report.json", report.to_json() + "\n")
    _write(out_dir / "preprocess_report.txt", report.to_text())
    _write(out_dir / "summary.json", _dump(summarize(table)))
    if report.correlation_matrix is not None:
        cm = report.correlation_matrix
        plotting.write_svg(plotting.correlation_svg(cm.names, cm.values), out_dir / "correlation.svg")
    return report


# ----------------------------------------------------------------- evaluate

def _display_name(kind, phases):
    if kind == "logistic" and not phases:
        return "Logistic Regression"
    return DISPLAY_NAMES[kind]


def _mean_impurity(models):
    total = {}
    for m in models:
        for name, score in impurity_importance(m):
            total[name] = total.get(name, 0.0) + score
    s = sum(total.values())
    ranked = sorted(total.items(), key=lambda p: -p[1])
    return [[n, v / s if s > 0 else 0.0] for n, v in ranked]


class _Run:
    """Tracks written files and the current stage so failures leave a MANIFEST."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.files = []
        self.stage = None

    def write(self, name, text):
        _write(self.out_dir / name, text)
        self.files.append(name)

    def manifest(self, complete, error=None):
        lines = ["status: complete" if complete else "status: incomplete"]
        if error is not None:
            lines.append(f"failed_stage: {self.stage}")
            lines.append(f"error: {error}")
        lines += ["files:"] + [f"  {f}" for f in self.files]
        _write(self.out_dir / "MANIFEST", "\n".join(lines) + "\n")


def cmd_evaluate(cfg, out_dir):
    """Grid search, repeated CV, pairwise tests, importance, tables and figures."""
    cfg = cfg.validate()
    run = _Run(out_dir)
    try:
        report = _evaluate(cfg, run)
    except Exception as exc:
        err = exc if isinstance(exc, StageError) else StageError(run.stage, exc)
        run.manifest(False, err.cause)
        raise err from exc
    run.manifest(True)
    return report


def _evaluate(cfg, run):
    run.stage = "load"
    table = _load_table(cfg)
    y = table.label

    run.stage = "preprocess"
    clean, prep = global_preprocess(table, cfg.outlier_sigma, cfg.corr_threshold)
    if cfg.paper_mode:
        table = clean
        prep.notes.append("paper mode: preprocessing applied once to all rows before splitting")
    else:
        prep.notes.append("fold-safe mode: the report shows whole-table statistics; every "
                          "training split refits its own preprocessing")
    run.write("preprocess_report.json", prep.to_json() + "\n")
    run.write("preprocess_report.txt", prep.to_text())
    plan = make_plan(y, cfg.n_folds, cfg.n_repetitions, cfg.seed)
    std = {"auto": "auto", "true": True, "false": False}[cfg.standardize]

    evaluations, importance = [], {}
    for kind in cfg.models:
        fixed, axes = cfg.grids[kind]
        phases = cfg.phases_baseline if kind == "logistic" else False
        factory = lambda s: make_pipeline(s, table, cfg.paper_mode, cfg.outlier_sigma, cfg.corr_threshold,
                                          std, phases)
        run.stage = f"grid_search:{kind}"
        base = ClassifierSpec(kind, fixed, "balanced", cfg.seed)
        gs = grid_search(base, axes, table, n_folds=cfg.grid_folds, seed=cfg.seed,
                         make_estimator=factory, n_jobs=cfg.workers)
        run.stage = f"cross_validation:{kind}"
        best = gs.best_spec
        ev = repeated_cv(lambda: factory(best), table, plan, kind=kind, name=_display_name(kind, phases),
                         spec=best.to_dict(), averaged=cfg.averaged_metrics, n_jobs=cfg.workers)
        ev.grid = gs.to_dict()
        run.stage = f"importance:{kind}"
        sel = ev.selected_repetition
        imp = {"repetition": sel, "permutation": [list(p) for p in heldout_permutation_importance(
            ev.models[sel], table, plan, sel, n_shuffles=cfg.n_shuffles, seed=cfg.seed)]}
        if kind in TREE_KINDS:
            imp["impurity"] = _mean_impurity(ev.models[sel])
        importance[kind] = imp
        ev.models = None
        evaluations.append(ev)

    run.stage = "compare"
    pairs = pairwise_tests(evaluations)
    report = EvaluationReport(evaluations, pairs, importance, plan.to_dict(), prep.to_dict(), cfg.settings())

    run.stage = "write"
    run.write("report.json", report.to_json() + "\n")
    run.write("metrics_table.txt", report.metrics_table())
    run.write("pvalues.txt", pvalue_text(pairs))
    run.write("pvalues.json", _dump(pairs))
    run.write("roc.svg", roc_from_report(report.to_dict()))
    for kind, imp in importance.items():
        name = _display_name(kind, cfg.phases_baseline if kind == "logistic" else False)
        run.write(f"importance_{kind}.svg", plotting.importance_svg(
            [tuple(p) for p in imp["permutation"]], f"Permutation importance: {name}"))
        if "impurity" in imp:
            run.write(f"impurity_{kind}.svg", plotting.importance_svg(
                [tuple(p) for p in imp["impurity"]], f"Impurity importance: {name}"))
    if prep.correlation_matrix is not None:
        cm = prep.correlation_matrix
        run.write("correlation.svg", plotting.correlation_svg(cm.names, cm.values))
    return report


# ------------------------------------------------------------ compare / plot

def _load_report(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"report not found: {path}") from None
    except ValueError as exc:
        raise DataError(f"{path} is not a JSON report: {exc}") from None


def _aucs(report):
    models = report.get("models")
    if not models:
        raise DataError("report has no models section")
    order = report.get("model_order") or sorted(models)
    return [(k, models[k]["raw_aucs"]) for k in order]


def compare_rows(report_a, report_b=None):
    """Wilcoxon rows within one report, or between matching models of two reports."""
    a = _aucs(report_a)
    if report_b is None:
        pairs = [(ka, va, kb, vb) for i, (ka, va) in enumerate(a) for kb, vb in a[i + 1:]]
    else:
        b = dict(_aucs(report_b))
        pairs = [(f"A:{k}", v, f"B:{k}", b[k]) for k, v in a if k in b]
        if not pairs:
            raise PairingError("the two reports share no model kinds")
    rows = []
    for ka, va, kb, vb in pairs:
        if len(va) != len(vb):
            raise PairingError(f"{ka} has {len(va)} AUCs but {kb} has {len(vb)}")
        r = wilcoxon_signed_rank(va, vb)
        rows.append({"a": ka, "b": kb, "W": r.W, "n_effective": r.n_effective,
                     "p_two_sided": r.p_two_sided, "p_greater": r.p_greater, "p_less": r.p_less,
                     "method": r.method, "flagged": r.flagged})
    return rows


def cmd_compare(report_a, report_b, out_dir):
    rows = compare_rows(_load_report(report_a), None if report_b is None else _load_report(report_b))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write(out_dir / "compare.json", _dump(rows))
    text = pvalue_text(rows)
    _write(out_dir / "compare.txt", text)
    return rows, text


def roc_from_report(report):
    models = report.get("models") or {}
    curves = []
    for kind in report.get("model_order") or sorted(models):
        m = models[kind]
        roc = m["repetitions"][m["selected_repetition"]]["roc"]
        curves.append((m["name"], roc["fpr"], roc["tpr"], m["median_auc"]))
    if not curves:
        raise PlotDataError("report has no ROC data")
    return plotting.roc_svg(curves, "ROC curves (median repetition)")


def plot_from_report(report, kind, model=None, method="permutation"):
    if kind == "roc":
        return roc_from_report(report)
    if kind == "importance":
        imp = report.get("importance") or {}
        if not imp:
            raise PlotDataError("report has no importance section")
        model = model or (report.get("model_order") or sorted(imp))[0]
        if model not in imp or method not in imp[model]:
            raise PlotDataError(f"no {method} importance for model {model!r}")
        return plotting.importance_svg([tuple(p) for p in imp[model][method]],
                                       f"{method.capitalize()} importance: {model}")
    if kind == "correlation":
        cm = (report.get("preprocess") or {}).get("correlation_matrix") or report.get("correlation_matrix")
        if not cm:
            raise PlotDataError("report has no correlation matrix")
        return plotting.correlation_svg(cm["names"], np.array(cm["values"]))
    raise UsageError(f"unknown plot kind {kind!r}")


# -------------------------------------------------------------------- synth

def _literal(text):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def cmd_synth(kind, params, seed, out):
    spec = synth.SynthSpec(kind, params, seed)
    obj = synth.generate(spec)
    out = Path(out)
    if kind in synth.MESH_KINDS:
        write_stl(obj, out, format="ascii" if out.suffix.lower() == ".stla" else "binary")
        if obj.neck_plane is not None:
            write_neck_annotation(obj.neck_plane, out.with_suffix(".neck"))
    elif kind in synth.GRID_KINDS:
        write_grid(obj, out)
    else:
        write_csv(obj, out)
        _write(out.with_suffix(".truth.json"), _dump(obj.meta))
    return obj


# --------------------------------------------------------------------- main

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for every stochastic step")
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--out-dir", help=f"output directory (env {OUT_DIR_ENV})")
    common.add_argument("--paper-mode", action="store_true",
                        help="preprocess all rows once before splitting instead of per training split")
    common.add_argument("--workers", type=int, help="parallel workers for grid search and CV")

    p = _Parser(prog="fdrisk", description="Fractal-dimension rupture-risk modelling toolkit.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    e = sub.add_parser("extract", parents=[common], help="geometric features from STL meshes")
    e.add_argument("meshes", nargs="*")
    e.add_argument("-o", "--output", help="output CSV (default <out-dir>/features.csv)")
    e.add_argument("--annotations", nargs="*", help="neck annotation per mesh (default: <mesh>.neck if present)")
    e.add_argument("--labels", help="comma-separated 0/1 labels, one per mesh")
    e.add_argument("--resolution", type=int, default=128)

    pp = sub.add_parser("preprocess", parents=[common], help="outlier replacement and correlation pruning")
    pp.add_argument("csv", nargs="?")

    ev = sub.add_parser("evaluate", parents=[common], help="full cross-validated model comparison")
    ev.add_argument("csv", nargs="?")

    c = sub.add_parser("compare", parents=[common], help="Wilcoxon tests on report AUC vectors")
    c.add_argument("report")
    c.add_argument("report_b", nargs="?")

    pl = sub.add_parser("plot", parents=[common], help="SVG figure from a report")
    pl.add_argument("report")
    pl.add_argument("--kind", choices=("roc", "importance", "correlation"), required=True)
    pl.add_argument("--model")
    pl.add_argument("--method", choices=("permutation", "impurity"), default="permutation")
    pl.add_argument("-o", "--output", required=True)

    s = sub.add_parser("synth", parents=[common], help="synthetic meshes, grids and tables")
    s.add_argument("kind", choices=synth.MESH_KINDS + synth.GRID_KINDS + synth.TABULAR_KINDS)
    s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="generator parameter (Python literal), repeatable")
    s.add_argument("-o", "--output", required=True)
    return p


def _out_dir(args, cfg=None):
    if args.out_dir:
        return Path(args.out_dir)
    if os.environ.get(OUT_DIR_ENV):
        return Path(os.environ[OUT_DIR_ENV])
    return cfg.out_dir if cfg is not None else Path("fdrisk-out")


def _run_config(args):
    cfg = read_config(args.config) if args.config else RunConfig()
    kw = {"seed": args.seed, "workers": args.workers,
          "paper_mode": True if args.paper_mode else None}
    if getattr(args, "csv", None):
        kw["csv"] = Path(args.csv)
    return cfg.with_overrides(**kw)


def run(argv=None):
    args = build_parser().parse_args(argv)
    if args.verb == "extract":
        labels = None
        if args.labels:
            labels = [int(v) for v in args.labels.split(",")]
        out = Path(args.output) if args.output else _out_dir(args) / "features.csv"
        failed = cmd_extract(args.meshes, out, args.annotations, args.resolution, labels)
        print(f"wrote {out} ({len(args.meshes) - failed} ok, {failed} failed)")
    elif args.verb == "preprocess":
        cfg = _run_config(args)
        report = cmd_preprocess(cfg, _out_dir(args, cfg))
        print(report.to_text(), end="")
    elif args.verb == "evaluate":
        cfg = _run_config(args)
        out = _out_dir(args, cfg)
        report = cmd_evaluate(cfg, out)
        print(report.metrics_table(), end="")
        print(pvalue_text(report.pairwise), end="")
        print(f"outputs in {out}")
    elif args.verb == "compare":
        _, text = cmd_compare(args.report, args.report_b, _out_dir(args))
        print(text, end="")
    elif args.verb == "plot":
        svg = plot_from_report(_load_report(args.report), args.kind, args.model, args.method)
        plotting.write_svg(svg, args.output)
    elif args.verb == "synth":
        params = {}
        for item in args.set:
            if "=" not in item:
                raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            params[k.strip()] = _literal(v.strip())
        try:
            cmd_synth(args.kind, params, args.seed or 0, args.output)
        except TypeError as exc:
            raise UsageError(f"bad parameters for {args.kind}: {exc}") from None
    return 0


def main(argv=None):
    try:
        return run(argv)
    except FdriskError as exc:
        print(f"fdrisk: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        print(f"fdrisk: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
