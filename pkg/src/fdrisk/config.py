"""Run configuration and hyperparameter grid files (INI format)."""
import ast
import configparser
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Tuple

from .exceptions import ConfigError
from .models.spec import BOUNDS, KIND_ORDER, validate_hyperparameters

DEFAULT_ID_COLUMNS = ("mesh", "id", "errors")


def _parser():
    p = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                  inline_comment_prefixes=None, interpolation=None)
    p.optionxform = str
    return p


def default_grid_text():
    return resources.files("fdrisk").joinpath("data/default_grid.ini").read_text(encoding="utf-8")


def parse_grid(text, source="<grid>"):
    """``{kind: (fixed_params, grid_axes)}`` from grid-file text."""
    p = _parser()
    try:
        p.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    out = {}
    for kind in p.sections():
        if kind not in BOUNDS:
            raise ConfigError(f"{source}: unknown model kind {kind!r} in grid file")
        fixed, axes = {}, {}
        for key, raw in p.items(kind):
            try:
                value = ast.literal_eval(raw)
            except (ValueError, SyntaxError):
                raise ConfigError(f"{source}: [{kind}] {key} = {raw!r} is not a literal") from None
            if isinstance(value, list):
                if not value:
                    raise ConfigError(f"{source}: [{kind}] {key} has an empty list")
                for v in value:
                    validate_hyperparameters(kind, {key: v})
                axes[key] = value
            else:
                validate_hyperparameters(kind, {key: value})
                fixed[key] = value
        out[kind] = (fixed, axes)
    return out


def read_grid(path=None):
    if path is None:
        return parse_grid(default_grid_text(), "default_grid.ini")
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"grid file not found: {path}")
    return parse_grid(path.read_text(encoding="utf-8"), str(path))


def _bool(v):
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _list(v):
    return tuple(s.strip() for s in str(v).split(",") if s.strip())


@dataclass(frozen=True)
class RunConfig:
    """Settings for ``preprocess`` and ``evaluate``; relative paths resolve against the config file."""

    csv: Optional[Path] = None
    schema: Optional[Path] = None
    label: Optional[str] = None
    id_columns: Tuple[str, ...] = DEFAULT_ID_COLUMNS
    paper_mode: bool = False
    corr_threshold: float = 0.8
    outlier_sigma: float = 2.0
    standardize: str = "auto"
    grid: Optional[Path] = None
    models: Tuple[str, ...] = KIND_ORDER
    grid_folds: int = 5
    phases_baseline: bool = True
    n_repetitions: int = 5
    n_folds: int = 5
    seed: int = 0
    averaged_metrics: bool = False
    n_shuffles: int = 5
    out_dir: Path = Path("fdrisk-out")
    workers: int = 1
    grids: Dict = field(default=None, compare=False, repr=False)

    def validate(self):
        for name in ("csv", "schema", "grid"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{name} path does not exist: {path}")
        if not 0 < self.corr_threshold <= 1:
            raise ConfigError(f"corr_threshold must be in (0, 1], got {self.corr_threshold}")
        if not self.outlier_sigma > 0:
            raise ConfigError(f"outlier_sigma must be > 0, got {self.outlier_sigma}")
        if self.n_repetitions < 1 or self.n_folds < 2 or self.grid_folds < 2:
            raise ConfigError("need n_repetitions >= 1, n_folds >= 2 and grid_folds >= 2")
        if self.n_shuffles < 1 or self.workers < 1:
            raise ConfigError("n_shuffles and workers must be >= 1")
        if self.standardize not in ("auto", "true", "false"):
            raise ConfigError("standardize must be auto, true or false")
        for kind in self.models:
            if kind not in KIND_ORDER:
                raise ConfigError(f"unknown model kind {kind!r}; expected one of {list(KIND_ORDER)}")
        grids = read_grid(self.grid)
        missing = [k for k in self.models if k not in grids]
        if missing:
            raise ConfigError(f"grid file has no section for {missing}")
        return replace(self, grids=grids)

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def settings(self):
        """Run settings that affect results, for embedding in reports (no paths)."""
        return {"paper_mode": self.paper_mode, "corr_threshold": self.corr_threshold,
                "outlier_sigma": self.outlier_sigma, "standardize": self.standardize,
                "models": list(self.models), "grid_folds": self.grid_folds,
                "phases_baseline": self.phases_baseline, "n_repetitions": self.n_repetitions,
                "n_folds": self.n_folds, "seed": self.seed, "averaged_metrics": self.averaged_metrics,
                "n_shuffles": self.n_shuffles, "csv": None if self.csv is None else Path(self.csv).name}


_KEYS = {
    ("data", "csv"): ("csv", "path"), ("data", "schema"): ("schema", "path"),
    ("data", "label"): ("label", str), ("data", "id_columns"): ("id_columns", _list),
    ("preprocess", "paper_mode"): ("paper_mode", _bool),
    ("preprocess", "corr_threshold"): ("corr_threshold", float),
    ("preprocess", "outlier_sigma"): ("outlier_sigma", float),
    ("preprocess", "standardize"): ("standardize", lambda v: str(v).strip().lower()),
    ("models", "grid"): ("grid", "path"), ("models", "kinds"): ("models", _list),
    ("models", "grid_folds"): ("grid_folds", int), ("models", "phases_baseline"): ("phases_baseline", _bool),
    ("plan", "n_repetitions"): ("n_repetitions", int), ("plan", "n_folds"): ("n_folds", int),
    ("plan", "seed"): ("seed", int), ("report", "averaged_metrics"): ("averaged_metrics", _bool),
    ("importance", "n_shuffles"): ("n_shuffles", int), ("output", "out_dir"): ("out_dir", "path"),
}


def parse_config(text, base_dir=".", source="<config>"):
    p = _parser()
    try:
        p.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    kw = {}
    for section in p.sections():
        for key, raw in p.items(section):
            if (section, key) not in _KEYS:
                raise ConfigError(f"{source}: unknown setting [{section}] {key}")
            attr, conv = _KEYS[(section, key)]
            if conv == "path":
                value = Path(base_dir) / raw.strip()
            else:
                try:
                    value = conv(raw)
                except ValueError as exc:
                    raise ConfigError(f"{source}: [{section}] {key}: {exc}") from None
            kw[attr] = value
    return RunConfig(**kw)


def read_config(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), path.parent, str(path))
