"""Column schema for the aneurysm feature table."""
import configparser
from dataclasses import dataclass
from typing import Optional, Tuple

from ..exceptions import SchemaError

KINDS = ("numeric", "binary", "categorical")

LOCATIONS = ("aca", "acomm", "aica", "basilar", "ica", "ica_cavernous", "mca",
             "pca", "pcomm", "pica", "sca", "vert")
LATERALITIES = ("left", "midline", "right")
CIRCULATIONS = ("anterior", "posterior")

DEFAULT_LABEL = "ruptured"


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    levels: Optional[Tuple[str, ...]] = None
    description: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.levels is not None:
            object.__setattr__(self, "levels", tuple(self.levels))


def _c(name, kind, description, levels=None):
    return ColumnSpec(name, kind, levels, description)


# (name, kind, description) for the clinical and morphological features
DEFAULT_COLUMNS = (
    _c("age", "numeric", "Age"),
    _c("ar", "numeric", "Aspect Ratio"),
    _c("autoimmune_disease", "binary", "Autoimmune Disease"),
    _c("bf", "numeric", "Bulge Factor"),
    _c("bifurcation", "binary", "Bifurcation"),
    _c("CAD", "binary", "Coronary Artery Disease"),
    _c("circulation", "categorical", "Circulation", CIRCULATIONS),
    _c("circulation_anterior", "binary", "Circulation (Anterior)"),
    _c("circulation_posterior", "binary", "Circulation (Posterior)"),
    _c("cp", "numeric", "Compactness"),
    _c("current_smoker", "binary", "Current Smoker"),
    _c("DM", "binary", "Diabetes Mellitus"),
    _c("familyhx_IA", "binary", "Family History of Intracranial Aneurysm"),
    _c("familyhx_SAH", "binary", "Family History of Subarachnoid Hemorrhage"),
    _c("fd", "numeric", "Fractal Dimension"),
    _c("flatness", "numeric", "Flatness"),
    _c("gender_female", "binary", "Gender (Female:1 Male:0)"),
    _c("gross_morphology", "categorical", "Gross Morphology"),
    _c("HTN", "binary", "Hypertension"),
    _c("hx_smoking", "binary", "History of Smoking"),
    _c("irregular_shape", "binary", "Irregular Shape"),
    _c("lacunarity", "numeric", "Lacunarity"),
    _c("laterality", "categorical", "Laterality", LATERALITIES),
    _c("laterality_left", "binary", "Laterality (Left)"),
    _c("laterality_midline", "binary", "Laterality (Midline)"),
    _c("laterality_right", "binary", "Laterality (Right)"),
    _c("location", "categorical", "Location", LOCATIONS),
    _c("location_aca", "binary", "Location (Anterior Cerebral Artery)"),
    _c("location_acomm", "binary", "Location (Anterior Communicating Artery)"),
    _c("location_aica", "binary", "Location (Anterior Inferior Cerebellar Artery)"),
    _c("location_basilar", "binary", "Location (Basilar Artery)"),
    _c("location_ica", "binary", "Location (Internal Carotid Artery)"),
    _c("location_ica_cavernous", "binary", "Location (ICA Cavernous)"),
    _c("location_mca", "binary", "Location (Middle Cerebral Artery)"),
    _c("location_pca", "binary", "Location (Posterior Cerebral Artery)"),
    _c("location_pcomm", "binary", "Location (Posterior Communicating Artery)"),
    _c("location_pica", "binary", "Location (Posterior Inferior Cerebellar Artery)"),
    _c("location_sca", "binary", "Location (Superior Cerebellar Artery)"),
    _c("location_vert", "binary", "Location (Vertebral Artery)"),
    _c("Max 3D diameter (Feret diameter)", "numeric", "Maximum 3D Diameter (Feret Diameter)"),
    _c("multilobular", "binary", "Multilobular Morphology"),
    _c("multiple_aneurysms", "binary", "Multiple Aneurysms"),
    _c("neck_width_mm", "numeric", "Neck Width (mm)"),
    _c("prior_SAH", "binary", "Prior Subarachnoid Hemorrhage"),
    _c("PVD", "binary", "Peripheral Vascular Disease"),
    _c("sa", "numeric", "Surface Area"),
    _c("savol_ratio", "numeric", "Surface Area to Volume Ratio"),
    _c("sidewall", "binary", "Sidewall Aneurysm"),
    _c("size_mm", "numeric", "Aneurysm Size (mm)"),
    _c("sphericity", "numeric", "Sphericity"),
    _c("total_number_IA", "numeric", "Total Number of Intracranial Aneurysms"),
    _c("ui", "numeric", "Undulation Index"),
    _c("wide_neck", "binary", "Wide Neck"),
)

#: columns used by the PHASES-style logistic baseline (``location_*`` by prefix)
PHASES_COLUMNS = ("age", "HTN", "size_mm", "prior_SAH")
PHASES_PREFIXES = ("location_",)


class Schema:
    """Ordered mapping of column name to :class:`ColumnSpec` plus the label column name."""

    def __init__(self, columns=DEFAULT_COLUMNS, label=DEFAULT_LABEL):
        self.columns = {}
        for col in columns:
            if col.name in self.columns:
                raise SchemaError(f"duplicate column {col.name!r} in schema")
            self.columns[col.name] = col
        self.label = label

    def __contains__(self, name):
        return name in self.columns

    def __getitem__(self, name):
        return self.columns[name]

    def __len__(self):
        return len(self.columns)

    def names(self):
        return list(self.columns)

    def to_text(self):
        lines = ["[label]", f"name = {self.label}", "", "[columns]"]
        for col in self.columns.values():
            spec = col.kind
            if col.levels:
                spec += ": " + ", ".join(col.levels)
            lines.append(f"{col.name} = {spec}")
        return "\n".join(lines) + "\n"


def default_schema(label=DEFAULT_LABEL):
    return Schema(DEFAULT_COLUMNS, label)


def _parser():
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                   interpolation=None)
    cp.optionxform = str
    return cp


def parse_schema(text):
    """Parse the key-value schema format.

    ::

        [label]
        name = ruptured

        [columns]
        age = numeric
        location = categorical: ica, mca, acomm
    """
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SchemaError(f"malformed schema file: {exc}") from None
    if not cp.has_section("columns"):
        raise SchemaError("schema file needs a [columns] section")
    label = cp.get("label", "name", fallback=DEFAULT_LABEL)
    cols = []
    for name, value in cp.items("columns"):
        kind, _, levels = value.partition(":")
        kind = kind.strip()
        lv = tuple(s.strip() for s in levels.split(",") if s.strip()) or None
        cols.append(ColumnSpec(name, kind, lv))
    return Schema(cols, label)


def read_schema(path):
    with open(path, encoding="utf-8") as fh:
        return parse_schema(fh.read())
