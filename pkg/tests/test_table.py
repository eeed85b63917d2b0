import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdrisk.dataset import DEFAULT_COLUMNS, from_arrays, parse_schema, read_csv, summarize, default_schema, write_csv
from fdrisk.exceptions import ParseError, SchemaError


def _csv(text, **kw):
    return read_csv(io.StringIO(text), **kw)


def test_three_rows_two_features_and_label():
    t = _csv("age,fd,ruptured\n50,2.1,0\n61,2.3,1\n44,2.2,0\n")
    assert t.names == ["age", "fd"]
    assert t.n_rows == 3
    assert t.label.tolist() == [0, 1, 0]
    assert t.unknown_columns == ()


def test_bad_numeric_cell_names_row_and_column():
    with pytest.raises(ParseError) as info:
        _csv("age,fd,ruptured\n50,2.1,0\n61,abc,1\n44,2.2,0\n")
    assert info.value.row == 2
    assert info.value.column == "fd"
    assert "row 2" in str(info.value) and "'fd'" in str(info.value)


def test_duplicate_header_is_schema_error():
    with pytest.raises(SchemaError):
        _csv("fd,fd,ruptured\n1,2,0\n")


def test_binary_spellings_and_missing():
    t = _csv("HTN,fd,ruptured\ntrue,,1\nFALSE,2.0,0\n1,2.5,1\n")
    assert t.data["HTN"].tolist() == [1.0, 0.0, 1.0]
    assert t.missing_mask("fd").tolist() == [True, False, False]


def test_configurable_label_name():
    t = _csv("fd,status\n2.0,1\n2.1,0\n", label="status")
    assert t.label.tolist() == [1, 0]
    assert t.names == ["fd"]


def test_all_table2_columns_validate():
    names = [c.name for c in DEFAULT_COLUMNS]
    rng = np.random.default_rng(0)
    rows = []
    for i in range(4):
        cells = []
        for c in DEFAULT_COLUMNS:
            if c.kind == "numeric":
                cells.append(repr(float(rng.random())))
            elif c.kind == "binary":
                cells.append(str(i % 2))
            else:
                cells.append(c.levels[i % len(c.levels)] if c.levels else "saccular")
        rows.append(",".join(f'"{x}"' if "," in x else x for x in cells) + f",{i % 2}")
    header = ",".join(f'"{n}"' if "," in n else n for n in names) + ",ruptured"
    t = _csv(header + "\n" + "\n".join(rows) + "\n")
    assert len(t.names) == len(DEFAULT_COLUMNS) == 53
    assert t.unknown_columns == ()


def test_unknown_columns_are_flagged_and_typed():
    t = _csv("fd,extra_num,extra_cat,ruptured\n2,1.5,a,0\n2.1,2.5,b,1\n")
    assert t.unknown_columns == ("extra_num", "extra_cat")
    assert t.column("extra_num").kind == "numeric"
    assert t.column("extra_cat").kind == "categorical"


def test_rfc4180_quoting_round_trip():
    t = from_arrays({"Max 3D diameter (Feret diameter)": [1.0, 2.0], "note": np.array(['a,"b"', "c"], dtype=object)},
                    [0, 1], kinds={"note": "categorical"})
    buf = io.StringIO()
    write_csv(t, buf)
    back = _csv(buf.getvalue())
    assert back.data["note"].tolist() == ['a,"b"', "c"]


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.tuples(finite, finite, st.booleans(), st.integers(0, 1)), min_size=1, max_size=20))
def test_csv_round_trip_is_bit_exact(rows):
    cols = {"fd": [r[0] for r in rows], "age": [r[1] for r in rows], "HTN": [float(r[2]) for r in rows]}
    t = from_arrays(cols, [r[3] for r in rows])
    buf = io.StringIO()
    write_csv(t, buf)
    back = _csv(buf.getvalue())
    for name in cols:
        assert np.array_equal(back.data[name], t.data[name])
        assert [math.copysign(1, v) for v in back.data[name]] == [math.copysign(1, v) for v in t.data[name]]
    assert np.array_equal(back.label, t.label)


def test_summary_statistics():
    t = from_arrays({"fd": [1.0, 2.0, 3.0]}, [0, 1, 0])
    s = summarize(t)["columns"]["fd"]
    assert s["mean"] == 2.0 and s["median"] == 2.0 and s["sd"] == 1.0
    assert s["min"] == 1.0 and s["max"] == 3.0 and s["missing"] == 0


def test_summary_label_percentages():
    t = from_arrays({"fd": np.arange(178.0)}, [0] * 112 + [1] * 66)
    lab = summarize(t)["label"]
    assert round(lab["percent_0"]) == 63
    assert round(lab["percent_1"]) == 37


def test_summary_levels_descending():
    loc = ["ica"] * 42 + ["acomm"] * 41 + ["mca"] * 32
    t = from_arrays({"location": np.array(loc, dtype=object)}, None)
    levels = summarize(t)["columns"]["location"]["levels"]
    assert list(levels.items())[:3] == [("ica", 42), ("acomm", 41), ("mca", 32)]


def test_schema_text_round_trip():
    s = default_schema()
    back = parse_schema(s.to_text())
    assert back.names() == s.names()
    assert back["location"].levels == s["location"].levels
    assert back.label == "ruptured"


def test_schema_file_format():
    s = parse_schema("[label]\nname = status\n\n[columns]\nfd = numeric\nsite = categorical: ica, mca\n")
    assert s.label == "status"
    assert s["site"].levels == ("ica", "mca")
    with pytest.raises(SchemaError):
        parse_schema("[columns]\nfd = strange\n")


def test_duplicate_column_in_table():
    from fdrisk.dataset import ColumnSpec, FeatureTable

    with pytest.raises(SchemaError):
        FeatureTable((ColumnSpec("a", "numeric"), ColumnSpec("a", "numeric")), {"a": np.zeros(2)})
