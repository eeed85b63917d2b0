"""STL reading and writing (binary little-endian and ASCII)."""
import re
import struct
from pathlib import Path

import numpy as np

from ..exceptions import FormatError, InvalidInputError
from .mesh import NeckPlane, clean_mesh

_HEADER = 80
_RECORD = np.dtype(
    [("normal", "<f4", 3), ("v", "<f4", (3, 3)), ("attr", "<u2")]
)

_FLOAT = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_VERTEX_RE = re.compile(rb"vertex\s+(" + _FLOAT.encode() + rb")\s+(" + _FLOAT.encode()
                        + rb")\s+(" + _FLOAT.encode() + rb")")


def detect_format(data):
    if len(data) >= _HEADER + 4:
        (count,) = struct.unpack_from("<I", data, _HEADER)
        if len(data) == _HEADER + 4 + 50 * count:
            return "binary"
    if data.lstrip()[:5].lower() == b"solid":
        return "ascii"
    return "binary"


def parse_binary(data):
    if len(data) < _HEADER + 4:
        raise FormatError(
            f"truncated binary STL: header needs {_HEADER + 4} bytes, file has {len(data)}",
            offset=len(data),
        )
    (count,) = struct.unpack_from("<I", data, _HEADER)
    expected = _HEADER + 4 + 50 * count
    if len(data) < expected:
        complete = (len(data) - _HEADER - 4) // 50
        offset = _HEADER + 4 + 50 * complete
        raise FormatError(
            f"truncated binary STL: header declares {count} triangles, "
            f"only {complete} complete records present",
            offset=offset,
        )
    records = np.frombuffer(data, dtype=_RECORD, count=count, offset=_HEADER + 4)
    return records["v"].astype(float).reshape(-1, 3)


def parse_ascii(data):
    stripped = data.lstrip()
    if stripped[:5].lower() != b"solid":
        raise FormatError("ASCII STL must start with 'solid'", offset=len(data) - len(stripped))
    coords = []
    pos = 0
    for m in re.finditer(rb"\bvertex\b", data):
        vm = _VERTEX_RE.match(data, m.start())
        if vm is None:
            raise FormatError("malformed vertex line in ASCII STL", offset=m.start())
        coords.append([float(g) for g in vm.groups()])
        pos = vm.end()
    if len(coords) % 3:
        raise FormatError("vertex count is not a multiple of three", offset=pos)
    if b"endsolid" not in data[pos:]:
        raise FormatError("missing 'endsolid' in ASCII STL", offset=len(data))
    return np.array(coords, dtype=float).reshape(-1, 3)


def load_mesh(path, format=None, neck_plane=None):
    """Read an STL file into a cleaned :class:`TriangleMesh`.

    Parameters
    ----------
    path : path-like
    format : {"binary", "ascii", None}
        ``None`` sniffs the file.
    neck_plane : NeckPlane, optional
    """
    data = Path(path).read_bytes()
    fmt = format or detect_format(data)
    if fmt in ("binary", "binary-stl"):
        corners = parse_binary(data)
    elif fmt in ("ascii", "ascii-stl"):
        corners = parse_ascii(data)
    else:
        raise InvalidInputError(f"unknown STL format {format!r}")
    if len(corners) == 0:
        raise InvalidInputError(f"{path}: mesh is empty")
    triangles = np.arange(len(corners)).reshape(-1, 3)
    return clean_mesh(corners, triangles, neck_plane)


def _normals(corners):
    n = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    length = np.linalg.norm(n, axis=1, keepdims=True)
    return np.divide(n, length, out=np.zeros_like(n), where=length > 0)


def write_stl(mesh, path, format="binary"):
    corners = mesh.vertices[mesh.triangles]
    normals = _normals(corners)
    if format == "binary":
        records = np.zeros(len(corners), dtype=_RECORD)
        records["normal"] = normals
        records["v"] = corners
        header = b"fdrisk binary STL".ljust(_HEADER, b" ")
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(struct.pack("<I", len(corners)))
            fh.write(records.tobytes())
    elif format == "ascii":
        lines = ["solid fdrisk"]
        for n, tri in zip(normals, corners):
            lines.append("  facet normal " + " ".join(repr(float(x)) for x in n))
            lines.append("    outer loop")
            for v in tri:
                lines.append("      vertex " + " ".join(repr(float(x)) for x in v))
            lines.append("    endloop")
            lines.append("  endfacet")
        lines.append("endsolid fdrisk")
        Path(path).write_text("\n".join(lines) + "\n")
    else:
        raise InvalidInputError(f"unknown STL format {format!r}")


def read_neck_annotation(path):
    """Read six whitespace/comma separated reals (point then normal).

    Lines starting with ``#`` are ignored.
    """
    text = Path(path).read_text()
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(t for t in re.split(r"[\s,]+", line) if t)
    try:
        return NeckPlane.from_values(tokens)
    except ValueError as exc:
        raise FormatError(f"{path}: bad neck plane annotation: {exc}") from None


def write_neck_annotation(neck_plane, path):
    vals = list(neck_plane.point) + list(neck_plane.normal)
    Path(path).write_text("# point_x point_y point_z normal_x normal_y normal_z\n"
                          + " ".join(repr(float(v)) for v in vals) + "\n")
