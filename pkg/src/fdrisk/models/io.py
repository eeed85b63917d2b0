"""Versioned model files.

Layout::

    FDRISK-MODEL\\n
    {"format_version": 1, "kind": ..., "schema_hash": ..., "payload_bytes": n,
     "payload_sha256": ...}\\n
    <n bytes of JSON payload>

The payload holds the estimator's constructor parameters, bound feature
names and learned state. Floats are written with ``repr`` so a round trip
reproduces predictions bit for bit.
"""
import hashlib
import json
from pathlib import Path

import numpy as np

from ..exceptions import CorruptionError, UnsupportedVersionError
from .spec import ESTIMATORS

MAGIC = b"FDRISK-MODEL\n"
FORMAT_VERSION = 1


def _jsonable(value):
    if isinstance(value, tuple):
        return {"__tuple__": [_jsonable(v) for v in value]}
    if isinstance(value, dict):
        return {"__dict__": [[_jsonable(k), _jsonable(v)] for k, v in value.items()]}
    if isinstance(value, np.generic):
        return value.item()
    return value


def _restore(value):
    if isinstance(value, dict):
        if "__tuple__" in value:
            return tuple(_restore(v) for v in value["__tuple__"])
        if "__dict__" in value:
            return {_restore(k): _restore(v) for k, v in value["__dict__"]}
    if isinstance(value, list):
        return [_restore(v) for v in value]
    return value


def dumps(model):
    payload = {
        "kind": model.kind,
        "params": {k: _jsonable(v) for k, v in sorted(model.get_params().items())},
        "n_features_in": int(model.n_features_in_),
        "feature_names": [str(n) for n in model.feature_names_in_] if hasattr(model, "feature_names_in_") else None,
        "convergence_warning": model.convergence_warning_,
        "training_log": model.training_log_,
        "state": model._get_state(),
    }
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=True).encode()
    header = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "schema_hash": model.schema_hash_,
        "payload_bytes": len(body),
        "payload_sha256": hashlib.sha256(body).hexdigest(),
    }
    return MAGIC + json.dumps(header, sort_keys=True).encode() + b"\n" + body


def loads(data):
    if not data.startswith(MAGIC):
        raise CorruptionError("not a model file (bad magic)")
    rest = data[len(MAGIC):]
    nl = rest.find(b"\n")
    if nl < 0:
        raise CorruptionError("model file truncated inside header")
    try:
        header = json.loads(rest[:nl])
    except ValueError:
        raise CorruptionError("model header is not valid JSON") from None
    version = header.get("format_version")
    if not isinstance(version, int) or version > FORMAT_VERSION or version < 1:
        raise UnsupportedVersionError(
            f"model format version {version!r} not supported (this build reads <= {FORMAT_VERSION})")
    body = rest[nl + 1:]
    if len(body) != header.get("payload_bytes"):
        raise CorruptionError(f"payload is {len(body)} bytes, header declares {header.get('payload_bytes')}")
    if hashlib.sha256(body).hexdigest() != header.get("payload_sha256"):
        raise CorruptionError("payload checksum mismatch")
    payload = json.loads(body)
    kind = payload["kind"]
    if kind not in ESTIMATORS or kind != header.get("kind"):
        raise CorruptionError(f"unknown or inconsistent model kind {kind!r}")
    model = ESTIMATORS[kind](**{k: _restore(v) for k, v in payload["params"].items()})
    model.n_features_in_ = payload["n_features_in"]
    if payload["feature_names"] is not None:
        model.feature_names_in_ = np.asarray(payload["feature_names"], dtype=object)
    model.classes_ = np.array([0, 1])
    model.convergence_warning_ = payload["convergence_warning"]
    model.training_log_ = payload["training_log"]
    model.schema_hash_ = header["schema_hash"]
    model._set_state(payload["state"])
    return model


def save_model(model, path):
    Path(path).write_bytes(dumps(model))


def load_model(path):
    return loads(Path(path).read_bytes())
