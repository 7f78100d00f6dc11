"""JSON documents for states, ensembles, and channels.

Matrices and vectors are stored as flat row-major lists with interleaved
real and imaginary parts: [re00, im00, re01, im01, ...].  Documents carry a
"kind" tag; ``from_doc`` dispatches on it.  Serialization is deterministic
(sorted keys, fixed float repr), so identical objects give identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import ValidationError
from .qstate import DensityOperator, Ensemble, PureState
from .channel import KrausChannel, MeasurePrepareChannel


def _entries(a: np.ndarray) -> list[float]:
    flat = np.asarray(a, dtype=complex).ravel()
    out = np.empty(2 * flat.size, dtype=float)
    out[0::2] = flat.real
    out[1::2] = flat.imag
    return [float(x) for x in out]


def _from_entries(entries, shape) -> np.ndarray:
    flat = np.asarray(entries, dtype=float)
    if flat.ndim != 1 or flat.size != 2 * int(np.prod(shape)):
        raise ValidationError(f"entry list of length {flat.size} does not match shape {shape}")
    return (flat[0::2] + 1j * flat[1::2]).reshape(shape)


def _finite(x: float):
    if np.isfinite(x):
        return float(x)
    return "inf" if x > 0 else "-inf"


def to_doc(obj) -> dict:
    """JSON-able document for a state, ensemble, or channel."""
    if isinstance(obj, DensityOperator):
        return {"kind": "density", "dims": list(obj.dims), "entries": _entries(obj.matrix)}
    if isinstance(obj, PureState):
        return {"kind": "pure", "dims": list(obj.dims), "entries": _entries(obj.vector)}
    if isinstance(obj, Ensemble):
        return {
            "kind": "ensemble",
            "probs": [float(p) for p in obj.probs],
            "states": [to_doc(s) for s in obj.states],
        }
    if isinstance(obj, KrausChannel):
        return {
            "kind": "kraus_channel",
            "d_in": obj.d_in,
            "d_out": obj.d_out,
            "kraus": [_entries(k) for k in obj.kraus],
        }
    if isinstance(obj, MeasurePrepareChannel):
        return {
            "kind": "measure_prepare_channel",
            "d_in": obj.d_in,
            "d_out": obj.d_out,
            "povm": [_entries(m) for m in obj.povm],
            "outputs": [to_doc(s) for s in obj.outputs],
        }
    raise ValidationError(f"cannot serialize {type(obj).__name__}")


def from_doc(doc: dict):
    """Rebuild the object a document describes; validates on construction."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError("document has no 'kind' tag")
    kind = doc["kind"]
    try:
        if kind == "density":
            dims = tuple(int(d) for d in doc["dims"])
            n = int(np.prod(dims))
            return DensityOperator(_from_entries(doc["entries"], (n, n)), dims)
        if kind == "pure":
            dims = tuple(int(d) for d in doc["dims"])
            n = int(np.prod(dims))
            return PureState(_from_entries(doc["entries"], (n,)), dims)
        if kind == "ensemble":
            states = tuple(from_doc(s) for s in doc["states"])
            return Ensemble(np.asarray(doc["probs"], dtype=float), states)
        if kind == "kraus_channel":
            shape = (int(doc["d_out"]), int(doc["d_in"]))
            return KrausChannel(tuple(_from_entries(k, shape) for k in doc["kraus"]))
        if kind == "measure_prepare_channel":
            d_in = int(doc["d_in"])
            povm = tuple(_from_entries(m, (d_in, d_in)) for m in doc["povm"])
            outputs = tuple(from_doc(s) for s in doc["outputs"])
            return MeasurePrepareChannel(povm, outputs)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed {kind!r} document: {exc}") from exc
    raise ValidationError(f"unknown document kind {kind!r}")


def dumps(doc) -> str:
    """Deterministic JSON text (sorted keys, trailing newline)."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def save_json(path, doc) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(doc))
    return p


def load_json(path):
    return json.loads(Path(path).read_text())
