"""JSON encoding of measures, moment sequences and complex matrices.

Complex entries are ``[re, im]`` pairs; floats are written with ``repr``
precision so values round-trip exactly.
"""

import json

import numpy as np

from .moments import DiscreteMatrixMeasure, Interval, MomentSequence

__all__ = [
    "InputError",
    "matrix_to_json",
    "matrix_from_json",
    "measure_to_dict",
    "measure_from_dict",
    "moments_to_dict",
    "moments_from_dict",
    "load_json",
    "load_moments",
    "dump",
]


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def matrix_to_json(M):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return [[[float(x.real), float(x.imag)] for x in row] for row in M]


def matrix_from_json(obj, q=None):
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InputError(f"expected a rows x cols x 2 nesting, got shape {arr.shape}")
    if q is not None and arr.shape[:2] != (q, q):
        raise InputError(f"expected a {q}x{q} matrix, got {arr.shape[0]}x{arr.shape[1]}")
    return arr[..., 0] + 1j * arr[..., 1]


def _interval(d):
    try:
        return Interval(float(d["a"]), float(d["b"]))
    except KeyError as exc:
        raise InputError(f"missing field {exc}") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def measure_to_dict(mu):
    return {
        "q": int(mu.W.shape[1]),
        "a": float(mu.interval.a),
        "b": float(mu.interval.b),
        "atoms": [{"t": float(t), "weight": matrix_to_json(w)} for t, w in zip(mu.t, mu.W)],
    }


def measure_from_dict(d):
    try:
        q = int(d["q"])
        atoms = d["atoms"]
        t = [float(at["t"]) for at in atoms]
        W = np.array([matrix_from_json(at["weight"], q) for at in atoms]).reshape(len(atoms), q, q)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed measure: {exc}") from exc
    try:
        return DiscreteMatrixMeasure(_interval(d), t, W)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def moments_to_dict(seq):
    return {
        "q": int(seq.q),
        "a": float(seq.a),
        "b": float(seq.b),
        "m": int(seq.m),
        "moments": [matrix_to_json(s) for s in seq.s],
    }


def moments_from_dict(d):
    try:
        q, m = int(d["q"]), int(d["m"])
        raw = d["moments"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed moment file: {exc}") from exc
    if not isinstance(raw, list) or len(raw) != m + 1:
        raise InputError(f"expected m+1 = {m + 1} moment matrices")
    s = np.array([matrix_from_json(x, q) for x in raw])
    try:
        return MomentSequence(_interval(d), s)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_moments(path):
    data = load_json(path)
    if not isinstance(data, dict):
        raise InputError("moment file must hold a JSON object")
    return moments_from_dict(data)


def _clean(obj):
    """Replace non-finite floats, which strict JSON cannot carry, by strings."""
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dump(obj, fh=None, path=None):
    """Write ``obj`` as indented JSON to ``path`` or ``fh`` and return the text."""
    text = json.dumps(_clean(obj), indent=1, allow_nan=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as out:
            out.write(text)
    elif fh is not None:
        fh.write(text)
    return text
