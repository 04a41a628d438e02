"""File formats.

* curve: CSV ``x,y`` plus a sidecar ``<stem>.json`` record ``{"closed": ..., "n": N}``
* tangent field: CSV ``hx,hy``
* curve path: JSON ``{"n": N, "k": K, "closed": bool, "slices": [[[x, y], ...], ...]}``
* optimizer trace: CSV ``iter,energy,gradnorm,step``

Floats are written with 17 significant digits so reading back is bit-exact.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .curves import SampledCurve
from .elastic import TangentField
from .errors import ValidationError
from .paths import CurvePath


def fmt(v):
    return format(float(v), ".17g")


def _read_table(path, header):
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    rows = [r for r in rows if r and not r[0].lstrip().startswith("#")]
    if not rows or [c.strip() for c in rows[0]] != list(header):
        raise ValidationError(f"{path}: expected CSV header {','.join(header)}")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"{path}: malformed number ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValidationError(f"{path}: every row needs {len(header)} columns")
    return data


def _write_table(path, header, data):
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def read_curve(path, closed=None):
    """Read a curve CSV; closedness comes from ``closed`` or the sidecar record."""
    pts = _read_table(path, ("x", "y"))
    side = sidecar_path(path)
    if closed is None:
        if not side.exists():
            raise ValidationError(
                f"{path}: closedness unknown (no sidecar {side.name}; pass --closed or --open)"
            )
        try:
            meta = json.loads(side.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{side}: malformed JSON ({exc.msg})") from exc
        if not isinstance(meta.get("closed"), bool):
            raise ValidationError(f"{side}: missing boolean field 'closed'")
        if "n" in meta and meta["n"] != pts.shape[0]:
            raise ValidationError(f"{side}: n={meta['n']} but the CSV has {pts.shape[0]} rows")
        closed = meta["closed"]
    return SampledCurve(pts, closed)


def write_curve(path, curve, sidecar=True):
    _write_table(path, ("x", "y"), curve.points)
    if sidecar:
        sidecar_path(path).write_text(json.dumps({"closed": curve.closed, "n": curve.n}) + "\n")


def read_field(path, curve):
    return TangentField(curve, _read_table(path, ("hx", "hy")))


def write_field(path, field):
    _write_table(path, ("hx", "hy"), field.vectors)


def path_to_record(path):
    return {
        "n": path.n,
        "k": path.K,
        "closed": path.closed,
        "slices": path.slices.tolist(),
    }


def path_from_record(rec):
    for key in ("n", "k", "closed", "slices"):
        if key not in rec:
            raise ValidationError(f"path record is missing {key!r}")
    slices = np.asarray(rec["slices"], dtype=float)
    if slices.shape != (rec["k"] + 1, rec["n"], 2):
        raise ValidationError(
            f"path record declares k={rec['k']}, n={rec['n']} but slices have shape {slices.shape}"
        )
    return CurvePath(slices, bool(rec["closed"]))


def read_path(path):
    try:
        rec = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc.msg})") from exc
    return path_from_record(rec)


def write_path(path, curve_path):
    Path(path).write_text(json.dumps(path_to_record(curve_path)) + "\n")


def write_trace(path, trace):
    _write_table(path, ("iter", "energy", "gradnorm", "step"), trace.rows())
