"""File formats: CSV with full double precision, JSON manifests, atomic writes."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InvalidArgument

SPECTRUM_COLUMNS = ["lambda1", "lambda2", "lambda3", "lambda4"]


def _fmt(v) -> str:
    if isinstance(v, (str, bytes)):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return "nan"
    return "%.17g" % f


def atomic_write_text(path, text: str) -> Path:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def write_json(path, data) -> Path:
    return atomic_write_text(path, json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_manifest(data_path, manifest: dict) -> Path:
    """JSON sidecar ``<file>.json`` next to a data file."""
    return write_json(manifest_path(data_path), manifest)


def read_manifest(data_path) -> dict:
    p = manifest_path(data_path)
    if not p.exists():
        return {}
    with open(p) as fh:
        return json.load(fh)


def read_csv_columns(path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise InvalidArgument(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration as exc:
            raise InvalidArgument(f"{path} is empty") from exc
        rows = [r for r in reader if r]
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def read_spectra(path, converged_only: bool = True) -> np.ndarray:
    """``(N, 4)`` spectra from a sample CSV; discarded dynamic rows are dropped."""
    cols = read_csv_columns(path)
    missing = [c for c in SPECTRUM_COLUMNS if c not in cols]
    if missing:
        raise InvalidArgument(f"{path} lacks columns {missing}")
    spectra = np.stack([cols[c] for c in SPECTRUM_COLUMNS], axis=1)
    if converged_only and "converged" in cols:
        spectra = spectra[cols["converged"] == 1]
    return spectra[np.all(np.isfinite(spectra), axis=1)]
