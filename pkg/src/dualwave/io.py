"""Deterministic CSV/JSON writers (17 significant digits, ``\\n`` endings)."""

from __future__ import annotations

import enum
import json
import math
from pathlib import Path

import numpy as np

FIELD_COLUMNS = ("x", "y", "r", "theta", "re_psi", "im_psi", "u", "v", "g_abs2", "mask")
RAY_COLUMNS = ("s", "x", "y", "dx", "dy", "n_idx")
DEFLECTION_COLUMNS = ("b", "deflection_rad", "termination")


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    v = float(value)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8", newline="\n")


def field_rows(sample):
    cols = (sample.x, sample.y, sample.r, sample.theta, sample.psi.real, sample.psi.imag,
            sample.u, sample.v, sample.g_abs2, sample.mask)
    return zip(*(c.ravel() for c in cols))


def write_field_csv(sample, path) -> None:
    write_csv(path, FIELD_COLUMNS, field_rows(sample))


def field_metadata(sample) -> dict:
    pair = sample.w.pair
    return {
        "which": sample.w.which.value,
        "hbar": sample.w.hbar,
        "grid": sample.grid.describe(),
        "spec": pair.spec.to_dict() if pair.spec is not None else None,
        "form": pair.form.value,
        "coefficient": pair.coefficient,
        "exponent": pair.exponent,
        "branch_window": [pair.window.theta0, pair.window.period],
        "r_exclude": sample.r_exclude,
        "nodes": sample.grid.size,
        "masked": int(np.count_nonzero(sample.mask)),
        "columns": list(FIELD_COLUMNS),
        **sample.meta,
    }


def write_ray_csv(path, path_obj) -> None:
    p = path_obj
    write_csv(path, RAY_COLUMNS, zip(p.s, p.x, p.y, p.dx, p.dy, p.n_idx))


def write_deflection_csv(path, rows) -> None:
    write_csv(path, DEFLECTION_COLUMNS,
              ((r.b, float("nan") if r.deflection is None else r.deflection, r.termination)
               for r in rows))


def read_csv(path) -> list:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    header = text[0].split(",")
    return [dict(zip(header, line.split(","))) for line in text[1:] if line]
