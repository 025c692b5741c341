"""JSON and CSV formats for profiles, matrices, families and reports.

Profiles::

    {"eigenvalues": [{"re": 1.0, "im": 0.0, "mult": 2}, ...],
     "kernel_dim": 3 | "inf",
     "essential_points": [{"re": 0.0, "im": 0.0}],
     "tail_bound": 0.0}

Dense matrices are ``{"dim": n, "re": [[...]], "im": [[...]]}`` in JSON and
rows of interleaved ``re,im`` columns in CSV. Report numbers are written
with 12 significant digits so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import is_dataclass
from pathlib import Path

import numpy as np

from .spectral_core import INFINITE, ProjectionFamily, SpectralProfile

FLOAT_FORMAT = "{:#.12g}"


# -- profiles ---------------------------------------------------------------


def _complex_from(d) -> complex:
    if isinstance(d, dict):
        return complex(float(d.get("re", 0.0)), float(d.get("im", 0.0)))
    return complex(d)


def profile_from_dict(d: dict) -> SpectralProfile:
    eigs = tuple((_complex_from(e), int(e.get("mult", 1))) for e in d.get("eigenvalues", []))
    kd = d.get("kernel_dim", 0)
    kd = INFINITE if isinstance(kd, str) and kd.lower() in ("inf", "infinite") else int(kd)
    ess = tuple(_complex_from(z) for z in d.get("essential_points", []))
    return SpectralProfile(
        eigs, kd, ess, float(d.get("tail_bound", 0.0)), bool(d.get("compact", False))
    )


def profile_to_dict(p: SpectralProfile) -> dict:
    return {
        "eigenvalues": [{"re": v.real, "im": v.imag, "mult": m} for v, m in p.eigenvalues],
        "kernel_dim": "inf" if p.kernel_dim == INFINITE else p.kernel_dim,
        "essential_points": [{"re": z.real, "im": z.imag} for z in p.essential_points],
        "tail_bound": p.tail_bound,
    }


# -- matrices ---------------------------------------------------------------


def matrix_from_dict(d: dict) -> np.ndarray:
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2:
        raise ValueError("re and im must be matching 2-d arrays")
    if "dim" in d and re.shape != (int(d["dim"]), int(d["dim"])):
        raise ValueError(f"declared dim {d['dim']} does not match {re.shape}")
    return re + 1j * im


def matrix_to_dict(x) -> dict:
    x = np.asarray(x, dtype=np.complex128)
    return {"dim": int(x.shape[0]), "re": x.real.tolist(), "im": x.imag.tolist()}


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(c.strip() for c in r)]
    vals = np.array([[float(c) for c in r] for r in rows], dtype=float)
    if vals.ndim != 2 or vals.shape[1] % 2:
        raise ValueError("CSV matrix needs an even number of columns (re,im pairs)")
    return vals[:, 0::2] + 1j * vals[:, 1::2]


def matrix_to_csv(x) -> str:
    x = np.asarray(x, dtype=np.complex128)
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for row in x:
        writer.writerow([_fmt(v) for z in row for v in (z.real, z.imag)])
    return out.getvalue()


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return matrix_from_csv(text)
    return matrix_from_dict(json.loads(text))


def read_profile(path) -> SpectralProfile:
    return profile_from_dict(json.loads(Path(path).read_text()))


def read_family(path) -> ProjectionFamily:
    """``{"labels": [...]}`` or ``{"dim": n, "blocks": [[...], ...]}``."""
    d = json.loads(Path(path).read_text())
    if "labels" in d:
        return ProjectionFamily.from_labels(d["labels"])
    return ProjectionFamily(int(d["dim"]), tuple(tuple(b) for b in d["blocks"]))


# -- reports ----------------------------------------------------------------


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return FLOAT_FORMAT.format(v)


def to_plain(obj):
    """Convert report objects into JSON-ready values (floats kept as floats)."""
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if is_dataclass(obj):
        return to_plain(obj.__dict__)
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return matrix_to_dict(obj) if obj.ndim == 2 else [to_plain(complex(z)) for z in obj]
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        text = _fmt(obj)
        return text if math.isfinite(obj) else json.dumps(text)
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float printed to 12 significant digits."""
    return _emit(to_plain(obj), indent, 0) + "\n"


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = list(rows[0])
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        cells = []
        for f in fields:
            v = to_plain(row.get(f))
            if isinstance(v, float):
                cells.append(_fmt(v))
            elif v is None:
                cells.append("")
            elif isinstance(v, dict) and set(v) == {"re", "im"}:
                cells.append(f"{_fmt(v['re'])}{'+' if v['im'] >= 0 else '-'}{_fmt(abs(v['im']))}j")
            else:
                cells.append(str(v))
        writer.writerow(cells)
    return out.getvalue()
