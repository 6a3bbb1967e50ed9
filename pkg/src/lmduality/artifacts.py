"""CSV / JSON writers shared by the runner and the tests.

Floats are written with 17 significant digits so that files round-trip
exactly.
"""
from __future__ import annotations

import csv
import json
import math
from typing import IO, Iterable, Optional

import numpy as np

from .classical import Trajectory


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(traj: Trajectory, fh: IO[str], stride: int = 1) -> None:
    """Header ``t,x1,x2`` plus ``v1,v2`` when the model carries velocities."""
    w = csv.writer(fh, lineterminator="\n")
    has_v = traj.v is not None
    w.writerow(["t", "x1", "x2"] + (["v1", "v2"] if has_v else []))
    for i in range(0, len(traj), stride):
        row = [traj.t[i], traj.x[i, 0], traj.x[i, 1]]
        if has_v:
            row += [traj.v[i, 0], traj.v[i, 1]]
        w.writerow([fmt(v) for v in row])


def write_decomposed_csv(t: np.ndarray, x_plus: np.ndarray, x_minus: np.ndarray, fh: IO[str], stride: int = 1) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "xp1", "xp2", "xm1", "xm2"])
    for i in range(0, len(t), stride):
        w.writerow([fmt(v) for v in (t[i], *x_plus[i], *x_minus[i])])


def write_spectrum_csv(eigenvalues: Iterable[float], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "eigenvalue"])
    for i, e in enumerate(eigenvalues):
        w.writerow([i, fmt(e)])


def write_table_csv(header: list[str], rows: Iterable[Iterable], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats for ``json.dump``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def write_json(obj, fh: IO[str]) -> None:
    json.dump(jsonable(obj), fh, indent=2, sort_keys=True)
    fh.write("\n")
