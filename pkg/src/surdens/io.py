"""Curve CSV ingestion and the flat export formats.

Curve files: optional leading comment ``# grid: v1,...,vm`` (equispaced
[0,1] assumed otherwise) and optional ``# label`` comment declaring that
every data row carries a trailing integer group label. Floats are written
with repr, so a write/read round trip reproduces values bit-exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .funcdata import AbscissaGrid, FunctionalSample


def _fmt(x: float) -> str:
    return repr(float(x))


def read_curves(path):
    """Parse a curve CSV into (FunctionalSample, labels or None)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    grid_points = None
    has_labels = False
    rows = []
    labels = []
    expected = None
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("grid:"):
                    try:
                        grid_points = np.array(
                            [float(v) for v in body[len("grid:"):].split(",")]
                        )
                    except ValueError as exc:
                        raise DataError(f"line {lineno}: bad grid header ({exc})")
                elif body == "label" or body == "labels":
                    has_labels = True
                continue
            fields = line.split(",")
            want = None if expected is None else expected + int(has_labels)
            if want is not None and len(fields) != want:
                raise DataError(
                    f"row {lineno} has {len(fields) - int(has_labels)} values, "
                    f"expected {expected}"
                )
            if has_labels:
                lab_field = fields[-1]
                fields = fields[:-1]
                try:
                    labels.append(int(lab_field))
                except ValueError:
                    raise DataError(
                        f"line {lineno}, column {len(fields) + 1}: "
                        f"label {lab_field!r} is not an integer"
                    )
            vals = np.empty(len(fields))
            for col, f in enumerate(fields, start=1):
                try:
                    vals[col - 1] = float(f)
                except ValueError:
                    raise DataError(
                        f"line {lineno}, column {col}: {f!r} is not a number"
                    )
                if not np.isfinite(vals[col - 1]):
                    raise DataError(
                        f"line {lineno}, column {col}: non-finite value {f!r}"
                    )
            if expected is None:
                expected = vals.size
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no curves found")
    values = np.vstack(rows)
    if grid_points is None:
        grid = AbscissaGrid.equispaced(values.shape[1])
    else:
        if grid_points.size != values.shape[1]:
            raise DataError(
                f"grid header has {grid_points.size} points but rows have "
                f"{values.shape[1]} values"
            )
        grid = AbscissaGrid(grid_points)
    sample = FunctionalSample(grid, values)
    return sample, (np.array(labels, dtype=int) if has_labels else None)


def write_curves(path, sample: FunctionalSample, labels=None) -> None:
    with open(path, "w") as fh:
        fh.write("# grid: " + ",".join(_fmt(p) for p in sample.grid.points) + "\n")
        if labels is not None:
            fh.write("# label\n")
        for i in range(sample.n):
            row = ",".join(_fmt(v) for v in sample.values[i])
            if labels is not None:
                row += f",{int(labels[i])}"
            fh.write(row + "\n")


def write_labels_csv(path, labels, prototype_flags) -> None:
    with open(path, "w") as fh:
        fh.write("index,label,prototype\n")
        for i, (lab, proto) in enumerate(zip(labels, prototype_flags)):
            fh.write(f"{i},{int(lab)},{int(proto)}\n")


def write_matrix_csv(path, matrix, header=None) -> None:
    with open(path, "w") as fh:
        if header:
            fh.write(header + "\n")
        for row in np.atleast_2d(matrix):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_density_csv(path, density) -> None:
    """One row per cell: i1..id, center coordinates, value."""
    grid = density.grid
    idx = np.indices(tuple(grid.counts)).reshape(grid.d, -1).T
    centers = grid.cell_centers()
    vals = density.values.reshape(-1)
    with open(path, "w") as fh:
        head = [f"i{j + 1}" for j in range(grid.d)]
        head += [f"center{j + 1}" for j in range(grid.d)]
        fh.write(",".join(head + ["value"]) + "\n")
        for cell, ctr, v in zip(idx, centers, vals):
            fields = [str(int(i)) for i in cell] + [_fmt(c) for c in ctr] + [_fmt(v)]
            fh.write(",".join(fields) + "\n")


def write_regions_csv(path, regions) -> None:
    """One row per region cell: region_id, i1..id."""
    d = regions.cell_label.ndim
    with open(path, "w") as fh:
        fh.write(",".join(["region_id"] + [f"i{j + 1}" for j in range(d)]) + "\n")
        for g, mask in enumerate(regions.masks, start=1):
            for cell in np.argwhere(mask):
                fh.write(",".join([str(g)] + [str(int(i)) for i in cell]) + "\n")


def write_json(path, payload: dict) -> None:
    """Deterministic JSON: sorted keys, fixed separators, repr floats."""
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
