"""Delimited output. Floats are serialized with repr so runs are
byte-reproducible and round-trip exactly."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .wigner import ChronocyclicMap


def format_float(value: float) -> str:
    return repr(float(value))


def write_trace_csv(
    path: Path,
    columns: Sequence[str],
    arrays: Sequence[np.ndarray],
) -> None:
    """Column-aligned trace table with a header row."""
    if len(columns) != len(arrays):
        raise ValidationError("one header per column required")
    length = len(arrays[0])
    for arr in arrays:
        if len(arr) != length:
            raise ValidationError("trace columns must share one length")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in zip(*arrays):
            writer.writerow([format_float(v) for v in row])


def _axis_meta(prefix: str, start: float, step: float, count: int) -> str:
    return (
        f"{prefix}_start={format_float(start)} "
        f"{prefix}_step={format_float(step)} {prefix}_count={count}"
    )


def write_map_csv(path: Path, cmap: ChronocyclicMap) -> None:
    """Wigner map as one CSV row per time sample, axes in a comment header."""
    om = cmap.omega_axis
    tm = cmap.t_axis
    header = "# " + _axis_meta(
        "omega", om.center - om.half_width, om.spacing, om.n_samples
    ) + " | " + _axis_meta("t", tm.center - tm.half_width, tm.spacing, tm.n_samples)
    with open(path, "w", newline="") as handle:
        handle.write(header + "\n")
        writer = csv.writer(handle)
        for row in cmap.values:
            writer.writerow([format_float(v) for v in row])


def read_map_csv(path: Path) -> Tuple[dict, np.ndarray]:
    """Inverse of write_map_csv; returns the axis metadata and values."""
    with open(path, "r", newline="") as handle:
        header = handle.readline()
        if not header.startswith("# "):
            raise ValidationError(f"{path} is not a map file")
        meta = {}
        for part in header[2:].replace(" | ", " ").split():
            key, value = part.split("=", 1)
            meta[key] = int(value) if key.endswith("_count") else float(value)
        values = np.array(
            [[float(cell) for cell in row] for row in csv.reader(handle)]
        )
    expected = (meta["t_count"], meta["omega_count"])
    if values.shape != expected:
        raise ValidationError(
            f"map file shape {values.shape} does not match header {expected}"
        )
    return meta, values


def write_family_csv(
    path: Path,
    key_name: str,
    keys: Sequence[float],
    x_name: str,
    xs: np.ndarray,
    y_name: str,
    traces: Iterable[np.ndarray],
) -> None:
    """Long-format table for a family of traces indexed by one parameter."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([key_name, x_name, y_name])
        for key, trace in zip(keys, traces):
            if len(trace) != len(xs):
                raise ValidationError("family traces must match the x grid")
            for x, y in zip(xs, trace):
                writer.writerow(
                    [format_float(key), format_float(x), format_float(y)]
                )
