"""Trajectory persistence: CSV files with exact float round-trips.

A trajectory file starts with ``# key=value`` metadata lines (config hash,
problem name, dimensions, mode, and a partial-run flag when a run was
aborted), followed by a header row and one row per record, ordered by
(iteration, point id). Floats are written with ``repr`` so reading a file
back reproduces every value bit-exactly. The control-off state of ``phi``
is serialized as the literal token ``off``; it is never a numeric
sentinel.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .navigator import TrajectoryRecord

Array = np.ndarray

PHI_OFF_TOKEN = "off"


def trajectory_header(n: int, m: int) -> list[str]:
    """Column names for a trajectory with ``n`` parameters and ``m`` losses."""
    return (
        ["iter", "point_id"]
        + [f"theta_{i}" for i in range(n)]
        + [f"loss_{i}" for i in range(m)]
        + ["g", "phi", "F", "v_norm"]
    )


def _format_float(x: float) -> str:
    return repr(float(x))


def _record_row(record: TrajectoryRecord) -> list[str]:
    phi = PHI_OFF_TOKEN if record.phi is None else _format_float(record.phi)
    return (
        [str(record.iteration), str(record.point_id)]
        + [_format_float(x) for x in record.theta]
        + [_format_float(x) for x in record.losses]
        + [_format_float(record.g), phi, _format_float(record.f_value),
           _format_float(record.v_norm)]
    )


def write_trajectory(
    path,
    records: list[TrajectoryRecord],
    n: int,
    m: int,
    meta: dict | None = None,
) -> None:
    """Write records to ``path`` with metadata comment lines."""
    path = Path(path)
    ordered = sorted(records, key=lambda r: (r.iteration, r.point_id))
    with path.open("w", newline="") as handle:
        for key, value in (meta or {}).items():
            handle.write(f"# {key}={value}\n")
        writer = csv.writer(handle)
        writer.writerow(trajectory_header(n, m))
        for record in ordered:
            writer.writerow(_record_row(record))


def read_trajectory(path) -> tuple[list[TrajectoryRecord], dict]:
    """Read a trajectory file back into records plus its metadata dict."""
    path = Path(path)
    meta: dict[str, str] = {}
    records: list[TrajectoryRecord] = []
    with path.open("r", newline="") as handle:
        header: list[str] | None = None
        for raw_line in handle:
            line = raw_line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            fields = next(csv.reader([line]))
            if header is None:
                header = fields
                continue
            records.append(_parse_row(header, fields, path))
    if header is None:
        raise ValueError(f"{path}: missing header row")
    _check_header(header, path)
    return records, meta


def _check_header(header: list[str], path: Path) -> None:
    n = sum(1 for c in header if c.startswith("theta_"))
    m = sum(1 for c in header if c.startswith("loss_"))
    if header != trajectory_header(n, m):
        raise ValueError(f"{path}: malformed trajectory header")


def _parse_row(header: list[str], fields: list[str], path: Path) -> TrajectoryRecord:
    if len(fields) != len(header):
        raise ValueError(
            f"{path}: row has {len(fields)} fields, header has {len(header)}"
        )
    n = sum(1 for c in header if c.startswith("theta_"))
    m = sum(1 for c in header if c.startswith("loss_"))
    iteration = int(fields[0])
    point_id = int(fields[1])
    theta = np.array([float(x) for x in fields[2 : 2 + n]])
    losses = np.array([float(x) for x in fields[2 + n : 2 + n + m]])
    g = float(fields[2 + n + m])
    phi_field = fields[2 + n + m + 1]
    phi = None if phi_field == PHI_OFF_TOKEN else float(phi_field)
    f_value = float(fields[2 + n + m + 2])
    v_norm = float(fields[2 + n + m + 3])
    return TrajectoryRecord(
        iteration=iteration,
        point_id=point_id,
        theta=theta,
        losses=losses,
        g=g,
        phi=phi,
        f_value=f_value,
        v_norm=v_norm,
    )


def losses_from_records(records: list[TrajectoryRecord]) -> Array:
    """Stack the loss vectors of ``records`` into an (N, m) array."""
    if not records:
        raise ValueError("no records to extract losses from")
    return np.stack([r.losses for r in records])


def write_front_csv(path, points: Array) -> None:
    """Write an (N, m) array of loss vectors as a reference-front CSV."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError(f"expected a nonempty (N, m) array, got shape {points.shape}")
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"loss_{i}" for i in range(points.shape[1])])
        for row in points:
            writer.writerow([_format_float(x) for x in row])


def read_front_csv(path) -> Array:
    """Read a reference-front CSV back into an (N, m) array."""
    path = Path(path)
    with path.open("r", newline="") as handle:
        reader = csv.reader(
            row for row in handle if row.strip() and not row.startswith("#")
        )
        header = next(reader, None)
        if header is None or not all(c.startswith("loss_") for c in header):
            raise ValueError(f"{path}: expected a header of loss_<i> columns")
        rows = [[float(x) for x in row] for row in reader]
    if not rows:
        raise ValueError(f"{path}: no loss vectors")
    return np.asarray(rows, dtype=float)
