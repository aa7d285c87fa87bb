"""Command-line entry point.

Subcommands:
    run          execute a configured run and persist the trajectory
    metrics      IGD+ / hypervolume over dominance-filtered checkpoints
    export-plot  loss-space polylines per point, with a front overlay

Exit codes: 0 on success, 2 on configuration errors, 3 on runtime
failures. A run that aborts mid-way still writes the partial trajectory,
flagged in the file metadata.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, config_hash, load_config, materialize
from .metrics import hypervolume_2d, igd_plus, nondominated_filter
from .navigator import RunAborted, run_ensemble, run_single
from .problems import PROBLEMS, get_problem
from .trajectory import (
    PHI_OFF_TOKEN,
    losses_from_records,
    read_front_csv,
    read_trajectory,
    write_trajectory,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

FRONT_OVERLAY_SAMPLES = 200


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paretonav",
        description="Navigate the Pareto set of several objectives while "
        "minimizing a criterion; evaluate front approximations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a run described by a JSON config")
    run_p.add_argument("--config", required=True, help="path to the JSON run config")
    run_p.add_argument("--out", help="output trajectory path (overrides config)")

    met_p = sub.add_parser("metrics", help="score trajectories against a front")
    met_p.add_argument("trajectories", nargs="+", help="trajectory CSV paths")
    met_p.add_argument("--ref-front", help="reference front CSV for IGD+")
    met_p.add_argument(
        "--hv-ref", default="0.6,0.6", help="hypervolume reference point 'a,b'"
    )
    met_p.add_argument(
        "--pool",
        action="store_true",
        help="also report the pooled, filtered union of all inputs",
    )

    exp_p = sub.add_parser("export-plot", help="export loss-space traces")
    exp_p.add_argument("trajectory", help="trajectory CSV path")
    exp_p.add_argument("--out", help="output path (default: <input>.plot.csv)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out)
        if args.command == "metrics":
            return cmd_metrics(args.trajectories, args.ref_front, args.hv_ref, args.pool)
        return cmd_export_plot(args.trajectory, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - single CLI failure funnel
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def cmd_run(config_path: str, out_override: str | None) -> int:
    cfg = load_config(config_path)
    setup = materialize(cfg)
    out = out_override or setup.out
    if out is None:
        raise ConfigError("$.out: no output path given (config 'out' or --out)")

    meta = {
        "config_hash": config_hash(cfg),
        "problem": cfg["problem"]["name"],
        "n": setup.objectives.n,
        "m": setup.objectives.m,
        "mode": cfg["mode"],
    }

    try:
        if setup.initial_points.shape[0] == 1:
            records = run_single(
                setup.objectives,
                setup.criterion,
                setup.initial_points[0],
                setup.opt_config,
                setup.schedule,
                setup.qp_config,
            )
        else:
            records = run_ensemble(
                setup.objectives,
                setup.criterion,
                setup.initial_points,
                setup.opt_config,
                setup.schedule,
                setup.qp_config,
            )
    except RunAborted as aborted:
        meta["partial"] = "true"
        meta["abort_reason"] = aborted.reason
        write_trajectory(out, aborted.records, setup.objectives.n, setup.objectives.m, meta)
        print(f"run aborted: {aborted.reason}", file=sys.stderr)
        print(f"partial trajectory ({len(aborted.records)} records) written to {out}")
        return EXIT_RUNTIME

    write_trajectory(out, records, setup.objectives.n, setup.objectives.m, meta)
    _print_run_summary(records, out)
    return EXIT_OK


def _print_run_summary(records, out) -> None:
    if not records:
        print(f"wrote {out} (no records)")
        return
    last_iteration = max(r.iteration for r in records)
    finals = sorted(
        (r for r in records if r.iteration == last_iteration),
        key=lambda r: r.point_id,
    )
    print(f"wrote {out} ({len(finals)} point(s), final iteration {last_iteration})")
    for record in finals:
        losses = ", ".join(f"{x:.6g}" for x in record.losses)
        phi = PHI_OFF_TOKEN if record.phi is None else f"{record.phi:.6g}"
        print(
            f"point {record.point_id}: losses=[{losses}] g={record.g:.6g} "
            f"phi={phi} F={record.f_value:.6g}"
        )


def _parse_hv_ref(text: str) -> np.ndarray:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--hv-ref: not a number pair: {text!r}") from exc
    if len(parts) != 2:
        raise ConfigError(f"--hv-ref: expected 'a,b', got {text!r}")
    return np.asarray(parts)


def cmd_metrics(
    trajectory_paths: list[str],
    ref_front_path: str | None,
    hv_ref_text: str,
    pool: bool,
) -> int:
    hv_ref = _parse_hv_ref(hv_ref_text)
    reference = read_front_csv(ref_front_path) if ref_front_path else None

    filtered_sets = []
    m_seen = None
    for path in trajectory_paths:
        records, _ = read_trajectory(path)
        if not records:
            raise RuntimeError(f"{path}: no checkpoints to score")
        losses = losses_from_records(records)
        if m_seen is None:
            m_seen = losses.shape[1]
        elif losses.shape[1] != m_seen:
            raise RuntimeError(
                f"{path}: has {losses.shape[1]} objectives, earlier input had {m_seen}"
            )
        filtered = nondominated_filter(losses)
        filtered_sets.append((path, filtered))

    if reference is not None and reference.shape[1] != m_seen:
        raise RuntimeError(
            f"reference front has {reference.shape[1]} objectives, inputs have {m_seen}"
        )

    for path, filtered in filtered_sets:
        _print_metrics_line(path, filtered, reference, hv_ref)
    if pool:
        pooled = nondominated_filter(np.vstack([f for _, f in filtered_sets]))
        _print_metrics_line("pooled", pooled, reference, hv_ref)
    return EXIT_OK


def _print_metrics_line(label, points, reference, hv_ref) -> None:
    hv = hypervolume_2d(points, hv_ref) if points.shape[1] == 2 else None
    parts = [f"{label}: points={points.shape[0]}"]
    if reference is not None:
        parts.append(f"igd_plus={igd_plus(reference, points):.12g}")
    if hv is not None:
        parts.append(f"hypervolume={hv:.12g}")
    print(" ".join(parts))


def cmd_export_plot(trajectory_path: str, out: str | None) -> int:
    records, meta = read_trajectory(trajectory_path)
    if not records:
        raise RuntimeError(f"{trajectory_path}: no records to export")
    out = out or str(Path(trajectory_path).with_suffix(".plot.csv"))

    m = records[0].losses.shape[0]
    header = ["series", "point_id", "step"] + [f"loss_{i}" for i in range(m)]
    lines = [",".join(header)]
    for record in sorted(records, key=lambda r: (r.point_id, r.iteration)):
        values = ",".join(repr(float(x)) for x in record.losses)
        lines.append(f"trajectory,{record.point_id},{record.iteration},{values}")

    problem_name = meta.get("problem")
    if problem_name in PROBLEMS:
        front = get_problem(problem_name).front_sampler(FRONT_OVERLAY_SAMPLES)
        for i, row in enumerate(front):
            values = ",".join(repr(float(x)) for x in row)
            lines.append(f"front,-1,{i},{values}")
    else:
        print(
            f"warning: unknown problem {problem_name!r}; front overlay omitted",
            file=sys.stderr,
        )

    Path(out).write_text("\n".join(lines) + "\n")
    n_points = len({r.point_id for r in records})
    print(f"wrote {out} ({n_points} trajectory polyline(s))")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
