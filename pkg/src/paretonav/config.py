"""Run configuration: schema validation, hashing, and materialization.

A single JSON document fully determines a run; there are no convenience
flags that change behavior outside the file, so a trajectory can always be
reproduced from its config alone. The document is validated against
``RUN_CONFIG_SCHEMA`` (plus per-kind init schemas) before any computation,
and schema violations are reported with their field paths.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .core import ObjectiveSet
from .criteria import ENSEMBLE_KINDS, SINGLE_POINT_KINDS, make_criterion
from .navigator import MODES, ControlSchedule, OptimizerConfig, run_single
from .problems import DEFAULT_DIMENSIONS, DEFAULT_STEP_SIZES, PROBLEMS, get_problem
from .qp import QpSolverConfig

Array = np.ndarray


class ConfigError(ValueError):
    """A run configuration failed schema or consistency validation."""


RUN_CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["problem", "mode", "init", "max_iters"],
    "additionalProperties": False,
    "properties": {
        "problem": {
            "type": "object",
            "required": ["name"],
            "additionalProperties": False,
            "properties": {
                "name": {"enum": sorted(PROBLEMS)},
                "n": {"type": "integer", "minimum": 1},
            },
        },
        "mode": {"enum": list(MODES)},
        "criterion": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(SINGLE_POINT_KINDS + ENSEMBLE_KINDS)},
                "r": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 1,
                },
            },
        },
        "ensemble": {"type": "integer", "minimum": 1},
        "init": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {
                    "enum": [
                        "random-gaussian",
                        "explicit",
                        "linear-scalarization-warmstart",
                    ]
                }
            },
        },
        "step_size": {"type": "number", "exclusiveMinimum": 0},
        "max_iters": {"type": "integer", "minimum": 0},
        "alpha": {"type": "number", "minimum": 0},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "beta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "alpha_decay": {"type": "number", "minimum": 0},
        "scalarization_weights": {
            "type": "array",
            "items": {"type": "number", "minimum": 0},
            "minItems": 1,
        },
        "shared_eps_floor": {"type": "boolean"},
        "qp": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_iters": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "out": {"type": "string", "minLength": 1},
    },
}

INIT_SCHEMAS = {
    "random-gaussian": {
        "type": "object",
        "required": ["kind"],
        "additionalProperties": False,
        "properties": {
            "kind": {"const": "random-gaussian"},
            "scale": {"type": "number", "exclusiveMinimum": 0},
            "seed": {"type": "integer", "minimum": 0},
        },
    },
    "explicit": {
        "type": "object",
        "required": ["kind", "points"],
        "additionalProperties": False,
        "properties": {
            "kind": {"const": "explicit"},
            "points": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 1,
                },
            },
        },
    },
    "linear-scalarization-warmstart": {
        "type": "object",
        "required": ["kind", "weights", "iters"],
        "additionalProperties": False,
        "properties": {
            "kind": {"const": "linear-scalarization-warmstart"},
            "weights": {"type": "array", "minItems": 1},
            "iters": {"type": "integer", "minimum": 0},
            "scale": {"type": "number", "exclusiveMinimum": 0},
            "seed": {"type": "integer", "minimum": 0},
        },
    },
}

_DEFAULTS = {
    "ensemble": 1,
    "alpha": 0.5,
    "gamma": 0.1,
    "beta": 0.9,
    "alpha_decay": 0.0,
    "shared_eps_floor": False,
}
_QP_DEFAULTS = {"max_iters": 100, "tol": 1e-8}
_INIT_DEFAULTS = {"scale": 1.0, "seed": 0}


def _schema_error(exc: jsonschema.ValidationError) -> ConfigError:
    path = exc.json_path if exc.json_path != "$" else "$ (document root)"
    return ConfigError(f"{path}: {exc.message}")


def validate_config(raw: dict) -> dict:
    """Validate and normalize a raw config dict, filling defaults.

    Raises ConfigError with the offending field path on any violation.
    """
    try:
        jsonschema.validate(raw, RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise _schema_error(exc) from exc

    cfg = json.loads(json.dumps(raw))  # deep copy via canonical JSON
    init = cfg["init"]
    init_schema = INIT_SCHEMAS[init["kind"]]
    try:
        jsonschema.validate(init, init_schema)
    except jsonschema.ValidationError as exc:
        err = _schema_error(exc)
        raise ConfigError(str(err).replace("$", "$.init", 1)) from exc

    ensemble_given = "ensemble" in raw
    for key, value in _DEFAULTS.items():
        cfg.setdefault(key, value)
    cfg["problem"].setdefault("n", DEFAULT_DIMENSIONS[cfg["problem"]["name"]])
    cfg.setdefault("step_size", DEFAULT_STEP_SIZES[cfg["problem"]["name"]])
    qp = dict(_QP_DEFAULTS)
    qp.update(cfg.get("qp", {}))
    cfg["qp"] = qp
    if init["kind"] in ("random-gaussian", "linear-scalarization-warmstart"):
        for key, value in _INIT_DEFAULTS.items():
            init.setdefault(key, value)

    _check_consistency(cfg, ensemble_given)
    return cfg


def _check_consistency(cfg: dict, ensemble_given: bool) -> None:
    mode = cfg["mode"]
    n = cfg["problem"]["n"]
    if cfg["problem"]["name"] == "zdt2" and n < 2:
        raise ConfigError("$.problem.n: zdt2 needs n >= 2")

    init = cfg["init"]
    if init["kind"] == "explicit":
        points = init["points"]
        if ensemble_given and cfg["ensemble"] != len(points):
            raise ConfigError(
                f"$.init.points: {len(points)} points but ensemble={cfg['ensemble']}"
            )
        for i, point in enumerate(points):
            if len(point) != n:
                raise ConfigError(
                    f"$.init.points[{i}]: length {len(point)}, expected n={n}"
                )
        cfg["ensemble"] = len(points)
    n_points = cfg["ensemble"]

    criterion = cfg.get("criterion")
    if criterion is None:
        if mode in ("png", "gradient-descent-on-F"):
            raise ConfigError(f"$.criterion: required for mode {mode!r}")
    else:
        kind = criterion["kind"]
        if kind in SINGLE_POINT_KINDS:
            if "r" not in criterion:
                raise ConfigError(f"$.criterion.r: required for kind {kind!r}")
            if n_points != 1:
                raise ConfigError(
                    f"$.ensemble: single-point criterion {kind!r} requires ensemble=1"
                )
            r = criterion["r"]
            if len(r) != 2:
                raise ConfigError(
                    "$.criterion.r: built-in problems have two objectives, "
                    f"got {len(r)} entries"
                )
            if kind in ("weighted-distance", "non-uniformity") and any(
                x <= 0 for x in r
            ):
                raise ConfigError(f"$.criterion.r: {kind} needs strictly positive entries")
        else:  # energy-distance
            if "r" in criterion:
                raise ConfigError("$.criterion.r: energy-distance takes no reference")
            if n_points < 2:
                raise ConfigError("$.ensemble: energy-distance requires ensemble >= 2")

    if mode == "linear-scalarization":
        weights = cfg.get("scalarization_weights")
        if weights is None:
            raise ConfigError(
                "$.scalarization_weights: required for linear-scalarization mode"
            )
        _check_simplex_weights(weights, "$.scalarization_weights")

    if init["kind"] == "linear-scalarization-warmstart":
        weights = init["weights"]
        if weights and isinstance(weights[0], list):
            if len(weights) != n_points:
                raise ConfigError(
                    f"$.init.weights: {len(weights)} weight vectors but "
                    f"ensemble={n_points}"
                )
            for i, w in enumerate(weights):
                _check_simplex_weights(w, f"$.init.weights[{i}]")
        else:
            _check_simplex_weights(weights, "$.init.weights")


def _check_simplex_weights(weights, path: str) -> None:
    if not all(isinstance(x, (int, float)) for x in weights):
        raise ConfigError(f"{path}: weights must be numbers")
    if any(x < 0 for x in weights) or abs(sum(weights) - 1.0) > 1e-9:
        raise ConfigError(f"{path}: weights must be nonnegative and sum to 1")
    if len(weights) != 2:
        raise ConfigError(f"{path}: built-in problems have two objectives")


def load_config(path) -> dict:
    """Load and validate a JSON run config from ``path``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("$ (document root): config must be a JSON object")
    return validate_config(raw)


def config_hash(cfg: dict) -> str:
    """SHA-256 over the canonical form of a normalized config."""
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class RunSetup:
    """Everything a run needs, materialized from a validated config."""

    config: dict
    objectives: ObjectiveSet
    criterion: object | None
    initial_points: Array
    opt_config: OptimizerConfig
    schedule: ControlSchedule
    qp_config: QpSolverConfig
    out: str | None


def materialize(cfg: dict) -> RunSetup:
    """Turn a validated config into problem, criterion, points, and settings."""
    objectives = get_problem(cfg["problem"]["name"], cfg["problem"]["n"])

    criterion = None
    if "criterion" in cfg:
        criterion = make_criterion(cfg["criterion"]["kind"], cfg["criterion"].get("r"))

    schedule = ControlSchedule(
        alpha=cfg["alpha"],
        gamma=cfg["gamma"],
        beta=cfg["beta"],
        alpha_decay=cfg["alpha_decay"],
    )
    qp_config = QpSolverConfig(max_iters=cfg["qp"]["max_iters"], tol=cfg["qp"]["tol"])

    init = cfg["init"]
    seed = int(init.get("seed", 0))
    opt_config = OptimizerConfig(
        step_size=cfg["step_size"],
        max_iters=cfg["max_iters"],
        mode=cfg["mode"],
        scalarization_weights=(
            np.asarray(cfg["scalarization_weights"], dtype=float)
            if "scalarization_weights" in cfg
            else None
        ),
        seed=seed,
        shared_eps_floor=cfg["shared_eps_floor"],
    )

    points = _initial_points(cfg, objectives, qp_config)
    return RunSetup(
        config=cfg,
        objectives=objectives,
        criterion=criterion,
        initial_points=points,
        opt_config=opt_config,
        schedule=schedule,
        qp_config=qp_config,
        out=cfg.get("out"),
    )


def _initial_points(cfg: dict, objectives: ObjectiveSet, qp_config: QpSolverConfig) -> Array:
    init = cfg["init"]
    n_points = cfg["ensemble"]
    n = objectives.n

    if init["kind"] == "explicit":
        points = np.asarray(init["points"], dtype=float)
    elif init["kind"] == "random-gaussian":
        rng = np.random.default_rng(init["seed"])
        points = rng.normal(0.0, init["scale"], size=(n_points, n))
    else:  # linear-scalarization-warmstart
        rng = np.random.default_rng(init["seed"])
        starts = rng.normal(0.0, init["scale"], size=(n_points, n))
        weights = init["weights"]
        if weights and isinstance(weights[0], list):
            weight_rows = [np.asarray(w, dtype=float) for w in weights]
        else:
            weight_rows = [np.asarray(weights, dtype=float)] * n_points
        points = np.empty_like(starts)
        for i in range(n_points):
            warm_cfg = OptimizerConfig(
                step_size=cfg["step_size"],
                max_iters=init["iters"],
                mode="linear-scalarization",
                scalarization_weights=weight_rows[i],
                seed=init["seed"],
            )
            records = run_single(
                objectives, None, starts[i], warm_cfg, qp_config=qp_config
            )
            points[i] = records[-1].theta

    if objectives.clip is not None:
        points = np.stack([objectives.clip(p) for p in points])
    return points
