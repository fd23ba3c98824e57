"""Experiment configs, end-to-end pipelines, and report serialization.

Configs are JSON documents with a ``version`` field and a strict schema:
unknown keys are rejected with the offending field path.  Every run derives
all randomness from the single root seed recorded in the report, so a report
can be regenerated bit-for-bit from its own embedded config (wall time
excluded).  Reports serialize to JSON or to a key/value CSV whose cells are
JSON-encoded, making both formats exact round-trips.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ConfigError
from .linalg import (
    DensityMatrix,
    PureState,
    build_reconstruction,
    dagger,
    random_density,
)
from .lundeen_bamber import (
    LBConfiguration,
    error_volume_from_weights,
    lb_exact_weak_data,
    lb_reconstruct,
    lb_simulated_weak_data,
    lb_weak_coordinates,
    metric_det_from_weights,
    mub_probe,
    weighted_probe,
)
from .measurement import NoiseModel, weak_expectation
from .mub import computational_basis, family_max_deviation, fourier_basis, mub_prime
from .operator_basis import bloch_decompose, flat_metric, gell_mann_basis, standard_reconstruct
from .rng import derive_seed
from .wu import (
    WuConfiguration,
    wu_exact_data,
    wu_feasibility,
    wu_reconstruct_in_b,
    wu_simulated_data,
)

SCHEMA_VERSION = 1
SCHEMES = ("standard", "lb", "wu")
FORMATS = ("json", "csv")


# --- config validation -------------------------------------------------------

def _require(obj: dict, path: str, key: str):
    if key not in obj:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return obj[key]


def _reject_unknown(obj: dict, path: str, allowed: set[str]):
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown field")


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def _as_number(value, path: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value}")
    return float(value)


def _as_choice(value, path: str, choices) -> str:
    if value not in choices:
        raise ConfigError(path, f"expected one of {sorted(choices)}, got {value!r}")
    return value


def _as_complex_vector(value, path: str, dim: int) -> np.ndarray:
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigError(path, f"expected a list of {dim} [re, im] pairs")
    out = np.empty(dim, dtype=complex)
    for k, pair in enumerate(value):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{path}[{k}]", "expected an [re, im] pair")
        out[k] = _as_number(pair[0], f"{path}[{k}][0]") + 1j * _as_number(pair[1], f"{path}[{k}][1]")
    return out


def _validate_noise(obj, path: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    if obj.get("exact"):
        _reject_unknown(obj, path, {"exact"})
        return {"exact": True}
    _reject_unknown(obj, path, {"exact", "delta_w", "ensemble_size"})
    return {
        "exact": False,
        "delta_w": _as_number(_require(obj, path, "delta_w"), f"{path}.delta_w", positive=True),
        "ensemble_size": _as_int(
            _require(obj, path, "ensemble_size"), f"{path}.ensemble_size", minimum=1
        ),
    }


def _validate_state(obj, path: str, dim: int) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    if "matrix" in obj:
        _reject_unknown(obj, path, {"matrix"})
        rows = obj["matrix"]
        if not isinstance(rows, list) or len(rows) != dim:
            raise ConfigError(f"{path}.matrix", f"expected {dim} rows")
        matrix = np.stack(
            [_as_complex_vector(row, f"{path}.matrix[{r}]", dim) for r, row in enumerate(rows)]
        )
        try:
            DensityMatrix(matrix)
        except ValueError as exc:
            raise ConfigError(f"{path}.matrix", f"not a valid density matrix: {exc}") from exc
        return {"matrix": rows}
    _reject_unknown(obj, path, {"seed", "rank"})
    rank = _as_int(_require(obj, path, "rank"), f"{path}.rank", minimum=1)
    if rank > dim:
        raise ConfigError(f"{path}.rank", f"must be <= dim {dim}, got {rank}")
    return {"seed": _as_int(_require(obj, path, "seed"), f"{path}.seed"), "rank": rank}


def _validate_probe(obj, path: str, dim: int, scheme: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    kind = _as_choice(_require(obj, path, "type"), f"{path}.type",
                      {"mub", "amplitudes", "simplex", "states"})
    if kind == "mub":
        _reject_unknown(obj, path, {"type"})
        return {"type": "mub"}
    if kind == "simplex":
        _reject_unknown(obj, path, {"type", "weights"})
        weights = _require(obj, path, "weights")
        if not isinstance(weights, list) or len(weights) != dim:
            raise ConfigError(f"{path}.weights", f"expected {dim} weights")
        vals = [_as_number(w, f"{path}.weights[{k}]", positive=True) for k, w in enumerate(weights)]
        if abs(sum(vals) - 1.0) > 1e-9:
            raise ConfigError(f"{path}.weights", f"weights must sum to 1, got {sum(vals)!r}")
        return {"type": "simplex", "weights": weights}
    if kind == "amplitudes":
        _reject_unknown(obj, path, {"type", "values"})
        vec = _as_complex_vector(_require(obj, path, "values"), f"{path}.values", dim)
        if abs(np.linalg.norm(vec) - 1.0) > 1e-6:
            raise ConfigError(f"{path}.values", "amplitudes must be normalized")
        return {"type": "amplitudes", "values": obj["values"]}
    # explicit post-selection family (wu)
    if scheme != "wu":
        raise ConfigError(f"{path}.type", "probe type 'states' is only valid for scheme wu")
    _reject_unknown(obj, path, {"type", "values"})
    values = _require(obj, path, "values")
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{path}.values", "expected a non-empty list of state vectors")
    for k, vec in enumerate(values):
        v = _as_complex_vector(vec, f"{path}.values[{k}]", dim)
        if abs(np.linalg.norm(v) - 1.0) > 1e-6:
            raise ConfigError(f"{path}.values[{k}]", "state vector must be normalized")
    return {"type": "states", "values": values}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, normalized reconstruction experiment description."""

    scheme: str
    dim: int
    noise: dict
    state: dict
    probe: dict | None
    repetitions: int
    post_count: int | None
    seed: int
    output: str | None
    fmt: str

    @property
    def exact(self) -> bool:
        return bool(self.noise.get("exact"))

    def as_dict(self) -> dict:
        out: dict[str, Any] = {
            "version": SCHEMA_VERSION,
            "scheme": self.scheme,
            "dim": self.dim,
            "noise": self.noise,
            "state": self.state,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "format": self.fmt,
        }
        if self.probe is not None:
            out["probe"] = self.probe
        if self.post_count is not None:
            out["post_count"] = self.post_count
        if self.output is not None:
            out["output"] = self.output
        return out


def validate_experiment_config(raw: dict, seed_override: int | None = None) -> ExperimentConfig:
    """Validate a reconstruction config document; unknown keys are errors."""
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a JSON object")
    _reject_unknown(
        raw, "", {"version", "scheme", "dim", "noise", "state", "probe",
                  "repetitions", "post_count", "seed", "output", "format"},
    )
    version = _as_int(_require(raw, "", "version"), "version")
    if version != SCHEMA_VERSION:
        raise ConfigError("version", f"unsupported schema version {version}")
    scheme = _as_choice(_require(raw, "", "scheme"), "scheme", SCHEMES)
    dim = _as_int(_require(raw, "", "dim"), "dim", minimum=2)
    noise = _validate_noise(_require(raw, "", "noise"), "noise")
    state = _validate_state(_require(raw, "", "state"), "state", dim)
    repetitions = _as_int(_require(raw, "", "repetitions"), "repetitions", minimum=1)

    probe = None
    if scheme in ("lb", "wu"):
        probe = _validate_probe(_require(raw, "", "probe"), "probe", dim, scheme)
    elif raw.get("probe") is not None:
        raise ConfigError("probe", "scheme standard takes no probe")

    post_count = None
    if scheme == "wu":
        post_count = raw.get("post_count", dim)
        post_count = _as_int(post_count, "post_count", minimum=1)
        if post_count != dim:
            raise ConfigError(
                "post_count",
                f"end-to-end reconstruction needs a complete post family "
                f"(post_count == dim == {dim}); use wu_feasibility for other counts",
            )
        if probe["type"] == "states" and len(probe["values"]) != post_count:
            raise ConfigError("probe.values", f"expected {post_count} post states")
    elif "post_count" in raw:
        raise ConfigError("post_count", f"only valid for scheme wu, not {scheme}")

    seed = _as_int(raw.get("seed", 0), "seed")
    if seed_override is not None:
        seed = seed_override
    fmt = _as_choice(raw.get("format", "json"), "format", FORMATS)
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", f"expected a string path, got {output!r}")
    return ExperimentConfig(
        scheme=scheme, dim=dim, noise=noise, state=state, probe=probe,
        repetitions=repetitions, post_count=post_count, seed=seed,
        output=output, fmt=fmt,
    )


# --- resolution helpers ------------------------------------------------------

def _state_from_spec(spec: dict, dim: int) -> DensityMatrix:
    if "matrix" in spec:
        matrix = np.array(
            [[complex(p[0], p[1]) for p in row] for row in spec["matrix"]]
        )
        return DensityMatrix(matrix)
    return random_density(dim, spec["rank"], spec["seed"])


def _lb_probe_from_spec(probe: dict, a_basis) -> PureState:
    if probe["type"] == "mub":
        return mub_probe(a_basis)
    if probe["type"] == "simplex":
        return weighted_probe(a_basis, probe["weights"])
    vec = np.array([complex(p[0], p[1]) for p in probe["values"]])
    return PureState.normalized(vec)


def _wu_posts_from_spec(probe: dict, dim: int) -> tuple[PureState, ...]:
    if probe["type"] == "mub":
        return fourier_basis(dim)
    if probe["type"] == "states":
        return tuple(
            PureState.normalized(np.array([complex(p[0], p[1]) for p in vec]))
            for vec in probe["values"]
        )
    raise ConfigError("probe.type", f"probe type {probe['type']!r} not valid for scheme wu")


# --- pipelines ---------------------------------------------------------------

def _empirical_volume_from_coords(samples: list[np.ndarray], det_sqrt_metric: float) -> float | None:
    if len(samples) < len(samples[0]) + 1:
        return None
    cov = np.cov(np.array(samples), rowvar=False)
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        return None
    return float(np.exp(0.5 * logdet) * det_sqrt_metric)


def run_reconstruct(cfg: ExperimentConfig) -> dict:
    """Simulate, reconstruct, and compare to truth; returns the report dict."""
    start = time.perf_counter()
    dim = cfg.dim
    truth = _state_from_spec(cfg.state, dim)
    flat = flat_metric(dim)
    a_basis = computational_basis(dim)

    estimates: list[np.ndarray] = []
    flag_counts: dict[str, int] = {}
    data_coords: list[np.ndarray] = []
    analytic_volume = None
    weak_metric_det = None
    feasibility = None

    if cfg.scheme == "standard":
        basis = gell_mann_basis(dim)
        for rep in range(cfg.repetitions):
            if cfg.exact:
                x = bloch_decompose(truth, basis).x
                noise_scale = 0.0
            else:
                x = np.empty(basis.size)
                noise_scale = 0.0
                for q in range(basis.size):
                    noise = NoiseModel(
                        delta_w=cfg.noise["delta_w"],
                        ensemble_size=cfg.noise["ensemble_size"],
                        seed=derive_seed(cfg.seed, rep, q),
                    )
                    rec = weak_expectation(truth, basis.ops[q], noise)
                    x[q] = rec.estimate.real
                    noise_scale = max(noise_scale, rec.std_error)
            est = standard_reconstruct(x, basis, noise_scale=noise_scale)
            estimates.append(est.matrix)
            data_coords.append(flat.coords(est.matrix))
            for flag in est.flags:
                flag_counts[flag] = flag_counts.get(flag, 0) + 1
        empirical_volume = (
            None if cfg.exact else _empirical_volume_from_coords(data_coords, flat.det_sqrt)
        )

    elif cfg.scheme == "lb":
        probe = _lb_probe_from_spec(cfg.probe, a_basis)
        lb_cfg = LBConfiguration.build(a_basis, probe)
        weights = lb_cfg.overlap_weights
        weak_metric_det = metric_det_from_weights(weights, flat)
        if not cfg.exact:
            analytic_volume = error_volume_from_weights(weights, cfg.noise["delta_w"], flat)
        for rep in range(cfg.repetitions):
            if cfg.exact:
                data = lb_exact_weak_data(truth, lb_cfg)
            else:
                noise = NoiseModel(
                    delta_w=cfg.noise["delta_w"],
                    ensemble_size=cfg.noise["ensemble_size"],
                    seed=derive_seed(cfg.seed, rep),
                )
                data = lb_simulated_weak_data(truth, lb_cfg, noise)
            est = lb_reconstruct(data, lb_cfg)
            estimates.append(est.matrix)
            data_coords.append(lb_weak_coordinates(data))
            for flag in est.flags:
                flag_counts[flag] = flag_counts.get(flag, 0) + 1
        empirical_volume = (
            None
            if cfg.exact
            else _empirical_volume_from_coords(data_coords, float(np.sqrt(weak_metric_det)))
        )

    else:  # wu
        posts = _wu_posts_from_spec(cfg.probe, dim)
        wu_cfg = WuConfiguration.build(a_basis, posts)
        fes = wu_feasibility(dim, wu_cfg.post_count)
        feasibility = {
            "post_count": fes.post_count,
            "real_data_count": fes.real_data_count,
            "params_needed": fes.params_needed,
            "verdict": fes.verdict,
            "exact_match_post_count": fes.exact_match_post_count,
            "exact_match_possible": fes.exact_match_possible,
        }
        post_matrix = np.column_stack([s.amplitudes for s in posts])
        for rep in range(cfg.repetitions):
            if cfg.exact:
                data = wu_exact_data(truth, wu_cfg)
                noise_scale = 0.0
            else:
                noise = NoiseModel(
                    delta_w=cfg.noise["delta_w"],
                    ensemble_size=cfg.noise["ensemble_size"],
                    seed=derive_seed(cfg.seed, rep),
                )
                data = wu_simulated_data(truth, wu_cfg, noise)
                noise_scale = float(np.max(data.w_std_error))
            rho_b = wu_reconstruct_in_b(data, wu_cfg)
            est = build_reconstruction(
                post_matrix @ rho_b @ dagger(post_matrix), noise_scale=noise_scale
            )
            estimates.append(est.matrix)
            data_coords.append(flat.coords(est.matrix))
            for flag in est.flags:
                flag_counts[flag] = flag_counts.get(flag, 0) + 1
        empirical_volume = (
            None if cfg.exact else _empirical_volume_from_coords(data_coords, flat.det_sqrt)
        )

    diffs = np.array([est - truth.matrix for est in estimates])
    frob = np.sqrt(np.sum(np.abs(diffs) ** 2, axis=(1, 2)))
    residual_rms = np.sqrt(np.mean(np.abs(diffs) ** 2, axis=0))

    results: dict[str, Any] = {
        "repetitions": cfg.repetitions,
        "frobenius_error_mean": float(frob.mean()),
        "frobenius_error_max": float(frob.max()),
        "per_entry_residual_rms": [[float(v) for v in row] for row in residual_rms],
        "empirical_error_volume": empirical_volume,
        "metric_det_sqrt": flat.det_sqrt,
        "validity_flag_counts": flag_counts,
    }
    if cfg.scheme == "lb":
        results["analytic_error_volume"] = analytic_volume
        results["weak_metric_det"] = weak_metric_det
    if feasibility is not None:
        results["feasibility"] = feasibility

    report = {
        "version": SCHEMA_VERSION,
        "kind": "reconstruct",
        "scheme": cfg.scheme,
        "dim": dim,
        "config": cfg.as_dict(),
        "results": results,
        "seed": cfg.seed,
        "wall_time_s": time.perf_counter() - start,
    }
    _check_finite(report, "report")
    return report


# --- optimality scan ----------------------------------------------------------

@dataclass(frozen=True)
class ScanConfig:
    dim: int
    delta_w: float
    grid_points: int
    empirical: dict | None
    seed: int
    output: str | None
    fmt: str

    def as_dict(self) -> dict:
        out: dict[str, Any] = {
            "version": SCHEMA_VERSION,
            "dim": self.dim,
            "delta_w": self.delta_w,
            "grid_points": self.grid_points,
            "seed": self.seed,
            "format": self.fmt,
        }
        if self.empirical is not None:
            out["empirical"] = self.empirical
        if self.output is not None:
            out["output"] = self.output
        return out


def validate_scan_config(raw: dict, seed_override: int | None = None) -> ScanConfig:
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a JSON object")
    _reject_unknown(
        raw, "", {"version", "dim", "delta_w", "grid_points", "empirical",
                  "seed", "output", "format"},
    )
    version = _as_int(_require(raw, "", "version"), "version")
    if version != SCHEMA_VERSION:
        raise ConfigError("version", f"unsupported schema version {version}")
    dim = _as_int(_require(raw, "", "dim"), "dim", minimum=2)
    delta_w = _as_number(raw.get("delta_w", 1.0), "delta_w", positive=True)
    grid_points = _as_int(_require(raw, "", "grid_points"), "grid_points")
    if grid_points < 2:
        raise ConfigError("grid_points", f"grid needs at least 2 points per axis, got {grid_points}")
    empirical = raw.get("empirical")
    if empirical is not None:
        if not isinstance(empirical, dict):
            raise ConfigError("empirical", "expected an object or null")
        _reject_unknown(empirical, "empirical", {"repetitions", "ensemble_size", "state"})
        empirical = {
            "repetitions": _as_int(
                _require(empirical, "empirical", "repetitions"),
                "empirical.repetitions", minimum=dim * dim,
            ),
            "ensemble_size": _as_int(
                _require(empirical, "empirical", "ensemble_size"),
                "empirical.ensemble_size", minimum=1,
            ),
            "state": _validate_state(_require(empirical, "empirical", "state"),
                                     "empirical.state", dim),
        }
    seed = _as_int(raw.get("seed", 0), "seed")
    if seed_override is not None:
        seed = seed_override
    fmt = _as_choice(raw.get("format", "csv"), "format", FORMATS)
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", f"expected a string path, got {output!r}")
    return ScanConfig(
        dim=dim, delta_w=delta_w, grid_points=grid_points, empirical=empirical,
        seed=seed, output=output, fmt=fmt,
    )


def _simplex_grid(dim: int, points: int, floor: float = 1e-6) -> list[tuple[float, ...]]:
    """Deterministic grid over the open probability simplex."""
    axes = np.linspace(floor, 1.0 - floor, points)
    free = dim - 1
    mesh = np.stack(np.meshgrid(*([axes] * free), indexing="ij"), axis=-1).reshape(-1, free)
    grid = []
    for row in mesh:
        last = 1.0 - row.sum()
        if last >= floor:
            grid.append(tuple(float(v) for v in row) + (float(last),))
    return grid


def run_optimality_scan(cfg: ScanConfig) -> dict:
    """Sweep the probe simplex, tabulating analytic (and optionally Monte
    Carlo) error volumes; the argmin row is marked."""
    start = time.perf_counter()
    flat = flat_metric(cfg.dim)
    grid = _simplex_grid(cfg.dim, cfg.grid_points)
    if not grid:
        raise ConfigError("grid_points", "grid contains no feasible simplex point")
    a_basis = computational_basis(cfg.dim)

    truth = None
    if cfg.empirical is not None:
        truth = _state_from_spec(cfg.empirical["state"], cfg.dim)

    rows = []
    for point_index, weights in enumerate(grid):
        analytic = error_volume_from_weights(weights, cfg.delta_w, flat)
        empirical = None
        if cfg.empirical is not None:
            probe = weighted_probe(a_basis, weights)
            lb_cfg = LBConfiguration.build(a_basis, probe)
            coords = []
            for rep in range(cfg.empirical["repetitions"]):
                noise = NoiseModel(
                    delta_w=cfg.delta_w,
                    ensemble_size=cfg.empirical["ensemble_size"],
                    seed=derive_seed(cfg.seed, point_index, rep),
                )
                coords.append(lb_weak_coordinates(lb_simulated_weak_data(truth, lb_cfg, noise)))
            empirical = _empirical_volume_from_coords(
                coords, float(np.sqrt(metric_det_from_weights(weights, flat)))
            )
        rows.append({"weights": list(weights), "analytic_volume": analytic,
                     "empirical_volume": empirical})

    argmin = min(range(len(rows)), key=lambda k: rows[k]["analytic_volume"])
    for k, row in enumerate(rows):
        row["is_argmin"] = k == argmin

    report = {
        "version": SCHEMA_VERSION,
        "kind": "optimality-scan",
        "dim": cfg.dim,
        "delta_w": cfg.delta_w,
        "grid_points": cfg.grid_points,
        "config": cfg.as_dict(),
        "argmin_weights": rows[argmin]["weights"],
        "argmin_volume": rows[argmin]["analytic_volume"],
        "rows": rows,
        "seed": cfg.seed,
        "wall_time_s": time.perf_counter() - start,
    }
    _check_finite(report, "report")
    return report


# --- error-volume and mub reports ---------------------------------------------

def validate_volume_config(raw: dict, seed_override: int | None = None) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a JSON object")
    _reject_unknown(
        raw, "", {"version", "dim", "delta_w", "probe", "empirical", "seed",
                  "output", "format"},
    )
    version = _as_int(_require(raw, "", "version"), "version")
    if version != SCHEMA_VERSION:
        raise ConfigError("version", f"unsupported schema version {version}")
    dim = _as_int(_require(raw, "", "dim"), "dim", minimum=2)
    out = {
        "version": SCHEMA_VERSION,
        "dim": dim,
        "delta_w": _as_number(_require(raw, "", "delta_w"), "delta_w", positive=True),
        "probe": _validate_probe(_require(raw, "", "probe"), "probe", dim, "lb"),
        "seed": _as_int(raw.get("seed", 0), "seed"),
        "format": _as_choice(raw.get("format", "json"), "format", FORMATS),
        "output": raw.get("output"),
    }
    empirical = raw.get("empirical")
    if empirical is not None:
        if not isinstance(empirical, dict):
            raise ConfigError("empirical", "expected an object or null")
        _reject_unknown(empirical, "empirical", {"repetitions", "ensemble_size", "state"})
        out["empirical"] = {
            "repetitions": _as_int(_require(empirical, "empirical", "repetitions"),
                                   "empirical.repetitions", minimum=dim * dim),
            "ensemble_size": _as_int(_require(empirical, "empirical", "ensemble_size"),
                                     "empirical.ensemble_size", minimum=1),
            "state": _validate_state(_require(empirical, "empirical", "state"),
                                     "empirical.state", dim),
        }
    else:
        out["empirical"] = None
    if seed_override is not None:
        out["seed"] = seed_override
    return out


def run_error_volume(cfg: dict) -> dict:
    start = time.perf_counter()
    dim = cfg["dim"]
    flat = flat_metric(dim)
    a_basis = computational_basis(dim)
    probe = _lb_probe_from_spec(cfg["probe"], a_basis)
    lb_cfg = LBConfiguration.build(a_basis, probe)
    weights = lb_cfg.overlap_weights
    analytic = error_volume_from_weights(weights, cfg["delta_w"], flat)
    empirical = None
    if cfg["empirical"] is not None:
        truth = _state_from_spec(cfg["empirical"]["state"], dim)
        coords = []
        for rep in range(cfg["empirical"]["repetitions"]):
            noise = NoiseModel(
                delta_w=cfg["delta_w"],
                ensemble_size=cfg["empirical"]["ensemble_size"],
                seed=derive_seed(cfg["seed"], rep),
            )
            coords.append(lb_weak_coordinates(lb_simulated_weak_data(truth, lb_cfg, noise)))
        empirical = _empirical_volume_from_coords(
            coords, float(np.sqrt(metric_det_from_weights(weights, flat)))
        )
    report = {
        "version": SCHEMA_VERSION,
        "kind": "error-volume",
        "dim": dim,
        "delta_w": cfg["delta_w"],
        "config": {k: v for k, v in cfg.items() if v is not None or k == "empirical"},
        "overlap_weights": [float(w) for w in weights],
        "metric_det_sqrt": flat.det_sqrt,
        "weak_metric_det": metric_det_from_weights(weights, flat),
        "analytic_error_volume": analytic,
        "empirical_error_volume": empirical,
        "seed": cfg["seed"],
        "wall_time_s": time.perf_counter() - start,
    }
    _check_finite(report, "report")
    return report


def run_mub(dim: int) -> dict:
    """Construct the prime-dimension family and tabulate its deviations."""
    start = time.perf_counter()
    family = mub_prime(dim)
    bases = [
        [[[float(a.real), float(a.imag)] for a in state.amplitudes] for state in basis]
        for basis in family.bases
    ]
    report = {
        "version": SCHEMA_VERSION,
        "kind": "mub",
        "dim": dim,
        "basis_count": family.count,
        "max_pairwise_deviation": family_max_deviation(family),
        "bases": bases,
        "wall_time_s": time.perf_counter() - start,
    }
    _check_finite(report, "report")
    return report


# --- serialization -------------------------------------------------------------

def _check_finite(value, path: str) -> None:
    """All numeric report fields must be finite."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value at {path}: {value!r}")
        return
    if isinstance(value, dict):
        for key, item in value.items():
            _check_finite(item, f"{path}.{key}")
        return
    if isinstance(value, (list, tuple)):
        for k, item in enumerate(value):
            _check_finite(item, f"{path}[{k}]")
        return
    raise ValueError(f"unserializable value at {path}: {type(value)}")


def write_report_json(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, allow_nan=False)
        fh.write("\n")


def read_report_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _flatten(report: dict, prefix: str = "") -> list[tuple[str, Any]]:
    rows = []
    for key, value in report.items():
        name = f"{prefix}.{key}" if prefix else key
        if isinstance(value, dict):
            rows.extend(_flatten(value, name))
        else:
            rows.append((name, value))
    return rows


def _unflatten(rows: list[tuple[str, Any]]) -> dict:
    out: dict[str, Any] = {}
    for name, value in rows:
        parts = name.split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def write_report_csv(report: dict, path) -> None:
    """Key/value CSV with JSON-encoded cells; exact round trip."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["key", "value"])
        for name, value in _flatten(report):
            writer.writerow([name, json.dumps(value, allow_nan=False)])


def read_report_csv(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["key", "value"]:
            raise ValueError(f"unexpected CSV header {header!r}")
        rows = [(name, json.loads(cell)) for name, cell in reader]
    return _unflatten(rows)


def write_scan_csv(report: dict, path) -> None:
    """Tabular CSV for optimality scans: one row per simplex grid point."""
    dim = report["dim"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [f"c_sq_{k}" for k in range(dim)] + ["analytic_volume", "empirical_volume", "is_argmin"]
        )
        for row in report["rows"]:
            cells = [repr(w) for w in row["weights"]]
            cells.append(repr(row["analytic_volume"]))
            cells.append("" if row["empirical_volume"] is None else repr(row["empirical_volume"]))
            cells.append("true" if row["is_argmin"] else "false")
            writer.writerow(cells)


def read_scan_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_weights = sum(1 for name in header if name.startswith("c_sq_"))
        rows = []
        for cells in reader:
            rows.append({
                "weights": [float(v) for v in cells[:n_weights]],
                "analytic_volume": float(cells[n_weights]),
                "empirical_volume": None if cells[n_weights + 1] == "" else float(cells[n_weights + 1]),
                "is_argmin": cells[n_weights + 2] == "true",
            })
    return rows
