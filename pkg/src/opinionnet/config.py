"""Run configuration: YAML in, validated RunConfig out.

Every key has a default, so the empty document is a complete configuration.
Unknown keys are rejected to catch typos. External angles are degrees;
conversion to radians happens when building the ExperimentSpec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .experiments import ExperimentSpec, PopulationSpec
from .graph import KatzParams

CONFIG_FORMAT_VERSION = 1


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


@dataclass
class RunConfig:
    """Full sweep configuration plus output plumbing (angles in degrees)."""

    n: int = 100
    mu_deg: float = 90.0
    sigma_deg: list[float] = field(default_factory=lambda: [10.0, 15.0, 20.0, 25.0])
    theta_r_deg: list[float] = field(default_factory=lambda: [10.0, 30.0])
    theta_f_deg: list[float] = field(default_factory=lambda: [40.0, 80.0])
    rigid_fractions: list[float] = field(
        default_factory=lambda: [round(0.1 * k, 1) for k in range(11)]
    )
    runs_per_cell: int = 100
    seed: int = 0
    out_degree_cap: int = 25
    k_c: float = 100.0
    p_nd: float = 0.5
    consensus_delta_deg: float = 0.1
    eps_deg: float = math.degrees(1e-6)
    t_max: int = 250
    katz_alpha_fraction: float = 0.9
    katz_beta: float = 1.0
    self_weight_clamp: list[float] = field(default_factory=lambda: [0.05, 0.95])
    update_mode: str = "in_place"
    out_dir: str = "results"
    snapshot_every: int = 5
    plots: bool = True
    workers: int = 1

    def experiment_spec(self) -> ExperimentSpec:
        return ExperimentSpec(
            sigmas_deg=list(self.sigma_deg),
            theta_rs_deg=list(self.theta_r_deg),
            theta_fs_deg=list(self.theta_f_deg),
            rigid_fractions=list(self.rigid_fractions),
            runs_per_cell=self.runs_per_cell,
            base_seed=self.seed,
            n=self.n,
            mu_deg=self.mu_deg,
            out_degree_cap=self.out_degree_cap,
            k_c=self.k_c,
            consensus_delta=math.radians(self.consensus_delta_deg),
            eps=math.radians(self.eps_deg),
            t_max=self.t_max,
            p_nd=self.p_nd,
            katz=KatzParams(
                beta=self.katz_beta,
                alpha_fraction=self.katz_alpha_fraction,
                clamp_lo=self.self_weight_clamp[0],
                clamp_hi=self.self_weight_clamp[1],
            ),
            update_mode=self.update_mode,
        )

    def population_spec(
        self,
        sigma_deg: float | None = None,
        theta_r_deg: float | None = None,
        theta_f_deg: float | None = None,
        rigid_fraction: float | None = None,
    ) -> PopulationSpec:
        """Single-run population: first grid value of each dimension unless overridden."""
        return PopulationSpec(
            n=self.n,
            mu_deg=self.mu_deg,
            sigma_deg=self.sigma_deg[0] if sigma_deg is None else sigma_deg,
            rigid_fraction=(
                self.rigid_fractions[0] if rigid_fraction is None else rigid_fraction
            ),
            theta_r_deg=self.theta_r_deg[0] if theta_r_deg is None else theta_r_deg,
            theta_f_deg=self.theta_f_deg[0] if theta_f_deg is None else theta_f_deg,
        )


_LIST_KEYS = {"sigma_deg", "theta_r_deg", "theta_f_deg", "rigid_fractions", "self_weight_clamp"}


def _as_float_list(key: str, value) -> list[float]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a number or a non-empty list of numbers")
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{key}: expected numbers, got {item!r}")
        out.append(float(item))
    return out


def _as_int(key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _as_float(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def validate_config(raw: dict) -> RunConfig:
    """Apply defaults, coerce types, and range-check every field."""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("configuration document must be a mapping")
    raw = dict(raw)
    raw.pop("format_version", None)
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")

    cfg = RunConfig()
    for key, value in raw.items():
        if key in _LIST_KEYS:
            setattr(cfg, key, _as_float_list(key, value))
        elif key in ("n", "runs_per_cell", "seed", "out_degree_cap", "t_max", "snapshot_every", "workers"):
            setattr(cfg, key, _as_int(key, value))
        elif key in ("mu_deg", "k_c", "p_nd", "consensus_delta_deg", "eps_deg",
                     "katz_alpha_fraction", "katz_beta"):
            setattr(cfg, key, _as_float(key, value))
        elif key == "plots":
            if not isinstance(value, bool):
                raise ConfigError(f"plots: expected a boolean, got {value!r}")
            cfg.plots = value
        elif key in ("update_mode", "out_dir"):
            if not isinstance(value, str):
                raise ConfigError(f"{key}: expected a string, got {value!r}")
            setattr(cfg, key, value)

    _check_ranges(cfg)
    return cfg


def _check_ranges(cfg: RunConfig) -> None:
    def require(ok: bool, message: str):
        if not ok:
            raise ConfigError(message)

    require(cfg.n >= 2, f"n: need at least 2 agents, got {cfg.n}")
    require(0.0 < cfg.mu_deg < 180.0, f"mu_deg: must be in (0, 180), got {cfg.mu_deg}")
    require(all(s > 0 for s in cfg.sigma_deg),
            f"sigma_deg: spreads must be positive, got {cfg.sigma_deg}")
    require(all(t >= 0 for t in cfg.theta_r_deg),
            f"theta_r_deg: tolerances must be >= 0, got {cfg.theta_r_deg}")
    require(min(cfg.theta_f_deg) > max(cfg.theta_r_deg),
            f"theta_f_deg: every flexible tolerance must exceed every rigid one, "
            f"got theta_r_deg={cfg.theta_r_deg}, theta_f_deg={cfg.theta_f_deg}")
    require(all(0.0 <= x <= 1.0 for x in cfg.rigid_fractions),
            f"rigid_fractions: must lie in [0, 1], got {cfg.rigid_fractions}")
    require(cfg.runs_per_cell >= 1, "runs_per_cell: must be >= 1")
    require(cfg.out_degree_cap >= 1, "out_degree_cap: must be >= 1")
    require(cfg.k_c > 0, f"k_c: must be positive, got {cfg.k_c}")
    require(0.0 <= cfg.p_nd <= 1.0, f"p_nd: must be in [0, 1], got {cfg.p_nd}")
    require(cfg.consensus_delta_deg > 0,
            f"consensus_delta_deg: must be positive, got {cfg.consensus_delta_deg}")
    require(cfg.eps_deg >= 0, f"eps_deg: must be >= 0, got {cfg.eps_deg}")
    require(cfg.t_max >= 1, f"t_max: must be >= 1, got {cfg.t_max}")
    require(0.0 < cfg.katz_alpha_fraction < 1.0,
            f"katz_alpha_fraction: must be in (0, 1), got {cfg.katz_alpha_fraction}")
    require(cfg.katz_beta > 0, f"katz_beta: must be positive, got {cfg.katz_beta}")
    require(
        len(cfg.self_weight_clamp) == 2
        and 0.0 < cfg.self_weight_clamp[0] < cfg.self_weight_clamp[1] < 1.0,
        f"self_weight_clamp: expected [lo, hi] with 0 < lo < hi < 1, got {cfg.self_weight_clamp}",
    )
    require(cfg.update_mode in ("in_place", "frozen"),
            f"update_mode: must be 'in_place' or 'frozen', got {cfg.update_mode!r}")
    require(cfg.snapshot_every >= 1, "snapshot_every: must be >= 1")
    require(cfg.workers >= 1, "workers: must be >= 1")


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a YAML configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    try:
        return validate_config(raw)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def default_config() -> RunConfig:
    return RunConfig()


def dump_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig to YAML (round-trips through parse_config)."""
    doc = {"format_version": CONFIG_FORMAT_VERSION}
    for f in fields(RunConfig):
        doc[f.name] = getattr(cfg, f.name)
    return yaml.safe_dump(doc, sort_keys=False)
