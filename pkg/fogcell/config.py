"""
Experiment configuration.

One flat set of keys drives every command. Values come from built-in defaults, then
a config file (line-oriented ``key=value`` or a flat YAML mapping), then command-line
flags.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from fogcell.exceptions import ConfigError
from fogcell.logging import get_logger
from fogcell.models.bandwidth_allocation import CellCapacity
from fogcell.models.delay_model import GRID_MIN_STEP, DelayParams, inclusive_grid
from fogcell.models.mmwave_link import LinkParams
from fogcell.models.road_topology import HopMode, Placement
from fogcell.simulation import FogCellConfig

logger = get_logger(__name__)

YAML_SUFFIXES = (".yml", ".yaml")
UINT64_MAX = 2**64 - 1


class ExperimentConfig(BaseModel):
    """Effective configuration of a run; every key has a built-in default."""

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    # mmWave link
    p_tx_dbm: float = 30.0
    theta_db: float = 10.0
    sigma_db: float = Field(5.8, ge=0)
    n0_dbm_per_hz: float = -174.0
    w_hz: float = Field(2e9, gt=0)
    range_max_m: float = Field(50.0, gt=0)

    # delay model
    t_slot_us: float = Field(5.0, gt=0)
    t_retran_us: float = Field(5.0, gt=0)
    hop_mode: HopMode = HopMode.HOMOGENEOUS

    # bandwidth
    c_total_mbps: float = Field(1000.0, gt=0)
    c_ave_mbps: float = Field(33.0, gt=0)

    # sweeps
    rho_min: float = Field(0.03, gt=0)
    rho_max: float = Field(0.20, gt=0)
    rho_step: float = Field(0.005, gt=0)
    la_list: list[float] = Field(default_factory=lambda: [300.0, 400.0, 500.0], min_length=1)
    n_max: int = Field(50, ge=1)
    trials: int = Field(100_000, ge=1)
    seed: int = Field(1, ge=0, le=UINT64_MAX)

    # calibration, targets are (L_a m, minimum delay ms)
    targets: list[tuple[float, float]] = Field(
        default_factory=lambda: [(300.0, 0.32), (400.0, 0.46), (500.0, 0.63)], min_length=1
    )
    margin_min: float = 5.0
    margin_max: float = 25.0
    margin_step: float = Field(0.5, gt=0)
    sigma_min: float = Field(2.0, ge=0)
    sigma_max: float = Field(10.0, ge=0)
    sigma_step: float = Field(0.5, gt=0)

    # mobility simulation
    road_len_m: float = Field(1000.0, gt=0)
    rsu_x_m: float = Field(500.0, ge=0)
    rsu_radius_m: float = Field(150.0, gt=0)
    arrival_placement: Placement = Placement.EQUIDISTANT
    arrival_density: float = Field(0.05, gt=0)
    v_mps: float = Field(20.0, gt=0)
    dt_s: float = Field(0.1, gt=0)
    duration_s: float = Field(200.0, ge=0)
    ctrl_period_s: float = Field(1.0, gt=0)
    max_arrivals: Optional[int] = Field(None, ge=0)

    # link check
    link_delta_min: float = Field(5.0, gt=0)
    link_delta_max: float = Field(50.0, gt=0)
    link_delta_step: float = Field(5.0, gt=0)

    @field_validator("la_list", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, (int, float)):
            return [value]
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("la_list")
    @classmethod
    def _positive_distances(cls, value: list[float]) -> list[float]:
        if any(not la > 0 for la in value):
            raise ValueError("every distance must be > 0")
        return value

    @field_validator("targets", mode="before")
    @classmethod
    def _split_targets(cls, value: Any) -> Any:
        if isinstance(value, str):
            pairs = []
            for item in value.split(","):
                if not item.strip():
                    continue
                la, sep, delay = item.partition(":")
                if not sep:
                    raise ValueError(f"expected L_a:delay_ms, got '{item.strip()}'")
                pairs.append((la.strip(), delay.strip()))
            return pairs
        if isinstance(value, dict):
            return list(value.items())
        return value

    @field_validator("targets")
    @classmethod
    def _positive_targets(cls, value: list[tuple[float, float]]) -> list[tuple[float, float]]:
        if any(not (la > 0 and delay > 0) for la, delay in value):
            raise ValueError("target distances and delays must be > 0")
        return value

    @field_validator("max_arrivals", mode="before")
    @classmethod
    def _none_means_unlimited(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() in ("none", ""):
            return None
        return value

    @model_validator(mode="after")
    def _check_cross_field(self) -> ExperimentConfig:
        for prefix in ("rho", "margin", "sigma", "link_delta"):
            low, high = getattr(self, f"{prefix}_min"), getattr(self, f"{prefix}_max")
            if high < low:
                raise ConfigError(
                    f"must be >= {prefix}_min ({low}), got {high}", key=f"{prefix}_max"
                )
            step = getattr(self, f"{prefix}_step")
            if step < GRID_MIN_STEP:
                raise ConfigError(
                    f"must be >= {GRID_MIN_STEP}, got {step}", key=f"{prefix}_step"
                )
        if self.rsu_x_m > self.road_len_m:
            raise ConfigError(
                f"must lie within the road [0, {self.road_len_m}], got {self.rsu_x_m}",
                key="rsu_x_m",
            )
        if self.ctrl_period_s < self.dt_s:
            raise ConfigError(
                f"must be >= dt_s ({self.dt_s}), got {self.ctrl_period_s}", key="ctrl_period_s"
            )
        return self

    # Derived model inputs

    @property
    def link(self) -> LinkParams:
        return LinkParams(
            p_tx_dbm=self.p_tx_dbm,
            theta_db=self.theta_db,
            sigma_db=self.sigma_db,
            n0_dbm_per_hz=self.n0_dbm_per_hz,
            w_hz=self.w_hz,
            range_max_m=self.range_max_m,
        )

    @property
    def delay_params(self) -> DelayParams:
        return DelayParams(t_slot_s=self.t_slot_us / 1e6, t_retran_s=self.t_retran_us / 1e6)

    @property
    def capacity(self) -> CellCapacity:
        return CellCapacity.from_throughput(c_total=self.c_total_mbps, c_ave=self.c_ave_mbps)

    @property
    def fogcell(self) -> FogCellConfig:
        return FogCellConfig(
            road_len_m=self.road_len_m,
            rsu_x_m=self.rsu_x_m,
            rsu_radius_m=self.rsu_radius_m,
            arrival_placement=self.arrival_placement,
            arrival_density=self.arrival_density,
            v_mps=self.v_mps,
            dt_s=self.dt_s,
            duration_s=self.duration_s,
            ctrl_period_s=self.ctrl_period_s,
            seed=self.seed,
            max_arrivals=self.max_arrivals,
        )

    @property
    def rho_grid(self) -> list[float]:
        return inclusive_grid(self.rho_min, self.rho_max, self.rho_step)

    @property
    def margin_grid(self) -> list[float]:
        return inclusive_grid(self.margin_min, self.margin_max, self.margin_step)

    @property
    def sigma_grid(self) -> list[float]:
        return inclusive_grid(self.sigma_min, self.sigma_max, self.sigma_step)

    @property
    def link_delta_grid(self) -> list[float]:
        return inclusive_grid(self.link_delta_min, self.link_delta_max, self.link_delta_step)

    @property
    def target_pairs_s(self) -> list[tuple[float, float]]:
        """Calibration targets with delays converted to seconds."""
        return [(la, delay_ms / 1e3) for la, delay_ms in self.targets]

    # Rendering

    def as_text_dict(self) -> dict[str, str]:
        """Every key rendered the way a config file spells it."""
        return {name: render_value(getattr(self, name)) for name in type(self).model_fields}

    def header_lines(self) -> list[str]:
        """Sorted ``# key=value`` lines for output headers."""
        return [f"# {key}={value}" for key, value in sorted(self.as_text_dict().items())]

    def to_fragment(self, keys: Optional[list[str]] = None) -> list[str]:
        """``key=value`` lines that :func:`parse_config` reads back."""
        rendered = self.as_text_dict()
        for key in keys or []:
            if key not in rendered:
                raise ConfigError("unknown key", key=key)
        return [f"{key}={rendered[key]}" for key in (keys or sorted(rendered))]


def render_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, tuple):
        return ":".join(render_value(v) for v in value)
    if isinstance(value, list):
        return ",".join(render_value(v) for v in value)
    return str(value)


def _read_key_value(path: Path, text: str) -> tuple[dict[str, str], dict[str, int]]:
    values: dict[str, str] = {}
    lines: dict[str, int] = {}
    known = ExperimentConfig.model_fields
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{path}: expected key=value, got '{raw.strip()}'", line_no=line_no)
        if key not in known:
            raise ConfigError(f"{path}: unknown key", key=key, line_no=line_no)
        values[key] = value.strip()
        lines[key] = line_no
    return values, lines


def _read_yaml(path: Path, text: str) -> dict[str, Any]:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line_no = mark.line + 1 if mark is not None else None
        raise ConfigError(f"{path}: invalid YAML: {e}", line_no=line_no) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping of key: value")
    for key in data:
        if key not in ExperimentConfig.model_fields:
            raise ConfigError(f"{path}: unknown key", key=str(key))
    return {str(k): v for k, v in data.items()}


def parse_config(
    path: Optional[Union[str, Path]] = None, overrides: Optional[dict[str, Any]] = None
) -> ExperimentConfig:
    """
    Build the effective configuration.

    Args:
        path: Optional config file, ``key=value`` lines or flat YAML (.yml/.yaml)
        overrides: Flag values; ``None`` entries are ignored

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigError: on unreadable files, syntax errors, unknown keys or invalid values
    """
    file_values: dict[str, Any] = {}
    line_of: dict[str, int] = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise ConfigError(f"Cannot read config file {path}: {e}") from e
        if path.suffix.lower() in YAML_SUFFIXES:
            file_values = _read_yaml(path, text)
        else:
            file_values, line_of = _read_key_value(path, text)
        logger.debug("Loaded %d keys from %s", len(file_values), path)

    flag_values = {k: v for k, v in (overrides or {}).items() if v is not None}
    for key in flag_values:
        if key not in ExperimentConfig.model_fields:
            raise ConfigError("unknown key", key=key)

    merged = {**file_values, **flag_values}
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        error = e.errors()[0]
        key = str(error["loc"][0]) if error["loc"] else None
        line_no = line_of.get(key) if key not in flag_values else None
        raise ConfigError(error["msg"], key=key, line_no=line_no) from e
