"""
Run configuration for the biham command line.

Values are resolved per key: command-line flag, then environment variable
BIHAM_<KEY>, then the JSON file given by --config, then the field default.
"""

import json
import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError, field_validator

from ..errors import ConfigurationError

logger = logging.getLogger(__name__)

ENV_PREFIX = "BIHAM_"


class Suite(str, Enum):
    JACOBI = "jacobi"
    BRACKETS = "brackets"
    REDUCTION = "reduction"
    HIERARCHY = "hierarchy"
    REALFORMS = "realforms"
    HEISENBERG = "heisenberg"
    ALL = "all"


class SliceChoice(str, Enum):
    HYPERBOLIC = "hyp"
    TRIGONOMETRIC = "trig"
    BOTH = "both"


def parse_complex_pair(value: Any) -> Tuple[float, float]:
    """Accept "re,im", "re", a number, or a two-element sequence."""
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
        if len(parts) not in (1, 2):
            raise ValueError(f"Expected RE or RE,IM, got {value!r}")
        nums = [float(p) for p in parts]
        return (nums[0], nums[1] if len(nums) == 2 else 0.0)
    if isinstance(value, complex):
        return (value.real, value.imag)
    if isinstance(value, (int, float)):
        return (float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return (float(value[0]), float(value[1]))
    raise ValueError(f"Cannot read a complex number from {value!r}")


class RunConfig(BaseModel):
    """Validated settings shared by all subcommands."""

    n: int = Field(3, description="Matrix size")
    seed: int = Field(42, ge=0, lt=2**64, description="Root seed of all random trials")
    trials: int = Field(100, description="Random trials per identity")
    tol: float = Field(1e-10, description="Tolerance of the floating-point identities")
    tol_reg: float = Field(1e-8, description="Minimal eigenvalue gap of regular elements")
    fd_step: Optional[float] = Field(None, description="Finite-difference step; None means 1e-5 * (1 + |p|)")
    suite: Suite = Field(Suite.ALL, description="Verification suite to run")
    slice: SliceChoice = Field(SliceChoice.BOTH, description="Real slice for the realforms suite")
    radius: float = Field(0.2, description="Sampling radius around the identity on the double")
    m: int = Field(1, description="Hamiltonian index of the flow")
    z_end: Tuple[float, float] = Field((0.5, 0.0), description="Flow endpoint as (re, im)")
    steps: int = Field(1000, description="Integrator steps")
    initial: Optional[Path] = Field(None, description="Initial point file for evolve")
    point: Optional[Path] = Field(None, description="Point file for reduce")
    out: Optional[Path] = Field(None, description="Output file; stdout when absent")
    format: str = Field("json", description="Output format")
    workers: int = Field(1, description="Worker processes")
    max_triples: Optional[int] = Field(None, description="Seeded subset size for Jacobi sweeps")
    metrics_file: Optional[Path] = Field(None, description="Prometheus text file to write")
    log_level: str = Field("INFO", description="Logging level")
    observables: List[str] = Field(default_factory=list, description="Extra observables recorded by evolve")

    @field_validator("n")
    @classmethod
    def _check_n(cls, v: int) -> int:
        if v < 2:
            raise ValueError(f"n must be >= 2, got {v}")
        return v

    @field_validator("trials", "workers", "steps", "m")
    @classmethod
    def _check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v

    @field_validator("tol")
    @classmethod
    def _check_tol(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"tol must lie in (0, 1), got {v}")
        return v

    @field_validator("tol_reg")
    @classmethod
    def _check_tol_reg(cls, v: float) -> float:
        if v <= 0.0:
            raise ValueError(f"tol_reg must be positive, got {v}")
        return v

    @field_validator("fd_step")
    @classmethod
    def _check_fd_step(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0.0 < v <= 1e-2:
            raise ValueError(f"fd_step must lie in (0, 1e-2], got {v}")
        return v

    @field_validator("radius")
    @classmethod
    def _check_radius(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"radius must lie in (0, 1), got {v}")
        return v

    @field_validator("max_triples")
    @classmethod
    def _check_max_triples(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(f"max_triples must be >= 1, got {v}")
        return v

    @field_validator("format")
    @classmethod
    def _check_format(cls, v: str) -> str:
        if v != "json":
            raise ValueError(f"Only the json format is supported, got {v!r}")
        return v

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level {v!r}")
        return level

    @field_validator("z_end", mode="before")
    @classmethod
    def _parse_z_end(cls, v: Any) -> Tuple[float, float]:
        return parse_complex_pair(v)

    @field_validator("observables", mode="before")
    @classmethod
    def _split_observables(cls, v: Any) -> Any:
        if isinstance(v, str):
            return [part for part in v.split(";") if part.strip()]
        return v

    @property
    def z_end_complex(self) -> complex:
        return complex(self.z_end[0], self.z_end[1])


CONFIG_KEYS = tuple(RunConfig.model_fields)


def read_config_file(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {path} must hold a JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f"Unknown config keys in {path}: {unknown}")
    return data


def read_environment(environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for key in CONFIG_KEYS:
        name = f"{ENV_PREFIX}{key.upper()}"
        raw = environ.get(name) if environ is not None else os.getenv(name)
        if raw is not None and raw != "":
            values[key] = raw
    return values


def resolve_config(flags: Mapping[str, Any], config_file: Optional[Path] = None,
                   environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Merge settings by precedence and validate them.

    Args:
        flags: Values given on the command line; None means not given
        config_file: Optional JSON file with the same keys
        environ: Environment mapping (defaults to os.environ)

    Returns:
        Validated RunConfig

    Raises:
        ConfigurationError: If any source is unreadable or a value is invalid
    """
    merged: Dict[str, Any] = {}
    merged.update(read_config_file(config_file))
    merged.update(read_environment(environ))
    merged.update({k: v for k, v in flags.items() if k in CONFIG_KEYS and v is not None})
    try:
        config = RunConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e
    logger.debug(f"Resolved configuration: {config.model_dump()}")
    return config
