"""Configuration settings for the priority construction simulator"""

import hashlib
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError

logger = logging.getLogger(__name__)


def _load_env_files() -> None:
    """
    Load environment variables from common .env locations without overriding
    existing environment values.
    """
    candidates = [
        os.path.join(os.getcwd(), ".env"),
        os.path.join(os.getcwd(), "src", ".env"),
        os.path.join(os.getcwd(), "src", "isolation_sim", ".env"),
    ]
    for p in candidates:
        try:
            if os.path.isfile(p):
                load_dotenv(p, override=False)
        except Exception:
            # Best-effort loading; a broken .env must not stop the CLI
            pass


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=False, extra="ignore")

    # Database (run manifests and sweep cells)
    database_url: str = "sqlite:///./isolation_runs.db"
    persist_runs: bool = False

    # Logging
    log_level: str = "INFO"

    # Adversaries
    default_budget: int = 64  # emissions per adversary per stage
    default_marker_base: int = 1 << 20  # first W position used as a faithful-Φ use marker
    default_attack_limit: int = 2

    # Runs
    default_horizon: int = 200
    default_max_depth: int = 9
    runs_dir: str = "./runs"


# Load .env files before instantiating Settings so pydantic sees them
_load_env_files()
settings = Settings()


def validate_config() -> List[str]:
    """Warn about settings that make runs slow or degenerate"""
    warnings = []

    if settings.default_budget < 1:
        warnings.append("default_budget < 1 - adversaries will never emit anything")
    if settings.default_marker_base < 1024:
        warnings.append("default_marker_base is small - Φ markers may collide with attacked W positions")
    if settings.default_max_depth > 12:
        warnings.append("default_max_depth > 12 - initialization counts grow like 2^(e^2)")
    if not isinstance(logging.getLevelName(settings.log_level.upper()), int):
        warnings.append(f"unknown log_level {settings.log_level!r} - falling back to INFO")

    if warnings:
        logger.warning("⚠️  Configuration Warnings:")
        for warning in warnings:
            logger.warning(f"   - {warning}")
    return warnings


# Run validation on import
validate_config()


class AdversarySpec(BaseModel):
    """Behaviours for Ψ_e, Φ_e and Θ_e with their shared seed and per-stage budget"""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    index: int = Field(ge=0)
    psi: str = "silent"
    phi: str = "silent"
    theta: str = "silent"
    seed: int = 0
    budget: Optional[int] = Field(default=None, ge=1)
    params: Dict[str, Any] = Field(default_factory=dict)


class RunConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    max_depth: int = Field(default=settings.default_max_depth, alias="maxDepth", ge=1)
    horizon: int = Field(default=settings.default_horizon, ge=1)
    seed: int = 0
    budget: int = Field(default=settings.default_budget, ge=1)
    adversaries: List[AdversarySpec] = Field(default_factory=list)
    k_script: List[Tuple[int, int]] = Field(default_factory=list, alias="kScript")
    k_mode: Literal["scripted", "toy"] = Field(default="scripted", alias="kMode")
    k_toy_limit: int = Field(default=8, alias="kToyLimit", ge=0)

    @field_validator("k_script")
    @classmethod
    def _odd_k(cls, script: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
        for element, stage in script:
            if element < 0 or element % 2 == 0:
                raise ValueError(f"K holds only odd numbers, got {element}")
            if stage < 1:
                raise ValueError(f"K entries need a stage ≥ 1, got {stage}")
        return script

    @model_validator(mode="after")
    def _unique_indices(self) -> "RunConfig":
        indices = [spec.index for spec in self.adversaries]
        if len(indices) != len(set(indices)):
            raise ValueError(f"adversary indices must be distinct, got {indices}")
        return self

    @classmethod
    def parse(cls, data: Dict[str, Any]) -> "RunConfig":
        try:
            return cls.model_validate(data or {})
        except ValidationError as e:
            raise ConfigError(f"invalid run config: {e}") from e

    def with_seed(self, seed: int) -> "RunConfig":
        return self.model_copy(update={"seed": seed})

    def adversary(self, e: int) -> Optional[AdversarySpec]:
        return next((spec for spec in self.adversaries if spec.index == e), None)

    def to_yaml_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, mode="json")


class SweepGrid(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    max_depth: List[int] = Field(default_factory=list, alias="maxDepth")
    horizon: List[int] = Field(default_factory=list)
    mixes: Dict[str, List[AdversarySpec]] = Field(default_factory=dict)
    seeds: List[int] = Field(default_factory=list)
    k_script: List[Tuple[int, int]] = Field(default_factory=list, alias="kScript")
    k_mode: Literal["scripted", "toy"] = Field(default="scripted", alias="kMode")
    k_toy_limit: int = Field(default=8, alias="kToyLimit", ge=0)
    budget: int = Field(default=settings.default_budget, ge=1)
    workers: int = Field(default=1, ge=1)
    replay: bool = True  # re-execute each cell during verification

    @classmethod
    def parse(cls, data: Dict[str, Any]) -> "SweepGrid":
        try:
            return cls.model_validate(data or {})
        except ValidationError as e:
            raise ConfigError(f"invalid sweep grid: {e}") from e

    def is_empty(self) -> bool:
        return not (self.max_depth and self.horizon and self.mixes and self.seeds)


def _read_yaml(path: Path) -> Tuple[Dict[str, Any], str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path} is not valid YAML: {e}") from e
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a mapping at top level")
    return data or {}, text


def config_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def load_run_config(path: Path) -> Tuple[RunConfig, str]:
    """The parsed run config and the sha256 digest of the file it came from"""
    data, text = _read_yaml(path)
    return RunConfig.parse(data), config_digest(text)


def load_sweep_grid(path: Path) -> SweepGrid:
    data, _ = _read_yaml(path)
    return SweepGrid.parse(data)
