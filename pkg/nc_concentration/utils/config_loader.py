from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field


def _project_root() -> Path:
    # .../utils/config_loader.py -> parents[1] == package root
    return Path(__file__).resolve().parents[1]


def load_config(config_path: str | None = None) -> dict:
    """
    Resolve config path reliably irrespective of CWD.
    Priority: explicit arg > NC_CONFIG_PATH env > <package_root>/config/config.yaml
    """
    env_path = os.getenv("NC_CONFIG_PATH")
    if config_path is None:
        config_path = env_path or str(_project_root() / "config" / "config.yaml")

    path = Path(config_path)
    if not path.is_absolute():
        path = _project_root() / path

    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


class ConstantsSettings(BaseModel):
    C: float = Field(2.0, gt=0)


class MonteCarloSettings(BaseModel):
    confidence: float = Field(0.999, gt=0, lt=1)
    min_trials: int = Field(100, ge=1)
    debug_checks: bool = False


class SpectralSettings(BaseModel):
    symmetry_tol: float = Field(1e-8, gt=0)
    max_dim: int = Field(256, ge=1)
    psd_tol: float = Field(1e-12, ge=0)


class SolverSettings(BaseModel):
    rho: float = Field(1.0, gt=0)
    max_iter: int = Field(50000, ge=1)
    tol_primal: float = Field(1e-9, gt=0)
    tol_dual: float = Field(1e-9, gt=0)
    exact_threshold: float = Field(1e-6, gt=0)


class RipSettings(BaseModel):
    enumeration_budget: int = Field(1_000_000, ge=1)


class LegendreSettings(BaseModel):
    lam_lo: float = -50.0
    lam_hi: float = 50.0
    grid_n: int = Field(2001, ge=3)
    refine_tol: float = Field(1e-10, gt=0)


class RuntimeSettings(BaseModel):
    threads: int = Field(0, ge=0)


class ReportSettings(BaseModel):
    schema_version: str = "1.0"


class Settings(BaseModel):
    constants: ConstantsSettings = ConstantsSettings()
    monte_carlo: MonteCarloSettings = MonteCarloSettings()
    spectral: SpectralSettings = SpectralSettings()
    solver: SolverSettings = SolverSettings()
    rip: RipSettings = RipSettings()
    legendre: LegendreSettings = LegendreSettings()
    runtime: RuntimeSettings = RuntimeSettings()
    report: ReportSettings = ReportSettings()


def _apply_env_overrides(raw: dict) -> dict:
    threads = os.getenv("NC_THREADS")
    if threads not in (None, ""):
        raw.setdefault("runtime", {})["threads"] = int(threads)
    debug = os.getenv("NC_DEBUG")
    if debug not in (None, ""):
        raw.setdefault("monte_carlo", {})["debug_checks"] = debug.lower() in ("1", "true", "yes")
    return raw


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Validated settings: YAML file, then environment overrides."""
    if os.getenv("ENV", "local").lower() != "production":
        load_dotenv()
    return Settings.model_validate(_apply_env_overrides(load_config()))


def reset_settings() -> None:
    get_settings.cache_clear()
