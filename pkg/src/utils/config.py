"""
Numeric policy and its resolution from .env, YAML profiles and CLI flags
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, field_validator

load_dotenv()

logger = logging.getLogger(__name__)

ENV_KEYS = {
    "rank": "FT_TOL_RANK",
    "psd": "FT_TOL_PSD",
    "eq": "FT_TOL_EQ",
    "max_iter": "FT_MAX_ITER",
    "conv": "FT_TOL_CONV",
}


class Tolerances(BaseModel):
    """
    Numeric policy threaded through every operation.

    rank: relative singular-value cutoff
    psd: allowed relative negative eigenvalue slack
    eq: relative matrix-equality slack
    max_iter: iteration cap
    conv: iteration stopping threshold
    """

    model_config = ConfigDict(frozen=True)

    rank: float = 1e-10
    psd: float = 1e-9
    eq: float = 1e-9
    max_iter: int = 10000
    conv: float = 1e-12

    @field_validator("rank", "psd", "eq", "conv")
    @classmethod
    def _strictly_positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerances must be strictly positive")
        return value

    @field_validator("max_iter")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("max_iter must be >= 1")
        return value

    def tightened(self, factor: float = 100.0) -> "Tolerances":
        """Same policy with every slack divided by factor (iteration cap unchanged)"""
        return Tolerances(
            rank=self.rank / factor,
            psd=self.psd / factor,
            eq=self.eq / factor,
            max_iter=self.max_iter,
            conv=self.conv / factor,
        )


def _from_env() -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for field, env_key in ENV_KEYS.items():
        raw = os.getenv(env_key)
        if raw:
            values[field] = raw
    return values


def _from_yaml(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"tolerance profile {path} must be a mapping")
    unknown = set(data) - set(ENV_KEYS)
    if unknown:
        raise ValueError(f"unknown tolerance keys in {path}: {sorted(unknown)}")
    return data


def load_tolerances(
    profile: Optional[Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Tolerances:
    """
    Resolve the tolerance record.

    Precedence: overrides (CLI flags) > YAML profile > environment > defaults.
    None-valued overrides are ignored.
    """
    values = _from_env()
    if profile is not None:
        values.update(_from_yaml(profile))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    tol = Tolerances(**values)
    logger.debug(f"Resolved tolerances: {tol.model_dump()}")
    return tol


def default_workers() -> int:
    return max(1, int(os.getenv("FT_WORKERS", "1")))
