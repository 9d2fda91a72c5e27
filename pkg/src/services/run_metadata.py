"""Provenance block embedded in every output file."""

from __future__ import annotations

import hashlib
import json
from typing import Any, Dict, Optional

import numpy as np

from src import __version__
from src.models.run_config import RunConfig

TOOL_NAME = "maxent-market"


def resolve_seed(seed: Optional[int]) -> int:
    """Return `seed`, or a fresh 64-bit seed drawn from OS entropy."""
    if seed is not None:
        return int(seed)
    entropy = np.random.SeedSequence().entropy
    return int(entropy) % (1 << 64)


def config_hash(config: RunConfig) -> str:
    """SHA-256 of the canonical JSON form of the config, thread count excluded."""
    data = config.as_dict()
    data.pop("threads", None)
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run_metadata(config: RunConfig, seed: Optional[int] = None, **extra: Any) -> Dict[str, Any]:
    meta: Dict[str, Any] = {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": config.command,
        "config_hash": config_hash(config),
        "seed": config.seed if seed is None else seed,
    }
    meta.update(extra)
    return meta
