from __future__ import annotations

from typing import Dict

from src.models.run_config import RunConfig


class ValidationError(Exception):
    """Raised when validation fails."""


# Commands and the input each one reads.
_INPUT_KIND: Dict[str, str] = {
    "ingest": "price CSV",
    "fit": "spin CSV",
    "sample": "model JSON",
    "diagnose": "spin CSV",
    "window": "spin CSV",
    "mst": "model JSON or spin CSV",
    "degrees": "tree JSON or frequencies JSON",
}


def validate_run_config(config: RunConfig) -> bool:
    """Check command-specific requirements a schema alone cannot express.

    Returns True on success or raises ValidationError on failure. The N <= 25
    guard of exact enumeration is left to the engine, which knows N.
    """
    if not isinstance(config, RunConfig):
        raise ValidationError("config must be a RunConfig instance")

    command = config.command
    if command in _INPUT_KIND:
        if config.input is None:
            raise ValidationError(f"{command} requires --input ({_INPUT_KIND[command]})")
        if not config.input.is_file():
            raise ValidationError(f"input file not found: {config.input}")

    if config.output is None:
        raise ValidationError(f"{command} requires --output")

    if command == "diagnose":
        if config.model is None:
            raise ValidationError("diagnose requires --model (model JSON)")
        if not config.model.is_file():
            raise ValidationError(f"model file not found: {config.model}")

    if command == "synth" and config.model is None and config.n_spins is None:
        raise ValidationError("synth requires --n (number of spins) or --model")
    if command == "synth" and config.model is not None and not config.model.is_file():
        raise ValidationError(f"model file not found: {config.model}")

    if command in ("window", "mst") and config.method == "exact":
        raise ValidationError(f"{command} does not accept the exact method; choose nmf, tap, tanaka or rplm")

    if command == "window":
        if config.kind is None:
            raise ValidationError("window requires --kind")
        if config.window is None:
            raise ValidationError("window requires --width and --shift")
        if config.kind == "orientationHistogram" and config.window.shift != config.window.width:
            raise ValidationError("orientationHistogram needs non-overlapping windows (shift == width)")

    return True
