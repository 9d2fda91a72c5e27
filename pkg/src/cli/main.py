from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from src.cli._common import EXIT_INPUT, EXIT_REGISTER, RunContext
from src.cli.fit import run_diagnose, run_fit
from src.cli.graph import run_degrees, run_mst
from src.cli.ingest import run_ingest
from src.cli.sample import run_sample, run_synth
from src.cli.window import run_window
from src.lib.errors import MaxentError
from src.lib.market_analytics import DEFAULT_WINDOWS
from src.services import config_manager
from src.services.auto_register import AutoRegisterError, auto_register_inverters
from src.services.data_io import DataIOError
from src.services.run_metadata import resolve_seed
from src.services.validation_engine import ValidationError, validate_run_config

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
THREADS_ENV = "MAXENT_MARKET_THREADS"

COMMANDS: Dict[str, Callable[[RunContext], int]] = {
    "ingest": run_ingest,
    "fit": run_fit,
    "sample": run_sample,
    "diagnose": run_diagnose,
    "window": run_window,
    "mst": run_mst,
    "degrees": run_degrees,
    "synth": run_synth,
}

RANDOMIZED = ("sample", "synth")


def _common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="TOML or JSON run configuration; flags override its values")
    p.add_argument("--input", help="Input file")
    p.add_argument("--output", help="Primary output file")
    p.add_argument("--model", help="Model JSON (diagnose, synth)")
    p.add_argument("--method", choices=["exact", "nmf", "tap", "tanaka", "rplm"])
    p.add_argument("--width", type=int, help="Window width in trading days")
    p.add_argument("--shift", type=int, help="Shift between window starts in trading days")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help=f"Worker threads (fallback: ${THREADS_ENV}, then 1)")
    p.add_argument("--kind", help="Window series kind")
    p.add_argument("--smooth", type=int, help="Half width of the centered moving average")
    p.add_argument("--normalize", action="store_true", default=None)
    p.add_argument("--ridge", type=float, help="Covariance ridge for mean-field inversions")
    p.add_argument(
        "--lambda",
        dest="rplm_lambda",
        type=float,
        help="rPLM L2 penalty, weighed against the summed (not per-sample) pseudo-log-likelihood",
    )
    p.add_argument("--count", type=int, help="Configurations to draw (synth)")
    p.add_argument("--n", dest="n_spins", type=int, help="Number of spins of a synthetic model")
    p.add_argument("--coupling-scale", type=float)
    p.add_argument("--field-scale", type=float)
    p.add_argument("--tolerance", type=float, help="Moment tolerance of the exact fit")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--bin-width", type=float)
    p.add_argument("--equilibration", type=int, help="Equilibration sweeps")
    p.add_argument("--measure", type=int, help="Measurement sweeps")
    p.add_argument("--thinning", type=int, help="Sweeps between retained samples")
    p.add_argument("--chains", type=int, help="Independent chains pooled by sample (default 1)")
    p.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxent-market")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    helps = {
        "ingest": "binarize a price CSV into a spin CSV",
        "fit": "fit a pairwise model to a spin CSV",
        "sample": "Monte Carlo moments of a model",
        "diagnose": "KL divergences and multi-information of a model against data",
        "window": "sliding-window market series",
        "mst": "minimum spanning tree of the interaction graph",
        "degrees": "degree distribution and power-law fit of a tree",
        "synth": "synthetic spin data from a pairwise model",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _path(value: Optional[str]) -> Optional[Path]:
    return Path(value) if value is not None else None


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "command": args.command,
        "input": _path(args.input),
        "output": _path(args.output),
        "model": _path(args.model),
        "method": args.method,
        "inversion": {"ridge": args.ridge, "rplm_lambda": args.rplm_lambda},
        "window": {"width": args.width, "shift": args.shift},
        "chain": {
            "equilibration_sweeps": args.equilibration,
            "measure_sweeps": args.measure,
            "thinning": args.thinning,
            "chains": args.chains,
        },
        "kind": args.kind,
        "smooth": args.smooth,
        "normalize": args.normalize,
        "seed": args.seed,
        "threads": args.threads,
        "count": args.count,
        "n_spins": args.n_spins,
        "coupling_scale": args.coupling_scale,
        "field_scale": args.field_scale,
        "tolerance": args.tolerance,
        "max_iterations": args.max_iterations,
        "bin_width": args.bin_width,
    }


def _fill_window_defaults(data: Dict[str, Any]) -> None:
    kind = data.get("kind")
    if data.get("command") != "window" or kind not in DEFAULT_WINDOWS:
        return
    width, shift = DEFAULT_WINDOWS[kind]
    window = dict(data.get("window") or {})
    window.setdefault("width", width)
    window.setdefault("shift", shift)
    data["window"] = window


def resolve_threads(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if value < 1:
            raise ValidationError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return value
    return 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr)

    # File values first, then every flag that was actually given on top of
    # them; argparse leaves absent flags as None so merge() skips those.
    # Window kinds without --width/--shift fall back to their own defaults.
    try:
        file_data = config_manager.load_raw(args.config) if args.config else {}
        data = config_manager.merge(file_data, _overrides(args))
        _fill_window_defaults(data)
        cfg = config_manager.validate(data)
    except config_manager.ConfigManagerError as exc:
        # unreadable file or a value pydantic rejects: exit 2
        print(f"error loading config: {exc}")
        return EXIT_INPUT

    # Cross-field checks (inputs exist, command needs) and the thread
    # fallback chain --threads, $MAXENT_MARKET_THREADS, 1.
    try:
        validate_run_config(cfg)
        threads = resolve_threads(cfg.threads)
    except ValidationError as exc:
        print(f"config validation failed: {exc}")
        return EXIT_INPUT

    assert cfg.output is not None
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    # Inverters register themselves at start-up. A broken module writes
    # diagnostics next to the output and the run stops with exit 4 before
    # any command code runs.
    try:
        auto_register_inverters(diagnostics_path=cfg.output.parent / "auto_register_diagnostics.json")
    except AutoRegisterError:
        print("auto-registration failed; see diagnostics in output dir")
        return EXIT_REGISTER

    # Randomized commands always run from a recorded seed; without --seed one
    # is drawn from the OS and logged so the run can be repeated.
    seed = resolve_seed(cfg.seed) if cfg.command in RANDOMIZED else cfg.seed
    if cfg.command in RANDOMIZED and cfg.seed is None:
        logger.warning("no --seed given; using generated seed %d", seed)
    ctx = RunContext(config=cfg, seed=seed, threads=threads)

    # Commands return 0, or 3 when a fit did not converge (outputs are still
    # written). Domain and I/O errors raised inside them map to exit 2.
    try:
        return COMMANDS[cfg.command](ctx)
    except (MaxentError, DataIOError, ValueError) as exc:
        print(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
