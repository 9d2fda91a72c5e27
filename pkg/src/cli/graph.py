from __future__ import annotations

import logging
from typing import Any, Dict, Optional

from src.cli._common import EXIT_OK, RunContext
from src.lib import interaction_graph
from src.lib.errors import InsufficientDataError
from src.lib.inverter_registry import get_inverter
from src.services import data_io

logger = logging.getLogger(__name__)


def run_mst(ctx: RunContext) -> int:
    """MST of a model JSON, or of a model fitted to a spin CSV, as JSON plus DOT."""
    cfg = ctx.config
    assert cfg.input is not None
    # a .json input is a model; anything else is spin data fitted first
    if cfg.input.suffix.lower() == ".json":
        model = data_io.read_model(cfg.input)
        source = "model"
    else:
        options = ctx.inversion()
        model = get_inverter(options.method).invert(data_io.read_spins(cfg.input), options).model
        source = f"fit:{options.method}"

    tree = interaction_graph.minimum_spanning_tree(interaction_graph.coupling_to_distance(model))
    metadata = ctx.metadata(source=source, distance=interaction_graph.DISTANCE_MAP)
    ctx.output.write_text(interaction_graph.export_tree(tree, model.labels, "json", metadata), encoding="utf-8")
    ctx.sidecar("tree", ".dot").write_text(interaction_graph.export_tree(tree, model.labels, "dot"), encoding="utf-8")
    print(f"MST on {tree.n_vertices} vertices, length {tree.length:.6g}")
    return EXIT_OK


def run_degrees(ctx: RunContext) -> int:
    """Degree frequencies of a tree JSON (or a frequencies JSON) and their power-law fit."""
    cfg = ctx.config
    assert cfg.input is not None
    data = data_io.read_json(cfg.input)
    if "nodes" in data and "edges" in data:
        tree, _ = interaction_graph.read_tree(cfg.input.read_text(encoding="utf-8"))
        freqs = interaction_graph.degree_distribution(tree)
    else:
        freqs = data_io.read_frequencies(cfg.input)

    # too few usable degrees is not an error: the frequencies are still written
    fit: Optional[Dict[str, Any]]
    try:
        result = interaction_graph.fit_power_law(freqs)
        fit = {
            "alpha": result.alpha,
            "alpha_stderr": result.alpha_stderr,
            "r2": result.r2,
            "points_used": result.points_used,
            "intercept": result.intercept,
        }
    except InsufficientDataError as exc:
        logger.warning("no power-law fit: %s", exc)
        fit = None

    data_io.write_json(
        {
            "frequencies": {str(k): v for k, v in sorted(freqs.items())},
            "vertices": sum(freqs.values()),
            "degree_sum": sum(k * v for k, v in freqs.items()),
            "power_law": fit,
            "metadata": ctx.metadata(),
        },
        ctx.output,
    )
    print("alpha = n/a" if fit is None else f"alpha = {fit['alpha']:.6g} (r2 {fit['r2']:.4f})")
    return EXIT_OK
