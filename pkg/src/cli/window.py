from __future__ import annotations

from src.cli._common import EXIT_OK, RunContext
from src.lib import market_analytics
from src.services import data_io


def run_window(ctx: RunContext) -> int:
    """One sliding-window series (smoothed, then normalized, when asked) or the orientation histogram."""
    cfg = ctx.config
    assert cfg.input is not None and cfg.window is not None and cfg.kind is not None
    spins = data_io.read_spins(cfg.input)

    if cfg.kind == "orientationHistogram":
        hist = market_analytics.orientation_histogram(spins, cfg.window, cfg.bin_width)
        data_io.write_json(
            {
                "kind": cfg.kind,
                "spec": cfg.window.model_dump(),
                "bin_width": cfg.bin_width,
                "bin_edges": hist.bin_edges,
                "counts": hist.counts,
                "mode_count": hist.mode_count,
                "mode_centers": list(hist.mode_centers),
                "metadata": ctx.metadata(),
            },
            ctx.output,
        )
        print(f"{hist.mode_count} mode(s) over {int(hist.counts.sum())} days")
        return EXIT_OK

    # smoothing runs before normalization
    report = market_analytics.build_series(cfg.kind, spins, cfg.window, ctx.inversion(), ctx.threads)
    if cfg.smooth:
        report = market_analytics.smooth_series(report, cfg.smooth)
    if cfg.normalize:
        report = market_analytics.normalize_series(report)
    data_io.write_series(report, ctx.output, {"metadata": ctx.metadata()})
    print(f"{cfg.kind}: {len(report.values)} windows, {len(report.gaps)} gaps")
    return EXIT_OK
