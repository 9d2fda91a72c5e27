from __future__ import annotations

from src.cli._common import EXIT_OK, RunContext
from src.lib.spin_data import binarize
from src.services import data_io


def run_ingest(ctx: RunContext) -> int:
    """Price CSV -> spin CSV plus an ingest report."""
    assert ctx.config.input is not None
    prices, report = data_io.read_prices(ctx.config.input)
    # rows with missing quotes are already gone; their dates go to the report sidecar
    spins = binarize(prices)
    data_io.write_spins(spins, ctx.output)
    data_io.write_json(
        dict(report.as_dict(), labels=list(spins.labels), metadata=ctx.metadata()),
        ctx.sidecar("report"),
    )
    print(f"ingested {spins.n_samples} days x {spins.n_spins} assets ({len(report.dropped_dates)} rows dropped)")
    return EXIT_OK
