from __future__ import annotations

from typing import Any, Dict

from src.cli._common import EXIT_OK, RunContext
from src.lib import sampler
from src.models.chain_config import ChainConfig, SampleSummary
from src.services import data_io


def _chain(ctx: RunContext) -> ChainConfig:
    # the resolved seed (given or drawn) replaces whatever the schedule held
    return ctx.config.chain.model_copy(update={"seed": ctx.seed})


def _chain_metadata(chain: ChainConfig, n_spins: int, summary: SampleSummary | None = None) -> Dict[str, Any]:
    meta: Dict[str, Any] = {
        "seed": chain.seed,
        "equilibration_sweeps": chain.equilibration_sweeps,
        "measure_sweeps": chain.measure_sweeps,
        "thinning": chain.resolved_thinning(n_spins),
        "generator": sampler.generator_name(),
    }
    if summary is not None:
        meta.update(attempts=summary.attempts, acceptance_rate=summary.acceptance_rate)
    return meta


def run_sample(ctx: RunContext) -> int:
    """Monte Carlo moments of a model JSON.

    The chain count comes from the schedule; `--threads` only sizes the pool
    running them, so output does not depend on it.
    """
    assert ctx.config.input is not None
    model = data_io.read_model(ctx.config.input)
    chain = _chain(ctx)
    if chain.chains > 1:
        summary = sampler.sample_moments_parallel(model, chain, chains=chain.chains, threads=ctx.threads)
    else:
        summary = sampler.sample_moments(model, chain)
    payload = {
        "labels": list(model.labels),
        "q": summary.moments.q,
        "Q": summary.moments.Q,
        "q_stderr": summary.q_stderr,
        "Q_stderr": summary.Q_stderr,
        "retained_samples": summary.retained_samples,
        "chains": chain.chains,
        "chain": _chain_metadata(chain, model.n_spins, summary),
        "metadata": ctx.metadata(),
    }
    data_io.write_json(payload, ctx.output)
    print(f"sampled {summary.retained_samples} states (acceptance {summary.acceptance_rate:.3f})")
    return EXIT_OK


def run_synth(ctx: RunContext) -> int:
    """Synthetic spin data from a given or freshly drawn model, plus ground truth sidecars."""
    cfg = ctx.config
    chain = _chain(ctx)
    if cfg.model is not None:
        model = data_io.read_model(cfg.model)
    else:
        assert cfg.n_spins is not None and ctx.seed is not None
        model = sampler.make_synthetic_model(cfg.n_spins, cfg.coupling_scale, cfg.field_scale, ctx.seed)
    # without --count, one configuration per retained sample of the schedule
    count = cfg.count or max(1, chain.measure_sweeps // chain.resolved_thinning(model.n_spins))
    spins = sampler.sample_configurations(model, chain, count)

    metadata = ctx.metadata()
    data_io.write_spins(spins, ctx.output)
    data_io.write_model(model, ctx.sidecar("model"), {"metadata": metadata})
    data_io.write_json(
        {"count": count, "chain": _chain_metadata(chain, model.n_spins), "metadata": metadata},
        ctx.sidecar("chain"),
    )
    print(f"wrote {count} synthetic configurations for N={model.n_spins}: {ctx.output}")
    return EXIT_OK
