from __future__ import annotations

from typing import Any, Dict

from src.cli._common import EXIT_NOT_CONVERGED, EXIT_OK, RunContext
from src.lib import exact_engine
from src.lib.errors import DimensionMismatchError
from src.lib.inverter_registry import get_inverter
from src.lib.inverters.pseudo_likelihood import invert_rplm
from src.lib.spin_data import empirical_distribution, smoothed_moments
from src.models.coupling_model import KLResult
from src.services import data_io


def _kl(result: KLResult) -> Dict[str, Any]:
    return {"value": result.value, "out_of_support": result.out_of_support}


def run_fit(ctx: RunContext) -> int:
    """Fit a model to spin data; exit 3 (outputs written) when the fit does not converge."""
    cfg = ctx.config
    assert cfg.input is not None
    spins = data_io.read_spins(cfg.input)
    # --method, then the config file, then exact enumeration
    method = ctx.method("exact")

    report: Dict[str, Any] = {"method": method, "n_spins": spins.n_spins, "n_samples": spins.n_samples}
    if method == "exact":
        fit = exact_engine.fit_exact(
            smoothed_moments(spins), tolerance=cfg.tolerance, max_iterations=cfg.max_iterations, labels=spins.labels
        )
        model, converged = fit.model, fit.converged
        report.update(
            iterations=fit.iterations,
            max_moment_error=fit.max_moment_error,
            tolerance=fit.tolerance,
        )
    else:
        options = ctx.inversion(method)
        # rplm splits its per-spin problems over the thread pool
        if method == "rplm":
            inversion = invert_rplm(spins, options, workers=ctx.threads)
        else:
            inversion = get_inverter(method).invert(spins, options)
        model, converged = inversion.model, inversion.converged
        report.update(
            gradient_norm=inversion.gradient_norm,
            warnings=list(inversion.warnings),
            inversion=options.model_dump(),
        )
    report["converged"] = converged

    # both files are written before the exit code is decided
    metadata = ctx.metadata()
    data_io.write_model(model, ctx.output, {"method": method, "converged": converged, "metadata": metadata})
    data_io.write_json(dict(report, metadata=metadata), ctx.sidecar("report"))
    if not converged:
        print(f"fit did not converge ({method}); outputs written to {ctx.output}")
        return EXIT_NOT_CONVERGED
    print(f"fitted {method} model for N={spins.n_spins}: {ctx.output}")
    return EXIT_OK


def run_diagnose(ctx: RunContext) -> int:
    """KL divergences, entropies and the multi-information ratio of a pairwise model."""
    cfg = ctx.config
    assert cfg.input is not None and cfg.model is not None
    spins = data_io.read_spins(cfg.input)
    pairwise = data_io.read_model(cfg.model)
    if pairwise.n_spins != spins.n_spins:
        raise DimensionMismatchError(f"model has N={pairwise.n_spins}, data has N={spins.n_spins}")

    p_data = empirical_distribution(spins)
    p2 = exact_engine.enumerate_model(pairwise)
    # independent model from the same smoothed magnetizations as the fit
    p1 = exact_engine.enumerate_model(exact_engine.fit_independent(smoothed_moments(spins), spins.labels))
    info = exact_engine.multi_information(spins, pairwise)

    payload = {
        "kl_pairwise_data": _kl(exact_engine.kl_divergence(p2, p_data)),
        "kl_data_pairwise": _kl(exact_engine.kl_divergence(p_data, p2)),
        "kl_independent_data": _kl(exact_engine.kl_divergence(p1, p_data)),
        "entropy_independent": info.entropy_independent,
        "entropy_pairwise": info.entropy_pairwise,
        "entropy_data": info.entropy_data,
        "multi_information": info.multi_information,
        "pairwise_information": info.pairwise_information,
        "ratio": info.ratio,
        "metadata": ctx.metadata(),
    }
    data_io.write_json(payload, ctx.output)
    ratio = "undefined" if info.ratio is None else f"{info.ratio:.4f}"
    print(f"I_2/I_N = {ratio}")
    return EXIT_OK
