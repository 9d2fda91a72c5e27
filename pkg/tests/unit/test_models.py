import numpy as np
import pytest
from pydantic import ValidationError

from src.lib.errors import CapacityError, RejectedInputError
from src.models import (
    ChainConfig,
    CouplingModel,
    EmpiricalDistribution,
    FitReport,
    InversionOptions,
    MomentSet,
    RunConfig,
    Tree,
    WeightedGraph,
    WindowSpec,
)


def test_window_spec_count():
    assert WindowSpec(width=25, shift=25).count(100) == 4
    assert WindowSpec(width=300, shift=1).count(300) == 1
    assert WindowSpec(width=301, shift=1).count(300) == 0
    with pytest.raises(ValidationError):
        WindowSpec(width=0, shift=1)


def test_moment_set_checks_and_freezes():
    m = MomentSet(np.array([0.1, -0.2]), np.array([[1.0, 0.3], [0.3, 1.0]]), sample_count=10)
    assert not m.q.flags.writeable
    assert m.covariance()[0, 1] == pytest.approx(0.3 + 0.02)
    with pytest.raises(RejectedInputError):
        MomentSet(np.zeros(2), np.array([[1.0, 0.2], [0.3, 1.0]]))
    with pytest.raises(RejectedInputError):
        MomentSet(np.zeros(2), np.array([[0.9, 0.0], [0.0, 1.0]]))


def test_coupling_model_diagonal_rule():
    with pytest.raises(RejectedInputError):
        CouplingModel(("a", "b"), np.array([[0.1, 0.0], [0.0, 0.0]]), np.zeros(2))
    model = CouplingModel(("a", "b"), np.array([[-0.1, 0.2], [0.2, -0.3]]), np.zeros(2), diagonal_meaningful=True)
    assert model.off_diagonal().tolist() == [[0.0, 0.2], [0.2, 0.0]]


def test_fit_report_cannot_claim_convergence_above_tolerance():
    model = CouplingModel(("a",), np.zeros((1, 1)), np.zeros(1))
    with pytest.raises(RejectedInputError):
        FitReport(model, iterations=3, max_moment_error=1e-3, converged=True, tolerance=1e-6)


def test_empirical_distribution_must_sum_to_one():
    with pytest.raises(RejectedInputError):
        EmpiricalDistribution(2, {0: 0.5, 3: 0.4})
    dist = EmpiricalDistribution(2, {3: 0.5, 0: 0.5})
    assert list(dist.entries) == [0, 3]
    assert dist.to_dense().tolist() == [0.5, 0.0, 0.0, 0.5]
    with pytest.raises(CapacityError):
        EmpiricalDistribution(30, {0: 1.0}).to_dense()


def test_graph_models_validate_shape():
    with pytest.raises(RejectedInputError):
        WeightedGraph(("a", "b"), np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(RejectedInputError):
        Tree(3, ((0, 1, 1.0),), 1.0)
    with pytest.raises(RejectedInputError):
        Tree(3, ((1, 0, 1.0), (1, 2, 1.0)), 2.0)


def test_option_defaults():
    assert InversionOptions().method == "rplm"
    assert ChainConfig().resolved_thinning(7) == 7
    assert ChainConfig(thinning=3).resolved_thinning(7) == 3
    cfg = RunConfig(command="fit")
    assert cfg.method is None and cfg.smooth == 0 and cfg.normalize is False


def test_chain_schedule_must_retain_samples():
    with pytest.raises(ValueError, match="retains no samples"):
        ChainConfig(measure_sweeps=3, thinning=5)
    with pytest.raises(ValueError):
        ChainConfig(chains=0)
    assert ChainConfig(measure_sweeps=5, thinning=5).chains == 1
