import itertools
import math

import numpy as np
import pytest

from heraldbell.chsh import ChshSettings, chsh_distributions, correlator, s_from_distributions
from heraldbell.detection import FluorescenceModel, IonizationModel, joint_distribution
from heraldbell.errors import AllocationError
from heraldbell.montecarlo import SimulationPlan, replicate, simulate
from heraldbell.quantum_state import WernerState
from heraldbell.swap_chain import ErrorBudget, LinkModel, atom_atom_state, herald_stats, swapped_state


def test_equal_setting_zero_same_outcomes():
    settings = ChshSettings(0.0, 45.0, 1e-9, 45.0 + 1e-9)
    plan = SimulationPlan(11, 40000, WernerState(1.0), FluorescenceModel(a_det=1.0), settings)
    report = simulate(plan)
    for c in (report.counts[0], report.counts[3]):
        assert c.n_uu == 0 and c.n_dd == 0


def test_deterministic():
    plan = SimulationPlan(123, 40000, WernerState(0.9), IonizationModel(), dark_fraction=0.02)
    assert simulate(plan).to_json() == simulate(plan).to_json()
    assert simulate(plan, workers=4).to_json() == simulate(plan).to_json()
    other = SimulationPlan(124, 40000, WernerState(0.9), IonizationModel(), dark_fraction=0.02)
    assert simulate(other).to_json() != simulate(plan).to_json()


def test_replicate_deterministic_across_workers():
    plan = SimulationPlan(5, 400, WernerState(0.8), FluorescenceModel())
    assert replicate(plan, 20).to_json() == replicate(plan, 20, workers=3).to_json()


def test_s_from_counts_matches_correlator():
    report = simulate(SimulationPlan(3, 8000, WernerState(0.9), FluorescenceModel()))
    e = [correlator(c) for c in report.counts]
    assert report.s_empirical == abs(e[0] + e[1]) + abs(e[2] - e[3])


@pytest.mark.parametrize(
    "v, model",
    [
        (0.925, FluorescenceModel(a_det=0.95)),
        (0.5, FluorescenceModel(a_det=0.8)),
        (0.925, IonizationModel.from_p_d(0.95)),
        (0.7, IonizationModel.from_p_d(0.6, 0.9)),
    ],
)
def test_frequencies_match_distribution(v, model):
    n = 10**6
    plan = SimulationPlan(99, n, WernerState(v), model)
    report = simulate(plan)
    for counts, pair in zip(report.counts, plan.settings.pairs()):
        p = joint_distribution(WernerState(v), model, pair).as_array()
        observed = np.array([counts.n_uu, counts.n_ud, counts.n_du, counts.n_dd])
        se = np.sqrt(n / 4 * p * (1 - p))
        assert np.all(np.abs(observed - n / 4 * p) <= 5 * se + 1e-9)


def test_dark_fraction_converges_and_matches_chain():
    budget, link = ErrorBudget(), LinkModel()
    e_dc = herald_stats(link).e_dc
    n = 10**6
    plan = SimulationPlan(2024, n, swapped_state(budget), FluorescenceModel(), dark_fraction=e_dc)
    report = simulate(plan)
    assert abs(report.dark_fraction_empirical - e_dc) <= 5 * math.sqrt(e_dc * (1 - e_dc) / n)
    analytic = s_from_distributions(chsh_distributions(atom_atom_state(budget, link), FluorescenceModel()))
    assert abs(report.s_empirical - analytic) <= 5 * report.delta_s_empirical


def test_mixed_state_mean_zero():
    summary = replicate(SimulationPlan(8, 2000, WernerState(0.0), FluorescenceModel()), 200)
    # S = |E1+E2| + |E3-E4| is biased upward at V = 0; compare with the folded-normal mean instead
    sigma_e = 1 / math.sqrt(500)
    expected = 2 * (math.sqrt(2) * sigma_e) * math.sqrt(2 / math.pi)
    assert abs(summary.s_mean - expected) <= 5 * summary.s_std_error


def test_scatter_shrinks():
    plan = SimulationPlan(1, 2600, WernerState(0.749), FluorescenceModel(a_det=1.0))
    small = replicate(plan, 500).s_std
    large = replicate(SimulationPlan(1, 4 * 2600, WernerState(0.749), FluorescenceModel(a_det=1.0)), 500).s_std
    assert small / large == pytest.approx(2.0, rel=0.15)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_events": 10},
        {"n_events": 12, "allocation": (3, 3, 3, 2)},
        {"n_events": 12, "allocation": (3, 3, 3)},
    ],
)
def test_allocation_errors(kwargs):
    with pytest.raises(AllocationError):
        SimulationPlan(1, state=WernerState(0.5), detection=FluorescenceModel(), **kwargs)


def test_custom_allocation():
    plan = SimulationPlan(1, 10, WernerState(0.5), FluorescenceModel(), allocation=(1, 2, 3, 4))
    report = simulate(plan)
    assert [c.n_s for c in report.counts] == [1, 2, 3, 4]


def test_replicate_needs_two():
    with pytest.raises(ValueError):
        replicate(SimulationPlan(1, 4, WernerState(0.5), FluorescenceModel()), 1)


def test_oracle_grid_small():
    # coarse grid of the per-cell oracle; the large-n version lives in the acceptance suite
    n = 200_000
    for v, a, p in itertools.product((0.0, 0.6, 1.0), (0.75, 1.0), (0.7, 1.0)):
        model = IonizationModel.from_p_d(p, a)
        report = simulate(SimulationPlan(17, n, WernerState(v), model))
        for counts, pair in zip(report.counts, ChshSettings().pairs()):
            prob = joint_distribution(WernerState(v), model, pair).as_array()
            observed = np.array([counts.n_uu, counts.n_ud, counts.n_du, counts.n_dd])
            assert np.all(np.abs(observed - n / 4 * prob) <= 5 * np.sqrt(n / 4 * prob * (1 - prob)) + 1e-9)
