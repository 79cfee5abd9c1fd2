import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heraldbell.chsh import (
    BINOMIAL_DEVIATION,
    DEFAULT_SETTINGS,
    TSIRELSON_BOUND,
    ChshSettings,
    SettingCounts,
    SignificanceQuery,
    chsh_distributions,
    correlator,
    delta_s,
    delta_s_coefficient,
    delta_s_fluorescence_closed,
    ionization_closed_form_valid,
    required_events,
    required_events_for,
    s_fluorescence_closed,
    s_from_distributions,
    s_ionization_closed,
)
from heraldbell.detection import FluorescenceModel, IonizationModel
from heraldbell.errors import AllocationError, DegenerateInputError, NoViolationError, ValidityDomainError
from heraldbell.quantum_state import WernerState
from oracles import enumerate_readout, smallest_n_by_scan, werner_rho

PERFECT = FluorescenceModel(a_det=1.0)


def fluorescence_dists(v_observable):
    return chsh_distributions(WernerState(v_observable), PERFECT)


class TestCorrelator:
    @pytest.mark.parametrize(
        "counts, expected",
        [((25, 25, 25, 25), 0.0), ((50, 0, 0, 50), 1.0), ((10, 40, 40, 10), -0.6)],
    )
    def test_values(self, counts, expected):
        assert correlator(SettingCounts(*counts)) == pytest.approx(expected, abs=1e-15)

    def test_empty(self):
        with pytest.raises(DegenerateInputError):
            correlator(SettingCounts(0, 0, 0, 0))

    @given(st.lists(st.integers(0, 10**6), min_size=4, max_size=4).filter(lambda c: sum(c) > 0))
    def test_range(self, counts):
        assert -1.0 <= correlator(SettingCounts(*counts)) <= 1.0


class TestS:
    def test_ideal_singlet(self):
        assert s_from_distributions(fluorescence_dists(1.0)) == pytest.approx(2 * math.sqrt(2), abs=1e-12)

    def test_mixed(self):
        assert s_from_distributions(fluorescence_dists(0.0)) == pytest.approx(0.0, abs=1e-15)

    def test_quoted_fluorescence(self):
        s = s_from_distributions(chsh_distributions(WernerState(0.925), FluorescenceModel(a_det=0.95)))
        assert s == pytest.approx(2.119, abs=5e-4)
        assert s_fluorescence_closed(0.925, 0.95) == pytest.approx(2.1192, abs=5e-5)

    def test_fluorescence_closed_limits(self):
        assert s_fluorescence_closed(1, 1) == pytest.approx(TSIRELSON_BOUND, abs=1e-15)
        assert s_fluorescence_closed(0.7, 0.5) == 0.0

    def test_quoted_ionization(self):
        assert s_ionization_closed(0.925, 0.9725, 0.95) == pytest.approx(2.1036, abs=5e-5)
        assert s_ionization_closed(1, 1, 0.95) == pytest.approx(2 * math.sqrt(2) * 0.9025 - 2 * 0.0025, abs=1e-15)
        assert s_ionization_closed(1, 1, 0.95) == pytest.approx(2.5477, abs=5e-5)

    @given(st.floats(0, 1), st.floats(0.5, 1))
    def test_ionization_limit(self, v, a):
        if ionization_closed_form_valid(v, a, 1.0):
            assert s_ionization_closed(v, a, 1.0) == pytest.approx(s_fluorescence_closed(v, a), abs=1e-12)

    def test_ionization_outside_domain(self):
        with pytest.raises(ValidityDomainError):
            s_ionization_closed(0.925, 0.9725, 0.4)
        # above the stated bound but where the first CHSH term changes sign
        with pytest.raises(ValidityDomainError):
            s_ionization_closed(1.0, 1.0, 0.5)

    def test_closed_forms_match_general_on_grid(self):
        for v, a in itertools.product(np.linspace(0, 1, 21), np.linspace(0.5, 1, 21)):
            general = s_from_distributions(chsh_distributions(WernerState(v), FluorescenceModel(a_det=a)))
            assert s_fluorescence_closed(v, a) == pytest.approx(general, abs=1e-12)
            for p in np.linspace(0, 1, 21):
                if not ionization_closed_form_valid(v, a, p):
                    continue
                general = s_from_distributions(chsh_distributions(WernerState(v), IonizationModel.from_p_d(p, a)))
                assert s_ionization_closed(v, a, p) == pytest.approx(general, abs=1e-12)

    def test_general_route_against_enumeration(self):
        # S rebuilt from Born-rule + channel enumeration, no package code involved
        for v, a, p in itertools.product((0.3, 0.925, 1.0), (0.8, 0.9725), (0.6, 0.95)):
            correlations = []
            for alpha, beta in ((0, 22.5), (45, 22.5), (0, -22.5), (45, -22.5)):
                probs = enumerate_readout(werner_rho(v), alpha, beta, a, p)
                correlations.append(probs[0] + probs[3] - probs[1] - probs[2])
            e1, e2, e3, e4 = correlations
            expected = abs(e1 + e2) + abs(e3 - e4)
            got = s_from_distributions(chsh_distributions(WernerState(v), IonizationModel.from_p_d(p, a)))
            assert got == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=200)
    @given(st.floats(0, 1), st.floats(0.5, 1), st.floats(0, 1), st.sampled_from(["flr", "ion"]))
    def test_tsirelson(self, v, a, p, kind):
        model = FluorescenceModel(a_det=a) if kind == "flr" else IonizationModel.from_p_d(p, a)
        assert s_from_distributions(chsh_distributions(WernerState(v), model)) <= TSIRELSON_BOUND + 1e-12

    def test_non_default_settings_use_actual_signs(self):
        rotated = ChshSettings(10.0, 55.0, 32.5, -12.5)
        s = s_from_distributions(chsh_distributions(WernerState(1.0), PERFECT, rotated))
        assert s == pytest.approx(TSIRELSON_BOUND, abs=1e-12)

    def test_settings_must_be_distinct(self):
        with pytest.raises(ValueError):
            ChshSettings(0.0, 180.0, 22.5, -22.5)


class TestDeltaS:
    def test_quoted_fluorescence(self):
        expected = 0.0395233408  # closed-form evaluation at V=0.749, N=2600
        assert delta_s(fluorescence_dists(0.749), 2600) == pytest.approx(expected, abs=1e-10)
        assert delta_s_fluorescence_closed(0.749, 2600) == pytest.approx(expected, abs=1e-10)
        assert delta_s(fluorescence_dists(0.749), 2600) == pytest.approx(0.0395, abs=5e-5)

    @pytest.mark.parametrize("n", [4, 400, 2600])
    def test_mixed_state(self, n):
        assert delta_s(fluorescence_dists(0.0), n) == pytest.approx(math.sqrt(6) / math.sqrt(n), abs=1e-12)
        assert delta_s_fluorescence_closed(0.0, n) == pytest.approx(math.sqrt(6) / math.sqrt(n), abs=1e-12)

    def test_scaling(self):
        d = fluorescence_dists(0.8)
        assert delta_s(d, 4 * 1000) == pytest.approx(delta_s(d, 1000) / 2, rel=1e-12)

    @given(st.floats(0, 1), st.integers(1, 10**5))
    def test_closed_form_reduction(self, v, quarter):
        n = 4 * quarter
        assert delta_s(fluorescence_dists(v), n) == pytest.approx(delta_s_fluorescence_closed(v, n), abs=1e-12)

    @given(st.floats(0.5, 1), st.floats(0, 1), st.integers(1, 10**4))
    def test_coefficient_consistent(self, v, p, quarter):
        d = chsh_distributions(WernerState(v), IonizationModel.from_p_d(p, 0.97))
        n = 4 * quarter
        assert delta_s(d, n) == pytest.approx(delta_s_coefficient(d) / math.sqrt(n), rel=1e-12)
        assert delta_s(d, n, BINOMIAL_DEVIATION) == pytest.approx(
            delta_s_coefficient(d, BINOMIAL_DEVIATION) / math.sqrt(n), rel=1e-12
        )

    def test_binomial_form_is_larger(self):
        d = fluorescence_dists(0.749)
        assert delta_s(d, 2600, BINOMIAL_DEVIATION) > delta_s(d, 2600)

    def test_allocation(self):
        with pytest.raises(AllocationError):
            delta_s(fluorescence_dists(0.7), 2601)


class TestRequiredEvents:
    def test_fluorescence_quoted(self):
        n = required_events(SignificanceQuery(3, PERFECT, WernerState(0.749)))
        assert n == 2604
        assert abs(n - 2600) <= 10

    def test_ionization_quoted(self):
        n = required_events(SignificanceQuery(3, IonizationModel.from_p_d(0.95, a_stirap=1.0), WernerState(0.826)))
        assert n == pytest.approx(3470, rel=0.01)

    @pytest.mark.parametrize("v", [0.72, 0.749, 0.8, 0.9, 0.99])
    def test_matches_scan(self, v):
        d = fluorescence_dists(v)
        s, c = s_from_distributions(d), delta_s_coefficient(d)
        assert required_events_for(s, c, 3) == smallest_n_by_scan(s, c, 3)

    @pytest.mark.parametrize("p", [0.94, 0.95, 0.97, 1.0])
    def test_ionization_matches_scan(self, p):
        d = chsh_distributions(WernerState(0.826), IonizationModel.from_p_d(p, 1.0))
        s, c = s_from_distributions(d), delta_s_coefficient(d)
        assert required_events_for(s, c, 3) == smallest_n_by_scan(s, c, 3)

    def test_monotone_in_visibility(self):
        counts = [required_events(SignificanceQuery(3, PERFECT, WernerState(v))) for v in np.linspace(0.72, 1.0, 30)]
        assert all(a > b for a, b in zip(counts, counts[1:]))

    def test_larger_n_also_satisfies(self):
        d = fluorescence_dists(0.749)
        s, c = s_from_distributions(d), delta_s_coefficient(d)
        n = required_events_for(s, c, 3)
        assert all((s - 2) * math.sqrt(m) / c >= 3 for m in range(n, n + 400, 4))
        assert (s - 2) * math.sqrt(n - 4) / c < 3

    @pytest.mark.parametrize("v", [0.72, 0.749, 0.85, 0.95])
    def test_k_squared_scaling(self, v):
        n1 = required_events(SignificanceQuery(3, PERFECT, WernerState(v)))
        n2 = required_events(SignificanceQuery(6, PERFECT, WernerState(v)))
        eps = 8 / n1
        assert 4 * (1 - eps) <= n2 / n1 <= 4 * (1 + eps)

    def test_no_violation(self):
        with pytest.raises(NoViolationError):
            required_events(SignificanceQuery(3, PERFECT, WernerState(0.7)))

    def test_k_positive(self):
        with pytest.raises(ValueError):
            SignificanceQuery(0, PERFECT, WernerState(0.9))


def test_default_settings():
    assert (DEFAULT_SETTINGS.alpha, DEFAULT_SETTINGS.alpha_prime, DEFAULT_SETTINGS.beta, DEFAULT_SETTINGS.beta_prime) == (
        0.0,
        45.0,
        22.5,
        -22.5,
    )
