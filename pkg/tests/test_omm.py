import numpy as np
import pytest

from predictability.dist import DiscretePmf, mixture, tv_distance
from predictability.errors import AbsoluteContinuityViolation, HorizonExceedsScan, InvalidParameter, NotSurjective
from predictability.geoqueue import GeoQueueParams, geo_observable_model
from predictability.markov import build_chain
from predictability.omm import (
    AggregationMap,
    ObservableModel,
    aggregate,
    ce_predictability,
    delayed_predictability,
    epsilon_horizon,
    forecast,
    marginal,
    predictability,
    predictability_all_states,
    predictability_curves,
    predictability_sum,
    worst_case_horizon,
)

from conftest import random_model


def test_posterior_count_must_match():
    with pytest.raises(InvalidParameter):
        ObservableModel(build_chain([[0.9, 0.1], [0.4, 0.6]]), (DiscretePmf.point(0),))


def test_two_state_forecast_marginal(two_state):
    assert forecast(two_state, 0, 0) is two_state.posteriors[0]
    assert np.allclose(forecast(two_state, 0, 1).dense(0, 2), [0.9, 0.1])
    assert np.allclose(marginal(two_state).dense(0, 2), [0.8, 0.2])
    assert predictability(two_state, 0, 0) == pytest.approx(0.2)


def test_two_state_ce_undefined_at_zero(two_state):
    with pytest.raises(AbsoluteContinuityViolation):
        ce_predictability(two_state, 0, 0)
    assert ce_predictability(two_state, 0, 3) > 0


def test_two_state_horizon(two_state):
    # D(L) = 0.2 * 0.5^L
    assert [predictability(two_state, 0, L) for L in range(4)] == pytest.approx([0.2, 0.1, 0.05, 0.025])
    assert epsilon_horizon(two_state, 0, 0.05 - 1e-12, 50) == 2
    assert epsilon_horizon(two_state, 0, 0.05 - 1e-12, 50, mode="pointwise") == 2
    assert epsilon_horizon(two_state, 0, 0.5, 50) is None


def test_horizon_scan_too_short(two_state):
    with pytest.raises(HorizonExceedsScan):
        epsilon_horizon(two_state, 0, 0.01, 3)


def test_identical_posteriors_are_unpredictable():
    r = DiscretePmf.from_weights(0, [1, 3, 2])
    m = ObservableModel(build_chain([[0.7, 0.3], [0.2, 0.8]]), (r, r))
    assert marginal(m).allclose(r)
    for L in (0, 1, 7):
        assert predictability(m, 1, L) == pytest.approx(0.0, abs=1e-15)
        assert ce_predictability(m, 0, L) == pytest.approx(0.0, abs=1e-14)
    assert epsilon_horizon(m, 0, 0.01, 10) is None


def test_prefix_and_pointwise_differ_on_nonmonotone_curve():
    # alternating-sign second eigenvalue makes D oscillate
    P = np.array([[0.05, 0.95, 0.0], [0.5, 0.0, 0.5], [0.0, 0.95, 0.05]])
    m = ObservableModel(build_chain(P), tuple(DiscretePmf.point(i) for i in range(3)))
    d = [predictability(m, 0, L) for L in range(40)]
    s = sorted(d)
    eps = 0.5 * (s[len(s) // 2] + s[len(s) // 2 + 1])
    pre = epsilon_horizon(m, 0, eps, 200)
    pt = epsilon_horizon(m, 0, eps, 200, mode="pointwise")
    assert pre is None or pt >= pre
    assert pt == max(L for L in range(200) if predictability(m, 0, L) >= eps)


def test_worst_case_horizon_modes_agree_on_queue():
    m = geo_observable_model(GeoQueueParams.from_rho(0.85, 0.5, 20))
    h, x = worst_case_horizon(m, 0.1, 5000)
    hs = [epsilon_horizon(m, y, 0.1, 5000) for y in range(m.states)]
    assert h == min(v for v in hs if v is not None)
    assert worst_case_horizon(m, 0.1, 5000, mode="pointwise")[0] <= max(hs)


def test_delay_is_lead_shift_bitwise(two_state):
    m = random_model(np.random.default_rng(1), 6)
    assert delayed_predictability(m, 2, 2, 3) == predictability(m, 2, 5)
    assert delayed_predictability(m, 2, 4, 0) == predictability(m, 2, 4)
    assert delayed_predictability(two_state, 0, 0, 60) < 1e-6


@pytest.mark.parametrize("seed", range(30))
def test_dual_routes_agree(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng, int(rng.integers(2, 10)))
    curves = predictability_curves(m, range(0, 30, 3))
    for L in range(0, 30, 3):
        allx = predictability_all_states(m, L)
        for x in range(m.states):
            a, b = predictability(m, x, L), predictability_sum(m, x, L)
            assert abs(a - b) <= 1e-12
            assert abs(allx[x] - a) <= 1e-12
            assert abs(curves[L][x] - a) <= 1e-12


@pytest.mark.parametrize("seed", range(20))
def test_predictability_vanishes_after_mixing(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng, 5)
    L = 1
    while np.max([np.abs(m.chain.row_power(x, L) - m.chain.stationary).sum() / 2 for x in range(5)]) >= 1e-8:
        L *= 2
    assert max(predictability(m, x, L) for x in range(5)) < 1e-7
    assert tv_distance(forecast(m, 0, L), marginal(m)) < 1e-6


def test_aggregation_identity_and_collapse():
    m = random_model(np.random.default_rng(3), 5)
    same = aggregate(m, AggregationMap(np.arange(5)))
    assert np.allclose(same.chain.transition, m.chain.transition, atol=1e-12)
    assert all(a.allclose(b) for a, b in zip(same.posteriors, m.posteriors))
    one = aggregate(m, np.zeros(5, dtype=int))
    assert one.states == 1
    assert predictability(one, 0, 0) == pytest.approx(0.0, abs=1e-12)


def test_aggregation_map_validation():
    with pytest.raises(NotSurjective):
        AggregationMap(np.array([0, 2, 2]))
    with pytest.raises(NotSurjective):
        AggregationMap(np.array([0, -1]))
    assert AggregationMap.even(7, 2).mapping.tolist() == [0, 0, 1, 1, 2, 2, 3]
    assert AggregationMap(np.array([0, 1, 0])).contiguous is False


def _brute_force_aggregate(m, mapping):
    pi, P = m.chain.stationary, m.chain.transition
    K_bar = max(mapping) + 1
    pi_bar = np.array([sum(pi[x] for x in range(m.states) if mapping[x] == a) for a in range(K_bar)])
    P_bar = np.zeros((K_bar, K_bar))
    for a in range(K_bar):
        for b in range(K_bar):
            s = 0.0
            for x in range(m.states):
                for y in range(m.states):
                    if mapping[x] == a and mapping[y] == b:
                        s += pi[x] * P[x, y]
            P_bar[a, b] = s / pi_bar[a]
    return pi_bar, P_bar


@pytest.mark.parametrize("K", [3, 7])
def test_aggregation_against_double_sum(K):
    m = geo_observable_model(GeoQueueParams(0.2, 0.5, K))
    mapping = [x // 2 for x in range(K + 1)]
    agg = aggregate(m, mapping)
    pi_bar, P_bar = _brute_force_aggregate(m, mapping)
    assert np.max(np.abs(agg.chain.transition - P_bar)) <= 1e-12
    assert np.max(np.abs(agg.chain.stationary - pi_bar)) <= 1e-12
    for a in range(agg.states):
        members = [y for y in range(K + 1) if mapping[y] == a]
        w = m.chain.stationary[members] / pi_bar[a]
        ref = mixture(w / w.sum(), [m.posteriors[y] for y in members])
        assert agg.posteriors[a].allclose(ref, atol=1e-12)
    assert agg.marginal_pmf.allclose(m.marginal_pmf, atol=1e-12)


def test_model_round_trip():
    m = random_model(np.random.default_rng(11), 4)
    m2 = ObservableModel.from_dict(m.to_dict())
    assert predictability(m2, 1, 3) == pytest.approx(predictability(m, 1, 3), abs=1e-15)
