import math

import numpy as np
import pytest

from predictability.dist import DiscretePmf, tv_distance
from predictability.errors import InvalidParameter
from predictability.geoqueue import (
    GeoQueueParams,
    geo_observable_model,
    geo_sojourn_posterior,
    geo_stationary,
    geo_transition_matrix,
)
from predictability.markov import build_chain
from predictability.montecarlo import (
    BLOCK,
    SimConfig,
    empirical_blocking_forecast,
    sample_chain_endpoints,
    sample_forecast_empirical,
    sample_trajectory,
    simulate_geo_queue,
)
from predictability.multihop import TandemSystem, tandem_marginal
from predictability.omm import ObservableModel, forecast

K3 = GeoQueueParams(0.2, 0.5, 3)


def test_config_validation():
    for kw in ({"samples": 0}, {"burn_in": -1}, {"seed": -1}, {"workers": 0}):
        with pytest.raises(InvalidParameter):
            SimConfig(**kw)
    meta = SimConfig(seed=7).metadata()
    assert meta["seed"] == 7 and "Philox" in meta["rng"]


def test_determinism_and_worker_independence():
    m = geo_observable_model(GeoQueueParams.from_rho(0.85, 0.5, 16))
    n = 3 * BLOCK + 17
    a = sample_forecast_empirical(m, 8, 5, SimConfig(seed=5, samples=n))
    b = sample_forecast_empirical(m, 8, 5, SimConfig(seed=5, samples=n, workers=4))
    c = sample_forecast_empirical(m, 8, 5, SimConfig(seed=6, samples=n))
    assert np.array_equal(a.pmf.mass, b.pmf.mass) and a.pmf.offset == b.pmf.offset
    assert not np.array_equal(a.pmf.mass, c.pmf.mass)
    t1 = simulate_geo_queue(K3, 5000, SimConfig(seed=1))
    t2 = simulate_geo_queue(K3, 5000, SimConfig(seed=1))
    assert np.array_equal(t1.queue, t2.queue) and np.array_equal(t1.sojourn, t2.sojourn)


def test_two_state_point_mass_forecast():
    m = ObservableModel(build_chain([[0.9, 0.1], [0.4, 0.6]]), (DiscretePmf.point(0), DiscretePmf.point(1)))
    e = sample_forecast_empirical(m, 0, 1, SimConfig(seed=0, samples=1_000_000))
    assert tv_distance(e.pmf, DiscretePmf.from_weights(0, [0.9, 0.1])) < 0.005


def test_lead_zero_samples_posterior():
    m = geo_observable_model(GeoQueueParams.from_rho(0.85, 0.5, 16))
    n = 200_000
    e = sample_forecast_empirical(m, 4, 0, SimConfig(seed=2, samples=n))
    assert tv_distance(e.pmf, m.posteriors[4]) < 3 / math.sqrt(n)


def test_queue_forecast_matches_analytic():
    m = geo_observable_model(GeoQueueParams.from_rho(0.85, 0.5, 16))
    e = sample_forecast_empirical(m, 8, 20, SimConfig(seed=3, samples=1_000_000))
    assert tv_distance(e.pmf, forecast(m, 8, 20)) < 0.01


def test_chain_endpoints_and_trajectory():
    c = geo_transition_matrix(K3)
    ends = sample_chain_endpoints(c, 0, 10, SimConfig(seed=4, samples=200_000))
    freq = np.bincount(ends, minlength=4) / ends.size
    assert np.max(np.abs(freq - c.row_power(0, 10))) < 0.005
    path = sample_trajectory(c, 0, 200_000, SimConfig(seed=4, burn_in=100))
    assert path.size == 200_001
    assert np.max(np.abs(np.bincount(path, minlength=4) / path.size - geo_stationary(K3))) < 0.01


def test_empirical_blocking_forecast():
    assert empirical_blocking_forecast(K3, 3, 0, SimConfig(samples=1000)) == 1.0
    assert empirical_blocking_forecast(K3, 0, 0, SimConfig(samples=1000)) == 0.0
    n = 1_000_000
    p = geo_transition_matrix(K3).power(10)[0, 3]
    got = empirical_blocking_forecast(K3, 0, 10, SimConfig(seed=8, samples=n))
    assert abs(got - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_no_arrivals():
    tr = simulate_geo_queue((0.0, 0.5, 4), 10_000, SimConfig(seed=1))
    assert tr.queue.max() == 0 and tr.sojourn.size == 0 and tr.arrivals.sum() == 0
    assert tr.blocking_rate() == 0.0


def test_near_certain_service():
    tr = simulate_geo_queue((0.05, 1.0 - 1e-9, 4), 200_000, SimConfig(seed=1))
    assert np.mean(tr.sojourn == 1) > 0.999


def test_blocking_rate_k3_ten_million_slots():
    n = 10_000_000
    tr = simulate_geo_queue(K3, n, SimConfig(seed=11, burn_in=1000))
    pi3 = 0.0117647
    arrivals = int(tr.arrivals.sum())
    sigma = math.sqrt(pi3 * (1 - pi3) / arrivals)
    # arrivals see time averages, so the fraction finding the buffer full is pi(K)
    assert abs(tr.full_on_arrival_rate() - pi3) <= 3 * sigma
    # with same-slot admission only the arrivals finding K and no departure are lost
    assert tr.blocking_rate() == pytest.approx(pi3 * (1 - K3.mu), abs=6 * sigma)
    hist = tr.histogram()
    assert 0.5 * np.abs(hist - geo_stationary(K3)).sum() < 0.002


def test_transition_counts_match_matrix():
    p = GeoQueueParams.from_rho(0.85, 0.5, 8)
    tr = simulate_geo_queue(p, 2_000_000, SimConfig(seed=12))
    c = tr.transition_counts()
    P = geo_transition_matrix(p).transition
    rows = c.sum(axis=1, keepdims=True)
    est = c / rows
    se = np.sqrt(P * (1 - P) / rows) + 1e-12
    assert np.all(np.abs(est - P) <= 5 * se)


def test_conditional_sojourn_matches_posterior():
    p = GeoQueueParams.from_rho(0.85, 0.5, 8)
    tr = simulate_geo_queue(p, 3_000_000, SimConfig(seed=13, burn_in=1000))
    for y in range(p.K):
        e = tr.conditional_sojourn(y)
        if e.samples >= 100_000:
            assert tv_distance(e.pmf, geo_sojourn_posterior(p, y)) < 0.01
    with pytest.raises(InvalidParameter):
        simulate_geo_queue((0.0, 0.5, 3), 10, SimConfig()).conditional_sojourn(0)


def test_trajectory_csv():
    tr = simulate_geo_queue(K3, 5, SimConfig(seed=1))
    lines = tr.to_csv().splitlines()
    assert lines[0] == "slot,queue,arrival,blocked,departure" and len(lines) == 6


def test_two_hop_marginal_against_sampled_sum():
    params = [GeoQueueParams(0.2, 0.5, 6), GeoQueueParams(0.2, 0.45, 6)]
    hops = [geo_observable_model(p) for p in params]
    n = 1_000_000
    rng = SimConfig(seed=21).rng(0)
    total = np.zeros(n, dtype=np.int64)
    for p, h in zip(params, hops):
        y = rng.choice(p.K + 1, size=n, p=geo_stationary(p))
        # posterior NB(y+1, mu) in trials = sum of y+1 geometric service times
        total += rng.negative_binomial(y + 1, p.mu) + y + 1
    counts = np.bincount(total)
    emp = DiscretePmf.from_weights(0, counts.astype(float))
    assert tv_distance(emp, tandem_marginal(TandemSystem.build(hops, {}))) < 0.01
