import numpy as np
import pytest

from predictability.bounds import predictability_ub_spectral_gap
from predictability.errors import InvalidParameter
from predictability.markov import check_reversibility, spectral_decompose
from predictability.omm import predictability
from predictability.randomwalk import (
    STATIC_STAY,
    VEHICULAR_STAY,
    RandomWalkParams,
    cqi_observable_model,
    cqi_posterior,
    lazy_walk_chain,
)


def test_small_walk():
    c = lazy_walk_chain(RandomWalkParams(states=3, stay_prob=0.5))
    assert np.allclose(c.transition, [[0.75, 0.25, 0], [0.25, 0.5, 0.25], [0, 0.25, 0.75]], atol=1e-15)
    assert np.allclose(c.stationary, [1 / 3] * 3, atol=1e-12)
    assert check_reversibility(c)


@pytest.mark.parametrize("name,stay", [("vehicular", VEHICULAR_STAY), ("static", STATIC_STAY)])
def test_presets_uniform(name, stay):
    p = RandomWalkParams.preset(name)
    assert p.stay_prob == stay and p.states == 15
    assert np.allclose(lazy_walk_chain(p).stationary, 1 / 15, atol=1e-12)


def test_invalid_params():
    with pytest.raises(InvalidParameter):
        RandomWalkParams(stay_prob=1.0)
    with pytest.raises(InvalidParameter):
        RandomWalkParams(states=40)  # q turns negative for high CQI
    with pytest.raises(InvalidParameter):
        RandomWalkParams(nb_r_intercept=-0.2)
    with pytest.raises(InvalidParameter):
        RandomWalkParams.preset("walking")


def test_nb_params_and_posterior():
    p = RandomWalkParams()
    r, q = p.nb_params(1)
    assert (r, q) == pytest.approx((0.209, 0.129))
    post = cqi_posterior(p, 1)
    assert post.offset == 0
    assert post.mean() == pytest.approx(r * (1 - q) / q, rel=1e-6)


def test_boundary_states_more_predictable():
    m = cqi_observable_model(RandomWalkParams.preset("vehicular"))
    for L in (1, 5, 20, 50):
        assert predictability(m, 0, L) > predictability(m, 2, L)
        assert predictability(m, 14, L) > predictability(m, 2, L)


def test_static_sustains_longer():
    veh = cqi_observable_model(RandomWalkParams.preset("vehicular"))
    sta = cqi_observable_model(RandomWalkParams.preset("static"))
    for x in (0, 2, 14):
        for L in (1, 5, 20, 100, 300):
            assert predictability(sta, x, L) >= predictability(veh, x, L)


def test_gap_bound_state_independent():
    m = cqi_observable_model(RandomWalkParams.preset("static"))
    spec = spectral_decompose(m.chain)
    vals = [predictability_ub_spectral_gap(m, spec, x, 10) for x in range(15)]
    assert max(vals) - min(vals) <= 1e-12 * max(vals)
