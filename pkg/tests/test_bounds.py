import math

import numpy as np
import pytest

from predictability.bounds import (
    bound_report,
    predictability_ub_chain_tv,
    predictability_ub_chain_tv_printed,
    predictability_ub_spectral_full,
    predictability_ub_spectral_gap,
    r_statistic,
)
from predictability.dist import DiscretePmf
from predictability.errors import NotReversible
from predictability.markov import build_chain, mixing_tv_bound_full, spectral_decompose
from predictability.omm import ObservableModel, predictability

from conftest import random_model, random_reversible_chain


def test_r_statistic_examples(two_state):
    assert r_statistic(two_state) == pytest.approx(2.0, abs=1e-15)
    r = DiscretePmf.from_weights(0, [1, 2, 3])
    same = ObservableModel(build_chain([[0.5, 0.5], [0.3, 0.7]]), (r, r))
    assert r_statistic(same) == pytest.approx(1.0, abs=1e-15)


def test_r_equals_k_for_disjoint_point_masses():
    c = random_reversible_chain(np.random.default_rng(2), 9)
    m = ObservableModel(c, tuple(DiscretePmf.point(3 * i) for i in range(9)))
    assert r_statistic(m) == pytest.approx(9.0, abs=1e-12)


def test_two_state_bounds(two_state):
    spec = spectral_decompose(two_state.chain)
    full = predictability_ub_spectral_full(two_state, spec, 0, 1)
    assert full == pytest.approx(0.125 * math.sqrt(2), abs=1e-12)
    assert predictability_ub_spectral_gap(two_state, spec, 0, 1) == pytest.approx(full, abs=1e-12)
    assert predictability_ub_chain_tv(two_state, 0, 1) == pytest.approx(0.1, abs=1e-12)
    assert predictability(two_state, 0, 1) == pytest.approx(0.1, abs=1e-12)


def test_point_mass_posteriors_attain_chain_tv():
    c = random_reversible_chain(np.random.default_rng(3), 6)
    m = ObservableModel(c, tuple(DiscretePmf.point(i) for i in range(6)))
    for L in (0, 1, 4):
        for x in range(6):
            assert predictability(m, x, L) == pytest.approx(predictability_ub_chain_tv(m, x, L), abs=1e-12)
            # the halved variant is violated by this model whenever D > 0
            if predictability(m, x, L) > 1e-9:
                assert predictability_ub_chain_tv_printed(m, x, L) < predictability(m, x, L)


def test_r_one_gives_zero_spectral_bound():
    r = DiscretePmf.from_weights(0, [1, 1])
    m = ObservableModel(build_chain([[0.5, 0.5], [0.3, 0.7]]), (r, r))
    spec = spectral_decompose(m.chain)
    assert predictability_ub_spectral_full(m, spec, 0, 3) == 0.0


def test_full_bound_scaling_with_r_equal_k():
    c = random_reversible_chain(np.random.default_rng(4), 5)
    m = ObservableModel(c, tuple(DiscretePmf.point(i) for i in range(5)))
    spec = spectral_decompose(c)
    assert predictability_ub_spectral_full(m, spec, 2, 3) == pytest.approx(
        math.sqrt(2) * 2.0 * mixing_tv_bound_full(spec, 2, 3), rel=1e-12
    )


def test_gap_bound_geometric_decay():
    m = random_model(np.random.default_rng(5), 6)
    spec = spectral_decompose(m.chain)
    b = [predictability_ub_spectral_gap(m, spec, 1, L) for L in range(6)]
    assert np.allclose(np.array(b[1:]) / np.array(b[:-1]), spec.lambda_star, rtol=1e-12)


def test_uniform_pi_gap_bound_state_independent():
    P = np.array([[0.75, 0.25, 0], [0.25, 0.5, 0.25], [0, 0.25, 0.75]])
    m = ObservableModel(build_chain(P), tuple(DiscretePmf.point(i) for i in range(3)))
    spec = spectral_decompose(m.chain)
    vals = [predictability_ub_spectral_gap(m, spec, x, 4) for x in range(3)]
    assert max(vals) - min(vals) < 1e-12


def test_nonreversible_rejected():
    P = np.array([[0.1, 0.8, 0.1], [0.1, 0.1, 0.8], [0.8, 0.1, 0.1]])
    m = ObservableModel(build_chain(P), tuple(DiscretePmf.point(i) for i in range(3)))
    with pytest.raises(NotReversible):
        predictability_ub_spectral_full(m, None, 0, 1)


def test_bound_report_metadata(two_state):
    rep = bound_report(two_state, 0, 1)
    assert rep.metadata["chain_tv_condition_met"] is True
    assert rep.metadata["ub_chain_tv_printed"] == pytest.approx(0.05)
    assert set(rep.as_row()) == {"exact", "ub_spectral_full", "ub_spectral_gap", "ub_chain_tv", "r_statistic"}


@pytest.mark.parametrize("seed", range(100))
def test_dominance_random_models(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng, int(rng.integers(2, 21)))
    spec = spectral_decompose(m.chain)
    r = r_statistic(m)
    assert 1 - 1e-12 <= r <= m.states + 1e-12
    for L in list(range(0, 21)) + [35, 50]:
        for x in range(m.states):
            rep = bound_report(m, x, L, spec, r)
            assert rep.exact <= rep.ub_spectral_full + 1e-9
            assert rep.ub_spectral_full <= rep.ub_spectral_gap + 1e-9
            assert rep.exact <= rep.ub_chain_tv + 1e-9
            assert rep.ub_chain_tv <= 1 + 1e-12
