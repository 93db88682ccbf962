import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chanlearn import eta_process as ep


@pytest.mark.parametrize(
    "alpha, beta, mean, var",
    [(2.0, 2.0, 0.5, 0.05), (1.0, 1.0, 0.5, 1.0 / 12.0), (10.5, 3.5, 0.75, 0.0125)],
)
def test_beta_moment_conversions(alpha, beta, mean, var):
    m = ep.moments_from_beta(ep.BetaParams(alpha, beta))
    assert m.mean == pytest.approx(mean, rel=1e-14)
    assert m.var == pytest.approx(var, rel=1e-13)
    p = ep.beta_from_moments(ep.MomentSpec(mean, var))
    assert p.alpha == pytest.approx(alpha, rel=1e-12)
    assert p.beta == pytest.approx(beta, rel=1e-12)


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        ep.BetaParams(0.0, 1.0)
    with pytest.raises(ValueError):
        ep.MomentSpec(0.5, 0.25)
    with pytest.raises(ValueError):
        ep.MomentSpec(1.0, 0.01)
    with pytest.raises(ValueError):
        ep.beta_from_moments(ep.MomentSpec(0.4, 0.0))
    with pytest.raises(ValueError):
        ep.NonMarkovian(0.6)
    with pytest.raises(ValueError):
        ep.DeterministicCos(0.2, 0.3, 12.0)
    with pytest.raises(ValueError):
        ep.DeterministicExp(0.2, 0.3, 5.0)


@settings(max_examples=200)
@given(st.floats(0.05, 50.0), st.floats(0.05, 50.0))
def test_beta_moments_round_trip(alpha, beta):
    p = ep.beta_from_moments(ep.moments_from_beta(ep.BetaParams(alpha, beta)))
    assert p.alpha == pytest.approx(alpha, rel=1e-9)
    assert p.beta == pytest.approx(beta, rel=1e-9)


def _draws(params, n, seed):
    rng = np.random.default_rng(seed)
    return np.array([ep.sample_beta(params, rng) for _ in range(n)])


def test_sampler_moments_at_one_million_draws():
    x = _draws(ep.BetaParams(2.0, 2.0), 1_000_000, 3)
    assert abs(x.mean() - 0.5) <= 0.002
    assert abs(x.var() - 0.05) <= 0.002
    u = _draws(ep.BetaParams(1.0, 1.0), 1_000_000, 4)
    assert abs(u.mean() - 0.5) <= 0.002


def test_sampler_deterministic_for_fixed_seed():
    np.testing.assert_array_equal(_draws(ep.BetaParams(3.0, 1.5), 50, 9), _draws(ep.BetaParams(3.0, 1.5), 50, 9))


def test_memory_weights():
    assert ep.memory_weights(ep.Markovian(0.4), 5) == (0.4,)
    assert ep.memory_weights(ep.NonMarkovian(0.3), 2) == (0.3,)
    assert ep.memory_weights(ep.NonMarkovian(0.3), 3) == (0.3, 0.15)
    assert ep.memory_weights(ep.NonMarkovian(0.3), 9) == pytest.approx((0.3, 0.15, 0.1))
    assert ep.memory_weights(ep.Memoryless(), 7) == ()
    assert ep.memory_weights(ep.Compound(), 4) == (1.0,)
    with pytest.raises(ValueError):
        ep.memory_weights(ep.DeterministicExp(0.3, 0.4, 20.0), 3)


@given(st.floats(0.0, ep.NM_MU_MAX), st.integers(2, 40))
def test_non_markovian_weights_sum_at_most_one(mu, k):
    assert sum(ep.memory_weights(ep.NonMarkovian(mu), k)) <= 1.0 + 1e-12


def test_next_moments_examples():
    init = ep.MomentSpec(0.6, 0.02)
    assert ep.next_moments((), (), init) == (0.6, 0.02)
    assert ep.next_moments((1.0,), (0.73,), ep.MomentSpec(0.1, 0.05)) == (0.73, 0.0)
    mean, var = ep.next_moments((0.4,), (0.8,), ep.MomentSpec(0.5, 0.02))
    assert mean == pytest.approx(0.62, abs=1e-15)
    assert var == pytest.approx(0.012, abs=1e-15)
    with pytest.raises(ValueError):
        ep.next_moments((0.7, 0.6), (0.5, 0.5), init)


@given(
    st.lists(st.floats(0.0, 0.3), max_size=3),
    st.lists(st.floats(1e-6, 1 - 1e-6), min_size=3, max_size=3),
    st.floats(0.01, 0.99),
    st.floats(0.0, 1.0),
)
def test_next_moments_stay_inside_unit_interval(weights, history, m, frac):
    init = ep.MomentSpec(m, frac * 0.999 * m * (1 - m))
    mean, var = ep.next_moments(weights, history, init)
    assert 0.0 < mean < 1.0
    assert 0.0 <= var <= init.var


def test_deterministic_laws():
    exp_kind = ep.DeterministicExp(0.3, 0.4, 20.0)
    cos_kind = ep.DeterministicCos(0.2, 0.3, 2.0)
    assert ep.deterministic_eta(exp_kind, 1) == pytest.approx(0.7, abs=1e-15)
    assert ep.deterministic_eta(cos_kind, 1) == pytest.approx(0.5, abs=1e-15)
    assert ep.deterministic_eta(cos_kind, 4) == pytest.approx(0.22122116050031088, abs=1e-14)
    assert ep.deterministic_eta(cos_kind, 1 + math.pi) == pytest.approx(0.2, abs=1e-15)
    seq = ep.sample_eta_sequence(exp_kind, None, 3, np.random.default_rng(0)).values
    np.testing.assert_allclose(seq, [0.7, 0.68049176980028561, 0.62749230123119275], atol=1e-14)


@given(st.floats(0.001, 0.499), st.floats(0.001, 0.499), st.floats(1.001, 29.999), st.integers(1, 200))
def test_deterministic_values_inside_unit_interval(a, b, delta, k):
    kind = ep.DeterministicCos(a, b, min(delta, 9.999)) if delta < 10 else ep.DeterministicExp(a, b, max(delta, 10.001))
    assert 0.0 < ep.deterministic_eta(kind, k) < 1.0


def test_d1_initialisation():
    rng = np.random.default_rng(5)
    draws = [ep.sample_init_d1(rng).params for _ in range(100_000)]
    alphas = np.array([p.alpha for p in draws])
    betas = np.array([p.beta for p in draws])
    assert abs(alphas.mean() - 5.5) <= 0.05
    assert alphas.min() >= 1.0 and alphas.max() <= 10.0
    assert betas.min() >= 1.0 and betas.max() <= 10.0
    assert ep.sample_init_d1(np.random.default_rng(1)) == ep.sample_init_d1(np.random.default_rng(1))


def test_d2_initialisation():
    assert ep.unimodal_var_bound(0.5) == pytest.approx(0.25 / 3.0, rel=1e-15)
    rng = np.random.default_rng(6)
    for _ in range(100_000):
        p = ep.sample_init_d2(rng).params
        assert p.alpha > 1.0 and p.beta > 1.0
    assert ep.sample_init_d2(np.random.default_rng(2)) == ep.sample_init_d2(np.random.default_rng(2))
    with pytest.raises(ValueError):
        ep.sample_init("D3", rng)


@given(st.floats(1e-4, 1 - 1e-4))
def test_unimodal_bound_gives_shapes_at_least_one(mean):
    v = ep.unimodal_var_bound(mean)
    p = ep.beta_from_moments(ep.MomentSpec(mean, v))
    assert min(p.alpha, p.beta) == pytest.approx(1.0, rel=1e-9)


def test_compound_sequence_is_constant():
    seq = ep.sample_eta_sequence(ep.Compound(), ep.D1(ep.BetaParams(2.0, 2.0)), 10, np.random.default_rng(0))
    assert np.all(seq.values == seq.values[0])
    rng = np.random.default_rng(1)
    for _ in range(200):
        v = ep.sample_eta_sequence(ep.Compound(), ep.sample_init_d2(rng), 30, rng).values
        assert np.all(v == v[0])


def test_memoryless_uses_are_uncorrelated():
    rng = np.random.default_rng(8)
    init = ep.D2(ep.MomentSpec(0.5, 0.05))
    pairs = np.array([ep.sample_eta_sequence(ep.Memoryless(), init, 2, rng).values for _ in range(10_000)])
    assert abs(np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]) <= 0.02


def test_markovian_increments_shrink_as_memory_grows():
    init = ep.D1(ep.BetaParams(2.0, 2.0))
    spreads = []
    for mu in (0.2, 0.5, 0.8, 0.95):
        rng = np.random.default_rng(10)
        seqs = np.array([ep.sample_eta_sequence(ep.Markovian(mu), init, 5, rng).values for _ in range(10_000)])
        spreads.append(np.var(np.diff(seqs, axis=1)))
    assert all(a > b for a, b in zip(spreads, spreads[1:]))


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(["NM", "M", "ML", "C"]),
    st.floats(0.0, 1.0),
    st.sampled_from(["D1", "D2"]),
    st.integers(1, 40),
    st.integers(0, 2**32),
)
def test_sequences_stay_in_unit_interval(label, frac, generation, length, seed):
    kind = {
        "NM": ep.NonMarkovian(frac * ep.NM_MU_MAX),
        "M": ep.Markovian(frac),
        "ML": ep.Memoryless(),
        "C": ep.Compound(),
    }[label]
    rng = np.random.default_rng(seed)
    v = ep.sample_eta_sequence(kind, ep.sample_init(generation, rng), length, rng).values
    assert v.shape == (length,)
    assert np.all((v >= 0.0) & (v <= 1.0))


def test_sequence_reproducible_for_fixed_seed():
    def run():
        rng = np.random.default_rng(42)
        return ep.sample_eta_sequence(ep.NonMarkovian(0.5), ep.sample_init_d2(rng), 20, rng).values

    np.testing.assert_array_equal(run(), run())


def test_sequence_errors():
    with pytest.raises(ValueError):
        ep.sample_eta_sequence(ep.Markovian(0.5), None, 5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        ep.sample_eta_sequence(ep.Markovian(0.5), ep.D1(ep.BetaParams(2, 2)), 0, np.random.default_rng(0))
