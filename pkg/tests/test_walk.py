"""Walk simulation: stop rule, evaluation, rescalings, marginal driver."""

import math

import numpy as np
import pytest
from scipy import special

from levywalk._rng import stream
from levywalk.errors import ConfigError, HorizonError
from levywalk.paths import phi_eval
from levywalk.stable import DirectionLaw, MovingTimeLaw
from levywalk.walk import (
    RescaleSpec,
    WalkSkeleton,
    rescaled_walk_at,
    simulate_skeleton,
    walk_at,
    walk_marginal_samples,
    walk_path,
)

PARETO_HALF = MovingTimeLaw.pareto(0.5, 1.0)
SYM = DirectionLaw.symmetric_1d()


def make_skeleton(seed=0, horizon=200.0, law=PARETO_HALF, dl=SYM):
    return simulate_skeleton(law, dl, horizon, stream(seed, "walk", seed))


class TestSimulateSkeleton:
    def test_stop_rule_keeps_one_extra_step(self):
        for seed in range(20):
            sk = make_skeleton(seed=seed, horizon=50.0)
            t = np.cumsum(sk.moving_times)
            assert t[-1] > 50.0
            if sk.step_count > 1:
                assert t[-2] <= 50.0

    def test_point_mass_walk_is_the_identity_path(self):
        dl = DirectionLaw.point_mass([1.0])
        sk = make_skeleton(seed=3, horizon=30.0, law=MovingTimeLaw.exponential(1.0), dl=dl)
        grid = np.linspace(0.0, 30.0, 301)
        np.testing.assert_allclose(walk_path(sk, grid)[:, 0], grid, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ConfigError):
            simulate_skeleton(PARETO_HALF, SYM, 0.0, stream(0, "walk", 0))
        with pytest.raises(ConfigError):
            WalkSkeleton(np.array([1.0]), np.array([[1.0]]), horizon=5.0)
        with pytest.raises(ConfigError):
            WalkSkeleton(np.array([1.0, -2.0]), np.array([[1.0], [1.0]]), horizon=0.5)


class TestWalkAt:
    def test_matches_path_functional(self):
        # walk_at must agree with the generic functional on the same skeleton
        rng = np.random.default_rng(17)
        for seed in range(10):
            sk = make_skeleton(seed=seed, horizon=100.0)
            a, d = sk.space_path, sk.time_path
            for t in rng.uniform(0.0, 100.0, size=100):
                w = walk_at(sk, t)
                ref = phi_eval(a, d, t).w
                np.testing.assert_allclose(w, ref, rtol=0.0, atol=1e-12)

    def test_exact_at_renewal_epochs(self):
        sk = make_skeleton(seed=4, horizon=100.0)
        t = np.cumsum(sk.moving_times)
        s = np.cumsum(sk.moving_times * sk.directions[:, 0])
        for i in range(min(10, sk.step_count - 1)):
            if t[i] <= sk.horizon:
                np.testing.assert_array_equal(walk_at(sk, t[i]), [s[i]])

    def test_speed_bound(self):
        for seed in range(10):
            sk = make_skeleton(seed=seed, horizon=80.0)
            grid = np.linspace(0.0, 80.0, 1001)
            w = walk_path(sk, grid)
            assert np.all(np.linalg.norm(w, axis=1) <= grid + 1e-12)

    def test_domain_errors(self):
        sk = make_skeleton(seed=1, horizon=20.0)
        with pytest.raises(ConfigError):
            walk_at(sk, -1.0)
        with pytest.raises(HorizonError):
            walk_at(sk, 20.0001)
        with pytest.raises(HorizonError):
            walk_path(sk, np.array([0.0, 21.0]))

    def test_fourth_moment_of_normalized_walk(self):
        # |W(t)| <= t pins every moment of W(t)/t by 1
        out = walk_marginal_samples(PARETO_HALF, SYM, np.array([5.0, 50.0]), 2000, 23)
        ratio = out[:, :, 0] / np.array([5.0, 50.0])
        assert np.all(np.abs(ratio) <= 1.0 + 1e-12)
        assert np.mean(ratio**4, axis=0).max() <= 1.0


class TestRescaleSpec:
    def test_ballistic_point_mass_is_exact(self):
        # Lambda = +1: W(t) = t, so W(ct)/c = t exactly, for any c
        dl = DirectionLaw.point_mass([1.0])
        law = MovingTimeLaw.pareto(0.5, 1.0)
        for c in (1.0, 7.0, 1000.0):
            sk = simulate_skeleton(law, dl, horizon=3.0 * c, rng=stream(8, "walk", 0))
            spec = RescaleSpec("ballistic", c)
            for t in (0.5, 1.0, 2.0):
                np.testing.assert_allclose(rescaled_walk_at(sk, spec, t), [t], atol=1e-9)

    def test_ballistic_c1_is_identity(self):
        sk = make_skeleton(seed=5, horizon=10.0)
        spec = RescaleSpec("ballistic", 1.0)
        np.testing.assert_array_equal(rescaled_walk_at(sk, spec, 7.0), walk_at(sk, 7.0))

    def test_factor_values(self):
        assert RescaleSpec("ballistic", 10.0).factors(PARETO_HALF) == (10.0, 0.1)
        tf, sf = RescaleSpec("diffusive", 4.0).factors(MovingTimeLaw.exponential(2.0))
        assert tf == 4.0 and sf == 0.5
        law15 = MovingTimeLaw.pareto(1.5, 1.0)
        tf, sf = RescaleSpec("superdiffusive", 100.0).factors(law15)
        assert tf == pytest.approx(300.0)  # mu = beta x0 / (beta - 1) = 3
        want = (100.0 * abs(special.gamma(-0.5))) ** (-1 / 1.5)
        assert sf == pytest.approx(want, rel=1e-14)

    def test_mode_law_compatibility(self):
        with pytest.raises(ConfigError):
            RescaleSpec("ballistic", 2.0).factors(MovingTimeLaw.pareto(1.5))
        with pytest.raises(ConfigError):
            RescaleSpec("ballistic", 2.0).factors(MovingTimeLaw.exponential(1.0))
        with pytest.raises(ConfigError):
            RescaleSpec("superdiffusive", 2.0).factors(PARETO_HALF)
        with pytest.raises(ConfigError):
            RescaleSpec("superdiffusive", 2.0).factors(MovingTimeLaw.exact_stable(0.5))
        with pytest.raises(ConfigError):
            RescaleSpec("diffusive", 2.0).factors(PARETO_HALF)
        with pytest.raises(ConfigError):
            RescaleSpec("sideways", 2.0)
        with pytest.raises(ConfigError):
            RescaleSpec("ballistic", 0.0)

    def test_requires_attached_law(self):
        sk = WalkSkeleton(np.array([5.0]), np.array([[1.0]]), horizon=4.0)
        with pytest.raises(ConfigError):
            rescaled_walk_at(sk, RescaleSpec("ballistic", 2.0), 1.0)


class TestMarginalDriver:
    def test_shapes_and_bounds(self):
        t = np.array([1.0, 4.0, 9.0])
        out = walk_marginal_samples(PARETO_HALF, SYM, t, 500, 3)
        assert out.shape == (500, 3, 1)
        assert np.all(np.abs(out[:, :, 0]) <= t + 1e-12)

    def test_worker_counts_agree_bitwise(self):
        t = np.array([1.0, 3.0])
        a = walk_marginal_samples(PARETO_HALF, SYM, t, 120, 11, workers=1)
        b = walk_marginal_samples(PARETO_HALF, SYM, t, 120, 11, workers=2)
        c = walk_marginal_samples(PARETO_HALF, SYM, t, 120, 11, workers=5)
        np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(a, c)

    def test_replica_offset_slices_the_same_stream_family(self):
        t = np.array([2.0])
        full = walk_marginal_samples(PARETO_HALF, SYM, t, 50, 11)
        tail = walk_marginal_samples(PARETO_HALF, SYM, t, 30, 11, replica_offset=20)
        np.testing.assert_array_equal(full[20:], tail)

    def test_rescaled_marginals_match_direct_scaling(self):
        t = np.array([1.0])
        spec = RescaleSpec("ballistic", 50.0)
        scaled = walk_marginal_samples(PARETO_HALF, SYM, t, 40, 13, rescale=spec)
        plain = walk_marginal_samples(PARETO_HALF, SYM, t * 50.0, 40, 13)
        np.testing.assert_allclose(scaled, plain / 50.0, rtol=1e-15)

    def test_step_count_renewal_rate(self):
        # E[number of renewals by t] ~ t^beta / (Gamma(1+beta) Gamma(1-beta))
        # for a pareto tail with x0 = 1; a 4 SE + slack window at t = 400
        t = 400.0
        reps = 4000
        counts = np.empty(reps)
        for i in range(reps):
            sk = simulate_skeleton(PARETO_HALF, SYM, t, stream(29, "walk", i))
            counts[i] = sk.step_count - 1  # completed renewals
        want = t**0.5 / (special.gamma(1.5) * special.gamma(0.5))
        se = counts.std(ddof=1) / math.sqrt(reps)
        assert abs(counts.mean() - want) < 4.0 * se + 0.05 * want

    def test_input_validation(self):
        with pytest.raises(ConfigError):
            walk_marginal_samples(PARETO_HALF, SYM, np.array([3.0, 1.0]), 10, 0)
        with pytest.raises(ConfigError):
            walk_marginal_samples(PARETO_HALF, SYM, np.array([]), 10, 0)
        with pytest.raises(ConfigError):
            walk_marginal_samples(PARETO_HALF, SYM, np.array([1.0]), 0, 0)

    def test_exponential_diffusive_variance_rate(self):
        # renewal-reward CLT: variance per unit time is E[J^2]/E[J] = 2 for
        # rate-1 exponential moving times, so var of W(ct)/sqrt(c) -> 2t
        law = MovingTimeLaw.exponential(1.0)
        out = walk_marginal_samples(
            law, SYM, np.array([1.0]), 4000, 31, rescale=RescaleSpec("diffusive", 400.0)
        )[:, 0, 0]
        var = out.var(ddof=1)
        assert abs(var - 2.0) < 0.2
