import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from becsim import (
    Algorithm,
    BecParams,
    DrawStats,
    UniformSource,
    acceptance_rate_a,
    acceptance_rate_b,
    mixture_weights,
    sample_a,
    sample_auto,
    sample_b,
    sample_c,
    sample_many,
)
from becsim.errors import DomainError, RunawayError
from becsim.verification import ks_critical, ks_two_sample, ks_uniform, pit_conditional

E1 = math.exp(-1)


class TestUniformSource:
    def test_open_interval_and_range(self):
        u = UniformSource(7).uniforms(20000)
        assert u.min() > 0 and u.max() < 1
        assert abs(u.mean() - 0.5) < 0.01

    def test_extreme_raw_values_stay_inside(self):
        assert (0 + 0.5) * 2.0**-52 > 0
        assert ((2**52 - 1) + 0.5) * 2.0**-52 < 1.0

    def test_same_seed_same_stream(self):
        a, b = UniformSource(123), UniformSource(123)
        assert [a.uniform() for _ in range(10000)] == [b.uniform() for _ in range(10000)]

    def test_different_seeds_differ(self):
        assert UniformSource(1).uniform() != UniformSource(2).uniform()

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True])
    def test_rejects_bad_seed(self, seed):
        with pytest.raises(DomainError):
            UniformSource(seed)

    def test_entropy_seed_is_recorded(self):
        s = UniformSource()
        assert 0 <= s.seed < 2**64
        assert UniformSource(s.seed).uniform() == s.uniform()

    def test_spawn_seeds_deterministic_and_distinct(self):
        a = UniformSource(5).spawn_seeds(4)
        assert a == UniformSource(5).spawn_seeds(4)
        assert len(set(a)) == 4

    @given(st.integers(0, 2**64 - 1))
    def test_any_uint64_seed(self, seed):
        u = UniformSource(seed).uniform()
        assert 0 < u < 1


class TestAlgorithmA:
    def test_delta_zero_accepts_first(self):
        pair, trials = sample_a(BecParams(1, 1, 0), UniformSource(3))
        assert trials == 1 and pair.x > 0 and pair.y > 0

    def test_hand_trace_accept(self, scripted):
        src = scripted([E1, E1, 0.36])
        pair, trials = sample_a(BecParams(2, 4, 1), src)
        assert trials == 1 and src.used == 3
        assert pair.x == pytest.approx(0.5) and pair.y == pytest.approx(0.25)

    def test_hand_trace_reject_then_accept(self, scripted):
        # threshold e^{-1} ~ 0.3678794; 0.37 rejects
        src = scripted([E1, E1, 0.37, 0.5, 0.5, 0.1])
        pair, trials = sample_a(BecParams(1, 1, 1), src)
        assert trials == 2 and src.used == 6
        assert pair.x == pytest.approx(math.log(2))

    def test_accept_uses_less_or_equal(self, scripted):
        u3 = math.exp(-1.0 * (-math.log(E1)) * (-math.log(E1)))
        pair, trials = sample_a(BecParams(1, 1, 1), scripted([E1, E1, u3]))
        assert trials == 1


class TestAlgorithmB:
    def test_threshold(self):
        assert mixture_weights(1, 0.7).threshold == pytest.approx(0.6450, abs=1e-4)

    def test_low_branch_accept(self, scripted):
        x_expected = math.sqrt(1.7) - 1
        src = scripted([0.1, 0.5, 0.73, 0.5])
        pair, trials = sample_b(BecParams(1, 1, 1), 0.7, src)
        assert trials == 1 and src.used == 4
        assert pair.x == pytest.approx(0.3038405, abs=1e-7)
        assert pair.y == pytest.approx(math.log(2) / (1 + x_expected), rel=1e-12)

    def test_low_branch_reject(self, scripted):
        # e^{-0.3038405} ~ 0.7380; a rejection consumes no u3
        src = scripted([0.1, 0.5, 0.74, 0.1, 0.5, 0.01, 0.5])
        _, trials = sample_b(BecParams(1, 1, 1), 0.7, src)
        assert trials == 2 and src.used == 7

    def test_high_branch(self, scripted):
        x = 0.7 + math.log(2)
        assert 1.7 / (1 + x) == pytest.approx(0.7104, abs=1e-4)
        src = scripted([0.9, 0.5, 0.71, 0.25])
        pair, trials = sample_b(BecParams(2, 1, 1), 0.7, src)
        assert trials == 1
        assert pair.x == pytest.approx(x / 2)
        assert pair.y == pytest.approx(math.log(4) / (1 + x))
        src = scripted([0.9, 0.5, 0.711, 0.9, 0.5, 0.1, 0.25])
        _, trials = sample_b(BecParams(1, 1, 1), 0.7, src)
        assert trials == 2

    def test_tie_goes_to_tail(self, scripted):
        t = mixture_weights(1, 0.7).threshold
        pair, _ = sample_b(BecParams(1, 1, 1), 0.7, scripted([t, 0.5, 0.01, 0.5]))
        assert pair.x == pytest.approx(0.7 + math.log(2))

    @pytest.mark.parametrize("delta, c", [(0, 0.7), (1, 0), (1, -1)])
    def test_preconditions(self, delta, c):
        with pytest.raises(DomainError):
            sample_b(BecParams(1, 1, delta), c, UniformSource(1))


class TestAlgorithmC:
    def test_delta_zero_always_accepts(self, scripted):
        src = scripted([0.999999, 0.999999, 0.5])
        _, trials = sample_c(BecParams(1, 1, 0), src)
        assert trials == 1

    def test_hand_trace(self, scripted):
        src = scripted([E1, 0.5, E1, 0.49, 0.5])
        pair, trials = sample_c(BecParams(1, 1, 1), src)
        # 0.5 is not < 0.5, so the first proposal is rejected with two uniforms
        assert trials == 2 and src.used == 5
        assert pair.x == pytest.approx(1.0)
        assert pair.y == pytest.approx(math.log(2) / 2)


class TestDispatch:
    def test_auto_routes(self, scripted):
        # delta < 1 -> C: two uniforms then u3
        src = scripted([0.5, 0.1, 0.5])
        sample_auto(BecParams(1, 1, 0.5), src)
        assert src.used == 3
        # delta >= 1 -> B: u0, u1, u2 then u3
        src = scripted([0.1, 0.5, 0.01, 0.5])
        pair, _ = sample_auto(BecParams(1, 1, 1), src)
        assert src.used == 4 and pair.x == pytest.approx(math.sqrt(1.7) - 1)

    def test_auto_delta_zero(self):
        _, trials = sample_auto(BecParams(1, 1, 0), UniformSource(0))
        assert trials == 1


class TestSampleMany:
    def test_n_one_matches_single(self):
        pairs, stats = sample_many(BecParams(1, 1, 2), 1, "b", UniformSource(11), c=0.7)
        single, trials = sample_b(BecParams(1, 1, 2), 0.7, UniformSource(11))
        assert pairs == [single] and stats == DrawStats(trials, 1)

    def test_delta_zero_no_rejections(self):
        for alg in ("a", "c", "auto"):
            pairs, stats = sample_many(BecParams(1, 1, 0), 1000, alg, UniformSource(4))
            assert len(pairs) == 1000 and stats.proposals == 1000

    def test_trials_reciprocal_rate(self):
        _, stats = sample_many(BecParams(1, 1, 100), 10_000, "a", UniformSource(21))
        assert stats.mean_trials == pytest.approx(1 / 0.041, rel=0.05)

    def test_determinism(self):
        p = BecParams(0.7, 1.9, 3.0)
        for alg in ("a", "b", "c", "auto"):
            a = sample_many(p, 500, alg, UniformSource(99))
            b = sample_many(p, 500, alg, UniformSource(99))
            assert a == b

    def test_pairs_positive(self):
        pairs, _ = sample_many(BecParams(1, 1, 5), 2000, "b", UniformSource(8), c=0.5)
        arr = np.asarray(pairs)
        assert np.all(arr > 0)

    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_bad_n(self, n):
        with pytest.raises(DomainError):
            sample_many(BecParams(1, 1, 1), n, "a", UniformSource(1))

    def test_runaway_guard(self):
        with pytest.raises(RunawayError):
            sample_c(BecParams(1, 1, 1e12), UniformSource(2), max_trials=5)


GEOMETRIC_CASES = [
    ("a", 0.5, None), ("a", 5, None), ("a", 100, None),
    ("b", 0.1, 0.5), ("b", 3, 0.7), ("b", 100, 1.0), ("b", 1, 0.7),
    ("c", 0.2, None), ("c", 20, None),
]


@pytest.mark.slow
@pytest.mark.parametrize("alg, delta, c", GEOMETRIC_CASES)
def test_geometric_trials_match_rate(alg, delta, c):
    n = 100_000
    rate = acceptance_rate_b(delta, c) if alg == "b" else acceptance_rate_a(delta)
    seed = 1000 + GEOMETRIC_CASES.index((alg, delta, c))
    _, stats = sample_many(BecParams(1, 1, delta), n, alg, UniformSource(seed), c=c)
    se = math.sqrt(1 - rate) / rate / math.sqrt(n)
    assert abs(stats.mean_trials - 1 / rate) <= 3 * se


@pytest.fixture(scope="module")
def samples_by_algorithm():
    p = BecParams(2.0, 0.5, 3.0)
    n = 100_000
    out = {}
    for i, alg in enumerate(("a", "b", "c")):
        pairs, _ = sample_many(p, n, alg, UniformSource(500 + i), c=0.7)
        out[alg] = np.asarray(pairs)
    return p, out


@pytest.mark.slow
@pytest.mark.parametrize("first, second", [("a", "b"), ("a", "c"), ("b", "c")])
@pytest.mark.parametrize("coord", [0, 1])
def test_algorithms_agree_two_sample_ks(samples_by_algorithm, first, second, coord):
    _, s = samples_by_algorithm
    a, b = s[first][:, coord], s[second][:, coord]
    assert ks_two_sample(a, b) < ks_critical(a.size, 0.01, m=b.size)


@pytest.mark.slow
@pytest.mark.parametrize("alg", ["a", "b", "c"])
@pytest.mark.parametrize("axis", ["y_given_x", "x_given_y"])
def test_conditional_pit_uniform(samples_by_algorithm, alg, axis):
    p, s = samples_by_algorithm
    u = pit_conditional(p, s[alg], axis)
    assert ks_uniform(u) < 1.628 / math.sqrt(u.size)
