import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adiabatic_markov import (
    adiabatic_trajectory,
    check_prop1,
    constant_path,
    continuity_delta,
    is_feasible,
    make_convex,
    optimality_family,
    sample,
    spectral_scan,
    stable_adiabatic_time,
    stationary_distribution,
    telescoped_deviation,
    theorem2_bound,
    tv_distance,
)
from adiabatic_markov.errors import CapExceeded, DegenerateDimension, EpsOutOfRange, NonpositiveArgument
from adiabatic_markov.evolution import random_piecewise_linear

from conftest import TWO_STATE, reset_shift


@pytest.fixture
def family3():
    return make_convex(*optimality_family(3))


def walk_oracle(E, T):
    """Step-by-step walk with a fresh stationary solve at every step."""
    nu = stationary_distribution(sample(E, 0.0))
    out = []
    for k in range(1, T + 1):
        P = sample(E, k / T)
        nu = nu @ P.entries
        out.append(tv_distance(nu, stationary_distribution(P)))
    return np.array(out)


def lazy_path(seed, n=4, k=3):
    return random_piecewise_linear(np.random.default_rng(seed), n, k, max_laziness=0.85)


class TestTrajectory:
    @pytest.mark.parametrize("T", [1, 5, 40])
    def test_constant_path_zero(self, T):
        traj = adiabatic_trajectory(constant_path(TWO_STATE), T)
        assert traj.deviations.size == T
        assert traj.max_deviation <= 1e-12

    def test_family_one_step(self, family3):
        # pi(0) = e1 is shifted to e2 while pi(1) = e3.
        assert adiabatic_trajectory(family3, 1).deviations.tolist() == [1.0]

    def test_two_steps_first_entry(self, family3):
        P = reset_shift(3, 0.5)
        expected = tv_distance(np.array([1.0, 0, 0]) @ P, [0.5, 0.25, 0.25])
        assert adiabatic_trajectory(family3, 2).deviations[0] == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("seed, T", [(0, 7), (1, 33), (2, 300)])
    def test_matches_oracle(self, seed, T):
        E = lazy_path(seed)
        np.testing.assert_allclose(adiabatic_trajectory(E, T).deviations, walk_oracle(E, T), atol=1e-12)

    def test_bounds_and_argmax(self):
        traj = adiabatic_trajectory(lazy_path(4), 50)
        assert np.all((traj.deviations >= 0) & (traj.deviations <= 1))
        assert traj.max_deviation == traj.deviations.max()
        assert traj.deviations[traj.argmax_k - 1] == traj.max_deviation

    def test_one_state(self):
        with pytest.raises(DegenerateDimension):
            adiabatic_trajectory(constant_path([[1.0]]), 3)

    @pytest.mark.parametrize("seed", range(3))
    def test_telescoping(self, seed):
        E = lazy_path(seed, n=5)
        T = 25
        _, states = adiabatic_trajectory(E, T, return_states=True)
        for k in (1, 7, 25):
            direct = states[k] - stationary_distribution(sample(E, k / T))
            np.testing.assert_allclose(telescoped_deviation(E, T, k), direct, atol=1e-10)


class TestFeasibility:
    def test_constant(self):
        assert is_feasible(constant_path(TWO_STATE), 5, 0.01)

    def test_family_one_step(self, family3):
        assert not is_feasible(family3, 1, 0.5)

    def test_strict_boundary(self, family3):
        # The single deviation is exactly 1.0.
        assert not is_feasible(family3, 1, 1.0)


class TestStableAdiabaticTime:
    def test_constant(self):
        res = stable_adiabatic_time(constant_path(TWO_STATE), 0.1)
        assert res.tsad == 1

    def test_family_exhaustive(self, family3):
        res = stable_adiabatic_time(family3, 0.2, cap=1000)
        assert is_feasible(family3, res.tsad, 0.2)
        assert not any(is_feasible(family3, T, 0.2) for T in range(1, res.tsad))
        assert res.exhaustive_below == res.tsad + 1
        again = stable_adiabatic_time(family3, 0.2, cap=1000)
        assert again == res

    def test_degenerate_eps(self):
        res = stable_adiabatic_time(lazy_path(0), 1.0, cap=10)
        assert res.tsad == 1 and res.degenerate

    def test_cap(self, family3):
        with pytest.raises(CapExceeded) as info:
            stable_adiabatic_time(family3, 0.2, cap=1)
        partial = info.value.partial
        assert partial.tsad is None and partial.search_log == ((1, False, 1.0),)

    @pytest.mark.parametrize("seed", range(5))
    def test_geometric_feasible_and_not_earlier_than_exact(self, seed):
        E = lazy_path(seed)
        exact = stable_adiabatic_time(E, 0.1, cap=5000)
        geo = stable_adiabatic_time(E, 0.1, cap=5000, strategy="geometric")
        assert is_feasible(E, geo.tsad, 0.1)
        assert geo.tsad >= exact.tsad
        if not geo.gap_unverified:
            assert geo.tsad == exact.tsad

    def test_log_has_no_gap_below_exact_result(self):
        res = stable_adiabatic_time(lazy_path(6), 0.05, cap=5000)
        assert [e[0] for e in res.search_log] == list(range(1, res.tsad + 1))
        assert [e[1] for e in res.search_log] == [False] * (res.tsad - 1) + [True]

    def test_workers_identical(self):
        E = lazy_path(3, n=5)
        a = stable_adiabatic_time(E, 0.05, cap=5000, workers=1)
        b = stable_adiabatic_time(E, 0.05, cap=5000, workers=4)
        assert a == b


class TestBound:
    def test_zero_lipschitz(self):
        rep = theorem2_bound(2, 0.0, 4, 0.1)
        assert rep.bound_value == 0 and rep.bound_ceiling == 0

    def test_substitution(self):
        rep = theorem2_bound(3, 2.0, 10, 0.05)
        assert rep.bound_value == pytest.approx(75416.3, abs=0.05)
        expected = 3 * 3**1.5 * 2 * 100 / ((1 - 2 * math.sqrt(3) * 0.05) * 0.05)
        assert rep.bound_value == pytest.approx(expected, rel=1e-14)
        assert rep.bound_ceiling == math.ceil(rep.bound_value)

    @pytest.mark.parametrize("n", [2, 3, 4, 9])
    def test_eps_boundary(self, n):
        with pytest.raises(EpsOutOfRange):
            theorem2_bound(n, 1.0, 3, 0.5 / math.sqrt(n))
        rep = theorem2_bound(n, 1.0, 3, 0.5 / math.sqrt(n), check=False)
        assert math.isinf(rep.bound_value) and rep.bound_ceiling is None

    @given(st.integers(2, 20), st.floats(0.01, 10), st.integers(1, 100), st.floats(0.001, 0.99))
    def test_formula(self, n, L, tmix, frac):
        eps = frac * 0.5 / math.sqrt(n)
        rep = theorem2_bound(n, L, tmix, eps)
        assert rep.bound_value == pytest.approx(
            3 * n**1.5 * L * tmix**2 / ((1 - 2 * math.sqrt(n) * eps) * eps), rel=1e-12
        )


class TestContinuity:
    @pytest.mark.parametrize(
        "args, expected",
        [((0.3, 1.0, 1.0, 1), 0.1), ((0.1, 0.5, 2.0, 4), 0.1 * 0.5 / 48)],
    )
    def test_delta_examples(self, args, expected):
        assert continuity_delta(*args) == pytest.approx(expected, rel=1e-14)

    @given(st.floats(0.01, 1000), st.floats(0.01, 1000))
    def test_delta_decreasing_in_L(self, a, b):
        lo, hi = sorted((a, b))
        assert continuity_delta(0.1, 0.5, hi, 3) <= continuity_delta(0.1, 0.5, lo, 3)

    @pytest.mark.parametrize("args", [(0, 1, 1, 1), (0.1, 0, 1, 1), (0.1, 1, -1, 1), (0.1, 1, 1, 0)])
    def test_delta_rejects(self, args):
        with pytest.raises(NonpositiveArgument):
            continuity_delta(*args)

    def test_constant_path(self):
        rep = check_prop1(constant_path(TWO_STATE), 0.1, 101)
        assert rep.max_tv_seen == 0 and rep.holds and not rep.vacuous

    def test_restricted_family(self):
        E = make_convex(reset_shift(3, 0.1), reset_shift(3, 0.9))
        rep = check_prop1(E, 0.2, 1001)
        assert rep.holds and rep.max_tv_seen < 0.2
        # Cross-check the largest close-pair distance with the closed form.
        s = 0.1 + 0.8 * np.linspace(0, 1, 1001)
        pi = np.stack([1 - s, (1 - s) * s, s * s], axis=1)
        steps = int(rep.delta / 1e-3 + 1e-9)
        if steps:
            tv = 0.5 * np.abs(pi[steps:] - pi[:-steps]).sum(axis=1).max()
            assert rep.max_tv_seen == pytest.approx(tv, abs=1e-12)

    def test_coarse_grid_vacuous(self):
        rep = check_prop1(lazy_path(1), 0.05, 11)
        assert rep.vacuous and rep.pairs_tested == 0 and rep.holds
        assert "grid too coarse" in rep.note

    @pytest.mark.parametrize("seed", range(4))
    def test_pointwise_inequality(self, seed):
        # TV(pi(t), pi(s)) <= n^{3/2} ||P(t) - P(s)|| / sigma on a fine grid.
        E = lazy_path(seed, n=3, k=2)
        scan = spectral_scan(E, 2001)
        sigma = scan.sigma_floor - scan.floor_uncertainty
        if sigma <= 0:
            pytest.skip("floor not certified")
        s = np.linspace(0, 1, 41)
        pis = [stationary_distribution(sample(E, x)) for x in s]
        for i in range(s.size):
            for j in range(i + 1, s.size):
                dP = np.abs(sample(E, s[j]).entries - sample(E, s[i]).entries).sum(axis=1).max()
                assert tv_distance(pis[i], pis[j]) <= E.n**1.5 * dP / sigma + 1e-12
