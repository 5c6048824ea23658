import math

import numpy as np
import pytest
from hypothesis import given

from adiabatic_markov import (
    check_prop2,
    constant_path,
    make_convex,
    make_piecewise_linear,
    mixing_time,
    optimality_family,
    sigma_at,
    spectral_scan,
)
from adiabatic_markov.errors import DegenerateDimension, RankWarning
from adiabatic_markov.evolution import random_piecewise_linear

from conftest import TWO_STATE, UNIFORM2, reset_shift, stochastic_matrices


def sigma_oracle(P):
    """sqrt of the second smallest eigenvalue of (I - P)(I - P)^T."""
    M = np.eye(P.shape[0]) - P
    w = np.linalg.eigvalsh(M @ M.T)
    return math.sqrt(max(w[1], 0.0))


class TestSigmaAt:
    def test_two_state_hand_value(self):
        # (I - P)(I - P)^T = [[1/8, -1/8], [-1/8, 1/8]] has eigenvalues 0 and 1/4.
        assert sigma_at(TWO_STATE) == pytest.approx(0.5, abs=1e-12)

    def test_uniform(self):
        assert sigma_at(UNIFORM2) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("P", [np.eye(2), np.eye(3), np.diag([1.0, 1.0, 0.0]) + np.outer([0, 0, 1], [0.5, 0.5, 0])])
    def test_rank_deficient(self, P):
        with pytest.raises(RankWarning):
            sigma_at(P)

    def test_one_state(self):
        with pytest.raises(DegenerateDimension):
            sigma_at([[1.0]])

    @given(stochastic_matrices(sparse=False))
    def test_matches_eigen_oracle(self, m):
        assert sigma_at(m) == pytest.approx(sigma_oracle(m), rel=1e-7, abs=1e-9)

    @given(stochastic_matrices(sparse=False))
    def test_within_two_norm(self, m):
        # 0 < sigma <= ||I - P||_2 <= sqrt(n) * ||I - P||_inf <= 2 sqrt(n)
        assert 0 < sigma_at(m) <= 2 * math.sqrt(m.shape[0]) + 1e-12


class TestScan:
    def test_constant_path(self):
        scan = spectral_scan(constant_path(TWO_STATE), 101)
        np.testing.assert_allclose(scan.sigma_at, 0.5, atol=1e-12)
        assert scan.sigma_floor == pytest.approx(0.5, abs=1e-12)

    def test_family_cross_check(self):
        scan = spectral_scan(make_convex(*optimality_family(3)), 1001)
        assert scan.sigma_floor > 0
        i = int(np.flatnonzero(scan.grid == 0.5)[0])
        assert scan.sigma_at[i] == pytest.approx(sigma_oracle(reset_shift(3, 0.5)), abs=1e-12)
        assert scan.sigma_floor == scan.sigma_at.min()

    def test_rank_warning_at_keyframe(self):
        E = make_piecewise_linear([(0, UNIFORM2), (0.5, np.eye(2)), (1, UNIFORM2)])
        with pytest.raises(RankWarning) as info:
            spectral_scan(E, 11)
        assert info.value.s == 0.5
        rec = spectral_scan(E, 11, on_rank_error="record")
        assert rec.rank_warnings == (0.5,)
        assert not np.isnan(rec.sigma_floor)

    @pytest.mark.parametrize("seed", range(4))
    def test_floor_uncertainty_covers_fine_grid(self, seed):
        E = random_piecewise_linear(np.random.default_rng(seed), 4, 3, max_laziness=0.8)
        coarse = spectral_scan(E, 21)
        fine = spectral_scan(E, 4001)
        assert fine.sigma_floor >= coarse.sigma_floor - coarse.floor_uncertainty - 1e-12

    def test_workers_identical(self):
        E = random_piecewise_linear(np.random.default_rng(9), 5, 4)
        a = spectral_scan(E, 301, workers=1)
        b = spectral_scan(E, 301, workers=4)
        assert a.sigma_at.tobytes() == b.sigma_at.tobytes()


class TestSpectralMixingCheck:
    @pytest.mark.parametrize(
        "P, tmix, lhs",
        [
            (TWO_STATE, 3, (1 - 0.2 * math.sqrt(2)) / 0.5),
            (UNIFORM2, 1, (1 - 0.2 * math.sqrt(2)) / 1.0),
        ],
    )
    def test_constant_examples(self, P, tmix, lhs):
        E = constant_path(P)
        scan = spectral_scan(E, 11)
        assert mixing_time(P, 0.1).tmix == tmix
        v = check_prop2(E, 0.1, tmix, scan)
        assert v.lhs == pytest.approx(lhs, rel=1e-12)
        assert v.holds and not v.vacuous

    def test_boundary_is_vacuous(self):
        E = constant_path(TWO_STATE)
        v = check_prop2(E, 0.5 / math.sqrt(2), 1, spectral_scan(E, 11))
        assert v.lhs == 0 and v.vacuous and v.holds
