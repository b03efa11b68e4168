import numpy as np
import pytest

from src.errors import InvalidDistributionError, UnsupportedConfigurationError
from src.divergence.chi2 import (
    MixtureSpec,
    chi2_convexity_bound_check,
    chi2_mixture_closed_form,
    optimal_reward,
    pearson_chi2,
    variational_objective,
)


def _pair(rng, shape=(3, 2)):
    return rng.dirichlet(np.ones(6)).reshape(shape), rng.dirichlet(np.ones(6)).reshape(shape)


class TestClosedForm:
    def test_identical_distributions_have_zero_divergence(self, rng):
        d, _ = _pair(rng)
        assert chi2_mixture_closed_form(MixtureSpec(0.5, 0.5, d, d)) == 0.0

    def test_disjoint_supports_reach_upper_bound(self):
        d_e = np.array([[1.0, 0.0]])
        d_p = np.array([[0.0, 1.0]])
        for c in (0.25, 0.5, 1.0, 2.0):
            assert chi2_mixture_closed_form(MixtureSpec(c, 0.5, d_e, d_p)) == pytest.approx(1.0 / c, rel=1e-12)

    @pytest.mark.parametrize("c", [0.25, 0.5, 1.0, 2.0])
    def test_bounds_on_random_pairs(self, rng, c):
        for _ in range(50):
            spec = MixtureSpec(c, 0.5, *_pair(rng))
            value = chi2_mixture_closed_form(spec)
            assert -1e-12 <= value <= 1.0 / c + 1e-12
            assert np.all(np.abs(optimal_reward(spec)) <= 1.0 / c + 1e-12)

    def test_asymmetric_mixture_unsupported(self, rng):
        spec = MixtureSpec(0.5, 0.3, *_pair(rng))
        with pytest.raises(UnsupportedConfigurationError):
            chi2_mixture_closed_form(spec)
        with pytest.raises(UnsupportedConfigurationError):
            optimal_reward(spec)

    def test_rejects_non_distributions(self):
        with pytest.raises(InvalidDistributionError):
            MixtureSpec(0.5, 0.5, np.array([[0.5, 0.2]]), np.array([[0.5, 0.5]]))


class TestVariationalForm:
    def test_value_at_witness_equals_closed_form(self, rng):
        for _ in range(20):
            spec = MixtureSpec(float(rng.uniform(0.2, 2.0)), 0.5, *_pair(rng))
            assert variational_objective(optimal_reward(spec), spec) == pytest.approx(
                chi2_mixture_closed_form(spec), abs=1e-10
            )

    def test_witness_dominates_random_rewards(self, rng):
        spec = MixtureSpec(1.0, 0.5, *_pair(rng))
        best = variational_objective(optimal_reward(spec), spec)
        for _ in range(200):
            r = rng.normal(scale=2.0, size=spec.d_expert.shape)
            assert variational_objective(r, spec) <= best + 1e-12

    def test_witness_is_zero_off_support(self):
        d_e = np.array([[0.5, 0.5, 0.0]])
        d_p = np.array([[1.0, 0.0, 0.0]])
        r = optimal_reward(MixtureSpec(0.5, 0.5, d_e, d_p))
        assert r[0, 2] == 0.0
        assert r[0, 1] == pytest.approx(2.0)


class TestConvexityBound:
    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
    def test_holds_on_random_pairs(self, rng, alpha):
        for _ in range(100):
            assert chi2_convexity_bound_check(*_pair(rng), alpha)

    def test_infinite_right_hand_side_counts_as_satisfied(self):
        d_e = np.array([0.5, 0.5])
        d_p = np.array([1.0, 0.0])
        assert pearson_chi2(d_e, d_p) == float("inf")
        assert chi2_convexity_bound_check(d_e, d_p, 0.5)

    def test_rejects_alpha_outside_unit_interval(self, rng):
        with pytest.raises(ValueError):
            chi2_convexity_bound_check(*_pair(rng), 1.0)
