import numpy as np
import pytest

from src.errors import ConfigurationError, InfiniteTargetError
from src.lsiq.agent import (
    auxiliary_critic_step,
    critic_step,
    critic_update,
    entropy_clip_update,
    entry_step_sizes,
    init_critic,
    loss_and_grad,
    policy_improvement,
    update_target,
)
from src.lsiq.losses import (
    iq_loss_and_grad,
    iqv0_loss_and_grad,
    loss_curvature,
    ls_loss_and_grad,
    ls_targets,
    objective_identity_check,
    sqil_loss_and_grad,
)
from src.lsiq.operators import (
    bootstrap_values,
    entropy_bonuses,
    forward_backup,
    implicit_reward,
    target_soft_values,
)
from src.lsiq.settings import Algorithm, LsIqConfig, Operator, TargetUpdate, ValueTarget, reward_targets
from src.mdp.tabular import random_mdp
from src.mdp.transitions import TransitionBatch
from src.soft_rl.critics import CriticState
from src.soft_rl.policy import Policy, log_sum_exp_value
from src.soft_rl.solvers import entropy_critic, policy_evaluation_hard


def _batch(rng, mdp, size=32):
    s = rng.integers(0, mdp.n_states, size=size)
    a = rng.integers(0, mdp.n_actions, size=size)
    s_next = np.array([mdp.sample_next_state(int(x), int(y), rng) for x, y in zip(s, a)])
    return TransitionBatch(s, a, s_next, mdp.absorbing[s_next])


def _central_difference(fn, q0, step=1e-4):
    numeric = np.zeros_like(q0)
    for index in np.ndindex(*q0.shape):
        plus, minus = q0.copy(), q0.copy()
        plus[index] += step
        minus[index] -= step
        numeric[index] = (fn(plus) - fn(minus)) / (2 * step)
    return numeric


class TestSettings:
    def test_reference_targets(self):
        cfg = LsIqConfig(c=0.5, alpha=0.5, gamma=0.99)
        assert (cfg.r_max, cfg.r_min) == (2.0, -2.0)
        assert cfg.q_max == pytest.approx(200.0, rel=1e-12)
        assert cfg.q_min == pytest.approx(-200.0, rel=1e-12)
        assert cfg.k == 0.25

    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    def test_degenerate_mixture_has_infinite_target(self, alpha):
        with pytest.raises(InfiniteTargetError):
            reward_targets(0.5, alpha)

    def test_invalid_values_collected(self):
        with pytest.raises(ConfigurationError) as excinfo:
            LsIqConfig(c=-1.0, gamma=1.0)
        assert "c must be positive" in str(excinfo.value)
        assert "gamma" in str(excinfo.value)

    def test_dict_round_trip(self):
        cfg = LsIqConfig(
            operator=Operator.IQ_OPERATOR,
            algorithm=Algorithm.SQIL,
            value_target=ValueTarget.OPTIMAL,
            target_update=TargetUpdate.hard(10),
        )
        assert LsIqConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigurationError):
            LsIqConfig.from_dict({"c": 0.5, "temperature": 1.0})

    def test_unknown_operator_rejected(self):
        with pytest.raises(ConfigurationError):
            LsIqConfig(operator="bellman")


class TestOperators:
    def test_absorbing_bootstrap_per_operator(self):
        batch = TransitionBatch(np.array([0]), np.array([0]), np.array([1]), np.array([True]))
        values = np.array([5.0, 5.0])
        lsiq = LsIqConfig(gamma=0.99)
        iq = LsIqConfig(gamma=0.99, operator=Operator.IQ_OPERATOR)
        assert bootstrap_values(batch, values, lsiq, expert_side=True)[0] == pytest.approx(0.99 * lsiq.q_max)
        assert bootstrap_values(batch, values, lsiq, expert_side=False)[0] == pytest.approx(0.99 * lsiq.q_min)
        assert bootstrap_values(batch, values, iq, expert_side=True)[0] == 0.0

    def test_non_absorbing_bootstrap_uses_next_value(self):
        batch = TransitionBatch(np.array([0]), np.array([0]), np.array([1]), np.array([False]))
        assert bootstrap_values(batch, np.array([0.0, 3.0]), LsIqConfig(gamma=0.9), True)[0] == pytest.approx(2.7)

    def test_soft_values_include_entropy(self, rng):
        q = rng.normal(size=(4, 3))
        policy = Policy(rng.dirichlet(np.ones(3), size=4))
        cfg = LsIqConfig(beta=0.3)
        expected = (policy.probs * q).sum(axis=1) + entropy_bonuses(policy, 0.3)
        np.testing.assert_allclose(target_soft_values(q, policy, cfg), expected)

    def test_entropy_critic_removes_bonus(self, rng):
        q = rng.normal(size=(4, 3))
        policy = Policy(rng.dirichlet(np.ones(3), size=4))
        cfg = LsIqConfig(beta=0.3, use_entropy_critic=True)
        np.testing.assert_allclose(target_soft_values(q, policy, cfg), (policy.probs * q).sum(axis=1))

    def test_entropy_cap_applies_on_expert_side_only(self):
        policy = Policy.uniform(2, 4)
        cfg = LsIqConfig(beta=1.0, entropy_clip=True)
        q = np.zeros((2, 4))
        capped = target_soft_values(q, policy, cfg, expert_side=True, entropy_cap=0.5)
        uncapped = target_soft_values(q, policy, cfg, expert_side=False, entropy_cap=0.5)
        np.testing.assert_allclose(capped, 0.5)
        np.testing.assert_allclose(uncapped, np.log(4))

    def test_optimal_value_target_uses_log_sum_exp(self, rng):
        q = rng.normal(size=(4, 3))
        cfg = LsIqConfig(beta=0.2, value_target=ValueTarget.OPTIMAL)
        values = target_soft_values(q, Policy.uniform(4, 3), cfg)
        np.testing.assert_allclose(values, log_sum_exp_value(q, 0.2))

    def test_clipping_bounds_values(self):
        cfg = LsIqConfig(gamma=0.99, beta=0.0)
        q = np.array([[1e6, 1e6], [-1e6, -1e6]])
        values = target_soft_values(q, Policy.uniform(2, 2), cfg, clip=True)
        np.testing.assert_allclose(values, [cfg.q_max, cfg.q_min])

    def test_forward_backup_fixed_point_and_contraction(self, small_mdp, random_policy, rng):
        reward = small_mdp.true_reward
        q_pi = policy_evaluation_hard(small_mdp, reward, random_policy)
        np.testing.assert_allclose(forward_backup(q_pi, small_mdp, reward, random_policy), q_pi, atol=1e-8)

        for _ in range(20):
            q_a, q_b = rng.normal(scale=10, size=(2,) + q_pi.shape)
            out = np.max(np.abs(
                forward_backup(q_a, small_mdp, reward, random_policy)
                - forward_backup(q_b, small_mdp, reward, random_policy)
            ))
            assert out <= small_mdp.gamma * np.max(np.abs(q_a - q_b)) + 1e-12

    def test_implicit_reward_agrees_across_operators_off_absorbing(self, small_mdp, rng):
        live = _batch(rng, small_mdp, size=64)
        live = live.subset(~live.absorbing)
        critic = CriticState(q=rng.normal(size=(6, 3)), q_target=np.zeros((6, 3)))
        values = rng.normal(size=6)
        lsiq = LsIqConfig(gamma=small_mdp.gamma)
        iq = LsIqConfig(gamma=small_mdp.gamma, operator=Operator.IQ_OPERATOR)
        for expert_side in (True, False):
            np.testing.assert_array_equal(
                implicit_reward(critic, live, values, lsiq, expert_side),
                implicit_reward(critic, live, values, iq, expert_side),
            )

    def test_implicit_reward_of_constant_table(self, small_mdp, rng):
        cfg = LsIqConfig(gamma=small_mdp.gamma, beta=0.0)
        critic = CriticState(q=np.full((6, 3), 3.5), q_target=np.full((6, 3), 3.5))
        values = target_soft_values(critic.q_target, Policy.uniform(6, 3), cfg)
        live = _batch(rng, small_mdp, size=64)
        live = live.subset(~live.absorbing)
        rewards = implicit_reward(critic, live, values, cfg, expert_side=False)
        np.testing.assert_allclose(rewards, (1.0 - cfg.gamma) * 3.5)

    def test_implicit_reward_substitutes_absorbing_value(self):
        batch = TransitionBatch(np.array([0]), np.array([1]), np.array([1]), np.array([True]))
        critic = CriticState(q=np.array([[0.0, 5.0], [0.0, 0.0]]), q_target=np.zeros((2, 2)))
        values = np.array([100.0, 100.0])
        lsiq = LsIqConfig(gamma=0.99)
        iq = LsIqConfig(gamma=0.99, operator=Operator.IQ_OPERATOR)
        assert implicit_reward(critic, batch, values, lsiq, True)[0] == pytest.approx(5.0 - 0.99 * lsiq.q_max)
        assert implicit_reward(critic, batch, values, lsiq, False)[0] == pytest.approx(5.0 - 0.99 * lsiq.q_min)
        assert implicit_reward(critic, batch, values, iq, False)[0] == 5.0


class TestLosses:
    @pytest.fixture
    def setup(self, small_mdp, random_policy, rng):
        shape = (small_mdp.n_states, small_mdp.n_actions)
        cfg = LsIqConfig(gamma=small_mdp.gamma, beta=0.2, alpha=0.4)
        return {
            "mdp": small_mdp,
            "policy": random_policy,
            "cfg": cfg,
            "q0": rng.normal(size=shape),
            "q_target": rng.normal(size=shape),
            "expert": _batch(rng, small_mdp),
            "policy_batch": _batch(rng, small_mdp),
        }

    @pytest.mark.parametrize("loss_fn", [ls_loss_and_grad, sqil_loss_and_grad, iq_loss_and_grad])
    def test_gradient_matches_finite_differences(self, setup, loss_fn):
        def value(q):
            critic = CriticState(q=q, q_target=setup["q_target"])
            return loss_fn(critic, setup["expert"], setup["policy_batch"], setup["policy"], setup["cfg"])

        numeric = _central_difference(lambda q: value(q)[0], setup["q0"])
        analytic = value(setup["q0"])[1]
        np.testing.assert_allclose(analytic, numeric, atol=1e-6 * max(1.0, np.max(np.abs(numeric))))

    def test_iqv0_gradient_matches_finite_differences(self, setup):
        mu0 = setup["mdp"].initial_dist

        def value(q):
            critic = CriticState(q=q, q_target=setup["q_target"])
            return iqv0_loss_and_grad(critic, setup["expert"], setup["policy_batch"], setup["policy"], setup["cfg"], mu0)

        numeric = _central_difference(lambda q: value(q)[0], setup["q0"])
        analytic = value(setup["q0"])[1]
        np.testing.assert_allclose(analytic, numeric, atol=1e-6 * max(1.0, np.max(np.abs(numeric))))

    @pytest.mark.parametrize("algorithm", list(Algorithm))
    def test_curvature_is_hessian_diagonal(self, setup, algorithm):
        cfg = LsIqConfig(gamma=setup["mdp"].gamma, beta=0.2, alpha=0.4, algorithm=algorithm)
        mu0 = setup["mdp"].initial_dist

        def grad(q):
            critic = CriticState(q=q, q_target=setup["q_target"])
            return loss_and_grad(critic, setup["expert"], setup["policy_batch"], setup["policy"], cfg, mu0)[1]

        q0, step = setup["q0"], 1e-3
        diagonal = np.zeros_like(q0)
        for index in np.ndindex(*q0.shape):
            plus, minus = q0.copy(), q0.copy()
            plus[index] += step
            minus[index] -= step
            diagonal[index] = (grad(plus)[index] - grad(minus)[index]) / (2 * step)
        curvature = loss_curvature(q0.shape, setup["expert"], setup["policy_batch"], cfg)
        np.testing.assert_allclose(curvature, diagonal, atol=1e-8)

    def test_curvature_counts_batch_entries(self):
        expert = TransitionBatch(np.array([0, 0, 1, 2]), np.array([0, 0, 1, 0]), np.ones(4, dtype=int),
                                 np.zeros(4, dtype=bool))
        policy_batch = TransitionBatch(np.array([0, 1]), np.array([0, 0]), np.ones(2, dtype=int),
                                       np.zeros(2, dtype=bool))
        ls = loss_curvature((3, 2), expert, policy_batch, LsIqConfig(alpha=0.4))
        np.testing.assert_allclose(ls, [[1.0, 0.0], [0.6, 0.2], [0.2, 0.0]])
        iq = loss_curvature((3, 2), expert, policy_batch, LsIqConfig(alpha=0.4, algorithm=Algorithm.IQ))
        np.testing.assert_allclose(iq, 0.5 * ls)

    def test_fixed_expert_target_is_q_max(self, setup):
        cfg = LsIqConfig(gamma=setup["mdp"].gamma, fixed_expert_target=True)
        critic = CriticState(q=setup["q0"], q_target=setup["q_target"])
        t_e, _ = ls_targets(critic, setup["expert"], setup["policy_batch"], setup["policy"], cfg)
        np.testing.assert_allclose(t_e, cfg.q_max)

    def test_clipped_targets_stay_in_range(self, setup, rng):
        cfg = LsIqConfig(gamma=0.99)
        critic = CriticState(q=setup["q0"], q_target=rng.normal(scale=1e4, size=setup["q0"].shape))
        t_e, t_p = ls_targets(critic, setup["expert"], setup["policy_batch"], setup["policy"], cfg)
        targets = np.concatenate([t_e, t_p])
        assert targets.min() >= cfg.q_min and targets.max() <= cfg.q_max

    def test_policy_targets_on_absorbing_transitions_are_q_min(self, setup):
        cfg = setup["cfg"]
        critic = CriticState(q=setup["q0"], q_target=setup["q_target"])
        batch = setup["policy_batch"]
        _, t_p = ls_targets(critic, setup["expert"], batch, setup["policy"], cfg)
        # r_min + γ r_min/(1−γ) = r_min/(1−γ)
        np.testing.assert_allclose(t_p[batch.absorbing], cfg.q_min)

    def test_sqil_uses_unit_rewards(self):
        batch = TransitionBatch(np.array([0, 0]), np.array([0, 1]), np.array([1, 1]), np.array([True, True]))
        cfg = LsIqConfig(alpha=0.5)
        critic = CriticState(q=np.zeros((2, 2)), q_target=np.zeros((2, 2)))
        loss, _ = sqil_loss_and_grad(critic, batch, batch, Policy.uniform(2, 2), cfg)
        # expert targets 1, policy targets 0, absorbing next states bootstrap nothing
        assert loss == pytest.approx(0.5)

    def test_symmetric_sqil_equals_degraded_lsiq_bitwise(self, setup):
        gamma = setup["mdp"].gamma
        degraded = LsIqConfig(gamma=gamma, clip_targets=False, operator=Operator.IQ_OPERATOR)
        sqil = LsIqConfig(
            gamma=gamma, clip_targets=False, operator=Operator.IQ_OPERATOR,
            algorithm=Algorithm.SQIL, sqil_symmetric=True,
        )
        critic = CriticState(q=setup["q0"], q_target=setup["q_target"])
        args = (critic, setup["expert"], setup["policy_batch"], setup["policy"])
        loss_ls, grad_ls = ls_loss_and_grad(*args, degraded)
        loss_sqil, grad_sqil = sqil_loss_and_grad(*args, sqil)
        assert loss_ls == loss_sqil
        assert np.array_equal(grad_ls, grad_sqil)

    def test_objective_identity(self, rng, small_mdp):
        shape = (small_mdp.n_states, small_mdp.n_actions)
        for _ in range(20):
            cfg = LsIqConfig(
                c=float(rng.uniform(0.2, 2.0)), alpha=float(rng.uniform(0.1, 0.9)),
                beta=float(rng.uniform(0.0, 1.0)), gamma=small_mdp.gamma,
            )
            policy = Policy(rng.dirichlet(np.ones(shape[1]), size=shape[0]))
            d_e = rng.dirichlet(np.ones(np.prod(shape))).reshape(shape)
            d_p = rng.dirichlet(np.ones(np.prod(shape))).reshape(shape)
            j, l, k = objective_identity_check(rng.normal(size=shape), small_mdp, policy, d_e, d_p, cfg)
            assert abs(j - k + cfg.c * l) <= 1e-10


class TestAgent:
    def test_init_critic_tables(self):
        cfg = LsIqConfig(gamma=0.99, pessimistic_init=True, use_regularization_critic=True)
        critic = init_critic(3, 2, cfg)
        np.testing.assert_allclose(critic.q, cfg.q_min)
        assert critic.g is not None and critic.h is None

        entropy_only = init_critic(3, 2, LsIqConfig(use_entropy_critic=True))
        assert entropy_only.h is not None and entropy_only.g is None

    def test_entropy_tracker(self):
        tracker, cap = entropy_clip_update(None, [0.2, 0.6])
        assert tracker == cap == 0.6
        tracker, _ = entropy_clip_update(tracker, [1.6], decay=0.5)
        assert tracker == pytest.approx(1.1)

    def test_target_updates(self):
        critic = CriticState(q=np.ones((1, 1)), q_target=np.zeros((1, 1)))
        update_target(critic, LsIqConfig(target_update=TargetUpdate.polyak(0.25)))
        assert critic.q_target[0, 0] == pytest.approx(0.25)

        critic.step_count = 3
        update_target(critic, LsIqConfig(target_update=TargetUpdate.hard(2)))
        assert critic.q_target[0, 0] == pytest.approx(0.25)
        critic.step_count = 4
        update_target(critic, LsIqConfig(target_update=TargetUpdate.hard(2)))
        assert critic.q_target[0, 0] == 1.0

    def test_critic_update_steps_and_leaves_input_untouched(self, small_mdp, random_policy, rng):
        cfg = LsIqConfig(gamma=small_mdp.gamma, lr_q=0.5, entropy_clip=True)
        critic = init_critic(small_mdp.n_states, small_mdp.n_actions, cfg)
        before = critic.q.copy()
        updated, loss = critic_update(critic, _batch(rng, small_mdp), _batch(rng, small_mdp), random_policy, cfg)
        np.testing.assert_array_equal(critic.q, before)
        assert updated.step_count == 1
        assert updated.entropy_cap is not None
        assert loss > 0.0
        assert not np.array_equal(updated.q, before)

    def test_iqv0_needs_initial_distribution(self, small_mdp, random_policy, rng):
        cfg = LsIqConfig(gamma=small_mdp.gamma, algorithm=Algorithm.IQV0)
        critic = init_critic(small_mdp.n_states, small_mdp.n_actions, cfg)
        with pytest.raises(ConfigurationError):
            critic_update(critic, _batch(rng, small_mdp), _batch(rng, small_mdp), random_policy, cfg)

    def test_entropy_critic_step_tracks_exact_entropy_critic(self, rng):
        mdp = random_mdp(5, 3, 0.9, rng, deterministic=True)
        policy = Policy(rng.dirichlet(np.ones(3), size=5))
        s, a = np.divmod(np.arange(15), 3)
        s_next = mdp.transition[s, a].argmax(axis=1)
        batch = TransitionBatch(s, a, s_next, mdp.absorbing[s_next])
        cfg = LsIqConfig(gamma=0.9, beta=0.5, use_entropy_critic=True, lr_g=7.5)
        critic = init_critic(5, 3, cfg)
        for _ in range(400):
            critic = auxiliary_critic_step(critic, batch, policy, cfg)
        np.testing.assert_allclose(critic.h, entropy_critic(mdp, policy, 0.5), atol=1e-3)

    def test_policy_improvement_adds_auxiliary_critic(self):
        critic = CriticState(q=np.array([[0.0, 1.0]]), q_target=np.zeros((1, 2)), g=np.array([[2.0, 0.0]]))
        cfg = LsIqConfig(beta=0.0, use_regularization_critic=True)
        np.testing.assert_array_equal(policy_improvement(critic, cfg).probs, [[1.0, 0.0]])

    def test_policy_improvement_requires_enabled_table(self):
        critic = CriticState(q=np.zeros((1, 2)), q_target=np.zeros((1, 2)))
        with pytest.raises(ConfigurationError):
            policy_improvement(critic, LsIqConfig(use_entropy_critic=True))

    def test_policy_improvement_tilts_by_regularization_term(self):
        cfg = LsIqConfig(gamma=0.9, beta=1.0, use_regularization_critic=True)
        # constant r_Q = 0.2 on the first action only
        tilt = cfg.k * 0.2 ** 2 / (1.0 - cfg.gamma)
        critic = CriticState(q=np.zeros((1, 2)), q_target=np.zeros((1, 2)), g=np.array([[tilt, 0.0]]))
        probs = policy_improvement(critic, cfg).probs
        assert np.log(probs[0, 0] / probs[0, 1]) == pytest.approx(tilt)


class TestCriticStep:
    def test_plain_step_is_capped_by_curvature(self):
        steps = entry_step_sizes(np.array([0.0, 1.0, 4.0]), LsIqConfig(lr_q=0.5))
        np.testing.assert_allclose(steps, [0.5, 0.5, 0.25])

    def test_normalized_step_rejects_fraction_above_one(self):
        with pytest.raises(ConfigurationError):
            LsIqConfig(lr_q=2.0, normalized_step=True)

    def test_dominant_pair_lands_on_its_minimizer(self, small_mdp, random_policy):
        cfg = LsIqConfig(gamma=small_mdp.gamma, alpha=0.3, lr_q=8.0)
        # every record of both batches is the same live pair
        batch = TransitionBatch(np.zeros(32, dtype=int), np.zeros(32, dtype=int), np.ones(32, dtype=int),
                                np.zeros(32, dtype=bool))
        critic = init_critic(small_mdp.n_states, small_mdp.n_actions, cfg)
        t_e, t_p = ls_targets(critic, batch, batch, random_policy, cfg)
        updated, _ = critic_update(critic, batch, batch, random_policy, cfg)
        assert updated.q[0, 0] == pytest.approx(0.3 * t_e[0] + 0.7 * t_p[0])
        assert np.all(np.isfinite(updated.q))
        assert cfg.q_min <= updated.q.min() and updated.q.max() <= cfg.q_max

    def test_large_rate_stays_bounded_over_many_steps(self, random_policy, rng):
        cfg = LsIqConfig(gamma=0.99, lr_q=8.0, pessimistic_init=True)
        mdp = random_mdp(6, 3, 0.99, rng, n_absorbing=1)
        critic = init_critic(6, 3, cfg)
        for _ in range(200):
            critic, loss = critic_update(critic, _batch(rng, mdp, 8), _batch(rng, mdp, 8), random_policy, cfg)
            assert np.isfinite(loss)
        assert cfg.q_min <= critic.q.min() and critic.q.max() <= cfg.q_max

    def test_normalized_step_moves_a_fraction_of_the_way(self, small_mdp, random_policy, rng):
        cfg = LsIqConfig(gamma=small_mdp.gamma, lr_q=0.25, normalized_step=True)
        expert, policy_batch = _batch(rng, small_mdp), _batch(rng, small_mdp)
        critic = CriticState(q=rng.normal(size=(6, 3)), q_target=rng.normal(size=(6, 3)))
        updated, _ = critic_update(critic, expert, policy_batch, random_policy, cfg)

        _, grad = ls_loss_and_grad(critic, expert, policy_batch, random_policy, cfg)
        curvature = loss_curvature(critic.q.shape, expert, policy_batch, cfg)
        touched = curvature > 0
        minimizer = critic.q[touched] - grad[touched] / curvature[touched]
        np.testing.assert_allclose(updated.q[touched], critic.q[touched] + 0.25 * (minimizer - critic.q[touched]))
        np.testing.assert_array_equal(updated.q[~touched], critic.q[~touched])

    def test_zero_learning_rate_leaves_critic_unchanged(self, small_mdp, random_policy, rng):
        cfg = LsIqConfig(gamma=small_mdp.gamma, lr_q=0.0)
        q = rng.uniform(-5.0, 5.0, size=(6, 3))
        critic = CriticState(q=q, q_target=q.copy())
        updated = critic_step(critic, _batch(rng, small_mdp), _batch(rng, small_mdp), random_policy, cfg)
        np.testing.assert_array_equal(updated.q, q)
        np.testing.assert_allclose(updated.q_target, q, rtol=1e-12)

    def test_fixed_expert_target_drives_expert_pairs_to_q_max(self):
        cfg = LsIqConfig(gamma=0.99, fixed_expert_target=True, lr_q=0.5)
        expert = TransitionBatch(np.array([0, 0, 1]), np.array([2, 2, 0]), np.array([1, 1, 2]),
                                 np.zeros(3, dtype=bool))
        policy_batch = TransitionBatch(np.array([2, 3]), np.array([1, 1]), np.array([3, 5]), np.array([False, True]))
        critic = init_critic(6, 3, cfg)
        policy = Policy.uniform(6, 3)
        for _ in range(150):
            critic = critic_step(critic, expert, policy_batch, policy, cfg)
        np.testing.assert_allclose(critic.q[[0, 1], [2, 0]], cfg.q_max, atol=1e-4)
