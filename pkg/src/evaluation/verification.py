"""
Property Verification Suite

Checks the closed-form properties the toolkit relies on against exact
oracles on random tabular instances. Each check reports the worst residual
it measured next to the threshold it was held to.
"""

import logging
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp
from tqdm import tqdm

from src.divergence.chi2 import (
    MixtureSpec,
    chi2_convexity_bound_check,
    chi2_mixture_closed_form,
    optimal_reward,
    variational_objective,
)
from src.evaluation.learning_loop import ExperimentConfig, ImitationLearningLoop, train
from src.evaluation.metrics import write_metrics_csv
from src.idm.inverse_dynamics import InverseDynamicsModel, idm_update, label_confident
from src.lsiq.agent import critic_update
from src.lsiq.losses import (
    iq_loss_and_grad,
    iqv0_loss_and_grad,
    ls_loss_and_grad,
    ls_targets,
    objective_identity_check,
    sqil_loss_and_grad,
)
from src.lsiq.operators import bootstrap_values, entropy_bonuses, forward_backup, target_soft_values
from src.lsiq.settings import Algorithm, LsIqConfig, Operator
from src.mdp.occupancy import occupancy_measure, occupancy_measure_iterative, rollout, state_visitation
from src.mdp.tabular import TabularMdp, random_mdp
from src.mdp.transitions import TransitionBatch
from src.soft_rl.critics import CriticState, combined_critic_update, g_loss_and_grad
from src.soft_rl.policy import Policy, maxent_policy
from src.soft_rl.solvers import (
    absorbing_soft_values,
    entropy_critic,
    policy_evaluation_hard,
    policy_evaluation_soft,
    soft_value_iteration,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    threshold: float


@dataclass
class VerificationReport:
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(r.name, r.passed, r.residual, r.threshold) for r in self.results],
            columns=["check", "passed", "residual", "threshold"],
        )

    def summary(self) -> str:
        lines = []
        for r in self.results:
            mark = "✓" if r.passed else "✗"
            lines.append(f"{mark} {r.name:<40} residual={r.residual:.3e} threshold={r.threshold:.1e}")
        lines.append(f"{len(self.results) - len(self.failures)}/{len(self.results)} checks passed")
        return "\n".join(lines)


def _result(name: str, residual: float, threshold: float) -> CheckResult:
    residual = float(residual)
    return CheckResult(name, bool(np.isfinite(residual) and residual <= threshold), residual, threshold)


def _random_policy(rng: np.random.Generator, n_states: int, n_actions: int) -> Policy:
    return Policy(rng.dirichlet(np.ones(n_actions), size=n_states))


def _random_distribution(rng: np.random.Generator, shape: Tuple[int, ...], sparsity: float = 0.0) -> np.ndarray:
    values = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    if sparsity > 0:
        mask = rng.uniform(size=shape) < sparsity
        mask.flat[rng.integers(values.size)] = False
        values = np.where(mask, 0.0, values)
        values /= values.sum()
    return values


def _random_instance(rng: np.random.Generator, gamma: float = 0.9, n_absorbing: int = 0) -> TabularMdp:
    n_states = int(rng.integers(2 + n_absorbing, 11))
    n_actions = int(rng.integers(1, 5))
    return random_mdp(n_states, n_actions, gamma, rng, n_absorbing=n_absorbing)


def _random_batch(rng: np.random.Generator, mdp: TabularMdp, size: int) -> TransitionBatch:
    s = rng.integers(0, mdp.n_states, size=size)
    a = rng.integers(0, mdp.n_actions, size=size)
    s_next = np.array([mdp.sample_next_state(int(si), int(ai), rng) for si, ai in zip(s, a)], dtype=np.int64)
    return TransitionBatch(s, a, s_next, mdp.absorbing[s_next])


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(numeric))), 1.0)
    return float(np.max(np.abs(analytic - numeric))) / scale


def _central_difference(loss: Callable[[np.ndarray], float], table: np.ndarray, step: float = 1e-4) -> np.ndarray:
    grad = np.zeros_like(table)
    for index in np.ndindex(*table.shape):
        plus, minus = table.copy(), table.copy()
        plus[index] += step
        minus[index] -= step
        grad[index] = (loss(plus) - loss(minus)) / (2.0 * step)
    return grad


def check_occupancy(rng: np.random.Generator, n_instances: int = 50) -> List[CheckResult]:
    mass, agreement = 0.0, 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, n_absorbing=int(rng.integers(0, 2)))
        policy = _random_policy(rng, mdp.n_states, mdp.n_actions)
        rho = occupancy_measure(mdp, policy)
        mass = max(mass, abs(rho.total - 1.0 / (1.0 - mdp.gamma)))
        iterative = occupancy_measure_iterative(mdp, policy)
        agreement = max(agreement, float(np.max(np.abs(rho.values - iterative.values))))
    return [
        _result("occupancy mass 1/(1-gamma)", mass, 1e-8),
        _result("occupancy solve vs iteration", agreement, 1e-8),
    ]


def check_softmax_shift(rng: np.random.Generator, n_instances: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(n_instances):
        q = rng.normal(scale=3.0, size=(int(rng.integers(1, 10)), int(rng.integers(1, 5))))
        beta = float(rng.uniform(0.2, 2.0))
        shift = float(rng.normal(scale=10.0))
        worst = max(worst, float(np.max(np.abs(maxent_policy(q, beta).probs - maxent_policy(q + shift, beta).probs))))
    return _result("softmax shift invariance", worst, 1e-12)


def check_soft_decomposition(rng: np.random.Generator, n_instances: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, n_absorbing=int(rng.integers(0, 2)))
        reward = rng.normal(size=(mdp.n_states, mdp.n_actions))
        policy = _random_policy(rng, mdp.n_states, mdp.n_actions)
        beta = float(rng.uniform(0.05, 1.0))
        soft = policy_evaluation_soft(mdp, reward, policy, beta)
        decomposed = policy_evaluation_hard(mdp, reward, policy) + entropy_critic(mdp, policy, beta)
        worst = max(worst, float(np.max(np.abs(soft - decomposed))))
    return _result("soft Q = hard Q + entropy critic", worst, 1e-8)


def check_soft_fixed_point(rng: np.random.Generator, n_instances: int = 20) -> CheckResult:
    worst = 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, n_absorbing=int(rng.integers(0, 2)))
        reward = rng.normal(size=(mdp.n_states, mdp.n_actions))
        beta = float(rng.uniform(0.1, 1.0))
        q = soft_value_iteration(mdp, reward, beta, tol=1e-11)
        v = beta * logsumexp(q / beta, axis=1)
        v = np.where(mdp.absorbing, absorbing_soft_values(mdp, reward, beta), v)
        worst = max(worst, float(np.max(np.abs(reward + mdp.gamma * mdp.transition @ v - q))))
    return _result("soft value iteration fixed point", worst, 1e-9)


def check_divergence(rng: np.random.Generator, n_pairs: int = 200) -> List[CheckResult]:
    bound_violation, witness_violation, variational_gap, search_gap = 0.0, 0.0, 0.0, 0.0
    for _ in range(n_pairs):
        shape = (int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        d_e = _random_distribution(rng, shape, sparsity=0.3)
        d_p = _random_distribution(rng, shape, sparsity=0.3)
        for c in (0.25, 0.5, 1.0, 2.0):
            spec = MixtureSpec(c, 0.5, d_e, d_p)
            closed = chi2_mixture_closed_form(spec)
            bound_violation = max(bound_violation, -closed, closed - 1.0 / c)
            r_star = optimal_reward(spec)
            witness_violation = max(witness_violation, float(np.max(np.abs(r_star))) - 1.0 / c)
            variational_gap = max(variational_gap, abs(variational_objective(r_star, spec) - closed))

            # the objective separates over entries; maximize each one numerically
            supremum = 0.0
            for e, p in zip(spec.d_expert[spec.support], spec.d_policy[spec.support]):
                found = minimize_scalar(
                    lambda r: -((e - p) * r - 0.5 * c * (e + p) * r * r),
                    bounds=(-1.0 / c - 1.0, 1.0 / c + 1.0),
                    method="bounded",
                    options={"xatol": 1e-10},
                )
                supremum += -found.fun
            search_gap = max(search_gap, abs(supremum - closed))
    return [
        _result("chi2 closed form in [0, 1/c]", max(bound_violation, 0.0), 1e-12),
        _result("optimal reward in [-1/c, 1/c]", max(witness_violation, 0.0), 1e-12),
        _result("variational value at r* = closed form", variational_gap, 1e-10),
        _result("numerical supremum = closed form", search_gap, 1e-6),
    ]


def check_convexity_bound(rng: np.random.Generator, n_pairs: int = 100) -> CheckResult:
    failures = 0
    for _ in range(n_pairs):
        shape = (int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        d_e = _random_distribution(rng, shape, sparsity=0.2)
        d_p = _random_distribution(rng, shape, sparsity=0.2)
        for alpha in (0.1, 0.5, 0.9):
            failures += not chi2_convexity_bound_check(d_e, d_p, alpha)
    return _result("chi2 mixture convexity bound", failures, 0)


def check_affine_identity(rng: np.random.Generator, n_instances: int = 100) -> CheckResult:
    worst = 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=float(rng.uniform(0.5, 0.95)))
        cfg = LsIqConfig(
            c=float(rng.uniform(0.2, 2.0)),
            alpha=float(rng.uniform(0.1, 0.9)),
            beta=float(rng.uniform(0.0, 1.0)),
            gamma=mdp.gamma,
        )
        shape = (mdp.n_states, mdp.n_actions)
        q = rng.normal(size=shape)
        policy = _random_policy(rng, *shape)
        j, l, k = objective_identity_check(
            q, mdp, policy, _random_distribution(rng, shape), _random_distribution(rng, shape), cfg
        )
        worst = max(worst, abs(j - k + cfg.c * l))
    return _result("IQ objective = K - c * LS objective", worst, 1e-10)


def check_forward_operator(rng: np.random.Generator, n_instances: int = 50) -> List[CheckResult]:
    fixed_point, contraction = 0.0, 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=float(rng.uniform(0.5, 0.99)), n_absorbing=int(rng.integers(1, 3)))
        reward = rng.normal(size=(mdp.n_states, mdp.n_actions))
        policy = _random_policy(rng, mdp.n_states, mdp.n_actions)
        q_pi = policy_evaluation_hard(mdp, reward, policy)
        fixed_point = max(fixed_point, float(np.max(np.abs(forward_backup(q_pi, mdp, reward, policy) - q_pi))))

        q_a = rng.normal(scale=10.0, size=q_pi.shape)
        q_b = rng.normal(scale=10.0, size=q_pi.shape)
        gap_out = np.max(np.abs(forward_backup(q_a, mdp, reward, policy) - forward_backup(q_b, mdp, reward, policy)))
        gap_in = np.max(np.abs(q_a - q_b))
        contraction = max(contraction, float(gap_out - mdp.gamma * gap_in))
    return [
        _result("forward operator fixed point", fixed_point, 1e-8),
        _result("forward operator contraction", max(contraction, 0.0), 1e-12),
    ]


def check_target_regime(rng: np.random.Generator) -> List[CheckResult]:
    cfg = LsIqConfig(c=0.5, alpha=0.5, gamma=0.99)
    expected = np.array([2.0, -2.0, 200.0, -200.0])
    actual = np.array([cfg.r_max, cfg.r_min, cfg.q_max, cfg.q_min])
    derived = float(np.max(np.abs(actual - expected) / np.abs(expected)))

    mdp = random_mdp(8, 4, cfg.gamma, rng, n_absorbing=2)
    critic = CriticState(q=rng.normal(scale=1e3, size=(8, 4)), q_target=rng.normal(scale=1e3, size=(8, 4)))
    policy = _random_policy(rng, 8, 4)
    out_of_range = 0.0
    for _ in range(20):
        t_e, t_p = ls_targets(critic, _random_batch(rng, mdp, 64), _random_batch(rng, mdp, 64), policy, cfg)
        targets = np.concatenate([t_e, t_p])
        out_of_range = max(out_of_range, float(np.max(np.abs(targets))) - cfg.q_max)
    return [
        _result("targets (2, -2, 200, -200)", derived, 1e-12),
        _result("clipped targets within [Q_min, Q_max]", max(out_of_range, 0.0), 0.0),
    ]


def check_operator_agreement(rng: np.random.Generator, n_instances: int = 20) -> CheckResult:
    """Both operators bootstrap identically away from absorbing states."""
    worst = 0.0
    lsiq_cfg = LsIqConfig(operator=Operator.LSIQ_OPERATOR)
    iq_cfg = LsIqConfig(operator=Operator.IQ_OPERATOR)
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=lsiq_cfg.gamma, n_absorbing=1)
        batch = _random_batch(rng, mdp, 64)
        values = rng.normal(size=mdp.n_states)
        live = ~batch.absorbing
        for expert_side in (True, False):
            a = bootstrap_values(batch, values, lsiq_cfg, expert_side)[live]
            b = bootstrap_values(batch, values, iq_cfg, expert_side)[live]
            worst = max(worst, float(np.max(np.abs(a - b), initial=0.0)))
    return _result("operators agree off absorbing states", worst, 0.0)


def check_gradients(rng: np.random.Generator, n_instances: int = 10) -> List[CheckResult]:
    worst = {name: 0.0 for name in ("LS", "SQIL", "IQ", "IQv0", "G")}
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=0.9, n_absorbing=1)
        shape = (mdp.n_states, mdp.n_actions)
        cfg = LsIqConfig(
            gamma=mdp.gamma,
            beta=float(rng.uniform(0.05, 0.5)),
            alpha=float(rng.uniform(0.2, 0.8)),
            clip_targets=bool(rng.integers(0, 2)),
        )
        policy = _random_policy(rng, *shape)
        expert_batch, policy_batch = _random_batch(rng, mdp, 32), _random_batch(rng, mdp, 32)
        q_target = rng.normal(size=shape)

        def critic_at(q: np.ndarray) -> CriticState:
            return CriticState(q=q, q_target=q_target)

        losses = {
            "LS": lambda q: ls_loss_and_grad(critic_at(q), expert_batch, policy_batch, policy, cfg),
            "SQIL": lambda q: sqil_loss_and_grad(critic_at(q), expert_batch, policy_batch, policy, cfg),
            "IQ": lambda q: iq_loss_and_grad(critic_at(q), expert_batch, policy_batch, policy, cfg),
            "IQv0": lambda q: iqv0_loss_and_grad(
                critic_at(q), expert_batch, policy_batch, policy, cfg, mdp.initial_dist
            ),
        }
        q0 = rng.normal(size=shape)
        for name, fn in losses.items():
            analytic = fn(q0)[1]
            numeric = _central_difference(lambda q: fn(q)[0], q0)
            worst[name] = max(worst[name], _relative_error(analytic, numeric))

        g0 = rng.normal(size=shape)
        frozen = g0.copy()
        r_q = rng.normal(size=len(policy_batch))

        def g_loss(g: np.ndarray):
            return g_loss_and_grad(g, policy_batch, r_q, cfg.k, cfg.beta, policy, cfg.gamma, bootstrap=frozen)

        numeric = _central_difference(lambda g: g_loss(g)[0], g0)
        worst["G"] = max(worst["G"], _relative_error(g_loss(g0)[1], numeric))
    return [_result(f"{name} gradient vs finite differences", value, 1e-6) for name, value in worst.items()]


def check_sqil_reduction(rng: np.random.Generator, n_instances: int = 20) -> CheckResult:
    """Symmetric SQIL equals LS-IQ without clipping, absorbing values or fixed targets."""
    mismatches = 0
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=0.99, n_absorbing=1)
        shape = (mdp.n_states, mdp.n_actions)
        degraded = LsIqConfig(
            gamma=mdp.gamma, clip_targets=False, operator=Operator.IQ_OPERATOR, fixed_expert_target=False
        )
        sqil = LsIqConfig(
            gamma=mdp.gamma, clip_targets=False, operator=Operator.IQ_OPERATOR,
            algorithm=Algorithm.SQIL, sqil_symmetric=True,
        )
        critic = CriticState(q=rng.normal(size=shape), q_target=rng.normal(size=shape))
        policy = _random_policy(rng, *shape)
        expert_batch, policy_batch = _random_batch(rng, mdp, 64), _random_batch(rng, mdp, 64)
        _, grad_ls = ls_loss_and_grad(critic, expert_batch, policy_batch, policy, degraded)
        _, grad_sqil = sqil_loss_and_grad(critic, expert_batch, policy_batch, policy, sqil)
        mismatches += not np.array_equal(grad_ls, grad_sqil)
    return _result("SQIL = degraded LS-IQ (bitwise)", mismatches, 0)


def check_combined_critic(rng: np.random.Generator, iterations: int = 400) -> CheckResult:
    """G with k = 0 converges to the exact entropy critic on a deterministic 5-state MDP."""
    mdp = random_mdp(5, 3, 0.9, rng, deterministic=True)
    policy = _random_policy(rng, 5, 3)
    beta = 0.5
    s, a = np.divmod(np.arange(15), 3)
    s_next = mdp.transition[s, a].argmax(axis=1)
    batch = TransitionBatch(s, a, s_next, mdp.absorbing[s_next])

    g = np.zeros((5, 3))
    # with lr = N/2 each step is one Jacobi sweep of the entropy Bellman equation
    for _ in range(iterations):
        g = combined_critic_update(g, batch, np.zeros(len(batch)), 0.0, beta, policy, len(batch) / 2.0, mdp.gamma)
    return _result("G(k=0) matches entropy critic", float(np.max(np.abs(g - entropy_critic(mdp, policy, beta)))), 1e-3)


def _short_experiment(seed: int, lfo: bool = False) -> ExperimentConfig:
    return ExperimentConfig(total_steps=40, eval_every=20, eval_episodes=5, seed=seed, lfo=lfo)


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def check_rollout_reproducibility(rng: np.random.Generator, n_instances: int = 20) -> CheckResult:
    mismatches = 0
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=0.9, n_absorbing=1)
        policy = _random_policy(rng, mdp.n_states, mdp.n_actions)
        seed = _seed(rng)
        mismatches += rollout(mdp, policy, 50, seed) != rollout(mdp, policy, 50, seed)
    return _result("rollouts reproducible per seed", mismatches, 0)


def check_absorbing_sink(rng: np.random.Generator, n_instances: int = 50) -> CheckResult:
    """Absorbing states keep their inflow: (1−γ)·x(s_A) = γ·Σ_live x(s) P_π(s, s_A)."""
    worst = 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=float(rng.uniform(0.5, 0.99)), n_absorbing=2)
        policy = _random_policy(rng, mdp.n_states, mdp.n_actions)
        x = state_visitation(mdp, policy)
        p_pi = mdp.policy_transition(policy.probs)
        live, sink = ~mdp.absorbing, mdp.absorbing
        inflow = mdp.gamma * x[live] @ p_pi[np.ix_(live, sink)]
        worst = max(worst, float(np.max(np.abs((1.0 - mdp.gamma) * x[sink] - inflow))))
        # no mass leaves an absorbing state
        worst = max(worst, float(np.max(np.abs(p_pi[np.ix_(sink, sink)] - np.eye(int(sink.sum()))))))
    return _result("absorbing states are flow sinks", worst, 1e-9)


def check_entropy_critic_sign(rng: np.random.Generator, n_instances: int = 20) -> List[CheckResult]:
    lowest, deterministic = 0.0, 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=0.9, n_absorbing=1)
        beta = float(rng.uniform(0.05, 1.0))
        policy = _random_policy(rng, mdp.n_states, mdp.n_actions)
        lowest = min(lowest, float(entropy_critic(mdp, policy, beta).min()))
        greedy = entropy_critic(mdp, policy.greedy(), beta)
        deterministic = max(deterministic, float(np.max(np.abs(greedy))))
    return [
        _result("entropy critic nonnegative", -lowest, 1e-12),
        _result("entropy critic zero for deterministic policies", deterministic, 1e-12),
    ]


def check_fixed_expert_targets(rng: np.random.Generator, n_instances: int = 20) -> CheckResult:
    worst = 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=0.99, n_absorbing=1)
        shape = (mdp.n_states, mdp.n_actions)
        cfg = LsIqConfig(gamma=mdp.gamma, fixed_expert_target=True, clip_targets=bool(rng.integers(0, 2)))
        critic = CriticState(q=rng.normal(scale=100.0, size=shape), q_target=rng.normal(scale=100.0, size=shape))
        policy = _random_policy(rng, *shape)
        t_e, _ = ls_targets(critic, _random_batch(rng, mdp, 64), _random_batch(rng, mdp, 64), policy, cfg)
        worst = max(worst, float(np.max(np.abs(t_e - cfg.q_max))))
    return _result("fixed expert targets equal Q_max", worst, 0.0)


def check_entropy_cap(rng: np.random.Generator, n_instances: int = 20) -> CheckResult:
    """After a clipped update the expert-side bonus is min(bonus, cap), with the cap at the batch maximum."""
    worst = 0.0
    for _ in range(n_instances):
        mdp = _random_instance(rng, gamma=0.9, n_absorbing=1)
        shape = (mdp.n_states, mdp.n_actions)
        cfg = LsIqConfig(gamma=mdp.gamma, beta=float(rng.uniform(0.1, 1.0)), entropy_clip=True)
        policy = _random_policy(rng, *shape)
        policy_batch = _random_batch(rng, mdp, 64)
        critic = CriticState(q=rng.normal(size=shape), q_target=rng.normal(size=shape))
        cap = critic_update(critic, _random_batch(rng, mdp, 64), policy_batch, policy, cfg)[0].entropy_cap

        bonus = entropy_bonuses(policy, cfg.beta)
        q = rng.normal(size=shape)
        capped = target_soft_values(q, policy, cfg, expert_side=True, entropy_cap=cap) - (policy.probs * q).sum(axis=1)
        worst = max(
            worst,
            abs(cap - float(bonus[policy_batch.s_next].max())),
            float(np.max(np.abs(capped - np.minimum(bonus, cap)))),
        )
    return _result("expert entropy bonus capped", worst, 1e-12)


def check_idm_separation(rng: np.random.Generator) -> List[CheckResult]:
    """The IDM counts only learner transitions; full-coverage labels give the LfD expert targets."""
    loop = ImitationLearningLoop(_short_experiment(_seed(rng), lfo=True))
    loop.run()
    replay = loop.replay.as_batch()
    counts = np.zeros_like(loop.idm.counts)
    np.add.at(counts, (replay.s, replay.s_next, replay.a), 1)
    leaked = int(np.abs(loop.idm.counts - counts).sum()) + abs(loop.idm.total_observed - len(replay))

    mdp = loop.mdp
    s, a = np.divmod(np.arange(mdp.n_states * mdp.n_actions), mdp.n_actions)
    s_next = mdp.transition[s, a].argmax(axis=1)
    covering = idm_update(
        InverseDynamicsModel.empty(mdp.n_states, mdp.n_actions), TransitionBatch(s, a, s_next, mdp.absorbing[s_next])
    )
    truth = loop.demos.scoring_batch()
    labelled = label_confident(covering, loop.demos.as_batch())
    if len(labelled) != len(truth):
        parity = float("inf")
    else:
        lfo_targets = ls_targets(loop.critic, labelled, replay, loop.policy, loop.cfg)[0]
        lfd_targets = ls_targets(loop.critic, truth, replay, loop.policy, loop.cfg)[0]
        moved = truth.s != truth.s_next
        parity = float(np.max(np.abs(lfo_targets - lfd_targets))) + int(np.sum(labelled.a[moved] != truth.a[moved]))
    return [
        _result("IDM trained on learner transitions only", leaked, 0),
        _result("IDM labels reproduce expert targets", parity, 0.0),
    ]


def check_metrics_reproducibility(rng: np.random.Generator) -> CheckResult:
    config = _short_experiment(_seed(rng))
    with tempfile.TemporaryDirectory() as tmp:
        first = write_metrics_csv(train(config), Path(tmp) / "first.csv").read_bytes()
        second = write_metrics_csv(train(config), Path(tmp) / "second.csv").read_bytes()
    return _result("same seed gives byte-identical metrics", int(first != second), 0)


def verify(seed: int = 0, show_progress: bool = False) -> VerificationReport:
    """Run every property check; ``report.passed`` is False if any fails."""
    rng = np.random.default_rng(seed)
    suite: List[Callable[[np.random.Generator], object]] = [
        check_occupancy,
        check_softmax_shift,
        check_soft_decomposition,
        check_soft_fixed_point,
        check_divergence,
        check_convexity_bound,
        check_affine_identity,
        check_forward_operator,
        check_target_regime,
        check_operator_agreement,
        check_gradients,
        check_sqil_reduction,
        check_combined_critic,
        check_rollout_reproducibility,
        check_absorbing_sink,
        check_entropy_critic_sign,
        check_fixed_expert_targets,
        check_entropy_cap,
        check_idm_separation,
        check_metrics_reproducibility,
    ]

    report = VerificationReport()
    for check in tqdm(suite, desc="Verifying", disable=not show_progress):
        outcome = check(rng)
        report.results.extend(outcome if isinstance(outcome, list) else [outcome])

    for failure in report.failures:
        logger.warning(f"Check failed: {failure.name} (residual {failure.residual:.3e} > {failure.threshold:.1e})")
    logger.info(f"Verification: {len(report.results) - len(report.failures)}/{len(report.results)} checks passed")
    return report
