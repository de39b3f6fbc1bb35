"""Sequence evaluation and brute-force search against analytical plans."""

import numpy as np
import pytest

from teachsel import (
    Exponential,
    InvalidInputError,
    ProblemInstance,
    SelectionSequence,
    Tabulated,
    discounted_baseline_loss,
    exhaustive_prefix_search,
    mse,
    optimal_stationary_sequence,
    sequence_loss,
    sequence_value,
    simulate_beliefs,
)

from conftest import random_instance


def truncated_loss(instance, dynamic, sequence, horizon: int) -> float:
    """Term-by-term loss over `horizon` steps; independent of the closed forms."""
    traj = simulate_beliefs(instance, dynamic, sequence, horizon)
    return sum(
        instance.delta**t * mse(instance, sequence.subset_at(t), traj.h[t])
        for t in range(horizon)
    )


def loss_horizon(instance, tol: float = 1e-11) -> int:
    """Steps needed until the discounted remainder is certifiably below tol."""
    ceiling = instance.mse_empty() + float(np.sum(instance.divergence0))
    h = 1
    while instance.delta**h * ceiling / (1.0 - instance.delta) >= tol:
        h += 1
    return h


def random_sequence(rng, instance) -> SelectionSequence:
    def subset():
        size = int(rng.integers(0, instance.k + 1))
        return tuple(sorted(rng.choice(instance.n, size=size, replace=False).tolist()))

    prefix = tuple(subset() for _ in range(int(rng.integers(0, 5))))
    return SelectionSequence(prefix=prefix, tail=subset())


class TestSimulateBeliefs:
    def test_one_step_learner_converges_after_single_use(self, three_feature_instance):
        traj = simulate_beliefs(
            three_feature_instance,
            Exponential(0.0),
            SelectionSequence.stationary((0, 1, 2)),
            horizon=3,
        )
        np.testing.assert_array_equal(traj.h[0], three_feature_instance.h0)
        for t in (1, 2, 3):
            np.testing.assert_allclose(traj.h[t], three_feature_instance.a)

    def test_unselected_features_never_move(self, three_feature_instance):
        traj = simulate_beliefs(
            three_feature_instance,
            Exponential(0.5),
            SelectionSequence.stationary((0,)),
            horizon=5,
        )
        np.testing.assert_array_equal(traj.h[:, 1], np.full(6, 0.2))
        np.testing.assert_array_equal(traj.h[:, 2], np.full(6, 0.15))

    def test_two_observations_scale_divergence_by_phi_of_two(self):
        inst = ProblemInstance(
            a=[1.0], c=0.0, h0=[-0.5], c_bar=0.0, k=1, delta=0.5
        )
        traj = simulate_beliefs(
            inst, Exponential(0.5), SelectionSequence.stationary((0,)), horizon=2
        )
        divergence = (inst.a[0] - traj.h[2, 0]) ** 2
        assert divergence == pytest.approx(0.0625 * 2.25, abs=1e-12)

    def test_divergence_identity_for_any_dynamic(self):
        """(a - h_t)^2 == phi(m_t) * (a - h0)^2 at every step."""
        rng = np.random.default_rng(19)
        dynamics = [
            Exponential(0.6),
            Tabulated((1.0, 0.7, 0.2), tail_w=0.3),
        ]
        for dyn in dynamics:
            for _ in range(20):
                inst = random_instance(rng)
                seq = random_sequence(rng, inst)
                traj = simulate_beliefs(inst, dyn, seq, horizon=8)
                for t in range(9):
                    for i in range(inst.n):
                        lhs = (inst.a[i] - traj.h[t, i]) ** 2
                        rhs = dyn.phi(int(traj.counts[t, i])) * inst.divergence0[i]
                        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_counts_nondecreasing(self, three_feature_instance):
        rng = np.random.default_rng(23)
        seq = random_sequence(rng, three_feature_instance)
        traj = simulate_beliefs(three_feature_instance, Exponential(0.5), seq, 10)
        assert np.all(np.diff(traj.counts, axis=0) >= 0)


class TestSequenceLoss:
    def test_never_selecting_costs_the_baseline(self, three_feature_instance):
        loss = sequence_loss(
            three_feature_instance, Exponential(0.0), SelectionSequence.all_empty()
        )
        assert loss == pytest.approx(1.4, abs=1e-12)

    def test_fast_learner_pays_only_the_first_step(self, three_feature_instance):
        loss = sequence_loss(
            three_feature_instance,
            Exponential(0.0),
            SelectionSequence.stationary((0, 1, 2)),
        )
        assert loss == pytest.approx(0.2525, abs=1e-12)

    def test_partial_selection_keeps_paying_for_the_missing_feature(
        self, three_feature_instance
    ):
        loss = sequence_loss(
            three_feature_instance,
            Exponential(0.0),
            SelectionSequence.stationary((1, 2)),
        )
        assert loss == pytest.approx(0.9025, abs=1e-12)

    def test_matches_truncated_oracle_on_random_sequences(self):
        rng = np.random.default_rng(47)
        for _ in range(30):
            inst = random_instance(rng, delta=float(rng.uniform(0.05, 0.9)))
            dyn = (
                Exponential(float(rng.uniform(0, 0.9)))
                if rng.random() < 0.5
                else Tabulated((1.0, float(rng.uniform(0, 1))), tail_w=0.4)
            )
            seq = random_sequence(rng, inst)
            expected = truncated_loss(inst, dyn, seq, loss_horizon(inst))
            assert sequence_loss(inst, dyn, seq) == pytest.approx(
                expected, abs=1e-9
            )

    def test_budget_violations_rejected(self, two_feature_instance):
        with pytest.raises(InvalidInputError):
            sequence_loss(
                two_feature_instance,
                Exponential(0.0),
                SelectionSequence.stationary((0, 1)),  # k = 1
            )


class TestSequenceValue:
    def test_empty_sequence_is_worthless(self, three_feature_instance):
        value = sequence_value(
            three_feature_instance, Exponential(0.5), SelectionSequence.all_empty()
        )
        assert value == 0.0

    def test_stationary_value_matches_planner(self):
        rng = np.random.default_rng(53)
        for _ in range(30):
            inst = random_instance(rng)
            dyn = Exponential(float(rng.uniform(0, 0.95)))
            plan = optimal_stationary_sequence(inst, dyn)
            value = sequence_value(
                inst, dyn, SelectionSequence.stationary(plan.subset)
            )
            assert value == pytest.approx(plan.total_value, abs=1e-9)

    def test_loss_value_duality(self):
        rng = np.random.default_rng(59)
        for _ in range(50):
            inst = random_instance(rng)
            dyn = Exponential(float(rng.uniform(0, 0.95)))
            seq = random_sequence(rng, inst)
            total = sequence_value(inst, dyn, seq) + sequence_loss(inst, dyn, seq)
            assert total == pytest.approx(
                discounted_baseline_loss(inst), abs=2e-9
            )

    def test_closed_tail_matches_long_prefix_form(self):
        """A stationary plan scored directly equals the same plan written as a
        ten-step prefix plus offset-aware tail."""
        rng = np.random.default_rng(61)
        for _ in range(20):
            inst = random_instance(rng)
            dyn = Exponential(float(rng.uniform(0, 0.9)))
            subset = optimal_stationary_sequence(inst, dyn).subset
            direct = sequence_value(inst, dyn, SelectionSequence.stationary(subset))
            prefixed = sequence_value(
                inst,
                dyn,
                SelectionSequence(prefix=tuple([subset] * 10), tail=subset),
            )
            assert prefixed == pytest.approx(direct, abs=1e-10)


class TestExhaustivePrefixSearch:
    def test_two_feature_demo_under_low_patience(self, two_feature_instance):
        best_seq, best_value = exhaustive_prefix_search(
            two_feature_instance, Exponential(0.0), prefix_length=3
        )
        stationary = optimal_stationary_sequence(
            two_feature_instance, Exponential(0.0)
        )
        assert stationary.subset == (1,)
        assert best_value == pytest.approx(stationary.total_value, abs=1e-9)

    def test_two_feature_demo_under_high_patience(self):
        inst = ProblemInstance(
            a=[1.0, 0.4], c=0.0, h0=[-0.5, 0.75], c_bar=0.0, k=1, delta=0.7
        )
        best_seq, best_value = exhaustive_prefix_search(
            inst, Exponential(0.0), prefix_length=3
        )
        stationary = optimal_stationary_sequence(inst, Exponential(0.0))
        assert stationary.subset == (0,)
        assert best_value == pytest.approx(stationary.total_value, abs=1e-9)

    def test_no_prefix_beats_stationary_on_random_instances(self):
        rng = np.random.default_rng(67)
        for _ in range(20):
            inst = random_instance(rng, n=int(rng.integers(1, 5)), max_n=4)
            if inst.k > 2:
                inst = ProblemInstance(
                    a=inst.a, c=inst.c, h0=inst.h0, c_bar=inst.c_bar, k=2,
                    delta=inst.delta,
                )
            dyn = Exponential(float(rng.uniform(0, 0.9)))
            _, best_value = exhaustive_prefix_search(inst, dyn, prefix_length=3)
            stationary = optimal_stationary_sequence(inst, dyn).total_value
            assert best_value <= stationary + 1e-9
            assert best_value >= stationary - 1e-9  # stationary plans are searched too

    def test_size_limits_enforced(self):
        big = ProblemInstance(
            a=np.full(5, 0.5), c=0.0, h0=np.zeros(5), c_bar=0.0, k=2, delta=0.5
        )
        with pytest.raises(InvalidInputError):
            exhaustive_prefix_search(big, Exponential(0.0), prefix_length=2)
        small = ProblemInstance(
            a=[0.5, 0.4, 0.3], c=0.0, h0=[0.0, 0.0, 0.0], c_bar=0.0, k=3, delta=0.5
        )
        with pytest.raises(InvalidInputError):
            exhaustive_prefix_search(small, Exponential(0.0), prefix_length=2)
        ok = ProblemInstance(
            a=[0.5, 0.4], c=0.0, h0=[0.0, 0.0], c_bar=0.0, k=2, delta=0.5
        )
        with pytest.raises(InvalidInputError):
            exhaustive_prefix_search(ok, Exponential(0.0), prefix_length=9)
