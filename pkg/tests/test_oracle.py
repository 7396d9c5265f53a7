import numpy as np
import pytest

from conftest import random_simplex
from migmdp import (
    Action,
    MigrationMdp,
    ThresholdPair,
    always_migrate_policy,
    evaluate_thresholds,
    exhaustive_threshold_search,
    extended_action_value_iteration,
    find_optimal_thresholds,
    is_threshold_policy,
    never_migrate_policy,
    value_iteration,
)


def make(p=0.3, q=0.2, lo=-3, hi=3, beta=0.5, gamma=0.9):
    return MigrationMdp(p=p, q=q, min_offset=lo, max_offset=hi, beta=beta, gamma=gamma)


class TestExhaustiveSearch:
    def test_free_transmission_prefers_widest_band(self):
        mdp = make(beta=0.0)
        pair, values = exhaustive_threshold_search(mdp)
        assert pair == ThresholdPair(-2, 2)
        # with free transmission any narrower band pays migrations for nothing
        narrower = evaluate_thresholds(mdp, ThresholdPair(-1, 1))
        assert np.all(values <= narrower + 1e-12)
        assert values[mdp.index(0)] < narrower[mdp.index(0)]

    def test_ruinous_transmission_prefers_tightest_band(self):
        mdp = make(beta=100.0)
        pair, values = exhaustive_threshold_search(mdp)
        assert pair == ThresholdPair(0, 0)
        # fixed point by hand: every nonzero offset migrates, so
        # m = 1 + g*L and L = (p+q)*m + (1-p-q)*g*L gives m = 5.5, origin 4.5
        assert np.max(np.abs(values - [5.5, 5.5, 5.5, 4.5, 5.5, 5.5, 5.5])) <= 1e-9

    def test_winner_is_pointwise_minimal(self):
        rng = np.random.default_rng(11)
        for _ in range(15):
            p, q = random_simplex(rng)
            mdp = make(p=p, q=q, beta=float(rng.uniform(0, 3)))
            _, best = exhaustive_threshold_search(mdp)
            for k1 in range(mdp.min_offset + 1, 1):
                for k2 in range(0, mdp.max_offset):
                    rival = evaluate_thresholds(mdp, ThresholdPair(k1, k2))
                    assert np.all(best <= rival + 1e-9)

    def test_tie_break_is_deterministic(self):
        # static user with beta/(1-gamma) = 1 exactly: staying put and
        # migrating cost the same from every offset, so all bands tie
        # pointwise and the tightest pair must win
        mdp = make(p=0.0, q=0.0, beta=0.5, gamma=0.5)
        pair, values = exhaustive_threshold_search(mdp)
        assert pair == ThresholdPair(0, 0)
        assert np.max(np.abs(values - [1, 1, 1, 0, 1, 1, 1])) <= 1e-9
        assert exhaustive_threshold_search(mdp)[0] == pair

    def test_budget_guard(self):
        mdp = make(lo=-10, hi=10)
        with pytest.raises(ValueError, match="budget"):
            exhaustive_threshold_search(mdp, max_pairs=5)


class TestIsThresholdPolicy:
    def test_band_policies_pass(self):
        mdp = make(lo=-2, hi=2)
        assert is_threshold_policy(mdp, np.array([1, 0, 0, 0, 1]))
        assert is_threshold_policy(mdp, never_migrate_policy(mdp))
        assert is_threshold_policy(mdp, always_migrate_policy(mdp))

    def test_gap_in_keep_region_fails(self):
        mdp = make(lo=-3, hi=3)
        # keeps at -2 and 0 but migrates at -1: not a contiguous band
        policy = np.array([1, 0, 1, 0, 1, 1, 1])
        assert not is_threshold_policy(mdp, policy)

    def test_origin_action_is_canonicalized(self):
        mdp = make(lo=-2, hi=2)
        migrate_at_origin = np.array([1, 1, 1, 1, 1])
        assert is_threshold_policy(mdp, migrate_at_origin)

    def test_detached_keep_region_fails(self):
        mdp = make(lo=-3, hi=3)
        # the only keep is at offset +2; canonicalizing the origin to keep
        # leaves {0, 2}, which is not one contiguous band
        policy = np.array([1, 1, 1, 1, 1, 0, 1])
        assert not is_threshold_policy(mdp, policy)

    def test_invalid_boundary_rejected(self):
        mdp = make(lo=-2, hi=2)
        with pytest.raises(ValueError, match="boundary"):
            is_threshold_policy(mdp, np.array([0, 0, 0, 0, 1]))


class TestExtendedActionOracle:
    def test_static_user_values(self):
        # from any nonzero offset the choice is stay forever (beta/(1-g) = 2)
        # or pay 1 to land on the origin and never pay again
        mdp = make(p=0.0, q=0.0, beta=1.0, gamma=0.5)
        values = extended_action_value_iteration(mdp, 1e-8)
        expected = np.array([1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0])
        assert np.max(np.abs(values - expected)) <= 1e-6

    def test_never_above_two_action_optimum(self):
        rng = np.random.default_rng(13)
        epsilon = 1e-6
        for _ in range(10):
            p, q = random_simplex(rng)
            mdp = make(p=p, q=q, beta=float(rng.uniform(0, 3)))
            extended = extended_action_value_iteration(mdp, epsilon)
            two_action = find_optimal_thresholds(mdp).values
            assert np.all(extended <= two_action + 2 * epsilon)

    def test_matches_two_action_optimum_for_symmetric_mobility(self):
        # with no drift, landing on the user maximizes the time to the next
        # forced boundary migration, so wider landing choices buy nothing
        rng = np.random.default_rng(17)
        epsilon = 1e-4
        for _ in range(20):
            p = float(rng.uniform(0.01, 0.49))
            mdp = make(
                p=p,
                q=p,
                beta=float(rng.uniform(0, 3)),
                gamma=float(rng.choice([0.5, 0.9, 0.99])),
            )
            extended = extended_action_value_iteration(mdp, epsilon)
            two_action = find_optimal_thresholds(mdp).values
            assert np.max(np.abs(extended - two_action)) <= 2 * epsilon

    def test_anticipatory_landing_beats_migrate_to_user_under_drift(self):
        # strong upward drift plus cheap transmission: a forced boundary
        # migration does better landing upstream of the user, because the
        # walk then takes far longer to hit the boundary again; the
        # two-action model cannot express this and pays for it
        mdp = make(p=0.6, q=0.1, beta=0.1, gamma=0.9)
        extended = extended_action_value_iteration(mdp, 1e-6)
        two_action = find_optimal_thresholds(mdp).values
        gap = two_action - extended
        assert np.min(gap) >= 0.1
        assert gap[mdp.index(mdp.max_offset)] >= 0.25
        # the greedy landing target from a forced migration is d = -1,
        # one step upstream, not the user's own location d = 0
        stay = 1.0 - mdp.p - mdp.q
        continuation = mdp.gamma * (
            mdp.q * extended[:-2] + stay * extended[1:-1] + mdp.p * extended[2:]
        )
        landing = 1.0 + mdp.beta * (mdp.states[1:-1] != 0) + continuation
        best = mdp.states[1:-1][int(np.argmin(landing))]
        assert best == -1

    def test_matches_plain_value_iteration(self):
        mdp = make(beta=1.5)
        epsilon = 1e-5
        extended = extended_action_value_iteration(mdp, epsilon)
        plain = value_iteration(mdp, epsilon)
        assert np.all(extended <= plain.values + 2 * epsilon)

    def test_epsilon_must_be_positive(self):
        with pytest.raises(ValueError, match="epsilon"):
            extended_action_value_iteration(make(), -1.0)
