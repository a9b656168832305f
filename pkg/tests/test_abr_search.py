"""
Tests for the IS-MCTS approximate best response.
"""

import numpy as np
import pytest

from approx_exploit.exceptions import ConfigurationError, ContractViolation, EvaluatorError
from approx_exploit.games import TERMINAL, InfoStateKey
from approx_exploit.learning import EvaluatorOutput
from approx_exploit.policies import FixedRulePolicy, UniformPolicy
from approx_exploit.search import (
    SearchBackedPolicy,
    SearchConfig,
    SearchNode,
    SearchTree,
    abr_action,
    choose_action,
    key_seed,
    play_episode,
)

from .oracles import MinimaxPolicy, oracle_minimax


class ConstantEvaluator:
    """Returns a fixed (prior, value) everywhere"""

    kind = "constant"

    def __init__(self, value=0.0, prior=None):
        self.value = value
        self.prior = prior

    def evaluate(self, features, key, legal):
        prior = self.prior if self.prior is not None else np.full(len(legal), 1.0 / len(legal))
        return EvaluatorOutput(np.asarray(prior, dtype=np.float64), self.value)


class BrokenEvaluator:
    kind = "broken"

    def evaluate(self, features, key, legal):
        raise RuntimeError("device lost")


class TestSearchConfig:
    def test_defaults(self):
        config = SearchConfig()
        assert config.num_simulations == 800
        assert config.uct_c == 2.6

    @pytest.mark.parametrize(
        "field, value",
        [("num_simulations", 0), ("uct_c", 0.0), ("virtual_loss", -1), ("num_threads", 0)],
    )
    def test_rejects_bad_values(self, field, value):
        with pytest.raises(ConfigurationError, match=field):
            SearchConfig(**{field: value})


class TestSearchNode:
    """Tests for PUCT selection and virtual-loss accounting"""

    def test_first_selection_breaks_ties_low(self):
        node = SearchNode("k", (0, 1), np.array([0.5, 0.5]))
        assert node.select(uct_c=2.6, virtual_loss=1, max_utility=2.0) == 0
        np.testing.assert_array_equal(node.virtual_losses, [1, 0])

    def test_virtual_loss_steers_next_selection(self):
        node = SearchNode("k", (0, 1), np.array([0.5, 0.5]))
        node.select(2.6, 1, 2.0)
        n, w = node.effective(1, 2.0)
        np.testing.assert_array_equal(n, [1, 0])
        np.testing.assert_array_equal(w, [-2.0, 0.0])
        assert node.select(2.6, 1, 2.0) == 1

    def test_backup_reverts_virtual_loss(self):
        node = SearchNode("k", (0, 1, 2), np.full(3, 1.0 / 3))
        index = node.select(2.6, 3, 1.0)
        node.backup(index, 0.5)
        np.testing.assert_array_equal(node.virtual_losses, [0, 0, 0])
        assert node.visits[index] == 1
        assert node.total_value[index] == 0.5
        assert node.mean_values()[index] == 0.5

    def test_puct_prefers_higher_value(self):
        node = SearchNode("k", (0, 1), np.array([0.5, 0.5]))
        node.visits[:] = [10, 10]
        node.total_value[:] = [-10.0, 10.0]
        assert int(np.argmax(node.puct_scores(1.0, 0, 1.0))) == 1

    def test_puct_scores_use_game_units(self):
        node = SearchNode("k", (0, 1, 2), np.array([0.5, 0.3, 0.2]))
        node.visits[:] = [4, 1, 0]
        node.total_value[:] = [26.0, -13.0, 0.0]
        bonus = 2.6 * np.array([0.5, 0.3, 0.2]) * np.sqrt(5.0) / np.array([5.0, 2.0, 1.0])
        np.testing.assert_allclose(node.puct_scores(2.6, 0, 13.0), np.array([6.5, -13.0, 0.0]) + bonus)

    def test_puct_virtual_loss_penalty(self):
        node = SearchNode("k", (0, 1), np.array([0.5, 0.5]))
        node.visits[:] = [2, 2]
        node.total_value[:] = [4.0, 4.0]
        node.virtual_losses[:] = [1, 0]
        scores = node.puct_scores(1.0, 3, 13.0)
        # in flight: N = 2 + 3, W = 4 - 3 * 13
        assert scores[0] == pytest.approx(-35.0 / 5.0 + 0.5 * np.sqrt(7.0) / 6.0)
        assert scores[1] == pytest.approx(2.0 + 0.5 * np.sqrt(7.0) / 3.0)

    def test_choose_action(self):
        node = SearchNode("k", (3, 7), np.array([0.5, 0.5]))
        node.visits[:] = [1, 5]
        assert choose_action(node, sample=False, rng=None) == 7
        with pytest.raises(ContractViolation):
            choose_action(node, sample=True, rng=None)

    def test_visit_policy_needs_visits(self):
        node = SearchNode("k", (0, 1), np.array([0.5, 0.5]))
        with pytest.raises(ContractViolation):
            node.visit_policy()


class TestAbrAction:
    """Tests for one searched decision"""

    def test_single_simulation_is_one_hot(self, kuhn):
        opponent = UniformPolicy(kuhn, 1)
        tree = SearchTree(opponent, 0)
        config = SearchConfig(num_simulations=1, num_threads=1)
        result = abr_action(InfoStateKey(0, "Q"), tree, opponent, ConstantEvaluator(), config)
        assert sorted(result.visit_policy) == [0.0, 1.0]

    def test_visits_sum_to_simulations(self, leduc, small_search):
        opponent = UniformPolicy(leduc, 0)
        tree = SearchTree(opponent, 1)
        result = abr_action(InfoStateKey(1, "Qh|r"), tree, opponent, ConstantEvaluator(), small_search)
        root = tree.get("Qh|r")
        assert root.visits.sum() == small_search.num_simulations
        assert result.visit_policy.sum() == pytest.approx(1.0)
        assert result.diagnostics.simulations == small_search.num_simulations
        assert result.diagnostics.evaluator_calls >= 1

    def test_threaded_search_leaves_no_virtual_loss(self, leduc):
        opponent = UniformPolicy(leduc, 1)
        tree = SearchTree(opponent, 0)
        config = SearchConfig(num_simulations=200, virtual_loss=2, num_threads=4, seed=3)
        abr_action(InfoStateKey(0, "Kh"), tree, opponent, ConstantEvaluator(), config)
        assert tree.get("Kh").visits.sum() == 200
        for node in tree.nodes.values():
            assert not node.virtual_losses.any()

    def test_same_seed_same_search(self, kuhn, small_search):
        opponent = UniformPolicy(kuhn, 1)
        key = InfoStateKey(0, "K|p|b")
        runs = []
        for _ in range(2):
            tree = SearchTree(opponent, 0)
            runs.append(abr_action(key, tree, opponent, ConstantEvaluator(), small_search).visit_policy)
        np.testing.assert_array_equal(runs[0], runs[1])

    def test_takes_an_immediate_win(self, tic_tac_toe):
        # x holds 0 and 1, o holds 3 and 4; x to move
        opponent = UniformPolicy(tic_tac_toe, 1)
        tree = SearchTree(opponent, 0)
        config = SearchConfig(num_simulations=400, num_threads=1, seed=1)
        key = tic_tac_toe.infostate_key(tic_tac_toe.replay([0, 3, 1, 4]), 0)
        result = abr_action(key, tree, opponent, ConstantEvaluator(), config)
        assert result.action == 2

    def test_never_plays_a_minimax_losing_move(self, tic_tac_toe):
        # x: 0, 4; o: 8, 2; x to move and must block at 5
        minimax = oracle_minimax(tic_tac_toe, seat=0)
        h = tic_tac_toe.replay([0, 8, 4, 2])
        opponent = UniformPolicy(tic_tac_toe, 1)
        config = SearchConfig(num_simulations=800, num_threads=1, seed=4)
        result = abr_action(
            tic_tac_toe.infostate_key(h, 0), SearchTree(opponent, 0), opponent, ConstantEvaluator(), config
        )
        assert minimax(h.child(result.action)) == minimax(h)

    @pytest.mark.slow
    @pytest.mark.parametrize("seat", [0, 1])
    def test_avoids_minimax_losing_moves_over_sampled_games(self, tic_tac_toe, seat):
        minimax = oracle_minimax(tic_tac_toe, seat=seat)
        opponent = MinimaxPolicy(tic_tac_toe, 1 - seat, noise=0.1)
        rng = np.random.default_rng(seat)
        checked = 0
        for game_index in range(25):
            h = tic_tac_toe.new_initial_state()
            while tic_tac_toe.current_player(h) != TERMINAL:
                player = tic_tac_toe.current_player(h)
                key = tic_tac_toe.infostate_key(h, player)
                if player == seat:
                    config = SearchConfig(num_simulations=2000, num_threads=1, seed=game_index)
                    result = abr_action(key, SearchTree(opponent, seat), opponent, ConstantEvaluator(), config)
                    if minimax(h) > -1.0:
                        assert minimax(h.child(result.action)) > -1.0, key.observation_string
                        checked += 1
                    h = h.child(result.action)
                else:
                    legal = tic_tac_toe.legal_actions(h)
                    probs = opponent.action_probabilities(key, legal)
                    h = h.child(int(rng.choice(legal, p=probs)))
        assert checked >= 50

    def test_bets_the_king_into_a_calling_station(self, kuhn):
        # seat 0 checks, then calls any bet
        station = FixedRulePolicy(kuhn, 0, "always_call")
        tree = SearchTree(station, 1)
        config = SearchConfig(num_simulations=200, num_threads=1, seed=2)
        result = abr_action(InfoStateKey(1, "K|p"), tree, station, ConstantEvaluator(), config)
        assert result.action == 1

    def test_degenerate_belief_is_counted(self, leduc, small_search):
        opponent = FixedRulePolicy(leduc, 0, "always_call")
        tree = SearchTree(opponent, 1)
        result = abr_action(InfoStateKey(1, "Kh|r"), tree, opponent, ConstantEvaluator(), small_search)
        assert result.diagnostics.degenerate_posteriors == 1
        assert tree.beliefs.degenerate_count == 1

    def test_key_must_belong_to_searcher(self, kuhn, small_search):
        opponent = UniformPolicy(kuhn, 1)
        tree = SearchTree(opponent, 0)
        with pytest.raises(ContractViolation, match="seat"):
            abr_action(InfoStateKey(1, "Q|b"), tree, opponent, ConstantEvaluator(), small_search)

    def test_opponent_must_match_tree(self, kuhn, small_search):
        tree = SearchTree(UniformPolicy(kuhn, 1), 0)
        with pytest.raises(ContractViolation, match="belief model"):
            abr_action(InfoStateKey(0, "Q"), tree, UniformPolicy(kuhn, 1), ConstantEvaluator(), small_search)

    def test_evaluator_failure_is_wrapped(self, kuhn, small_search):
        opponent = UniformPolicy(kuhn, 1)
        tree = SearchTree(opponent, 0)
        with pytest.raises(EvaluatorError, match="device lost"):
            abr_action(InfoStateKey(0, "J"), tree, opponent, BrokenEvaluator(), small_search)

    def test_out_of_range_value_rejected(self, kuhn, small_search):
        opponent = UniformPolicy(kuhn, 1)
        tree = SearchTree(opponent, 0)
        with pytest.raises(EvaluatorError, match="outside"):
            abr_action(InfoStateKey(0, "J"), tree, opponent, ConstantEvaluator(value=1.5), small_search)


class TestEpisodes:
    def test_kuhn_episode(self, kuhn, small_search, kuhn_tabular):
        result = play_episode(0, UniformPolicy(kuhn, 1), kuhn_tabular, small_search, np.random.default_rng(0))
        assert result.seat == 0
        assert result.episode_return in (-2.0, -1.0, 1.0, 2.0)
        assert 1 <= len(result.records) <= 2
        for record in result.records:
            assert record.visit_policy.sum() == pytest.approx(1.0)
            assert len(record.visit_policy) == len(record.legal)
            assert record.features.shape == (kuhn.spec.feature_size,)

    def test_seat_must_be_valid(self, kuhn, small_search, kuhn_tabular):
        with pytest.raises(ContractViolation):
            play_episode(2, UniformPolicy(kuhn, 1), kuhn_tabular, small_search, np.random.default_rng(0))


class TestSearchBackedPolicy:
    def test_one_hot_and_cached(self, kuhn, small_search):
        policy = SearchBackedPolicy(0, ConstantEvaluator(), UniformPolicy(kuhn, 1), small_search)
        first = policy.action_probabilities(InfoStateKey(0, "K"), [0, 1])
        assert sorted(first) == [0.0, 1.0]
        np.testing.assert_array_equal(policy.action_probabilities(InfoStateKey(0, "K"), [0, 1]), first)
        assert policy.diagnostics.simulations == small_search.num_simulations
        assert list(policy.decisions) == ["K"]

    def test_independent_of_query_order(self, kuhn, small_search):
        keys = [InfoStateKey(0, k) for k in ("J", "Q", "K")]
        a = SearchBackedPolicy(0, ConstantEvaluator(), UniformPolicy(kuhn, 1), small_search)
        b = SearchBackedPolicy(0, ConstantEvaluator(), UniformPolicy(kuhn, 1), small_search)
        for key in keys:
            a.decide(key)
        for key in reversed(keys):
            b.decide(key)
        assert a.decisions == b.decisions

    def test_rejects_other_seat(self, kuhn, small_search):
        policy = SearchBackedPolicy(0, ConstantEvaluator(), UniformPolicy(kuhn, 1), small_search)
        with pytest.raises(ContractViolation):
            policy.decide(InfoStateKey(1, "K|b"))


def test_key_seed_is_stable():
    assert key_seed(1, "kuhn_poker", "K") == key_seed(1, "kuhn_poker", "K")
    assert key_seed(1, "kuhn_poker", "K") != key_seed(2, "kuhn_poker", "K")
