"""
Tests for the game layer: rules, keys, features and compiled trees.
"""

import numpy as np
import pytest

from approx_exploit.exceptions import ConfigurationError, ContractViolation
from approx_exploit.games import (
    CHANCE,
    GAME_IDS,
    TERMINAL,
    InfoStateKey,
    get_game_tree,
    infostate_catalog,
    load_game,
    new_game,
)
from approx_exploit.games.liars_dice import LIAR, bid_quantity_face


def own_actions(tree, index, player):
    """The actions ``player`` took on the path to node ``index``."""
    path = []
    node = tree.nodes[index]
    while node.parent >= 0:
        parent = tree.nodes[node.parent]
        if parent.player == player:
            path.append(node.action)
        node = parent
    return tuple(reversed(path))


class TestRegistry:
    """Tests for game lookup"""

    def test_all_games_load(self):
        for game_id in GAME_IDS:
            game = load_game(game_id)
            assert game.spec.game_id == game_id
            assert game.spec.num_players == 2

    def test_unknown_game_rejected(self):
        with pytest.raises(ConfigurationError, match="Unknown game id"):
            load_game("go")

    def test_load_returns_shared_instance(self):
        assert load_game("kuhn_poker") is load_game("kuhn_poker")

    def test_new_game_starts_at_chance(self):
        spec, h = new_game("leduc_poker")
        assert spec.max_utility == 13
        assert h.current_player() == CHANCE
        assert len(h) == 0


class TestInfostateCounts:
    """Enumerated infostate counts of the traversable games"""

    def test_kuhn(self):
        tree = get_game_tree("kuhn_poker")
        assert tree.num_infostates(0) + tree.num_infostates(1) == 12

    def test_leduc(self):
        tree = get_game_tree("leduc_poker")
        assert tree.num_infostates(0) + tree.num_infostates(1) == 936

    @pytest.mark.slow
    def test_liars_dice(self):
        tree = get_game_tree("liars_dice")
        assert tree.num_infostates(0) + tree.num_infostates(1) == 24576

    def test_connect_four_is_not_traversable(self):
        with pytest.raises(ConfigurationError, match="too large"):
            get_game_tree("connect_four")

    def test_catalog_is_sorted(self, kuhn):
        catalog = infostate_catalog(kuhn, 1)
        assert list(catalog) == sorted(catalog)
        assert catalog["Q|b"] == (0, 1)


class TestTreeProperties:
    """Structural properties checked over every history"""

    @pytest.mark.parametrize("game_id", ["kuhn_poker", "leduc_poker"])
    def test_zero_sum(self, game_id):
        tree = get_game_tree(game_id)
        for node in tree.nodes:
            if node.player == TERMINAL:
                assert node.returns[0] + node.returns[1] == 0.0

    @pytest.mark.parametrize("game_id", ["kuhn_poker", "leduc_poker"])
    def test_chance_probabilities_sum_to_one(self, game_id):
        tree = get_game_tree(game_id)
        for node in tree.nodes:
            if node.player == CHANCE:
                assert abs(sum(node.chance_probs) - 1.0) < 1e-12

    @pytest.mark.parametrize("game_id", ["kuhn_poker", "leduc_poker"])
    def test_perfect_recall(self, game_id):
        """Histories sharing an infostate share legal actions and the player's own past actions"""
        tree = get_game_tree(game_id)
        for player in (0, 1):
            for key, members in tree.infostates[player].items():
                legal = {tree.nodes[m].legal for m in members}
                assert len(legal) == 1, key
                histories = {own_actions(tree, m, player) for m in members}
                assert len(histories) == 1, key

    def test_utilities_within_bounds(self, leduc):
        tree = get_game_tree(leduc)
        for node in tree.nodes:
            if node.player == TERMINAL:
                assert leduc.spec.min_utility <= node.returns[0] <= leduc.spec.max_utility

    def test_history_replays_to_node(self, kuhn):
        tree = get_game_tree(kuhn)
        for index in (5, 17, len(tree.nodes) - 1):
            h = tree.history(index)
            assert kuhn.current_player(h) == tree.nodes[index].player


class TestKuhnRules:
    def test_keys_after_deal(self, kuhn):
        h = kuhn.replay([2, 0])
        assert kuhn.infostate_key(h, 0) == InfoStateKey(0, "K")
        assert kuhn.infostate_key(h, 1) == InfoStateKey(1, "J")

    def test_bet_is_seen_by_both(self, kuhn):
        h = kuhn.replay([2, 0, 1])
        assert kuhn.infostate_key(h, 1).observation_string == "J|b"
        assert kuhn.infostate_key(h, 0).observation_string == "K|b"

    def test_fold_after_bet(self, kuhn):
        h = kuhn.replay([0, 2, 1, 0])
        assert h.is_terminal()
        assert h.returns() == (1.0, -1.0)

    def test_showdown_after_call(self, kuhn):
        h = kuhn.replay([0, 2, 0, 1, 1])
        assert h.returns() == (-2.0, 2.0)

    def test_features(self, kuhn):
        h = kuhn.replay([1, 2, 1])
        features = kuhn.infostate_tensor(h, 1)
        assert features.shape == (kuhn.spec.feature_size,)
        np.testing.assert_array_equal(features[:5], [0, 1, 0, 0, 1])
        np.testing.assert_array_equal(features[5:7], [0, 1])


class TestLeducRules:
    def test_fold_only_facing_raise(self, leduc):
        h = leduc.replay([4, 0])
        assert leduc.legal_actions(h) == [1, 2]
        h = h.child(2)
        assert leduc.legal_actions(h) == [0, 1, 2]

    def test_public_card_observed_by_both(self, leduc):
        h = leduc.replay([4, 0, 1, 1, 2])
        assert leduc.current_player(h) == 0
        assert leduc.infostate_key(h, 0).observation_string == "Ks|c|c|Qs"
        assert leduc.infostate_key(h, 1).observation_string == "Js|c|c|Qs"

    def test_raise_cap(self, leduc):
        h = leduc.replay([4, 0, 2, 2])
        assert 2 not in leduc.legal_actions(h)

    def test_pair_beats_high_card(self, leduc):
        # seat 0 holds Js, seat 1 Ks, public Jh
        h = leduc.replay([0, 4, 1, 1, 1, 1, 1])
        assert h.is_terminal()
        assert h.returns() == (1.0, -1.0)


class TestLiarsDiceRules:
    def test_bid_encoding(self):
        assert bid_quantity_face(0) == (1, 1)
        assert bid_quantity_face(11) == (2, 6)
        assert LIAR == 12

    def test_wild_face_counts(self, liars_dice):
        # dice 6 and 3, bid two 3s, challenged: 6 is wild, bid holds
        h = liars_dice.replay([6, 3, 8, LIAR])
        assert h.is_terminal()
        assert h.returns() == (1.0, -1.0)

    def test_failed_bid_loses(self, liars_dice):
        h = liars_dice.replay([1, 2, 3, 10, LIAR])
        # seat 1 bid two 5s with no 5 or 6 showing
        assert h.returns() == (1.0, -1.0)

    def test_liar_needs_a_bid(self, liars_dice):
        h = liars_dice.replay([1, 2])
        assert LIAR not in liars_dice.legal_actions(h)


class TestContracts:
    def test_illegal_action(self, kuhn):
        h = kuhn.replay([0, 1])
        with pytest.raises(ContractViolation, match="illegal action"):
            kuhn.apply(h, 5)

    def test_returns_on_live_history(self, kuhn):
        with pytest.raises(ContractViolation):
            kuhn.returns(kuhn.new_initial_state())

    def test_chance_outcomes_on_decision_node(self, kuhn):
        with pytest.raises(ContractViolation):
            kuhn.chance_outcomes(kuhn.replay([0, 1]))

    def test_histories_compare_by_actions(self, kuhn):
        assert kuhn.replay([0, 1, 1]) == kuhn.replay([0, 1, 1])
        assert hash(kuhn.replay([0, 1])) == hash(kuhn.replay([0, 1]))
