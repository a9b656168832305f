"""
Tests for policy sources, head-to-head matches and reports.
"""

import json

import pytest

from approx_exploit.exceptions import ConfigurationError
from approx_exploit.games import InfoStateKey
from approx_exploit.harness import build_policy, build_profile, build_report, play_match, write_report
from approx_exploit.harness.reports import config_digest, to_jsonable
from approx_exploit.learning import TabularEvaluator, save_checkpoint
from approx_exploit.policies import FixedRulePolicy, TabularPolicy, UniformPolicy, save, tabulate
from approx_exploit.search import SearchBackedPolicy
from approx_exploit.solvers import seat_averaged_value


class TestPolicySources:
    """Tests for resolving policy source strings"""

    def test_builtins(self, kuhn):
        assert isinstance(build_policy("uniform", kuhn, 0), UniformPolicy)
        assert isinstance(build_policy("uniform_random", kuhn, 1), UniformPolicy)
        policy = build_policy("always_call", kuhn, 1)
        assert isinstance(policy, FixedRulePolicy)
        assert policy.player == 1

    def test_cfr_source(self, kuhn):
        for source in ("cfr:20", "cfr20"):
            policy = build_policy(source, kuhn, 0)
            assert isinstance(policy, TabularPolicy)
            assert policy.player == 0

    def test_cfr_source_misses_are_per_policy(self, kuhn):
        first = build_policy("cfr:20", kuhn, 0)
        first.action_probabilities(InfoStateKey(0, "not-a-key"), [0, 1])
        assert first.misses == 1
        second = build_policy("cfr:20", kuhn, 0)
        assert second is not first
        assert second.misses == 0
        assert {k: list(v) for k, v in second.table.items()} == {k: list(v) for k, v in first.table.items()}

    def test_cfr_needs_iterations(self, kuhn):
        with pytest.raises(ConfigurationError, match="iteration"):
            build_policy("cfr:0", kuhn, 0)

    def test_perturbed_source(self, kuhn):
        policy = build_policy("perturb:0.25:7:always_fold", kuhn, 0)
        assert isinstance(policy, TabularPolicy)
        assert policy.table["K"][1] > 0.0

    def test_malformed_perturbation(self, kuhn):
        with pytest.raises(ConfigurationError, match="perturb"):
            build_policy("perturb:lots:uniform", kuhn, 0)

    def test_policy_file(self, kuhn, tmp_path):
        path = save(tabulate(UniformPolicy(kuhn, 1), kuhn, 1), tmp_path / "p2.policy")
        assert build_policy(str(path), kuhn, 1).player == 1
        with pytest.raises(ConfigurationError, match="seat 1, not seat 0"):
            build_policy(str(path), kuhn, 0)

    def test_unknown_source(self, kuhn):
        with pytest.raises(ConfigurationError, match="Unknown policy source"):
            build_policy("grandmaster", kuhn, 0)

    def test_abr_source(self, kuhn, tmp_path, small_search):
        path = save_checkpoint(TabularEvaluator(kuhn.spec), tmp_path / "seat0.table", seat=0, step=0, episodes=0)
        policy = build_policy(f"abr:{path}", kuhn, 0, small_search)
        assert isinstance(policy, SearchBackedPolicy)
        with pytest.raises(ConfigurationError, match="trained for seat 0"):
            build_policy(f"abr:{path}", kuhn, 1, small_search)

    def test_profile_gives_search_the_other_seat_as_model(self, kuhn, tmp_path, small_search):
        path = save_checkpoint(TabularEvaluator(kuhn.spec), tmp_path / "seat1.table", seat=1, step=0, episodes=0)
        pi_1, pi_2 = build_profile("always_call", f"abr:{path}", kuhn, small_search)
        assert pi_2.opponent_model is pi_1

    def test_two_searchers_model_uniform(self, kuhn, tmp_path, small_search):
        seat0 = save_checkpoint(TabularEvaluator(kuhn.spec), tmp_path / "a.table", seat=0, step=0, episodes=0)
        seat1 = save_checkpoint(TabularEvaluator(kuhn.spec), tmp_path / "b.table", seat=1, step=0, episodes=0)
        pi_1, pi_2 = build_profile(f"abr:{seat0}", f"abr:{seat1}", kuhn, small_search)
        assert isinstance(pi_1.opponent_model, UniformPolicy)
        assert isinstance(pi_2.opponent_model, UniformPolicy)


class TestMatch:
    """Tests for head-to-head matches"""

    def test_mirror_match_cancels_in_pairs(self, kuhn_uniform):
        report = play_match(kuhn_uniform[0].game, kuhn_uniform, kuhn_uniform, num_games=64, seed=1)
        assert report.mean_a == 0.0
        assert report.mean_b == 0.0
        assert report.ci_contains_zero()

    def test_zero_sum_report(self, leduc):
        a = (FixedRulePolicy(leduc, 0, "always_call"), FixedRulePolicy(leduc, 1, "always_call"))
        b = (UniformPolicy(leduc, 0), UniformPolicy(leduc, 1))
        report = play_match(leduc, a, b, num_games=50, seed=2)
        assert report.mean_b == -report.mean_a
        assert report.per_seat_means[1] is not None

    def test_log_digest_is_deterministic(self, kuhn_uniform):
        game = kuhn_uniform[0].game
        a = play_match(game, kuhn_uniform, kuhn_uniform, num_games=30, seed=4)
        b = play_match(game, kuhn_uniform, kuhn_uniform, num_games=30, seed=4)
        c = play_match(game, kuhn_uniform, kuhn_uniform, num_games=30, seed=5)
        assert a.log_digest == b.log_digest
        assert a.log_digest != c.log_digest

    def test_workers_do_not_change_results(self, leduc_uniform):
        game = leduc_uniform[0].game
        serial = play_match(game, leduc_uniform, leduc_uniform, num_games=40, seed=6)
        parallel = play_match(game, leduc_uniform, leduc_uniform, num_games=40, seed=6, workers=4)
        assert serial.log_digest == parallel.log_digest
        assert serial.mean_a == parallel.mean_a

    def test_without_alternation(self, kuhn_uniform):
        report = play_match(kuhn_uniform[0].game, kuhn_uniform, kuhn_uniform, num_games=10, alternate=False)
        assert report.per_seat_means[1] is None
        assert not report.seat_alternation

    def test_needs_two_games(self, kuhn_uniform):
        with pytest.raises(ConfigurationError):
            play_match(kuhn_uniform[0].game, kuhn_uniform, kuhn_uniform, num_games=1)

    @pytest.mark.slow
    def test_cfr_beats_uniform_with_the_exact_sign(self, leduc, leduc_uniform):
        cfr = build_profile("cfr:1000", "cfr:1000", leduc)
        report = play_match(leduc, cfr, leduc_uniform, num_games=1024, seed=9, names=("cfr:1000", "uniform"))
        exact = seat_averaged_value(cfr, leduc_uniform)
        assert exact > 0
        assert report.mean_a > 0


class TestReports:
    def test_timing_is_separated(self, tmp_path):
        payload = {"value": 1.5, "wall_clock_seconds": 2.0, "diagnostics": {"simulations": 3}}
        report = build_report("exact", payload, {"game_id": "kuhn_poker"}, seed=None)
        assert report["result"] == {"value": 1.5}
        assert report["timing"]["wall_clock_seconds"] == 2.0
        assert report["timing"]["diagnostics"] == {"simulations": 3}
        path = write_report(report, tmp_path / "out" / "exact.json")
        assert json.loads(path.read_text())["report_kind"] == "exact"

    def test_config_digest_ignores_key_order(self):
        assert config_digest({"a": 1, "b": [1, 2]}) == config_digest({"b": [1, 2], "a": 1})
        assert config_digest({"a": 1}) != config_digest({"a": 2})

    def test_non_finite_floats_become_null(self):
        assert to_jsonable({"x": float("nan"), "y": (1, 2)}) == {"x": None, "y": [1, 2]}
