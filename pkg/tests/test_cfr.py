"""
Tests for the CFR+ baseline.
"""

import pytest

from approx_exploit.exceptions import ConfigurationError, ContractViolation
from approx_exploit.games import load_game
from approx_exploit.policies import load
from approx_exploit.solvers import (
    CfrState,
    average_policy,
    cfr_plus_iterate,
    nash_conv,
    regret_matching,
    run_cfr_plus,
    write_profile,
)


class TestRegretMatching:
    def test_positive_part_normalized(self):
        assert regret_matching([3.0, -1.0, 1.0]) == [0.75, 0.0, 0.25]

    def test_uniform_without_positive_regret(self):
        assert regret_matching([0.0, -2.0]) == [0.5, 0.5]


class TestCfrPlus:
    """Tests for CFR+ iterations and the driver"""

    def test_regrets_stay_nonnegative(self, kuhn):
        state = CfrState.new(kuhn)
        for _ in range(20):
            cfr_plus_iterate(state, kuhn)
        for player in (0, 1):
            for regrets in state.regrets[player].values():
                assert min(regrets) >= 0.0

    def test_average_needs_an_iteration(self, kuhn):
        with pytest.raises(ContractViolation):
            average_policy(CfrState.new(kuhn), kuhn)

    def test_state_is_game_bound(self, kuhn, leduc):
        with pytest.raises(ContractViolation):
            cfr_plus_iterate(CfrState.new(kuhn), leduc)

    def test_kuhn_converges(self, kuhn_cfr_run):
        checkpoints = kuhn_cfr_run.checkpoints
        assert list(checkpoints["iteration"]) == [10, 100, 1000, 2000]
        values = list(checkpoints["nashconv"])
        assert values[-1] < values[0]
        assert values[-1] < 5e-3

    def test_average_uses_strategy_after_regret_update(self, kuhn):
        state = cfr_plus_iterate(CfrState.new(kuhn), kuhn)
        # seat 1 is averaged before its first update, seat 0 after
        for acc in state.strategy_sums[1].values():
            assert acc == pytest.approx([sum(acc) / len(acc)] * len(acc))
        checked = 0
        for key, acc in state.strategy_sums[0].items():
            total = sum(acc)
            if total > 0.0:
                checked += 1
                assert [x / total for x in acc] == pytest.approx(regret_matching(state.regrets[0][key]))
        assert checked > 0

    @pytest.mark.slow
    def test_kuhn_reaches_equilibrium_tolerance(self, kuhn):
        run = run_cfr_plus(kuhn, 100_000, checkpoint_iterations=(10_000,))
        nashconv = list(run.checkpoints["nashconv"])
        assert nashconv[-1] < nashconv[0]
        assert nashconv[-1] <= 1e-6
        assert run.game_value_estimate == pytest.approx(-1.0 / 18.0, abs=1e-5)

    def test_kuhn_game_value(self, kuhn_cfr_run):
        assert kuhn_cfr_run.game_value_estimate == pytest.approx(-1.0 / 18.0, abs=5e-3)

    def test_deterministic(self, kuhn):
        first = run_cfr_plus(kuhn, 50).policies
        second = run_cfr_plus(kuhn, 50).policies
        for a, b in zip(first, second):
            assert {k: list(v) for k, v in a.table.items()} == {k: list(v) for k, v in b.table.items()}

    def test_checkpoint_files(self, kuhn, tmp_path):
        run = run_cfr_plus(kuhn, 20, checkpoint_iterations=(5, 20, 500), output_dir=tmp_path)
        assert list(run.checkpoints["iteration"]) == [5, 20]
        assert (tmp_path / "cfr_plus_kuhn_poker_iter5_seat0.policy").exists()
        paths = write_profile(run.policies, tmp_path, tag="final")
        reloaded = [load(p, kuhn) for p in paths]
        assert nash_conv(*reloaded).nashconv == pytest.approx(run.checkpoints["nashconv"].iloc[-1], abs=1e-12)

    def test_iterations_must_be_positive(self, kuhn):
        with pytest.raises(ConfigurationError):
            run_cfr_plus(kuhn, 0)

    @pytest.mark.slow
    def test_leduc_converges(self):
        run = run_cfr_plus(load_game("leduc_poker"), 1000)
        assert nash_conv(*run.policies).exploitability <= 1e-3
