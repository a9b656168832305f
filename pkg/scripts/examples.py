"""
Example Usage Script
Demonstrates how to use the approx-exploit library on Kuhn and Leduc poker
"""

import logging

from approx_exploit import (
    ApproxExploitError,
    anc,
    load_game,
    nash_conv,
    posterior,
    run_cfr_plus,
    train_abr,
)
from approx_exploit.games import InfoStateKey
from approx_exploit.learning import EvalProtocol, TrainingBudget
from approx_exploit.policies import FixedRulePolicy, UniformPolicy
from approx_exploit.search import SearchConfig

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s',
    datefmt='%H:%M:%S'
)

logger = logging.getLogger(__name__)

SEARCH = SearchConfig(num_simulations=200, num_threads=1, seed=0)


def example_exact_nashconv():
    """Example: NashConv of the uniform profile in Kuhn poker"""
    logger.info("Computing exact NashConv of uniform Kuhn...")
    kuhn = load_game("kuhn_poker")
    report = nash_conv(UniformPolicy(kuhn, 0), UniformPolicy(kuhn, 1))
    logger.info(f"NashConv = {report.nashconv:.6f} (best-response values {report.per_player_br_values})")
    return report


def example_solve_with_cfr():
    """Example: approach equilibrium with CFR+"""
    logger.info("Running CFR+ on Kuhn poker...")
    run = run_cfr_plus(load_game("kuhn_poker"), 1000, checkpoint_iterations=(10, 100))
    for row in run.checkpoints.itertuples():
        logger.info(f"  iteration {row.iteration:>5}: exploitability {row.exploitability:.3e}")
    logger.info(f"Estimated game value for seat 0: {run.game_value_estimate:.5f}")
    return run.policies


def example_belief():
    """Example: who could have raised?"""
    leduc = load_game("leduc_poker")
    belief = posterior(InfoStateKey(1, "Kh|r"), UniformPolicy(leduc, 0))
    for history, weight in belief.as_rows():
        logger.info(f"  {history}: {weight:.3f}")


def example_train_and_measure():
    """Example: train tabular exploiters against a calling station and compute ANC"""
    kuhn = load_game("kuhn_poker")
    pi_1, pi_2 = FixedRulePolicy(kuhn, 0, "always_call"), FixedRulePolicy(kuhn, 1, "always_call")
    budget = TrainingBudget(episodes=200, checkpoint_every=50)

    logger.info("Training exploiters...")
    seat0 = train_abr(kuhn, 0, pi_2, "tabular", budget, SEARCH, seed=1)
    seat1 = train_abr(kuhn, 1, pi_1, "tabular", budget, SEARCH, seed=1)

    report = anc(pi_1, pi_2, seat1.evaluator, seat0.evaluator, EvalProtocol("exact"), SEARCH)
    logger.info(f"ANC = {report.anc:.4f}, NashConv = {report.nashconv:.4f} ({report.anc_percent:.1f}%)")
    return report


def run_examples():
    """Run all examples"""
    logger.info("=" * 60)
    logger.info("approx-exploit - Example Usage")
    logger.info("=" * 60)

    try:
        example_exact_nashconv()
        example_solve_with_cfr()
        example_belief()
        example_train_and_measure()
        logger.info("Examples completed successfully!")
    except ApproxExploitError as e:
        logger.error(f"Error running examples: {str(e)}", exc_info=True)


if __name__ == "__main__":
    run_examples()
