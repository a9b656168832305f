"""
Configuration and Constants.

Centralized configuration to eliminate magic numbers and maintain consistency.
Search and learning defaults are the hyper-parameters used for the
imperfect-information experiments.
"""

import os
import subprocess
from functools import lru_cache

# Load .env file if present (python-dotenv)
try:
    from dotenv import load_dotenv

    load_dotenv()
except ImportError:
    pass

PACKAGE_VERSION = "0.3.0"


# ============================================================================
# RUNTIME SETTINGS
# ============================================================================


class Settings:
    """Environment-driven runtime settings."""

    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
    OUTPUT_DIR = os.getenv("ABR_OUTPUT_DIR", "runs")
    NUM_THREADS = int(os.getenv("ABR_NUM_THREADS", "1"))
    BUILD_ID = os.getenv("ABR_BUILD_ID", "")

    LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"
    LOG_DATEFMT = "%H:%M:%S"


@lru_cache(maxsize=1)
def build_identifier() -> str:
    """
    Identifier of the code that produced a report.

    ``ABR_BUILD_ID`` wins; otherwise ``git describe`` when run from a checkout,
    falling back to the package version.
    """
    if Settings.BUILD_ID:
        return Settings.BUILD_ID
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{PACKAGE_VERSION}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return PACKAGE_VERSION


# ============================================================================
# SEARCH DEFAULTS
# ============================================================================


class SearchDefaults:
    """IS-MCTS defaults."""

    NUM_SIMULATIONS = 800
    UCT_C = 2.6
    VIRTUAL_LOSS = 4
    NUM_THREADS = 1
    TEMPERATURE_MOVES = 4


# ============================================================================
# LEARNING DEFAULTS
# ============================================================================


class NetworkDefaults:
    """Evaluator network and learner defaults."""

    NUM_LAYERS = 8
    HIDDEN_UNITS = 128
    LEARNING_RATE = 1e-5
    L2_COEFFICIENT = 5e-6
    BATCH_SIZE = 512
    MIN_BUFFER_TO_LEARN = 512
    ACTOR_BATCH = 32

    REPLAY_CAPACITY = 2**16
    # actor -> learner queue; actors block when it is full
    QUEUE_CAPACITY = 4096
    CHECKPOINT_EVERY_EPISODES = 500


# ============================================================================
# NUMERICAL TOLERANCES
# ============================================================================


class Tolerances:
    """Tolerances used by validation and invariant checks."""

    POLICY_SUM = 1e-9
    CHANCE_SUM = 1e-12
    BELIEF_SUM = 1e-12
    PRIOR_SUM = 1e-6
    NASHCONV_FLOOR = -1e-9


# ============================================================================
# REPORTS AND FILE FORMATS
# ============================================================================


class ReportConstants:
    """Constants for reports and on-disk formats."""

    POLICY_FORMAT_VERSION = 1
    CHECKPOINT_FORMAT_VERSION = 1
    REPORT_FORMAT_VERSION = 1

    CI_Z = 1.96
    DEFAULT_MATCH_GAMES = 1024
    DEFAULT_SAMPLED_GAMES = 1000

    PROBABILITY_DIGITS = 17
    CURVE_COLUMNS = ("step", "mean_return", "mse", "ce", "l2", "buffer_size")


# ============================================================================
# EXIT CODES
# ============================================================================


class ExitCodes:
    """Process exit codes of the command-line harness."""

    OK = 0
    INVARIANT_FAILURE = 1
    CONFIGURATION_ERROR = 2
