"""
Exception hierarchy.

Configuration problems map to exit code 2, broken contracts and invariants to
exit code 1 (see ``ExitCodes`` in :mod:`approx_exploit.config`).
"""


class ApproxExploitError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(ApproxExploitError, ValueError):
    """Unknown game, inapplicable rule, missing file or invalid experiment config."""


class PolicyFormatError(ConfigurationError):
    """A policy or checkpoint file could not be loaded."""


class ContractViolation(ApproxExploitError, RuntimeError):
    """An operation was called outside its precondition (illegal action, terminal misuse...)."""


class EvaluatorError(ApproxExploitError, RuntimeError):
    """The evaluator produced unusable output or training diverged."""
