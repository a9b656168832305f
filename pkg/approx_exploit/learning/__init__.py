"""
Learning Package

Evaluators, the ABR training loop, checkpoints and ANC.
"""

from .anc import PROTOCOLS, AncReport, EvalProtocol, anc, freeze_greedy
from .checkpoints import Checkpoint, load_checkpoint, save_checkpoint
from .evaluators import (
    EVALUATOR_KINDS,
    Evaluator,
    EvaluatorOutput,
    MLPEvaluator,
    TabularEvaluator,
    TrainingExample,
    evaluate,
    make_evaluator,
    tabular_update,
    train_step,
)
from .network import FAConfig, LossParts, MLPParams
from .replay import ReplayBuffer
from .training import TrainingBudget, TrainingResult, train_abr

__all__ = [
    "EVALUATOR_KINDS",
    "PROTOCOLS",
    "AncReport",
    "Checkpoint",
    "EvalProtocol",
    "Evaluator",
    "EvaluatorOutput",
    "FAConfig",
    "LossParts",
    "MLPEvaluator",
    "MLPParams",
    "ReplayBuffer",
    "TabularEvaluator",
    "TrainingBudget",
    "TrainingExample",
    "TrainingResult",
    "anc",
    "evaluate",
    "freeze_greedy",
    "load_checkpoint",
    "make_evaluator",
    "save_checkpoint",
    "tabular_update",
    "train_abr",
    "train_step",
]
