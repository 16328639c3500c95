"""Minimal differentiable feed-forward networks and their SGD trainer."""

from .checkpoint import MAGIC, load_checkpoint, save_checkpoint
from .mlp import Gradients, MlpModel, backward, forward, init_mlp, l2_penalty, per_sample_loss
from .training import LayerMask, TrainOutcome, mean_loss, mean_objective, reinit_and_finetune, train

__all__ = [
    "MAGIC",
    "Gradients",
    "LayerMask",
    "MlpModel",
    "TrainOutcome",
    "backward",
    "forward",
    "init_mlp",
    "l2_penalty",
    "load_checkpoint",
    "mean_loss",
    "mean_objective",
    "per_sample_loss",
    "reinit_and_finetune",
    "save_checkpoint",
    "train",
]
