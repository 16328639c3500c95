"""Tests for the MLP forward/backward contract and the SGD trainer."""

import numpy as np
import pytest

from floodlib.data.dataset import Dataset, Task
from floodlib.errors import ConfigError, NumericError, ShapeError, TrainingDivergedError
from floodlib.flood.objectives import FloodObjective, adaflood_objective, flood_objective, iflood_objective, plain_objective
from floodlib.flood.table import FloodTable
from floodlib.metrics import accuracy
from floodlib.models.config import FloodConfig, TrainConfig
from floodlib.nn import LayerMask, backward, forward, init_mlp, l2_penalty, per_sample_loss, reinit_and_finetune, train
from floodlib.nn.mlp import loss_and_backward


def _finite_difference(model, fn, step=1e-5):
    base = model.flat_parameters()
    grad = np.zeros_like(base)
    shifted_model = model.copy()
    for i in range(base.size):
        shifted = base.copy()
        shifted[i] += step
        shifted_model.set_flat_parameters(shifted)
        up = fn(shifted_model)
        shifted[i] -= 2 * step
        shifted_model.set_flat_parameters(shifted)
        down = fn(shifted_model)
        grad[i] = (up - down) / (2 * step)
    return grad


def test_forward_zero_weights_gives_uniform_probabilities():
    """Softmax of all-zero logits is uniform."""
    model = init_mlp([3, 5, 4], "softmax", seed=0)
    model.set_flat_parameters(np.zeros(model.num_parameters()))

    probs = forward(model, np.random.default_rng(0).normal(size=(6, 3)))

    assert probs.shape == (6, 4)
    assert np.allclose(probs, 0.25)


def test_forward_regression_bias_only():
    """A 1-layer regression model with zero weights outputs its bias."""
    model = init_mlp([4, 1], "identity", seed=0)
    model.weights[0][:] = 0.0
    model.biases[0][:] = 2.5

    out = forward(model, np.random.default_rng(1).normal(size=(3, 4)))

    assert np.all(out == 2.5)


def test_forward_matches_dense_algebra(rng):
    """Random 2-layer network agrees with a hand-rolled evaluation."""
    model = init_mlp([3, 6, 4], "softmax", seed=3)
    x = rng.normal(size=(1, 3))

    hidden = np.maximum(x @ model.weights[0] + model.biases[0], 0.0)
    logits = hidden @ model.weights[1] + model.biases[1]
    expected = np.exp(logits - logits.max()) / np.exp(logits - logits.max()).sum()

    probs = forward(model, x)
    assert np.allclose(probs, expected, atol=1e-12)
    assert abs(probs.sum() - 1.0) < 1e-9
    assert np.all((probs > 0) & (probs < 1))


def test_forward_is_deterministic(rng):
    """Forward passes are repeatable."""
    model = init_mlp([3, 4, 2], "softmax", seed=5)
    x = rng.normal(size=(5, 3))
    assert np.array_equal(forward(model, x), forward(model, x))


def test_parameter_count():
    """The model has the expected number of parameters."""
    model = init_mlp([10, 64, 32, 3], "softmax", seed=0)
    assert model.num_parameters() == 11 * 64 + 65 * 32 + 33 * 3
    assert model.flat_parameters().size == model.num_parameters()


def test_forward_rejects_wrong_width():
    """Inputs of the wrong width are rejected."""
    model = init_mlp([3, 2], "softmax", seed=0)
    with pytest.raises(ShapeError):
        forward(model, np.zeros((2, 4)))


def test_backward_zero_upstream_gives_zero_gradients(rng):
    """Zero upstream weights give zero gradients."""
    model = init_mlp([3, 5, 2], "softmax", seed=1)
    grads = backward(model, rng.normal(size=(4, 3)), np.array([0, 1, 1, 0]), np.zeros(4))
    assert np.all(grads.flat() == 0.0)


def test_backward_rejects_non_finite_upstream(rng):
    """Non-finite upstream weights are rejected."""
    model = init_mlp([3, 2], "softmax", seed=1)
    with pytest.raises(NumericError):
        backward(model, rng.normal(size=(2, 3)), np.array([0, 1]), np.array([np.nan, 0.5]))


OBJECTIVES = ["plain", "flood", "iflood", "adaflood"]


def _objective(name, losses_at_init, rng):
    """Objective whose flood levels sit well away from the initial losses."""
    n = losses_at_init.size
    if name == "plain":
        return plain_objective
    if name == "flood":
        b = 0.5 * float(np.mean(losses_at_init))
        return lambda losses: flood_objective(losses, b)
    if name == "iflood":
        b = 2.0 * float(np.max(losses_at_init)) + 0.5
        return lambda losses: iflood_objective(losses, b)
    theta = losses_at_init * np.where(rng.random(n) < 0.5, 0.3, 1.7) + 0.01
    return lambda losses: adaflood_objective(losses, theta)


@pytest.mark.parametrize("name", OBJECTIVES)
@pytest.mark.parametrize("head,dims", [("softmax", [3, 5, 4]), ("identity", [3, 6, 4, 1]), ("softmax", [4, 3])])
def test_gradients_match_finite_differences(name, head, dims):
    """Analytic gradients of every objective agree with central differences."""
    gen = np.random.default_rng(len(dims) * 17 + OBJECTIVES.index(name))
    for instance in range(5):
        model = init_mlp(dims, head, seed=instance)
        x = gen.normal(size=(6, dims[0]))
        y = gen.integers(0, dims[-1], size=6) if head == "softmax" else gen.normal(size=6)
        objective = _objective(name, per_sample_loss(model, x, y), gen)
        l2 = 1e-2

        _, _, _, grads = loss_and_backward(model, x, y, objective, l2_weight=l2)
        numeric = _finite_difference(
            model, lambda m: objective(per_sample_loss(m, x, y)).value + l2_penalty(m, l2)
        )

        assert np.allclose(grads.flat(), numeric, rtol=1e-4, atol=1e-7)


def test_mean_upstream_matches_plain_loss_gradient(rng):
    """Uniform upstream weights give the mean-loss gradient."""
    model = init_mlp([3, 4, 2], "softmax", seed=2)
    x = rng.normal(size=(5, 3))
    y = np.array([0, 1, 0, 1, 1])

    grads = backward(model, x, y, np.full(5, 1 / 5))
    numeric = _finite_difference(model, lambda m: float(np.mean(per_sample_loss(m, x, y))))

    assert np.allclose(grads.flat(), numeric, rtol=1e-4, atol=1e-7)


def test_train_reaches_perfect_accuracy_on_separable_data(separable_dataset, tiny_train_cfg):
    """Separable data is fit perfectly."""
    model = init_mlp([2, 8, 2], "softmax", seed=0)
    outcome = train(model, separable_dataset, tiny_train_cfg)

    probs = forward(outcome.model, separable_dataset.features)
    assert accuracy(probs, separable_dataset.labels) == 1.0
    assert len(outcome.log.epochs) == tiny_train_cfg.epochs


def test_adaflood_with_zero_levels_matches_unregularized(separable_dataset, tiny_train_cfg):
    """All-zero flood levels leave the parameter trajectory unchanged while losses stay positive."""
    model = init_mlp([2, 8, 2], "softmax", seed=0)
    table = FloodTable.constant(separable_dataset.sample_ids, 0.0)

    plain = train(model, separable_dataset, tiny_train_cfg)
    flooded = train(model, separable_dataset, tiny_train_cfg, FloodObjective(FloodConfig(variant="adaflood"), table))

    assert np.array_equal(plain.model.flat_parameters(), flooded.model.flat_parameters())


def test_lr_schedule_is_step_decay():
    """The learning rate decays in steps."""
    cfg = TrainConfig(lr0=0.1, lr_decay=0.2, lr_step_epochs=1)
    assert cfg.lr_at(0) == pytest.approx(0.1)
    assert cfg.lr_at(1) == pytest.approx(0.02)

    cfg = TrainConfig(lr0=0.1, lr_decay=0.2, lr_step_epochs=30)
    rates = [cfg.lr_at(e) for e in range(100)]
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    assert rates[59] == pytest.approx(0.1 * 0.2)
    assert rates[60] == pytest.approx(0.1 * 0.2**2)


def test_train_log_records_learning_rate(separable_dataset):
    """The training log records the learning rate per epoch."""
    cfg = TrainConfig(epochs=2, batch_size=8, lr0=0.1, lr_decay=0.2, lr_step_epochs=1)
    outcome = train(init_mlp([2, 4, 2], "softmax", seed=0), separable_dataset, cfg)
    assert [r.lr for r in outcome.log.epochs] == pytest.approx([0.1, 0.02])


def test_early_stopping_returns_best_validation_epoch(regression_dataset):
    """Early stopping returns the best validation epoch."""
    train_part = regression_dataset.subset(np.arange(40))
    val = regression_dataset.subset(np.arange(40, 60))
    cfg = TrainConfig(epochs=60, batch_size=8, lr0=0.05, lr_decay=1.0, early_stop_patience=3, seed=0)

    outcome = train(init_mlp([3, 8, 1], "identity", seed=0), train_part, cfg, val_set=val)

    val_losses = [r.val_loss for r in outcome.log.epochs]
    best = int(np.argmin(val_losses))
    assert outcome.log.best_epoch == best
    final_val = float(np.mean(per_sample_loss(outcome.model, val.features, val.labels)))
    assert final_val == pytest.approx(val_losses[best])


def test_train_is_deterministic(separable_dataset, tiny_train_cfg):
    """The same seed trains the same model."""
    model = init_mlp([2, 8, 2], "softmax", seed=4)
    a = train(model, separable_dataset, tiny_train_cfg)
    b = train(model, separable_dataset, tiny_train_cfg)
    assert np.array_equal(a.model.flat_parameters(), b.model.flat_parameters())
    assert a.log == b.log


def test_train_empty_dataset_is_config_error(tiny_train_cfg):
    """Training on no data is a config error."""
    empty = Dataset.build(np.zeros((0, 2)), [], Task.classification(2))
    with pytest.raises(ConfigError):
        train(init_mlp([2, 2], "softmax", seed=0), empty, tiny_train_cfg)


def test_divergence_raises_and_records_failure(regression_dataset):
    """Divergence raises and records the failing epoch."""
    cfg = TrainConfig(epochs=30, batch_size=8, lr0=1e6, lr_decay=1.0, l2_weight=0.0)
    with pytest.raises(TrainingDivergedError) as excinfo:
        train(init_mlp([3, 8, 1], "identity", seed=0), regression_dataset, cfg)
    assert excinfo.value.log.failed
    assert excinfo.value.log.failure


def test_tracking_records_per_sample_losses(separable_dataset, tiny_train_cfg):
    """Tracking records each sample's loss per epoch."""
    outcome = train(init_mlp([2, 4, 2], "softmax", seed=0), separable_dataset, tiny_train_cfg, track=separable_dataset)
    assert len(outcome.log.tracked_losses) == tiny_train_cfg.epochs
    assert len(outcome.log.tracked_losses[0]) == len(separable_dataset)
    assert outcome.log.tracked_ids == separable_dataset.sample_ids.tolist()


def test_layer_mask_must_be_nonempty_suffix():
    """Layer masks must be a non-empty suffix."""
    with pytest.raises(ConfigError):
        LayerMask((False, False))
    with pytest.raises(ConfigError):
        LayerMask((True, False))
    assert LayerMask.last(3, 2).flags == (False, True, True)


def test_finetune_zero_epochs_rerandomizes_last_layer_only(separable_dataset):
    """Zero-epoch fine-tuning re-draws only the last layer."""
    base = init_mlp([2, 6, 5, 2], "softmax", seed=0)
    cfg = TrainConfig(epochs=0, seed=9)

    outcome = reinit_and_finetune(base, LayerMask.last(3, 1), separable_dataset, cfg)

    for layer in range(2):
        assert np.array_equal(outcome.model.weights[layer], base.weights[layer])
        assert np.array_equal(outcome.model.biases[layer], base.biases[layer])
    assert not np.array_equal(outcome.model.weights[2], base.weights[2])


def test_finetune_never_touches_frozen_prefix(separable_dataset, tiny_train_cfg):
    """Fine-tuning leaves frozen layers alone."""
    base = init_mlp([2, 6, 5, 2], "softmax", seed=0)
    frozen = [(w.tobytes(), b.tobytes()) for w, b in zip(base.weights[:1], base.biases[:1])]

    outcome = reinit_and_finetune(base, LayerMask.last(3, 2), separable_dataset, tiny_train_cfg)

    assert outcome.model.weights[0].tobytes() == frozen[0][0]
    assert outcome.model.biases[0].tobytes() == frozen[0][1]
    assert not np.array_equal(outcome.model.weights[1], base.weights[1])
    assert [w.tobytes() for w in base.weights[:1]] == [frozen[0][0]]
