"""Tests for the regression and classification correction functions."""

import math

import numpy as np
import pytest

from floodlib.errors import ConfigError, DegenerateProbabilityError
from floodlib.flood import correct_classification, correct_regression, theta_classification_batch, theta_regression


def test_regression_correction_example():
    """The regression correction matches a worked example."""
    assert correct_regression(2.0, 1.0, 0.25) == pytest.approx(1.75)
    assert theta_regression(2.0, 1.0, 0.25) == pytest.approx(0.5625)


def test_regression_gamma_extremes():
    """Gamma zero keeps the loss and gamma one zeroes it."""
    assert theta_regression(2.0, 1.0, 1.0) == 0.0
    assert theta_regression(3.5, 1.0, 0.0) == pytest.approx((3.5 - 1.0) ** 2)


def test_classification_correction_examples():
    """The classification correction matches worked examples."""
    probs = np.array([0.6, 0.3, 0.1])
    assert correct_classification(probs, 0, 0.5) == pytest.approx(-math.log(0.8), abs=1e-12)
    assert correct_classification(probs, 0, 0.0) == pytest.approx(-math.log(0.6), abs=1e-12)
    assert correct_classification(probs, 0, 1.0) == 0.0


def test_classification_theta_decreases_in_gamma(rng):
    """Strictly decreasing in gamma whenever p_true < 1."""
    p_true = rng.uniform(0.01, 0.99, size=100)
    probs = np.stack([p_true, 1.0 - p_true], axis=1)
    labels = np.zeros(100, dtype=np.int64)

    thetas = np.stack([theta_classification_batch(probs, labels, g) for g in np.linspace(0.0, 1.0, 101)])

    assert np.all(np.diff(thetas, axis=0) < 0)
    assert np.all(thetas >= 0)


def test_regression_theta_decreases_in_gamma(rng):
    """Corrected regression levels fall as gamma grows."""
    preds = rng.normal(size=50)
    labels = preds + rng.choice([-1.0, 1.0], size=50) * rng.uniform(0.1, 2.0, size=50)
    values = [np.array([theta_regression(p, y, g) for p, y in zip(preds, labels)]) for g in np.linspace(0, 1, 21)]
    assert np.all(np.diff(np.stack(values), axis=0) < 0)


def test_zero_probability_with_zero_gamma_is_degenerate():
    """A zero probability without correction is degenerate."""
    with pytest.raises(DegenerateProbabilityError):
        correct_classification(np.array([0.0, 1.0]), 0, 0.0)


def test_zero_probability_with_positive_gamma_is_finite():
    """Correction keeps a zero probability finite."""
    assert correct_classification(np.array([0.0, 1.0]), 0, 0.5) == pytest.approx(-math.log(0.5))


@pytest.mark.parametrize("gamma", [-0.1, 1.5])
def test_gamma_outside_unit_interval(gamma):
    """Gamma must lie in [0, 1]."""
    with pytest.raises(ConfigError):
        correct_regression(1.0, 0.0, gamma)
    with pytest.raises(ConfigError):
        correct_classification(np.array([0.5, 0.5]), 0, gamma)
