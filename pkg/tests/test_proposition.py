"""Tests for the lookup-table check of the AdaFlood minimizer relations."""

import math

import pytest

from floodlib.errors import PremiseError
from floodlib.experiments.proposition import check_proposition
from floodlib.models.config import PropositionSpec


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_default_instance_passes(seed):
    """The default lookup-table instance satisfies every minimizer relation."""
    report = check_proposition(PropositionSpec(), seed)
    assert report.passed, report.checks
    assert report.erm_loss == 0.0
    assert report.bayes_loss > 0.0


def test_erm_costs_twice_the_bayes_loss():
    """The memorizing model pays twice the Bayes loss under AdaFlood."""
    report = check_proposition(PropositionSpec(n_points=6, num_classes=3, noise_rate=0.3), seed=4)
    assert math.isclose(report.erm_to_bayes_ratio, 2.0, rel_tol=1e-12)
    assert math.isclose(report.bayes_adaflood, report.bayes_loss, rel_tol=1e-12)


def test_misspecified_levels():
    """Doubled and halved flood levels give the expected loss ratios."""
    report = check_proposition(PropositionSpec(), seed=0)
    assert math.isclose(report.doubled_ratio, 4.0 / 3.0, rel_tol=1e-12)
    assert math.isclose(report.halved_erm_adaflood, report.halved_bayes_adaflood, rel_tol=1e-12)


def test_minimizer_sits_on_flood_levels():
    """The per-point minimizer puts each loss on its flood level."""
    report = check_proposition(PropositionSpec(noise_rate=0.1), seed=0)
    assert report.minimizer_max_gap <= 1e-6
    assert report.minimizer_loss == pytest.approx(report.bayes_loss, abs=1e-6)


def test_zero_noise_violates_premise():
    """Zero label noise leaves nothing to flood."""
    with pytest.raises(PremiseError):
        check_proposition(PropositionSpec(noise_rate=0.0))


def test_too_many_points_violates_premise():
    """Instances beyond the enumeration limit are refused."""
    with pytest.raises(PremiseError):
        check_proposition(PropositionSpec(n_points=13))


def test_conflicting_labels_violate_premise():
    """Repeated points that end up with conflicting labels are refused."""
    with pytest.raises(PremiseError, match="conflicting"):
        check_proposition(PropositionSpec(n_points=8, noise_rate=0.5, samples_per_point=5))
