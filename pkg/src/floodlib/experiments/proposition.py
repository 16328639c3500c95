"""Brute-force check of the AdaFlood minimizer statement on lookup-table models.

The model family assigns a free probability vector to each of a handful of
inputs, so the empirical-risk minimizer reaches zero training loss. Labels
carry class noise, so the Bayes-optimal predictor has a strictly positive
loss. Flood levels are set to that predictor's per-sample losses.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from pydantic import BaseModel
from scipy.optimize import minimize_scalar

from ..errors import PremiseError
from ..flood.objectives import adaflood_objective
from ..jsonio import write_json
from ..models.config import PropositionSpec
from ..seeding import make_rng
from .runner import ExperimentContext

logger = logging.getLogger(__name__)

MAX_POINTS = 12
REL_TOL = 1e-12
MINIMIZER_TOL = 1e-6


class PropositionReport(BaseModel):
    n_points: int
    num_classes: int
    noise_rate: float
    n_samples: int
    bayes_loss: float
    erm_loss: float
    erm_adaflood: float
    bayes_adaflood: float
    erm_to_bayes_ratio: float
    minimizer_loss: float
    minimizer_max_gap: float
    doubled_ratio: float
    halved_erm_adaflood: float
    halved_bayes_adaflood: float
    checks: dict[str, bool]
    passed: bool


def _lookup_instance(spec: PropositionSpec, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inputs, noisy labels and the Bayes conditional table (points x classes)."""
    if spec.n_points > MAX_POINTS:
        raise PremiseError(f"brute-force check supports at most {MAX_POINTS} inputs, got {spec.n_points}")
    if spec.noise_rate <= 0.0:
        raise PremiseError("noise_rate must be positive so the Bayes error is nonzero")
    k = spec.num_classes
    rng = make_rng(seed, 70)
    true_class = np.arange(spec.n_points) % k
    bayes = np.full((spec.n_points, k), spec.noise_rate / (k - 1))
    bayes[np.arange(spec.n_points), true_class] = 1.0 - spec.noise_rate

    points = np.repeat(np.arange(spec.n_points), spec.samples_per_point)
    labels = np.array([rng.choice(k, p=bayes[x]) for x in points], dtype=np.int64)
    for x in range(spec.n_points):
        seen = np.unique(labels[points == x])
        if seen.size > 1:
            raise PremiseError(
                f"input {x} carries conflicting labels {seen.tolist()}; a lookup table cannot reach zero loss"
            )
    return points, labels, bayes


def _adaflood(losses: np.ndarray, theta: np.ndarray) -> float:
    return adaflood_objective(losses, theta).value


def _minimize_point(theta: float, grid_size: int) -> float:
    """Probability of the observed label minimizing |-log p - theta| + theta.

    Bounded Brent search, confirmed against a uniform grid over (0, 1].
    """

    def objective(p: float) -> float:
        return abs(-math.log(p) - theta) + theta

    result = minimize_scalar(objective, bounds=(1e-12, 1.0), method="bounded", options={"xatol": 1e-14})
    best_p = float(result.x)
    grid = np.linspace(1.0 / grid_size, 1.0, grid_size)
    grid_values = np.abs(-np.log(grid) - theta) + theta
    if grid_values.min() < objective(best_p) - 1e-9:
        best_p = float(grid[np.argmin(grid_values)])
    return best_p


def check_proposition(spec: PropositionSpec, seed: int = 0) -> PropositionReport:
    """Evaluate the minimizer relations on one constructed instance.

    Raises:
        PremiseError: too many inputs, zero noise, or conflicting labels per input
    """
    points, labels, bayes = _lookup_instance(spec, seed)
    n = labels.size

    theta = -np.log(bayes[points, labels])
    bayes_loss = float(np.mean(theta))

    # Empirical-risk minimizer: one-hot on each input's observed label.
    erm_losses = np.zeros(n)
    erm_loss = float(np.mean(erm_losses))
    erm_ada = _adaflood(erm_losses, theta)
    bayes_ada = _adaflood(theta, theta)

    p_bar = np.array([_minimize_point(float(t), spec.grid_size) for t in theta])
    minimizer_losses = -np.log(p_bar)
    minimizer_gap = float(np.max(np.abs(minimizer_losses - theta)))
    minimizer_loss = float(np.mean(minimizer_losses))

    doubled = 2.0 * theta
    doubled_ratio = _adaflood(erm_losses, doubled) / _adaflood(theta, doubled)
    halved = 0.5 * theta
    halved_erm = _adaflood(erm_losses, halved)
    halved_bayes = _adaflood(theta, halved)

    checks = {
        "erm_zero_loss": erm_loss == 0.0,
        "erm_adaflood_is_twice_bayes": math.isclose(erm_ada, 2.0 * bayes_loss, rel_tol=REL_TOL),
        "bayes_adaflood_equals_bayes_loss": math.isclose(bayes_ada, bayes_loss, rel_tol=REL_TOL),
        "bayes_beats_erm_under_adaflood": bayes_ada <= erm_ada,
        "minimizer_hits_flood_levels": minimizer_gap <= MINIMIZER_TOL,
        "minimizer_loss_equals_bayes": math.isclose(minimizer_loss, bayes_loss, rel_tol=0.0, abs_tol=MINIMIZER_TOL),
        "doubled_ratio_four_thirds": math.isclose(doubled_ratio, 4.0 / 3.0, rel_tol=REL_TOL),
        "halved_equal": math.isclose(halved_erm, halved_bayes, rel_tol=REL_TOL),
    }
    return PropositionReport(
        n_points=spec.n_points,
        num_classes=spec.num_classes,
        noise_rate=spec.noise_rate,
        n_samples=n,
        bayes_loss=bayes_loss,
        erm_loss=erm_loss,
        erm_adaflood=erm_ada,
        bayes_adaflood=bayes_ada,
        erm_to_bayes_ratio=erm_ada / bayes_loss,
        minimizer_loss=minimizer_loss,
        minimizer_max_gap=minimizer_gap,
        doubled_ratio=doubled_ratio,
        halved_erm_adaflood=halved_erm,
        halved_bayes_adaflood=halved_bayes,
        checks=checks,
        passed=all(checks.values()),
    )


def cmd_proposition_check(ctx: ExperimentContext) -> dict:
    """Run the check for every configured seed and write ``proposition.json``."""
    reports = {str(seed): check_proposition(ctx.cfg.proposition, seed) for seed in ctx.cfg.seeds}
    out = {
        "name": ctx.cfg.name,
        "passed": all(r.passed for r in reports.values()),
        "seeds": {s: r.model_dump(mode="json") for s, r in reports.items()},
    }
    write_json(ctx.paths.proposition_file, out)
    ctx.ledger.append_event("PROPOSITION_CHECKED", {"passed": out["passed"], "seeds": list(reports)})
    if not out["passed"]:
        logger.warning("proposition check failed for at least one seed")
    return out
