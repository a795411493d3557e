"""Ensemble pruning with the Jaya population search.

Genomes are continuous vectors in [0,1]^m, one slot per pool member.  A slot
above 0.5 selects its classifier (an all-zero mask is repaired by switching on
the largest slot).  Each generation every genome moves toward the best and
away from the worst member, is clipped back into the unit box, and survives
only if its macro F-score on the fitness data strictly improves, so the best
fitness never decreases.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .learners import ClassifierPool, member_predictions, vote_from_predictions
from .metrics import classification_metrics


@dataclass
class Genome:
    values: np.ndarray
    fitness: float | None = None


@dataclass(frozen=True)
class PrunedEnsemble:
    pool: ClassifierPool
    mask: np.ndarray
    fitness: float
    generations: int
    selected_count: int
    history: tuple  # best fitness after each generation


def digitize(values: np.ndarray) -> np.ndarray:
    """Binary mask: 1 where the slot exceeds 0.5; an empty mask turns on the largest slot."""
    v = np.asarray(values, dtype=np.float64)
    mask = (v > 0.5).astype(np.int64)
    if mask.sum() == 0:
        mask[int(np.argmax(v))] = 1
    return mask


def jaya_update(values: np.ndarray, best: np.ndarray, worst: np.ndarray,
                rng: np.random.Generator) -> np.ndarray:
    """Move toward the best and away from the worst genome, clipped to [0, 1].

    Fresh r1, r2 in [0, 1) are drawn per position.
    """
    v = np.asarray(values, dtype=np.float64)
    r1 = rng.random(v.size)
    r2 = rng.random(v.size)
    out = v + r1 * np.abs(np.asarray(best) - v) - r2 * np.abs(np.asarray(worst) - v)
    return np.clip(out, 0.0, 1.0)


def _mask_fitness(preds: np.ndarray, mask: np.ndarray, truth: np.ndarray, n_classes: int) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # fitness data may legitimately miss a class
        voted = vote_from_predictions(preds, mask.astype(bool), n_classes)
        return classification_metrics(voted, truth, n_classes).macro_f1


def evaluate_mask(pool: ClassifierPool, mask, features, labels) -> float:
    """Macro F-score of the mask's majority vote; the independent recheck for results."""
    preds = member_predictions(pool, features)
    return _mask_fitness(preds, np.asarray(mask), np.asarray(labels, dtype=np.int64), pool.n_classes)


def prune(pool: ClassifierPool, fit_features, fit_labels, n_pop: int = 20,
          t_max: int = 50, rng: np.random.Generator | None = None) -> PrunedEnsemble:
    """Select the classifier subset with the best voted macro F-score on the fitness data."""
    if n_pop < 2:
        raise ValueError("population size must be >= 2")
    if t_max < 1:
        raise ValueError("iteration count must be >= 1")
    fit_x = np.asarray(fit_features, dtype=np.float64)
    fit_y = np.asarray(fit_labels, dtype=np.int64)
    if fit_x.shape[0] == 0:
        raise ValueError("fitness data must be non-empty")
    if rng is None:
        rng = np.random.default_rng()

    m = pool.size
    preds = member_predictions(pool, fit_x)
    pop = [Genome(values=rng.random(m)) for _ in range(n_pop)]
    for g in pop:
        g.fitness = _mask_fitness(preds, digitize(g.values), fit_y, pool.n_classes)

    history = []
    for _ in range(t_max):
        fits = np.array([g.fitness for g in pop])
        best = pop[int(np.argmax(fits))].values.copy()
        worst = pop[int(np.argmin(fits))].values.copy()
        for g in pop:
            cand = jaya_update(g.values, best, worst, rng)
            cand_fit = _mask_fitness(preds, digitize(cand), fit_y, pool.n_classes)
            if cand_fit > g.fitness:  # greedy acceptance
                g.values, g.fitness = cand, cand_fit
        history.append(max(g.fitness for g in pop))

    winner = max(pop, key=lambda g: g.fitness)
    mask = digitize(winner.values)
    fitness = _mask_fitness(preds, mask, fit_y, pool.n_classes)
    return PrunedEnsemble(pool=pool, mask=mask, fitness=float(fitness), generations=t_max,
                          selected_count=int(mask.sum()), history=tuple(history))
