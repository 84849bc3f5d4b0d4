"""Contingency-table statistics used by the anonymity and uniformity checks."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np
from scipy import stats as sps


@dataclass
class ChiSquare:
    statistic: float
    dof: int
    p_value: float


def contingency(rows: Sequence[Hashable], cols: Sequence[Hashable]) -> np.ndarray:
    """Count table of (row label, column label) pairs; labels sorted by repr."""
    rlab = sorted(set(rows), key=repr)
    clab = sorted(set(cols), key=repr)
    ri = {r: i for i, r in enumerate(rlab)}
    ci = {c: i for i, c in enumerate(clab)}
    table = np.zeros((len(rlab), len(clab)))
    for r, c in zip(rows, cols):
        table[ri[r], ci[c]] += 1
    return table


def chi2_independence(table) -> ChiSquare:
    """Pearson chi-square test of independence (no continuity correction).

    Rows or columns that are entirely zero are dropped; a table that
    collapses to one row or one column carries no evidence (p = 1).
    """
    t = np.asarray(table, dtype=float)
    t = t[t.sum(axis=1) > 0][:, t.sum(axis=0) > 0]
    if t.shape[0] < 2 or t.shape[1] < 2:
        return ChiSquare(0.0, 0, 1.0)
    total = t.sum()
    expected = np.outer(t.sum(axis=1), t.sum(axis=0)) / total
    stat = float(((t - expected) ** 2 / expected).sum())
    dof = (t.shape[0] - 1) * (t.shape[1] - 1)
    return ChiSquare(stat, dof, float(sps.chi2.sf(stat, dof)))


def chi2_uniform(counts: Sequence[float]) -> ChiSquare:
    """Goodness of fit of ``counts`` to the uniform distribution."""
    c = np.asarray(counts, dtype=float)
    expected = c.sum() / c.size
    stat = float(((c - expected) ** 2 / expected).sum())
    dof = c.size - 1
    return ChiSquare(stat, dof, float(sps.chi2.sf(stat, dof)))


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n) if n else float("inf")


def naive_bayes_guess_rate(samples: Sequence[dict], labels: Sequence[Hashable], alpha: float = 1.0) -> tuple[float, int]:
    """Held-out accuracy of a naive Bayes guesser trained on the first half.

    Returns (accuracy, number of held-out samples).  Unseen feature values
    fall back to Laplace smoothing.
    """
    n = len(samples)
    half = n // 2
    train, test = range(half), range(half, n)
    classes = sorted(set(labels), key=repr)
    prior = Counter(labels[i] for i in train)
    counts: dict = defaultdict(Counter)
    values: dict = defaultdict(set)
    for i in train:
        y = labels[i]
        for f, v in samples[i].items():
            counts[(f, y)][v] += 1
            values[f].add(v)
    feats = list(values)
    correct = 0
    for i in test:
        best, best_score = None, -math.inf
        for y in classes:
            ny = prior[y]
            score = math.log((ny + alpha) / (half + alpha * len(classes)))
            for f in feats:
                v = samples[i].get(f)
                k = len(values[f]) + 1
                score += math.log((counts[(f, y)][v] + alpha) / (ny + alpha * k))
            if score > best_score:
                best, best_score = y, score
        correct += best == labels[i]
    m = len(test)
    return (correct / m if m else 0.0), m
