"""Ranking accuracy, RP-vs-ARP timing, and late fusion of stream scores."""

import time
from dataclasses import dataclass

import numpy as np

from .pooling import pool
from .ranksolver import score
from .tensor import DimensionError, as_sequence, running_means


@dataclass(frozen=True)
class RankingReport:
    accuracy: float
    pairs_total: int
    pairs_correct: int


@dataclass(frozen=True)
class BenchReport:
    method: str
    frames_per_second: float
    wall_seconds: float
    sequences: int


def ranking_accuracy(d, seq):
    """Fraction of pairs ``q > t`` with ``S(q) > S(t)`` strictly.

    Scores are taken over running means, as in the ranking objective.
    Ties count as wrong, so ``d = 0`` scores 0.
    """
    seq = as_sequence(seq)
    T = len(seq)
    if T < 2:
        raise ValueError("ranking accuracy needs at least two frames")
    d = np.asarray(getattr(d, "tensor", d), dtype=np.float64)
    s = score(d, running_means(seq))
    iu = np.triu_indices(T, k=1)
    correct = int(np.count_nonzero(s[iu[1]] > s[iu[0]]))
    total = T * (T - 1) // 2
    return RankingReport(correct / total, total, correct)


def synthetic_sequences(n, T, shape, seed=0):
    """``n`` random ``(T, *shape)`` sequences with values in [0, 1)."""
    rng = np.random.default_rng(seed)
    return [rng.random((T,) + tuple(shape)) for _ in range(n)]


def bench(methods=("arp_avg", "rank_exact"), T=150, trials=5,
          shape=(3, 32, 32), sequences=1, seed=0):
    """Median wall time of each pooling method over identical inputs.

    Methods run one after another, never interleaved.
    """
    if T < 2:
        raise ValueError("bench needs T >= 2")
    if trials < 3:
        raise ValueError("bench needs at least 3 trials")
    data = [as_sequence(x) for x in synthetic_sequences(sequences, T, shape, seed)]
    reports = []
    for method in methods:
        times = []
        for _ in range(trials):
            start = time.perf_counter()
            for seq in data:
                pool(seq, method)
            times.append(time.perf_counter() - start)
        wall = float(np.median(times))
        reports.append(BenchReport(method, T * sequences / wall, wall, sequences))
    return reports


def fuse_scores(m, weights=None):
    """Average class scores over streams (rows), optionally weighted.

    >>> fuse_scores([[1.0, 0.0], [0.0, 1.0]])
    array([0.5, 0.5])
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 1:
        m = m[None]
    if m.ndim != 2 or m.shape[0] < 1:
        raise DimensionError("score matrix must be streams x classes")
    if weights is None:
        return m.mean(axis=0)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (m.shape[0],):
        raise DimensionError(
            f"{w.size} weights for {m.shape[0]} streams")
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be non-negative and not all zero")
    return (w @ m) / w.sum()
