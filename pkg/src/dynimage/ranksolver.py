"""Exact rank pooling by subgradient descent on the pairwise RankSVM loss.

The objective over a sequence of length ``T`` with running means ``V_t`` is

    E(d) = lam/2 ||d||^2 + 2/(T(T-1)) * sum_{q>t} max(0, 1 - <d,V_q> + <d,V_t>)

and the minimizer ``d*`` has the shape of one frame, so it can be viewed as
an image. Starting from ``d = 0`` the very first descent step points along
the approximate rank pooling output; :mod:`dynimage.pooling` relies on that.
"""

from dataclasses import dataclass, field

import numpy as np

from .tensor import (DimensionError, DynamicImage, NumericalError,
                     as_sequence, running_means)

MAX_HALVINGS = 20


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 1.0
    step_size: float = 1e-3
    max_iters: int = 300
    rel_tol: float = 1e-6

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be an integer >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


@dataclass(eq=False)
class RankModel:
    d: np.ndarray
    lam: float
    objective: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def _flat_means(seq):
    # Only score differences enter the loss, so the means are shifted by V_1.
    # Each subgradient weight vector sums to zero, and with the shift a
    # constant sequence gives an exactly zero subgradient.
    seq = as_sequence(seq)
    if len(seq) < 2:
        raise ValueError("ranking needs at least two frames")
    V = running_means(seq).reshape(len(seq), -1)
    return seq, V - V[0]


def _check_d(d, frame_shape):
    d = np.asarray(d, dtype=np.float64)
    if d.shape != tuple(frame_shape):
        raise DimensionError(
            f"ranking vector has shape {d.shape}, frames have {frame_shape}")
    return d


def score(d, means):
    """``S[t] = <d, V_t>`` for every running mean ``V_t``."""
    means = np.asarray(means, dtype=np.float64)
    d = _check_d(d, means.shape[1:])
    return means.reshape(len(means), -1) @ d.ravel()


def _hinge_args(scores):
    # A[t, q] = 1 - S(q) + S(t); only the strict upper triangle q > t is used.
    return 1.0 - scores[None, :] + scores[:, None]


def _objective(d_flat, V, lam):
    T = len(V)
    args = _hinge_args(V @ d_flat)[np.triu_indices(T, k=1)]
    hinge = np.maximum(0.0, args).sum()
    # Multiply before dividing so that d = 0 gives exactly 1.0.
    return 0.5 * lam * float(d_flat @ d_flat) + 2.0 * hinge / (T * (T - 1))


def _subgradient(d_flat, V, lam):
    T = len(V)
    violated = np.triu(_hinge_args(V @ d_flat) > 0.0, k=1)
    # Each violated pair (t, q) contributes V_t - V_q.
    weights = violated.sum(axis=1) - violated.sum(axis=0)
    return lam * d_flat + (2.0 / (T * (T - 1))) * (weights @ V)


def rank_objective(d, seq, lam=1.0):
    seq, V = _flat_means(seq)
    d = _check_d(d, seq.frame_shape)
    return _objective(d.ravel(), V, lam)


def rank_subgradient(d, seq, lam=1.0):
    """Subgradient of :func:`rank_objective`; a pair counts as violated only
    when its hinge argument is strictly positive."""
    seq, V = _flat_means(seq)
    d = _check_d(d, seq.frame_shape)
    return _subgradient(d.ravel(), V, lam).reshape(seq.frame_shape)


def rank_pool_exact(seq, config=None):
    """Minimize the ranking objective from ``d = 0`` with a fixed step.

    A step that would raise the objective is retried with half the step
    size (which is then kept); after ``MAX_HALVINGS`` failed halvings the
    solver stops and reports ``converged=False``. It also stops, converged,
    once the relative decrease of one step drops below ``rel_tol``.

    Returns ``(DynamicImage, RankModel)``.
    """
    config = config or SolverConfig()
    seq, V = _flat_means(seq)
    lam = config.lam
    d = np.zeros(V.shape[1])
    energy = _objective(d, V, lam)
    history = [energy]
    step = config.step_size
    converged = False
    iterations = 0

    # Overflow is detected and raised below; numpy's warnings add nothing.
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(config.max_iters):
            grad = _subgradient(d, V, lam)
            if not np.all(np.isfinite(grad)):
                raise NumericalError("non-finite subgradient")
            for _halving in range(MAX_HALVINGS + 1):
                candidate = d - step * grad
                new_energy = _objective(candidate, V, lam)
                if not np.isfinite(new_energy):
                    raise NumericalError("objective became non-finite")
                if new_energy <= energy:
                    break
                step *= 0.5
            else:
                break
            decrease = (energy - new_energy) / max(abs(energy), np.finfo(float).tiny)
            d, energy = candidate, new_energy
            iterations += 1
            history.append(energy)
            if decrease < config.rel_tol:
                converged = True
                break

    d = d.reshape(seq.frame_shape)
    model = RankModel(d, lam, energy, iterations, converged, history)
    return DynamicImage(d, "rank_exact", (1, len(seq))), model
