"""Closed-form per-frame weights for approximate rank pooling.

Three families are provided:

``beta``
    weights on the running means, ``2t - T - 1``.
``avg``
    the ``beta`` weights pushed through the running-mean definition onto
    the raw frames, ``2(T - t + 1) - (T + 1)(H_T - H_{t-1})``.
``direct``
    weights obtained when frames are ranked as is rather than through
    their running means; identical in value to ``beta``.

All indices ``t`` are 1-based in the formulas; arrays are 0-based.
"""

from dataclasses import dataclass

import numpy as np

VARIANTS = ("avg", "direct", "beta")


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    variant: str
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @property
    def length(self):
        return len(self.values)


def _check_length(T):
    if int(T) != T or T < 1:
        raise ValueError(f"sequence length must be a positive integer, got {T}")
    return int(T)


def harmonic(t):
    """The ``t``-th harmonic number ``sum_{i=1}^t 1/i`` with ``H_0 = 0``."""
    if t < 0:
        raise ValueError("harmonic number of a negative index")
    total = 0.0
    for i in range(1, int(t) + 1):
        total += 1.0 / i
    return total


def harmonic_table(T):
    """``[H_0, H_1, ..., H_T]``, each summed in ascending ``i``."""
    return np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, T + 1))))


def _frozen(values):
    values.flags.writeable = False
    return values


def beta_coeffs(T):
    T = _check_length(T)
    t = np.arange(1, T + 1)
    return CoefficientVector("beta", _frozen((2 * t - T - 1).astype(np.float64)))


def alpha_coeffs(T, variant="avg"):
    """Per-frame ARP weights for a sequence of length ``T``.

    >>> alpha_coeffs(3, "direct").values
    array([-2.,  0.,  2.])
    """
    T = _check_length(T)
    if variant == "direct":
        return CoefficientVector("direct", beta_coeffs(T).values)
    if variant != "avg":
        raise ValueError(f"unknown ARP variant {variant!r}")
    H = harmonic_table(T)
    t = np.arange(1, T + 1)
    values = 2.0 * (T - t + 1) - (T + 1) * (H[T] - H[t - 1])
    return CoefficientVector("avg", _frozen(values))


def coeffs(T, variant):
    """Dispatch on any of the three variant names."""
    if variant == "beta":
        return beta_coeffs(T)
    return alpha_coeffs(T, variant)
