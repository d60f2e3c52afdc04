"""RankPool as a network layer: ARP forward, exact backward, and a
finite-difference gradient checker.

ARP weights depend only on the sequence length, so the layer is linear in
its inputs and the backward pass is exact: the gradient with respect to
frame ``t`` is ``alpha_t`` times the upstream gradient.
"""

from dataclasses import dataclass

import numpy as np

from .coefficients import alpha_coeffs
from .pooling import arp_tensor
from .tensor import DimensionError, as_sequence


class LayerStateError(RuntimeError):
    """Backward was called without a matching forward."""


class RankPoolLayer:
    """Approximate rank pooling over the leading (time) axis.

    The length of the last forward pass is remembered and must match the
    ``T`` passed to :meth:`backward`.
    """

    def __init__(self, variant="avg"):
        if variant not in ("avg", "direct"):
            raise ValueError(f"unknown ARP variant {variant!r}")
        self.variant = variant
        self._cache = {}
        self._last_T = None
        self._last_shape = None

    def coefficients(self, T):
        if T not in self._cache:
            self._cache[T] = alpha_coeffs(T, self.variant).values
        return self._cache[T]

    def forward(self, inputs):
        seq = as_sequence(inputs)
        self._last_T = len(seq)
        self._last_shape = seq.frame_shape
        return arp_tensor(seq.data, self.variant)

    def backward(self, upstream_grad, T=None):
        """Per-frame gradients, shape ``(T, *frame_shape)``."""
        if self._last_T is None:
            raise LayerStateError("backward called before forward")
        if T is not None and T != self._last_T:
            raise LayerStateError(
                f"backward for T={T} but the last forward had T={self._last_T}")
        g = np.asarray(upstream_grad, dtype=np.float64)
        if g.shape != self._last_shape:
            raise DimensionError(
                f"upstream gradient shape {g.shape} != output {self._last_shape}")
        alpha = self.coefficients(self._last_T)
        return alpha.reshape((-1,) + (1,) * g.ndim) * g


class MeanPoolLayer:
    """Temporal mean with the same interface; a control for :func:`gradcheck`."""

    def __init__(self):
        self._last_T = None
        self._last_shape = None

    def forward(self, inputs):
        seq = as_sequence(inputs)
        self._last_T = len(seq)
        self._last_shape = seq.frame_shape
        return seq.data.mean(axis=0)

    def backward(self, upstream_grad, T=None):
        if self._last_T is None or (T is not None and T != self._last_T):
            raise LayerStateError("backward does not match the last forward")
        g = np.asarray(upstream_grad, dtype=np.float64)
        return np.broadcast_to(g / self._last_T, (self._last_T,) + g.shape).copy()


@dataclass(frozen=True)
class GradcheckReport:
    max_rel_error: float
    passed: bool
    analytic: np.ndarray
    numeric: np.ndarray


def numeric_gradient(fn, x, epsilon):
    """Central differences of scalar ``fn`` with respect to every entry of ``x``."""
    x = np.array(x, dtype=np.float64)
    grad = np.empty_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + epsilon
        f_plus = fn(x)
        flat[i] = orig - epsilon
        f_minus = fn(x)
        flat[i] = orig
        gflat[i] = (f_plus - f_minus) / (2 * epsilon)
    return grad


def relative_error(analytic, numeric):
    """Largest entrywise gap, relative to the largest gradient magnitude.

    Zero when both gradients vanish identically.
    """
    scale = max(np.abs(analytic).max(initial=0.0), np.abs(numeric).max(initial=0.0))
    if scale == 0.0:
        return 0.0
    return float(np.abs(analytic - numeric).max() / scale)


def gradcheck(shape, T, epsilon=1e-5, seed=0, layer=None, tol=1e-5):
    """Check ``layer.backward`` against finite differences of ``sum(forward)``.

    Inputs are drawn from a standard normal with the given seed.
    """
    if not 0 < epsilon <= 1e-2:
        raise ValueError("epsilon must lie in (0, 1e-2]")
    layer = layer or RankPoolLayer()
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((T,) + tuple(shape))

    out = layer.forward(x)
    analytic = layer.backward(np.ones_like(out), T)
    numeric = numeric_gradient(lambda z: layer.forward(z).sum(), x, epsilon)
    err = relative_error(analytic, numeric)
    return GradcheckReport(err, err < tol, analytic, numeric)
