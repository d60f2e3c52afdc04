"""Single-output temporal poolers and the dynamic-image export pipeline.

Every pooler maps a :class:`~dynimage.tensor.FrameSequence` to a
:class:`DynamicImage`. Mean and max are orderless; approximate rank
pooling (ARP) is not, which is the whole point of it.
"""

from dataclasses import dataclass, field

import numpy as np

from .coefficients import alpha_coeffs
from .ranksolver import rank_pool_exact
from .tensor import DynamicImage, FrameSequence, as_sequence

KINDS = ("arp_avg", "arp_direct", "rank_exact", "mean", "max", "mhi", "mei")

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])
MHI_THRESHOLD = 0.05
MHI_DURATION = 1.0


@dataclass(frozen=True)
class PoolingMethod:
    """A pooler name plus keyword options forwarded to it.

    Options: ``threshold``/``duration`` for ``mhi``/``mei``; a
    :class:`~dynimage.ranksolver.SolverConfig` as ``config`` for
    ``rank_exact``.
    """

    kind: str = "arp_avg"
    options: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown pooling method {self.kind!r}")


def _source_range(seq):
    return (1, len(seq))


def _antisymmetric_sum(x, coeffs):
    # out = sum_{t < T+1-t} c_{T+1-t} (x_{T+1-t} - x_t). Reversing the
    # sequence negates each difference exactly, so the output negates
    # bit for bit, and a constant sequence gives exact zeros.
    T = len(x)
    out = np.zeros(x.shape[1:])
    for t in range(T // 2):
        out += coeffs[T - 1 - t] * (x[T - 1 - t] - x[t])
    return out


def _anchored_sum(x, coeffs):
    # The weights sum to zero, so subtracting the first frame from every
    # frame leaves the result unchanged and keeps constants exactly zero.
    out = np.zeros(x.shape[1:])
    for w, frame in zip(coeffs, x):
        out += w * (frame - x[0])
    return out


def arp_tensor(x, variant="avg"):
    """ARP of a ``(T, ...)`` array; the shared kernel of :func:`arp` and
    the RankPool layer."""
    x = np.asarray(x, dtype=np.float64)
    coeffs = alpha_coeffs(len(x), variant).values
    if variant == "direct":
        return _antisymmetric_sum(x, coeffs)
    return _anchored_sum(x, coeffs)


def arp(seq, variant="avg"):
    """Approximate rank pooling: ``sum_t alpha_t * frame_t``.

    ``variant="avg"`` ranks running means (harmonic-number weights);
    ``variant="direct"`` ranks raw frames (weights ``2t - T - 1``).
    """
    seq = as_sequence(seq)
    return DynamicImage(arp_tensor(seq.data, variant), f"arp_{variant}",
                        _source_range(seq))


def mean_pool(seq):
    """Elementwise temporal mean.

    Values are sorted along time before summing, so the result does not
    depend on frame order even in the last bit.
    """
    seq = as_sequence(seq)
    total = np.sort(seq.data, axis=0).sum(axis=0)
    return DynamicImage(total / len(seq), "mean", _source_range(seq))


def max_pool(seq):
    seq = as_sequence(seq)
    return DynamicImage(seq.data.max(axis=0), "max", _source_range(seq))


def luminance(x):
    """Reduce ``(T, C, H, W)`` frames to a single channel.

    Three channels use Rec. 601 luma weights; one channel passes through.
    Frames that are not 3-D are treated as single-channel already.
    """
    if x.ndim != 4:
        return x
    channels = x.shape[1]
    if channels == 1:
        return x
    if channels == 3:
        return np.tensordot(x, LUMA_WEIGHTS, axes=([1], [0]))[:, None]
    raise ValueError(
        f"motion images need 1 or 3 channels, got {channels}")


def _motion_masks(seq, threshold):
    seq = as_sequence(seq)
    if len(seq) < 2:
        raise ValueError("motion images need at least two frames")
    if threshold <= 0:
        raise ValueError("motion threshold must be positive")
    gray = luminance(seq.data)
    return np.abs(np.diff(gray, axis=0)) > threshold


def mhi(seq, threshold=MHI_THRESHOLD, duration=MHI_DURATION):
    """Motion History Image; recent motion is bright, older motion decays.

    A pixel that moves between frames ``t-1`` and ``t`` is set to
    ``duration``; otherwise it decays linearly by ``duration / (T - 1)``
    per frame, floored at zero.
    """
    seq = as_sequence(seq)
    masks = _motion_masks(seq, threshold)
    decay = duration / (len(seq) - 1)
    history = np.zeros(masks.shape[1:])
    for moved in masks:
        history = np.where(moved, duration, np.maximum(0.0, history - decay))
    return DynamicImage(history, "mhi", _source_range(seq))


def mei(seq, threshold=MHI_THRESHOLD):
    """Motion Energy Image: 1 wherever any frame-to-frame motion occurred."""
    seq = as_sequence(seq)
    masks = _motion_masks(seq, threshold)
    return DynamicImage(masks.any(axis=0).astype(np.float64), "mei",
                        _source_range(seq))


def di_preprocess(seq):
    """Square root of every pixel (a Hellinger-kernel feature map)."""
    seq = as_sequence(seq)
    if np.any(seq.data < 0):
        raise ValueError("square-root preprocessing needs non-negative input")
    return seq.map(np.sqrt)


def round_half_away(x):
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def di_export(di):
    """Stretch a dynamic image to bytes using one min-max over all channels.

    A constant image maps to 128 everywhere.
    """
    v = np.asarray(getattr(di, "tensor", di), dtype=np.float64)
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.full(v.shape, 128, dtype=np.uint8)
    scaled = 255.0 * (v - lo) / (hi - lo)
    return np.clip(round_half_away(scaled), 0, 255).astype(np.uint8)


def pool(seq, method="arp_avg"):
    """Run any pooler by name or :class:`PoolingMethod`."""
    if isinstance(method, str):
        method = PoolingMethod(method)
    seq = as_sequence(seq)
    opts = method.options
    kind = method.kind
    if kind == "arp_avg":
        return arp(seq, "avg")
    if kind == "arp_direct":
        return arp(seq, "direct")
    if kind == "mean":
        return mean_pool(seq)
    if kind == "max":
        return max_pool(seq)
    if kind == "mhi":
        return mhi(seq, opts.get("threshold", MHI_THRESHOLD),
                   opts.get("duration", MHI_DURATION))
    if kind == "mei":
        return mei(seq, opts.get("threshold", MHI_THRESHOLD))
    image, _ = rank_pool_exact(seq, opts.get("config"))
    return image


__all__ = [
    "DynamicImage", "PoolingMethod", "FrameSequence", "arp", "arp_tensor",
    "mean_pool", "max_pool", "mhi", "mei", "di_preprocess", "di_export",
    "pool", "luminance",
]
