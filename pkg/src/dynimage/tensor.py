"""Frame sequences and the two reductions every pooler is built from.

Frames are plain float64 numpy arrays. Image-like frames use the
``(channels, height, width)`` layout. A :class:`FrameSequence` stacks ``T``
of them along a leading time axis and is read-only once constructed.
"""

from dataclasses import dataclass

import numpy as np

MODALITIES = ("rgb", "gray", "flow", "feature")


class DimensionError(ValueError):
    """Raised when array shapes or lengths do not agree."""


class NumericalError(ArithmeticError):
    """Raised when a computation produces non-finite values."""


def _frozen(arr):
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """An ordered stack of equally shaped real frames.

    ``data`` has shape ``(T, *frame_shape)``; index 0 along the first axis
    is the earliest frame.
    """

    data: np.ndarray
    modality: str = "feature"

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim < 1 or data.shape[0] < 1:
            raise ValueError("a frame sequence needs at least one frame")
        if data.ndim == 1:
            data = data[:, None]
        if self.modality not in MODALITIES:
            raise ValueError(f"unknown modality {self.modality!r}")
        data = _frozen(data)
        if not np.all(np.isfinite(data)):
            raise NumericalError("frame data contains NaN or Inf")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_frames(cls, frames, modality="feature"):
        frames = [np.asarray(f, dtype=np.float64) for f in frames]
        if not frames:
            raise ValueError("a frame sequence needs at least one frame")
        shape = frames[0].shape
        for i, f in enumerate(frames):
            if f.shape != shape:
                raise DimensionError(
                    f"frame {i} has shape {f.shape}, expected {shape}")
        return cls(np.stack(frames), modality)

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, t):
        return self.data[t]

    def __iter__(self):
        return iter(self.data)

    @property
    def frame_shape(self):
        return self.data.shape[1:]

    def reversed(self):
        return FrameSequence(self.data[::-1], self.modality)

    def slice(self, start, stop):
        """Frames ``start..stop-1`` (0-based, half open) as a new sequence."""
        return FrameSequence(self.data[start:stop], self.modality)

    def map(self, fn):
        return FrameSequence(fn(self.data), self.modality)


@dataclass(frozen=True, eq=False)
class DynamicImage:
    """A pooled tensor plus the method name and the 1-based inclusive frame
    range it summarizes."""

    tensor: np.ndarray
    method: str
    source_range: tuple = (1, 1)

    @property
    def shape(self):
        return self.tensor.shape


def as_sequence(seq, modality="feature"):
    """Accept a FrameSequence, a ``(T, ...)`` array or a list of frames."""
    if isinstance(seq, FrameSequence):
        return seq
    if isinstance(seq, (list, tuple)):
        return FrameSequence.from_frames(seq, modality)
    return FrameSequence(np.asarray(seq, dtype=np.float64), modality)


def running_means(seq):
    """Time averages ``V_t`` of the frames up to and including ``t``.

    Uses the incremental update ``m_t = m_{t-1} + (x_t - m_{t-1}) / t`` in
    ascending ``t``. With this update the first mean is exactly the first
    frame and a constant sequence yields exactly that constant at every
    step, which plain cumulative sums do not guarantee.

    Returns an array of shape ``(T, *frame_shape)``.
    """
    seq = as_sequence(seq)
    x = seq.data
    means = np.empty_like(x)
    m = np.zeros(x.shape[1:])
    for t in range(len(x)):
        m = m + (x[t] - m) / (t + 1)
        means[t] = m
    return means


def weighted_sum(seq, weights):
    """``sum_t weights[t] * frames[t]``, accumulated in ascending ``t``."""
    seq = as_sequence(seq)
    w = np.asarray(getattr(weights, "values", weights), dtype=np.float64)
    if w.ndim != 1 or len(w) != len(seq):
        raise DimensionError(
            f"got {w.size} weights for a sequence of length {len(seq)}")
    out = np.zeros(seq.frame_shape)
    for wt, frame in zip(w, seq.data):
        out += wt * frame
    return out
