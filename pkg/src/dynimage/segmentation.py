"""Windowed pooling: one dynamic image per overlapping segment, optionally
merged back into a single tensor by a second temporal pooler."""

from dataclasses import dataclass

import numpy as np

from .pooling import PoolingMethod, arp, max_pool, mean_pool, pool
from .tensor import DynamicImage, FrameSequence, as_sequence

MERGES = ("none", "max", "mean", "arp_avg", "arp_direct")


class EmptyResultError(ValueError):
    """No window survived segmentation."""


@dataclass(frozen=True)
class WindowSpec:
    """Window length (an int, or ``"full"`` for a single window), stride
    and merge method. Defaults are window 10, stride 6, max merge."""

    window: object = 10
    stride: int = 6
    merge: str = "max"

    def __post_init__(self):
        if self.window != "full" and (int(self.window) != self.window
                                      or self.window < 1):
            raise ValueError(f"window must be 'full' or >= 1, got {self.window!r}")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride!r}")
        if self.merge not in MERGES:
            raise ValueError(f"unknown merge method {self.merge!r}")


def window_ranges(T, spec):
    """1-based inclusive ``(first, last)`` frame ranges for each window.

    Window ``k`` starts at ``1 + k*stride``. A trailing window cut short by
    the end of the sequence is kept only if it still has two frames.
    """
    if T < 1:
        raise ValueError("empty sequence")
    if spec.window == "full":
        return [(1, T)]
    ranges = []
    start = 1
    while start <= T:
        stop = min(start + spec.window - 1, T)
        length = stop - start + 1
        if length == spec.window or length >= 2:
            ranges.append((start, stop))
        start += spec.stride
    return ranges


def windows(seq, spec):
    seq = as_sequence(seq)
    return [seq.slice(a - 1, b) for a, b in window_ranges(len(seq), spec)]


def _merge(images, merge):
    stacked = FrameSequence(np.stack([im.tensor for im in images]))
    if merge == "max":
        out = max_pool(stacked)
    elif merge == "mean":
        out = mean_pool(stacked)
    else:
        out = arp(stacked, merge.split("_", 1)[1])
    span = (images[0].source_range[0], images[-1].source_range[1])
    return DynamicImage(out.tensor, f"{images[0].method}+{merge}", span)


def mdi(seq, spec=None, method="arp_avg"):
    """Pool each window; merge them unless ``spec.merge == "none"``.

    Returns a list of :class:`DynamicImage` when not merging, otherwise a
    single one. Per-window ARP weights use that window's own length.
    """
    spec = spec or WindowSpec()
    if isinstance(method, str):
        method = PoolingMethod(method)
    seq = as_sequence(seq)
    ranges = window_ranges(len(seq), spec)
    if not ranges:
        raise EmptyResultError(
            f"no window of length >= 2 in a {len(seq)}-frame sequence")
    images = []
    for a, b in ranges:
        im = pool(seq.slice(a - 1, b), method)
        images.append(DynamicImage(im.tensor, im.method, (a, b)))
    if spec.merge == "none":
        return images
    return _merge(images, spec.merge)
