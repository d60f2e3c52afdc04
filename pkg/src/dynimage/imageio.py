"""Reading frame sequences from disk and writing pooled results.

Two on-disk forms are supported: ordinary images (PNG/PPM/PGM/JPEG in,
PNG out) and a small raw tensor container, the TensorFile::

    offset  size        field
    0       4           magic b"DYNT"
    4       4           version, uint32 = 1
    8       4           ndim, uint32
    12      8 * ndim    dims, uint64 each
    ..      4           dtype code, uint32 (1 float32, 2 float64, 3 uint8)
    ..      ...         payload, row-major

Every integer and the payload are little-endian.

Optical flow is stored as bytes after clipping displacements to
``+-clip`` pixels (20 by default) and mapping ``[-clip, clip]`` linearly
onto ``[0, 255]``.
"""

import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .pooling import round_half_away
from .tensor import FrameSequence

MAGIC = b"DYNT"
VERSION = 1
DTYPES = {1: np.dtype("<f4"), 2: np.dtype("<f8"), 3: np.dtype("u1")}
DTYPE_CODES = {np.dtype(v).str: k for k, v in DTYPES.items()}
IMAGE_SUFFIXES = {".png", ".ppm", ".pgm", ".pnm", ".jpg", ".jpeg"}


class FormatError(ValueError):
    """The file contents do not match the expected layout."""


class EmptyInputError(ValueError):
    """A directory held no frames."""


@dataclass(frozen=True)
class FlowEncoding:
    clip: float = 20.0

    def __post_init__(self):
        if not self.clip > 0:
            raise ValueError("flow clip must be positive")


def flow_encode(flow, enc=FlowEncoding()):
    """Real displacements (pixels) to bytes; zero flow becomes 128."""
    v = np.clip(np.asarray(flow, dtype=np.float64), -enc.clip, enc.clip)
    q = round_half_away(255.0 * (v + enc.clip) / (2.0 * enc.clip))
    return np.clip(q, 0, 255).astype(np.uint8)


def flow_decode(data, enc=FlowEncoding(), channel_axis=0):
    """Bytes back to displacements in pixels.

    ``data`` must have exactly two channels along ``channel_axis``.
    """
    b = np.asarray(data)
    if b.ndim == 0 or b.shape[channel_axis] != 2:
        raise FormatError(f"flow needs 2 channels, got shape {b.shape}")
    return b.astype(np.float64) / 255.0 * 2.0 * enc.clip - enc.clip


# -- TensorFile ---------------------------------------------------------------

def write_tensor(arr, path):
    arr = np.asarray(arr)
    if arr.size == 0:
        raise ValueError("refusing to write an empty tensor")
    if arr.dtype == np.uint8:
        dtype = DTYPES[3]
    elif arr.dtype == np.float32:
        dtype = DTYPES[1]
    else:
        dtype = DTYPES[2]
    header = MAGIC + struct.pack("<II", VERSION, arr.ndim)
    header += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    header += struct.pack("<I", DTYPE_CODES[dtype.str])
    payload = np.ascontiguousarray(arr, dtype=dtype).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def read_tensor(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != MAGIC:
        raise FormatError(f"{path}: not a TensorFile")
    try:
        version, ndim = struct.unpack_from("<II", raw, 4)
        dims = struct.unpack_from(f"<{ndim}Q", raw, 12)
        (code,) = struct.unpack_from("<I", raw, 12 + 8 * ndim)
    except struct.error as exc:
        raise FormatError(f"{path}: truncated header") from exc
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if code not in DTYPES:
        raise FormatError(f"{path}: unknown dtype code {code}")
    dtype = DTYPES[code]
    offset = 16 + 8 * ndim
    expected = int(np.prod(dims, dtype=np.uint64)) * dtype.itemsize
    if len(raw) - offset != expected:
        raise FormatError(
            f"{path}: payload has {len(raw) - offset} bytes, expected {expected}")
    return np.frombuffer(raw, dtype=dtype, offset=offset).reshape(dims).copy()


def is_tensor_file(path):
    try:
        with open(path, "rb") as fh:
            return fh.read(4) == MAGIC
    except OSError:
        return False


# -- images -------------------------------------------------------------------

def read_image(path):
    """Decode one image to a ``(C, H, W)`` uint8 array.

    Grayscale gives one channel, grayscale+alpha two, anything else is
    converted to RGB.
    """
    with Image.open(path) as im:
        if im.mode in ("L", "LA"):
            arr = np.asarray(im)
        elif im.mode in ("I", "I;16", "F"):
            raise FormatError(f"{path}: only 8-bit images are supported")
        else:
            arr = np.asarray(im.convert("RGB"))
    if arr.ndim == 2:
        arr = arr[None]
    else:
        arr = np.moveaxis(arr, -1, 0)
    return np.ascontiguousarray(arr)


def write_image(arr, path):
    """PNG for 1- or 3-channel bytes, a TensorFile for everything else.

    Returns the path actually written; a ``.png`` suffix is swapped for
    ``.dynt`` when the data cannot be stored as PNG.
    """
    arr = np.asarray(arr)
    if arr.size == 0:
        raise ValueError("refusing to write an empty tensor")
    path = Path(path)
    if arr.dtype == np.uint8 and arr.ndim == 2:
        arr = arr[None]
    if arr.dtype == np.uint8 and arr.ndim == 3 and arr.shape[0] in (1, 3):
        if path.suffix.lower() != ".png":
            path = path.with_suffix(".png")
        pixels = arr[0] if arr.shape[0] == 1 else np.moveaxis(arr, 0, -1)
        Image.fromarray(np.ascontiguousarray(pixels)).save(path, format="PNG")
        return path
    if path.suffix.lower() == ".png":
        path = path.with_suffix(".dynt")
    write_tensor(arr, path)
    return path


# -- sequences ----------------------------------------------------------------

def _frames_to_sequence(frames, modality, enc):
    frames = np.asarray(frames)
    if modality == "flow":
        if frames.dtype == np.uint8:
            data = flow_decode(frames, enc, channel_axis=1)
        else:
            if frames.shape[1] != 2:
                raise FormatError("flow needs 2 channels")
            data = frames.astype(np.float64)
    elif frames.dtype == np.uint8:
        data = frames.astype(np.float64) / 255.0
    else:
        data = frames.astype(np.float64)
    return FrameSequence(data, modality)


def list_frames(directory):
    """Image files in ``directory`` in byte-wise filename order."""
    names = [n for n in os.listdir(directory)
             if Path(n).suffix.lower() in IMAGE_SUFFIXES]
    names.sort(key=os.fsencode)
    return [Path(directory) / n for n in names]


def load_sequence(path, modality="rgb", enc=FlowEncoding()):
    """Load frames from a directory of images, one image, or a TensorFile.

    Byte images are scaled to ``[0, 1]``; with ``modality="flow"`` bytes
    are decoded to pixel displacements instead (from a TensorFile, or from
    the first two channels of each image). A TensorFile holds the whole
    sequence with time on its first axis, normally ``(T, C, H, W)``.
    """
    path = Path(path)
    if path.is_dir():
        files = list_frames(path)
        if not files:
            raise EmptyInputError(f"{path}: no image frames found")
        frames = [read_image(f) for f in files]
        for f, fr in zip(files, frames):
            if fr.shape != frames[0].shape:
                raise FormatError(
                    f"{f}: shape {fr.shape} differs from {frames[0].shape}")
        frames = np.stack(frames)
    elif is_tensor_file(path):
        frames = read_tensor(path)
        if frames.ndim < 2:
            raise FormatError(f"{path}: need a leading time axis")
    else:
        frames = read_image(path)[None]
    if modality == "flow" and frames.dtype == np.uint8 and frames.shape[1] > 2:
        frames = frames[:, :2]
    return _frames_to_sequence(frames, modality, enc)


def write_sequence(seq, path):
    """Write all frames as one float64 TensorFile, time first."""
    write_tensor(np.asarray(getattr(seq, "data", seq), dtype=np.float64), path)
