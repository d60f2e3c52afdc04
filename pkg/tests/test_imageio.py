import os
import struct

import numpy as np
import pytest
from PIL import Image

from dynimage import imageio
from dynimage.imageio import (EmptyInputError, FlowEncoding, FormatError,
                              flow_decode, flow_encode, load_sequence,
                              read_tensor, write_image, write_sequence,
                              write_tensor)
from dynimage.pooling import arp, di_export
from dynimage.tensor import FrameSequence


def save_rgb(path, arr):
    Image.fromarray(np.moveaxis(arr, 0, -1)).save(path)


class TestTensorFile:
    @pytest.mark.parametrize("dtype", [np.float64, np.float32, np.uint8])
    def test_round_trip(self, dtype, tmp_path, rng):
        arr = (rng.random((2, 3, 4, 5)) * 200).astype(dtype)
        write_tensor(arr, tmp_path / "a.dynt")
        back = read_tensor(tmp_path / "a.dynt")
        assert back.dtype == np.dtype(dtype)
        assert back.tobytes() == arr.tobytes()

    def test_header_layout(self, tmp_path):
        write_tensor(np.arange(6, dtype=np.float64).reshape(2, 3), tmp_path / "h")
        raw = (tmp_path / "h").read_bytes()
        assert raw[:4] == b"DYNT"
        assert struct.unpack("<II", raw[4:12]) == (1, 2)
        assert struct.unpack("<2Q", raw[12:28]) == (2, 3)
        assert struct.unpack("<I", raw[28:32]) == (2,)
        assert len(raw) == 32 + 6 * 8
        assert struct.unpack("<d", raw[32 + 8:32 + 16]) == (1.0,)

    def test_truncated(self, tmp_path):
        write_tensor(np.zeros((4, 4)), tmp_path / "t")
        raw = (tmp_path / "t").read_bytes()
        (tmp_path / "t").write_bytes(raw[:-1])
        with pytest.raises(FormatError):
            read_tensor(tmp_path / "t")

    def test_bad_magic(self, tmp_path):
        (tmp_path / "x").write_bytes(b"NOPE" + bytes(40))
        with pytest.raises(FormatError):
            read_tensor(tmp_path / "x")

    def test_bad_dtype(self, tmp_path):
        raw = b"DYNT" + struct.pack("<II", 1, 1) + struct.pack("<Q", 1) + struct.pack("<I", 9)
        (tmp_path / "x").write_bytes(raw + bytes(8))
        with pytest.raises(FormatError):
            read_tensor(tmp_path / "x")

    def test_sequence_round_trip_bitwise(self, tmp_path, rng):
        seq = FrameSequence(rng.standard_normal((5, 3, 4, 4)))
        write_sequence(seq, tmp_path / "s.dynt")
        back = load_sequence(tmp_path / "s.dynt", "feature")
        assert back.data.tobytes() == seq.data.tobytes()

    def test_byte_tensor_file_normalized(self, tmp_path):
        write_tensor(np.array([[[[0, 255]]]], dtype=np.uint8), tmp_path / "b.dynt")
        np.testing.assert_array_equal(load_sequence(tmp_path / "b.dynt").data,
                                      [[[[0.0, 1.0]]]])


class TestFlow:
    @pytest.mark.parametrize("v, byte", [(20.0, 255), (-20.0, 0), (0.0, 128),
                                         (50.0, 255), (-1e9, 0)])
    def test_encode(self, v, byte):
        assert flow_encode(np.full((2, 1, 1), v))[0, 0, 0] == byte

    def test_decode_endpoints(self):
        out = flow_decode(np.array([255, 0, 128], dtype=np.uint8).reshape(1, 1, 3)
                          .repeat(2, axis=0))
        assert out[0, 0, 0] == 20.0 and out[0, 0, 1] == -20.0
        assert out[0, 0, 2] == pytest.approx(40 * 128 / 255 - 20, rel=1e-15)
        assert out[0, 0, 2] == pytest.approx(0.0784, abs=1e-4)

    def test_encode_decode_exhaustive(self):
        b = np.arange(256, dtype=np.uint8).reshape(1, 16, 16).repeat(2, axis=0)
        assert np.array_equal(flow_encode(flow_decode(b)), b)

    def test_decode_encode_error_bounded(self, rng):
        v = rng.uniform(-60, 60, size=(2, 50, 50))
        err = np.abs(flow_decode(flow_encode(v)) - np.clip(v, -20, 20))
        assert err.max() <= 20 / 255

    def test_custom_clip(self):
        enc = FlowEncoding(5.0)
        assert flow_encode(np.full((2, 1, 1), 5.0), enc)[0, 0, 0] == 255

    def test_decode_needs_two_channels(self):
        with pytest.raises(FormatError):
            flow_decode(np.zeros((3, 2, 2), dtype=np.uint8))

    def test_bad_clip(self):
        with pytest.raises(ValueError):
            FlowEncoding(0.0)

    def test_flow_sequence_from_bytes(self, tmp_path):
        b = np.zeros((3, 2, 2, 2), dtype=np.uint8)
        b[:, 0] = 255
        write_tensor(b, tmp_path / "f.dynt")
        seq = load_sequence(tmp_path / "f.dynt", "flow")
        assert seq.modality == "flow"
        assert np.all(seq.data[:, 0] == 20.0) and np.all(seq.data[:, 1] == -20.0)

    def test_flow_from_images_uses_first_two_channels(self, tmp_path):
        for k, val in enumerate([0, 255]):
            save_rgb(tmp_path / f"{k}.png", np.full((3, 2, 2), val, np.uint8))
        seq = load_sequence(tmp_path, "flow")
        assert seq.frame_shape == (2, 2, 2)
        assert seq.data[0].max() == -20.0 and seq.data[1].min() == 20.0

    def test_flow_arp_is_two_channel(self, rng):
        flow = FrameSequence(rng.uniform(-20, 20, (6, 2, 4, 4)), "flow")
        assert arp(flow).tensor.shape == (2, 4, 4)


class TestImages:
    def test_directory_order_and_normalization(self, tmp_path):
        save_rgb(tmp_path / "f002.png", np.full((3, 2, 2), 255, np.uint8))
        save_rgb(tmp_path / "f001.png", np.zeros((3, 2, 2), np.uint8))
        (tmp_path / "notes.txt").write_text("ignored")
        seq = load_sequence(tmp_path)
        assert len(seq) == 2
        assert np.all(seq.data[0] == 0.0) and np.all(seq.data[1] == 1.0)
        assert seq.frame_shape == (3, 2, 2)

    def test_bytewise_order(self, tmp_path):
        for name, val in [("B.png", 1), ("a.png", 2), ("_.png", 3)]:
            Image.fromarray(np.full((1, 1), val, np.uint8)).save(tmp_path / name)
        files = [p.name for p in imageio.list_frames(tmp_path)]
        assert files == sorted(files, key=os.fsencode) == ["B.png", "_.png", "a.png"]

    def test_grayscale_and_ppm(self, tmp_path):
        Image.fromarray(np.full((2, 3), 51, np.uint8)).save(tmp_path / "a.pgm")
        Image.fromarray(np.full((2, 3), 102, np.uint8)).save(tmp_path / "b.pgm")
        seq = load_sequence(tmp_path, "gray")
        assert seq.frame_shape == (1, 2, 3)
        np.testing.assert_allclose(seq.data[:, 0, 0, 0], [0.2, 0.4])

    def test_jpeg_accepted(self, tmp_path):
        Image.fromarray(np.full((4, 4, 3), 128, np.uint8)).save(tmp_path / "a.jpg")
        assert load_sequence(tmp_path).frame_shape == (3, 4, 4)

    def test_inconsistent_shapes(self, tmp_path):
        save_rgb(tmp_path / "a.png", np.zeros((3, 2, 2), np.uint8))
        save_rgb(tmp_path / "b.png", np.zeros((3, 2, 3), np.uint8))
        with pytest.raises(FormatError):
            load_sequence(tmp_path)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(EmptyInputError):
            load_sequence(tmp_path)

    def test_missing(self, tmp_path):
        with pytest.raises(OSError):
            load_sequence(tmp_path / "nope.png")

    def test_png_readback_equals_export(self, tmp_path, rng):
        di = rng.standard_normal((3, 6, 7))
        path = write_image(di_export(di), tmp_path / "di.png")
        assert path.suffix == ".png"
        back = imageio.read_image(path)
        assert np.array_equal(back, di_export(di))

    def test_single_channel_png(self, tmp_path):
        img = np.arange(12, dtype=np.uint8).reshape(1, 3, 4)
        path = write_image(img, tmp_path / "g.png")
        assert np.array_equal(imageio.read_image(path), img)

    def test_two_channel_goes_to_tensor_file(self, tmp_path):
        img = np.zeros((2, 3, 3), np.uint8)
        path = write_image(img, tmp_path / "flow.png")
        assert path.suffix == ".dynt"
        assert np.array_equal(read_tensor(path), img)

    def test_real_valued_goes_to_tensor_file(self, tmp_path, rng):
        di = rng.standard_normal((3, 2, 2))
        path = write_image(di, tmp_path / "di")
        assert read_tensor(path).tobytes() == di.tobytes()

    def test_deterministic_bytes(self, tmp_path, rng):
        img = rng.integers(0, 256, (3, 8, 8)).astype(np.uint8)
        a = write_image(img, tmp_path / "a.png").read_bytes()
        b = write_image(img, tmp_path / "b.png").read_bytes()
        assert a == b

    def test_empty(self, tmp_path):
        with pytest.raises(ValueError):
            write_image(np.zeros((3, 0, 0), np.uint8), tmp_path / "e.png")

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            write_image(np.zeros((3, 2, 2), np.uint8), tmp_path / "no" / "x.png")
