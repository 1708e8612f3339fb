import struct
import zlib

import numpy as np
import pytest

from qwave.image import ChannelImage
from qwave.pngio import (
    load_channel_image,
    read_pgm,
    read_png,
    save_channel_image,
    write_pgm,
    write_png,
)


@pytest.mark.parametrize("depth", [8, 16])
@pytest.mark.parametrize("shape", [(5, 7), (5, 7, 3)])
def test_png_round_trip(tmp_path, depth, shape):
    rng = np.random.default_rng(100)
    peak = 255 if depth == 8 else 65535
    samples = rng.integers(0, peak + 1, size=shape).astype(
        np.uint8 if depth == 8 else np.uint16
    )
    path = tmp_path / "img.png"
    write_png(path, samples, depth)
    back, back_depth = read_png(path)
    assert back_depth == depth
    np.testing.assert_array_equal(back, samples)


def _paeth_ref(a, b, c):
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def encode_png_with_filters(samples, filter_types):
    """Independent encoder: applies the scanline filters forward, which
    read_png must invert."""
    height, width, channels = samples.shape
    bpp = channels
    raw = samples.reshape(height, width * channels).astype(np.int64)
    out = bytearray()
    prev = np.zeros(width * channels, dtype=np.int64)
    for r in range(height):
        ft = filter_types[r % len(filter_types)]
        line = raw[r]
        enc = np.zeros_like(line)
        for i in range(line.size):
            left = line[i - bpp] if i >= bpp else 0
            up = prev[i]
            ul = prev[i - bpp] if i >= bpp else 0
            if ft == 0:
                pred = 0
            elif ft == 1:
                pred = left
            elif ft == 2:
                pred = up
            elif ft == 3:
                pred = (left + up) >> 1
            else:
                pred = _paeth_ref(left, up, ul)
            enc[i] = (line[i] - pred) % 256
        out.append(ft)
        out.extend(enc.astype(np.uint8).tobytes())
        prev = line
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)

    def chunk(ctype, data):
        return (
            struct.pack(">I", len(data))
            + ctype
            + data
            + struct.pack(">I", zlib.crc32(ctype + data) & 0xFFFFFFFF)
        )

    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(bytes(out)))
        + chunk(b"IEND", b"")
    )


@pytest.mark.parametrize("filter_types", [[0], [1], [2], [3], [4], [0, 1, 2, 3, 4]])
def test_png_all_filter_types_decode(tmp_path, filter_types):
    rng = np.random.default_rng(101)
    samples = rng.integers(0, 256, size=(8, 6, 3)).astype(np.uint8)
    blob = encode_png_with_filters(samples, filter_types)
    path = tmp_path / "filtered.png"
    path.write_bytes(blob)
    back, depth = read_png(path)
    assert depth == 8
    np.testing.assert_array_equal(back, samples)


def test_png_rejects_bad_signature(tmp_path):
    path = tmp_path / "bad.png"
    path.write_bytes(b"JPEG" * 10)
    with pytest.raises(ValueError, match="not a PNG"):
        read_png(path)


def test_png_rejects_rgba(tmp_path):
    ihdr = struct.pack(">IIBBBBB", 2, 2, 8, 6, 0, 0, 0)

    def chunk(ctype, data):
        return (
            struct.pack(">I", len(data))
            + ctype
            + data
            + struct.pack(">I", zlib.crc32(ctype + data) & 0xFFFFFFFF)
        )

    blob = (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(bytes(2 * (1 + 2 * 4))))
        + chunk(b"IEND", b"")
    )
    path = tmp_path / "rgba.png"
    path.write_bytes(blob)
    with pytest.raises(ValueError, match="colour type"):
        read_png(path)


def test_write_png_validates():
    with pytest.raises(ValueError, match="shape"):
        write_png("/tmp/x.png", np.zeros((2, 2, 2)))
    with pytest.raises(ValueError, match="bit depth"):
        write_png("/tmp/x.png", np.zeros((2, 2)), bit_depth=12)


@pytest.mark.parametrize("depth", [8, 16])
def test_pgm_round_trip(tmp_path, depth):
    rng = np.random.default_rng(102)
    peak = 255 if depth == 8 else 65535
    samples = rng.integers(0, peak + 1, size=(4, 6)).astype(
        np.uint8 if depth == 8 else np.uint16
    )
    path = tmp_path / "plane.pgm"
    write_pgm(path, samples, depth)
    back, back_depth = read_pgm(path)
    assert back_depth == depth
    np.testing.assert_array_equal(back, samples)


def test_pgm_comment_header(tmp_path):
    path = tmp_path / "c.pgm"
    body = bytes(range(6))
    path.write_bytes(b"P5\n# a comment\n3 2\n255\n" + body)
    samples, depth = read_pgm(path)
    assert depth == 8
    assert samples.shape == (2, 3)
    np.testing.assert_array_equal(samples.ravel(), list(range(6)))


def test_pgm_rejects_ascii(tmp_path):
    path = tmp_path / "p2.pgm"
    path.write_bytes(b"P2\n2 2\n255\n0 1 2 3\n")
    with pytest.raises(ValueError, match="P5"):
        read_pgm(path)


@pytest.mark.parametrize("depth", [8, 16])
@pytest.mark.parametrize("nir_ext", ["pgm", "png"])
def test_channel_image_round_trip(tmp_path, depth, nir_ext):
    rng = np.random.default_rng(103)
    side = 8
    img = ChannelImage(
        r=rng.uniform(size=(side, side)),
        g=rng.uniform(size=(side, side)),
        b=rng.uniform(size=(side, side)),
        nir=rng.uniform(size=(side, side)),
    )
    rgb_path = tmp_path / "img.png"
    nir_path = tmp_path / f"img_nir.{nir_ext}"
    save_channel_image(img, rgb_path, nir_path, depth)
    back, back_depth = load_channel_image(rgb_path, nir_path)
    assert back_depth == depth
    # quantization bounds the round-trip error by half a step
    step = 1.0 / (255 if depth == 8 else 65535)
    assert back.isclose(img, tol=0.5 * step + 1e-12)


def test_channel_image_without_nir(tmp_path):
    rng = np.random.default_rng(104)
    img = ChannelImage(
        r=rng.uniform(size=(4, 4)),
        g=rng.uniform(size=(4, 4)),
        b=rng.uniform(size=(4, 4)),
    )
    path = tmp_path / "rgb.png"
    save_channel_image(img, path)
    back, _ = load_channel_image(path)
    assert back.nir is None
    assert back.isclose(img, tol=0.5 / 255 + 1e-12)


def test_save_requires_nir_path(tmp_path):
    img = ChannelImage(
        r=np.zeros((2, 2)), g=np.zeros((2, 2)), b=np.zeros((2, 2)),
        nir=np.zeros((2, 2)),
    )
    with pytest.raises(ValueError, match="nir_path"):
        save_channel_image(img, tmp_path / "x.png")


def test_nir_shape_mismatch(tmp_path):
    rgb = np.zeros((4, 4, 3), dtype=np.uint8)
    nir = np.zeros((2, 2), dtype=np.uint8)
    write_png(tmp_path / "rgb.png", rgb, 8)
    write_pgm(tmp_path / "nir.pgm", nir, 8)
    with pytest.raises(ValueError, match="does not match"):
        load_channel_image(tmp_path / "rgb.png", tmp_path / "nir.pgm")


def test_load_rejects_grayscale_as_rgb(tmp_path):
    write_png(tmp_path / "gray.png", np.zeros((4, 4), dtype=np.uint8), 8)
    with pytest.raises(ValueError, match="RGB"):
        load_channel_image(tmp_path / "gray.png")
