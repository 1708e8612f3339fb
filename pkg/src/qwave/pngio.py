"""Minimal PNG and PGM codecs for the command-line tools.

Reads and writes greyscale and RGB PNGs at 8 or 16 bits per sample
(colour types 0 and 2, non-interlaced) plus binary PGM (P5) planes.
Palette, alpha and interlaced files are rejected.  Written PNGs use
filter type 0 on every scanline; all five filter types are understood
when reading.

Float images use the [0, 1] convention: 8-bit samples divide by 255,
16-bit by 65535, and the writers invert that mapping with rounding and
clipping.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .image import ChannelImage

__all__ = [
    "read_png",
    "write_png",
    "read_pgm",
    "write_pgm",
    "load_channel_image",
    "save_channel_image",
]

_PNG_SIG = b"\x89PNG\r\n\x1a\n"
_CHANNELS = {0: 1, 2: 3}


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def _unfilter(data: bytes, height: int, stride: int, bpp: int) -> np.ndarray:
    rows = np.empty((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    pos = 0
    for r in range(height):
        ftype = data[pos]
        raw = np.frombuffer(data[pos + 1 : pos + 1 + stride], dtype=np.uint8)
        pos += 1 + stride
        if ftype == 0:
            cur = raw.copy()
        elif ftype == 2:
            cur = raw + prev  # uint8 arithmetic wraps mod 256 as required
        elif ftype == 1:
            cur = raw.astype(np.int64)
            for off in range(bpp):
                cur[off::bpp] = np.cumsum(cur[off::bpp])
            cur = (cur % 256).astype(np.uint8)
        elif ftype in (3, 4):
            cur = np.zeros(stride, dtype=np.uint8)
            for i in range(stride):
                left = int(cur[i - bpp]) if i >= bpp else 0
                up = int(prev[i])
                if ftype == 3:
                    pred = (left + up) >> 1
                else:
                    ul = int(prev[i - bpp]) if i >= bpp else 0
                    pred = _paeth(left, up, ul)
                cur[i] = (int(raw[i]) + pred) & 0xFF
        else:
            raise ValueError(f"unsupported PNG filter type {ftype}")
        rows[r] = cur
        prev = cur
    return rows


def read_png(path):
    """Read a PNG file.

    Returns
    -------
    (samples, bit_depth)
        ``samples`` is uint8 or uint16, shape (H, W) for greyscale or
        (H, W, 3) for RGB.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _PNG_SIG:
        raise ValueError(f"{path}: not a PNG file")
    pos = 8
    idat = bytearray()
    header = None
    while pos < len(blob):
        (length,) = struct.unpack(">I", blob[pos : pos + 4])
        ctype = blob[pos + 4 : pos + 8]
        data = blob[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if ctype == b"IHDR":
            header = struct.unpack(">IIBBBBB", data)
        elif ctype == b"IDAT":
            idat.extend(data)
        elif ctype == b"IEND":
            break
    if header is None:
        raise ValueError(f"{path}: missing IHDR chunk")
    width, height, depth, colour, comp, filt, interlace = header
    if comp or filt:
        raise ValueError(f"{path}: unsupported compression/filter method")
    if interlace:
        raise ValueError(f"{path}: interlaced PNGs are not supported")
    if colour not in _CHANNELS:
        raise ValueError(
            f"{path}: unsupported colour type {colour} (greyscale or RGB only)"
        )
    if depth not in (8, 16):
        raise ValueError(f"{path}: unsupported bit depth {depth}")
    channels = _CHANNELS[colour]
    bpp = channels * depth // 8
    stride = width * bpp
    rows = _unfilter(zlib.decompress(bytes(idat)), height, stride, bpp)
    if depth == 8:
        samples = rows.reshape(height, width, channels)
    else:
        hi = rows[:, 0::2].astype(np.uint16)
        lo = rows[:, 1::2].astype(np.uint16)
        samples = ((hi << 8) | lo).reshape(height, width, channels)
    if channels == 1:
        samples = samples[..., 0]
    return samples, depth


def _chunk(ctype: bytes, data: bytes) -> bytes:
    return (
        struct.pack(">I", len(data))
        + ctype
        + data
        + struct.pack(">I", zlib.crc32(ctype + data) & 0xFFFFFFFF)
    )


def write_png(path, samples: np.ndarray, bit_depth: int = 8) -> None:
    """Write a greyscale (H, W) or RGB (H, W, 3) integer array as PNG."""
    samples = np.asarray(samples)
    if samples.ndim == 2:
        colour, channels = 0, 1
        samples = samples[..., None]
    elif samples.ndim == 3 and samples.shape[2] == 3:
        colour, channels = 2, 3
    else:
        raise ValueError(f"cannot write shape {samples.shape} as PNG")
    if bit_depth not in (8, 16):
        raise ValueError(f"unsupported bit depth {bit_depth}")
    height, width = samples.shape[:2]
    dtype = ">u2" if bit_depth == 16 else "u1"
    payload = samples.astype(dtype).tobytes()
    stride = width * channels * bit_depth // 8
    raw = bytearray()
    for r in range(height):
        raw.append(0)
        raw.extend(payload[r * stride : (r + 1) * stride])
    ihdr = struct.pack(">IIBBBBB", width, height, bit_depth, colour, 0, 0, 0)
    with open(path, "wb") as fh:
        fh.write(_PNG_SIG)
        fh.write(_chunk(b"IHDR", ihdr))
        fh.write(_chunk(b"IDAT", zlib.compress(bytes(raw), 9)))
        fh.write(_chunk(b"IEND", b""))


def read_pgm(path):
    """Read a binary PGM (P5).  Returns (samples, bit_depth)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:2] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(blob[start:pos]))
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if maxval <= 0 or maxval > 65535:
        raise ValueError(f"{path}: invalid maxval {maxval}")
    depth = 8 if maxval < 256 else 16
    dtype = np.uint8 if depth == 8 else ">u2"
    count = width * height
    samples = np.frombuffer(blob, dtype=dtype, count=count, offset=pos)
    return samples.reshape(height, width).astype(np.uint16 if depth == 16 else np.uint8), depth


def write_pgm(path, samples: np.ndarray, bit_depth: int = 8) -> None:
    """Write a 2-D integer array as binary PGM (P5)."""
    samples = np.asarray(samples)
    if samples.ndim != 2:
        raise ValueError(f"PGM planes must be 2-D, got shape {samples.shape}")
    maxval = 255 if bit_depth == 8 else 65535
    dtype = "u1" if bit_depth == 8 else ">u2"
    with open(path, "wb") as fh:
        fh.write(f"P5\n{samples.shape[1]} {samples.shape[0]}\n{maxval}\n".encode())
        fh.write(samples.astype(dtype).tobytes())


def _to_float(samples, depth):
    return samples.astype(float) / (255.0 if depth == 8 else 65535.0)


def _from_float(plane, depth):
    peak = 255.0 if depth == 8 else 65535.0
    return np.rint(np.clip(plane, 0.0, 1.0) * peak).astype(
        np.uint8 if depth == 8 else np.uint16
    )


def _read_plane(path):
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P5":
        return read_pgm(path)
    samples, depth = read_png(path)
    if samples.ndim != 2:
        raise ValueError(f"{path}: expected a single-plane image")
    return samples, depth


def load_channel_image(rgb_path, nir_path=None):
    """Load an RGB PNG plus an optional NIR plane (PNG or PGM).

    Returns (ChannelImage with [0,1] floats, bit_depth of the RGB file).
    """
    samples, depth = read_png(rgb_path)
    if samples.ndim != 3:
        raise ValueError(f"{rgb_path}: expected an RGB image")
    rgb = _to_float(samples, depth)
    nir = None
    if nir_path is not None:
        nir_samples, nir_depth = _read_plane(nir_path)
        nir = _to_float(nir_samples, nir_depth)
        if nir.shape != rgb.shape[:2]:
            raise ValueError(
                f"NIR plane {nir.shape} does not match RGB {rgb.shape[:2]}"
            )
    return ChannelImage(r=rgb[..., 0], g=rgb[..., 1], b=rgb[..., 2], nir=nir), depth


def save_channel_image(img: ChannelImage, rgb_path, nir_path=None, bit_depth: int = 8) -> None:
    """Write a channel image back to disk, mirroring the input depth.

    The NIR plane goes to ``nir_path`` (PGM if the suffix is .pgm, PNG
    otherwise) and is required when the image carries one.
    """
    rgb = np.stack([_from_float(p, bit_depth) for p in (img.r, img.g, img.b)], axis=-1)
    write_png(rgb_path, rgb, bit_depth)
    if img.nir is not None:
        if nir_path is None:
            raise ValueError("image has an NIR plane but no nir_path was given")
        plane = _from_float(img.nir, bit_depth)
        if str(nir_path).lower().endswith(".pgm"):
            write_pgm(nir_path, plane, bit_depth)
        else:
            write_png(nir_path, plane, bit_depth)
