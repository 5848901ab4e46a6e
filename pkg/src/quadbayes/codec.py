"""Container format and the compress/decompress pipelines.

A ``.qtb`` file is a 7-byte header followed by the range-coded payload:

    bytes 0-1   magic "QB"
    bytes 2-3   image width,  big-endian u16
    bytes 4-5   image height, big-endian u16
    byte  6     configuration check byte (hash of alpha/beta/g)

Model hyperparameters are codec configuration, not file content; the
check byte only makes a mismatched decode fail fast.  Images that are
not square with a power-of-two side are zero-padded up to the enclosing
grid before coding and cropped back after decoding; the header always
records the true dimensions.  Coding probabilities are quantized to
1/65536 units for the coder only; state evolution always uses the
unquantized values, so encoder and decoder stay in lockstep.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Mapping

import numpy as np

from . import coder, weighting
from .quadtree import DEFAULT_HP, GSpec, HyperParams

MAGIC = b"QB"
HEADER_SIZE = 7
MAX_DIM = 0xFFFF


class CodecError(ValueError):
    """Malformed compressed data or configuration mismatch."""


def _canonical_g(g: GSpec) -> str:
    if isinstance(g, (int, float)):
        return repr(float(g))
    if isinstance(g, Mapping):
        items = sorted((block.label(), float(v)) for block, v in g.items())
        return "map:" + ",".join(f"{k}={v!r}" for k, v in items)
    return "depths:" + ",".join(repr(float(v)) for v in g)


def config_byte(hp: HyperParams, g: GSpec | None = None) -> int:
    """One-byte digest of the coding configuration."""
    spec = g if g is not None else hp.g
    text = f"a={hp.alpha!r};b={hp.beta!r};g={_canonical_g(spec)}"
    return hashlib.sha256(text.encode("ascii")).digest()[0]


def grid_depth_for(height: int, width: int) -> int:
    """Depth of the smallest power-of-two grid enclosing the image."""
    return (max(height, width) - 1).bit_length()


def _pad_to_grid(img: np.ndarray, pad: bool) -> np.ndarray:
    h, w = img.shape
    d_max = grid_depth_for(h, w)
    side = 1 << d_max
    if h == side and w == side:
        return img
    if not pad:
        raise CodecError(
            f"{w}x{h} image is not a square power of two and padding is "
            f"disabled")
    out = np.zeros((side, side), dtype=np.uint8)
    out[:h, :w] = img
    return out


def _check_image(img: np.ndarray) -> np.ndarray:
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    h, w = img.shape
    if h < 1 or w < 1:
        raise ValueError("image must be non-empty")
    if h > MAX_DIM or w > MAX_DIM:
        raise ValueError(f"dimensions exceed {MAX_DIM}")
    if img.max() > 1:
        raise ValueError("image must be binary (values 0 and 1)")
    return img


def compress(img: np.ndarray, hp: HyperParams = DEFAULT_HP,
             g: GSpec | None = None, pad: bool = True) -> bytes:
    """Losslessly encode a binary image to .qtb bytes."""
    img = _check_image(img)
    h, w = img.shape
    grid = _pad_to_grid(img, pad)
    run = weighting.run_image(grid, hp, g)
    q = coder.quantize_array(run.p1)
    bits = grid.reshape(-1)
    enc = coder.RangeEncoder()
    encode_bit = enc.encode_bit
    for p1_q, v in zip(q.tolist(), bits.tolist()):
        encode_bit(p1_q, v)
    payload = enc.finish()
    header = MAGIC + struct.pack(">HH", w, h) + bytes([config_byte(hp, g)])
    return header + payload


def decompress(data: bytes, hp: HyperParams = DEFAULT_HP,
               g: GSpec | None = None) -> np.ndarray:
    """Decode .qtb bytes back to the original binary image."""
    if len(data) < HEADER_SIZE:
        raise CodecError("truncated header")
    if data[:2] != MAGIC:
        raise CodecError(f"bad magic {data[:2]!r}")
    w, h = struct.unpack(">HH", data[2:6])
    if w < 1 or h < 1:
        raise CodecError(f"bad dimensions {w}x{h}")
    if data[6] != config_byte(hp, g):
        raise CodecError("configuration mismatch: compressed with different "
                         "hyperparameters")
    d_max = grid_depth_for(h, w)
    st = weighting.new_state(d_max, hp, g)
    try:
        dec = coder.RangeDecoder(data[HEADER_SIZE:])
        bits = np.empty(st.n_pixels, dtype=np.uint8)
        probabilities = st.probabilities
        advance = st.advance
        quantize = coder.quantize
        decode_bit = dec.decode_bit
        for t in range(st.n_pixels):
            _, p1 = probabilities()
            v = decode_bit(quantize(p1))
            advance(v)
            bits[t] = v
    except coder.TruncatedStream as e:
        raise CodecError(f"truncated payload: {e}") from e
    side = 1 << d_max
    return bits.reshape(side, side)[:h, :w].copy()


def measure_rate(img: np.ndarray, hp: HyperParams = DEFAULT_HP,
                 g: GSpec | None = None, pad: bool = True) -> dict:
    """Actual and coder-free ideal rates in bits per pixel.

    ``actual_bpp`` counts the whole file, header included, over the true
    pixel count; ``ideal_bpp`` is the model's information content alone.
    """
    img = _check_image(img)
    h, w = img.shape
    data = compress(img, hp, g, pad)
    grid = _pad_to_grid(img, pad)
    ideal = weighting.total_ideal_codelength(grid, hp, g)
    return {
        "actual_bpp": 8.0 * len(data) / (h * w),
        "ideal_bpp": ideal / (h * w),
    }
