"""Netpbm reading and writing: PBM (P1/P4) and PGM (P2/P5), maxval <= 255.

Headers are parsed token-wise with ``#`` comments and arbitrary
whitespace allowed anywhere before the raster.  PBM convention: bit 1
is black.  Binary images elsewhere in this package use the same 0/1
values PBM stores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadtree import QuadtreeModel


class PnmError(ValueError):
    """Malformed or unsupported Netpbm data."""


@dataclass
class PnmImage:
    format: str          # "P1", "P2", "P4" or "P5" as read
    width: int
    height: int
    maxval: int          # 1 for PBM
    pixels: np.ndarray   # (height, width) uint8

    @property
    def is_binary(self) -> bool:
        return self.maxval == 1


class _Scanner:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_space(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in b" \t\r\n\x0b\x0c":
                self.pos += 1
            elif c == ord("#"):
                while self.pos < n and data[self.pos] not in b"\n\r":
                    self.pos += 1
            else:
                break

    def token(self) -> bytes:
        self._skip_space()
        start = self.pos
        data, n = self.data, len(self.data)
        while self.pos < n and data[self.pos] not in b" \t\r\n\x0b\x0c#":
            self.pos += 1
        if self.pos == start:
            raise PnmError("unexpected end of header")
        return data[start:self.pos]

    def int_token(self, what: str) -> int:
        tok = self.token()
        try:
            return int(tok)
        except ValueError:
            raise PnmError(f"bad {what}: {tok!r}") from None

    def begin_raster(self) -> int:
        # exactly one whitespace byte separates the header from a binary
        # raster
        if self.pos >= len(self.data) or self.data[self.pos] not in \
                b" \t\r\n\x0b\x0c":
            raise PnmError("missing whitespace before raster")
        return self.pos + 1


def read_pnm(data: bytes) -> PnmImage:
    """Decode P1/P2/P4/P5 bytes into a pixel matrix (row-major)."""
    sc = _Scanner(data)
    magic = sc.token().decode("ascii", "replace")
    if magic not in ("P1", "P2", "P4", "P5"):
        raise PnmError(f"unsupported magic {magic!r}")
    width = sc.int_token("width")
    height = sc.int_token("height")
    if width < 1 or height < 1:
        raise PnmError(f"bad dimensions {width}x{height}")
    maxval = 1
    if magic in ("P2", "P5"):
        maxval = sc.int_token("maxval")
        if not 1 <= maxval <= 255:
            raise PnmError(f"unsupported maxval {maxval}")

    if magic == "P1":
        pixels = np.empty(width * height, dtype=np.uint8)
        count = 0
        pos, n = sc.pos, len(data)
        while pos < n and count < pixels.size:
            c = data[pos]
            if c in b"01":
                pixels[count] = c - ord("0")
                count += 1
                pos += 1
            elif c in b" \t\r\n\x0b\x0c":
                pos += 1
            elif c == ord("#"):
                nl = data.find(b"\n", pos)
                pos = n if nl == -1 else nl + 1
            else:
                raise PnmError(f"bad P1 raster byte {bytes([c])!r}")
        if count != pixels.size:
            raise PnmError("truncated P1 raster")
        return PnmImage(magic, width, height, 1,
                        pixels.reshape(height, width))

    if magic == "P2":
        pixels = np.empty(width * height, dtype=np.uint8)
        for k in range(pixels.size):
            value = sc.int_token("pixel")
            if not 0 <= value <= maxval:
                raise PnmError(f"pixel value {value} exceeds maxval {maxval}")
            pixels[k] = value
        return PnmImage(magic, width, height, maxval,
                        pixels.reshape(height, width))

    start = sc.begin_raster()
    if magic == "P4":
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        raster = data[start:start + need]
        if len(raster) != need:
            raise PnmError("truncated P4 raster")
        rows = np.frombuffer(raster, dtype=np.uint8).reshape(height,
                                                             row_bytes)
        bits = np.unpackbits(rows, axis=1)[:, :width]
        return PnmImage(magic, width, height, 1, bits)

    need = width * height
    raster = data[start:start + need]
    if len(raster) != need:
        raise PnmError("truncated P5 raster")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return PnmImage(magic, width, height, maxval, pixels.copy())


def write_pbm(bits: np.ndarray, plain: bool = False) -> bytes:
    """Encode a 0/1 matrix as PBM: packed P4, or P1 when ``plain``."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 2 or bits.max(initial=0) > 1:
        raise ValueError("expected a 2-D 0/1 matrix")
    h, w = bits.shape
    if plain:
        body = "\n".join("".join(str(v) for v in row) for row in bits)
        return f"P1\n{w} {h}\n{body}\n".encode("ascii")
    packed = np.packbits(bits, axis=1)
    return f"P4\n{w} {h}\n".encode("ascii") + packed.tobytes()


def write_pgm(gray: np.ndarray, maxval: int = 255) -> bytes:
    gray = np.asarray(gray, dtype=np.uint8)
    if gray.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if not 1 <= maxval <= 255:
        raise ValueError(f"unsupported maxval {maxval}")
    h, w = gray.shape
    return f"P5\n{w} {h}\n{maxval}\n".encode("ascii") + gray.tobytes()


def binarize(gray: np.ndarray, threshold: int = 128) -> np.ndarray:
    """Threshold a grayscale image: value >= threshold maps to 1."""
    if not 0 <= threshold <= 256:
        raise ValueError(f"threshold must lie in [0, 256], got {threshold}")
    gray = np.asarray(gray)
    return (gray >= threshold).astype(np.uint8)


# Overlay rendering: source pixels as white/black, segment borders in
# mid-gray.  Each leaf block contributes its top and left edges; the
# outer bottom/right image border closes the grid.
_BORDER_GRAY = 128


def render_overlay(bits: np.ndarray, m: QuadtreeModel) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    h, w = bits.shape
    out = np.where(bits == 1, 0, 255).astype(np.uint8)
    for block in m.leaf_blocks():
        r, c = block.origin(m.d_max)
        side = block.side(m.d_max)
        if r < h and c < w:
            out[r, c:min(c + side, w)] = _BORDER_GRAY
            out[r:min(r + side, h), c] = _BORDER_GRAY
    out[h - 1, :] = _BORDER_GRAY
    out[:, w - 1] = _BORDER_GRAY
    return out


def write_overlay(bits: np.ndarray, m: QuadtreeModel) -> bytes:
    """PGM with the segmentation drawn over the binary image."""
    return write_pgm(render_overlay(bits, m))
