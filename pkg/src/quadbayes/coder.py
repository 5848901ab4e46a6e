"""Binary range coder with 16-bit probability resolution.

Byte-oriented carry-propagating construction: a 32-bit ``range``
register renormalizes a byte at a time, a 33-bit ``low`` accumulator
catches carries, and pending 0xFF bytes are held back until a carry
resolves them (the cache/cache_size mechanism).  Symbol 1 owns the low
subinterval ``[0, bound)`` with ``bound = (range * p1) >> 16``.

The byte stream starts with one leading byte produced by the initial
empty cache and ends with five flush bytes that push out the remaining
``low`` bits, so coder overhead is at most 6 bytes (48 bits) plus the
subinterval truncation loss.  The decoder consumes exactly the bytes
the encoder produced for the same probability/symbol sequence and never
reads past them.  See FORMAT.md for the byte-exact contract.
"""

from __future__ import annotations

import numpy as np

PROB_BITS = 16
PROB_ONE = 1 << PROB_BITS          # probabilities quantized to 1/65536 units
_TOP = 1 << 24                     # renormalization threshold
_MASK32 = 0xFFFFFFFF
FLUSH_BYTES = 5


class TruncatedStream(Exception):
    """Decoder asked for bytes beyond the end of the payload."""


def quantize(p1: float) -> int:
    """Probability of symbol 1 in 1/65536 units, clamped to [1, 65535].

    Round half up; the clamp keeps both symbols codable.
    """
    if not 0.0 < p1 < 1.0:
        raise ValueError(f"probability must lie strictly in (0, 1), got {p1}")
    q = int(p1 * PROB_ONE + 0.5)
    if q < 1:
        return 1
    if q > PROB_ONE - 1:
        return PROB_ONE - 1
    return q


def quantize_array(p1: np.ndarray) -> np.ndarray:
    """Vector version of :func:`quantize` (identical rounding and clamp)."""
    p1 = np.asarray(p1, dtype=np.float64)
    if np.any((p1 <= 0.0) | (p1 >= 1.0)):
        raise ValueError("probabilities must lie strictly in (0, 1)")
    q = np.floor(p1 * PROB_ONE + 0.5).astype(np.int64)
    return np.clip(q, 1, PROB_ONE - 1)


def ideal_bits(q: np.ndarray, bits: np.ndarray) -> float:
    """Code length (bits) of coding ``bits`` at quantized probabilities."""
    q = np.asarray(q, dtype=np.float64)
    bits = np.asarray(bits)
    p = np.where(bits == 1, q, PROB_ONE - q) / PROB_ONE
    return float(-np.sum(np.log2(p)))


class RangeEncoder:
    def __init__(self) -> None:
        self.low = 0              # up to 33 bits before a shift
        self.range = _MASK32
        self.cache = 0
        self.cache_size = 1       # the initial cache emits the leading byte
        self._out = bytearray()
        self._finished = False

    def encode_bit(self, p1_q: int, bit: int) -> None:
        if self._finished:
            raise RuntimeError("encoder already finished")
        if not 1 <= p1_q < PROB_ONE:
            raise ValueError(f"quantized probability out of range: {p1_q}")
        bound = (self.range * p1_q) >> PROB_BITS
        if bit:
            self.range = bound
        else:
            self.low += bound
            self.range -= bound
        while self.range < _TOP:
            self._shift_low()
            self.range = (self.range << 8) & _MASK32

    def _shift_low(self) -> None:
        low = self.low
        if low < 0xFF000000 or low > _MASK32:
            carry = low >> 32
            out = self._out
            out.append((self.cache + carry) & 0xFF)
            for _ in range(self.cache_size - 1):
                out.append((0xFF + carry) & 0xFF)
            self.cache = (low >> 24) & 0xFF
            self.cache_size = 0
        self.cache_size += 1
        self.low = (low << 8) & _MASK32

    def finish(self) -> bytes:
        """Flush the accumulator; the encoder must not be reused."""
        if self._finished:
            raise RuntimeError("encoder already finished")
        self._finished = True
        for _ in range(FLUSH_BYTES):
            self._shift_low()
        return bytes(self._out)


class RangeDecoder:
    def __init__(self, data: bytes) -> None:
        self._data = data
        self._pos = 0
        self.range = _MASK32
        self._next_byte()  # leading byte from the encoder's initial cache
        code = 0
        for _ in range(4):
            code = (code << 8) | self._next_byte()
        self.code = code

    def _next_byte(self) -> int:
        if self._pos >= len(self._data):
            raise TruncatedStream(
                f"payload exhausted after {self._pos} bytes")
        b = self._data[self._pos]
        self._pos += 1
        return b

    def decode_bit(self, p1_q: int) -> int:
        if not 1 <= p1_q < PROB_ONE:
            raise ValueError(f"quantized probability out of range: {p1_q}")
        bound = (self.range * p1_q) >> PROB_BITS
        if self.code < bound:
            bit = 1
            self.range = bound
        else:
            bit = 0
            self.code -= bound
            self.range -= bound
        while self.range < _TOP:
            self.code = ((self.code << 8) | self._next_byte()) & _MASK32
            self.range = (self.range << 8) & _MASK32
        return bit

    @property
    def bytes_consumed(self) -> int:
        return self._pos
