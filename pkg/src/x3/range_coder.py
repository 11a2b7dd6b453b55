"""Byte-oriented range coder with carry propagation.

The encoder keeps a 33-bit ``low`` (the extra bit is the pending carry) and a
32-bit ``range``.  Output bytes are delayed through a one-byte cache plus a run
of pending ``0xFF`` bytes so that a late carry can still ripple into them.
"""

from __future__ import annotations

from .errors import CorruptStreamError

TOP = 1 << 24
MASK32 = 0xFFFFFFFF
MAX_TOTAL = 1 << 22


class RangeEncoder:
    def __init__(self) -> None:
        self.low = 0
        self.range = MASK32
        self._cache = 0
        self._cache_size = 1
        self._out = bytearray()
        # the first byte emitted by the cache is always zero; drop it
        self._skip_first = True

    def encode(self, cum_lo: int, cum_hi: int, total: int) -> None:
        if not 0 <= cum_lo < cum_hi <= total < MAX_TOTAL:
            raise ValueError(f"bad interval [{cum_lo}, {cum_hi}) / {total}")
        r = self.range // total
        self.low += r * cum_lo
        self.range = r * (cum_hi - cum_lo)
        while self.range < TOP:
            self.range <<= 8
            self._shift_low()

    def _shift_low(self) -> None:
        low = self.low
        if low < 0xFF000000 or low > MASK32:
            carry = low >> 32
            byte = self._cache
            while True:
                if self._skip_first:
                    self._skip_first = False
                else:
                    self._out.append((byte + carry) & 0xFF)
                byte = 0xFF
                self._cache_size -= 1
                if self._cache_size == 0:
                    break
            self._cache = (low >> 24) & 0xFF
        self._cache_size += 1
        self.low = (low << 8) & MASK32

    def finish(self) -> bytes:
        for _ in range(5):
            self._shift_low()
        return bytes(self._out)


class RangeDecoder:
    """Mirror of :class:`RangeEncoder`.

    Use :meth:`decode_freq` to get the scaled value, look up the symbol whose
    cumulative slot contains it, then call :meth:`confirm` with that slot.
    """

    def __init__(self, data: bytes | bytearray | memoryview, pos: int = 0) -> None:
        self._data = data
        self._pos = pos
        self.range = MASK32
        self.code = 0
        self._r = 0
        for _ in range(4):
            self.code = (self.code << 8) | self._next_byte()

    @property
    def position(self) -> int:
        return self._pos

    def _next_byte(self) -> int:
        if self._pos >= len(self._data):
            raise CorruptStreamError("coded payload is truncated")
        b = self._data[self._pos]
        self._pos += 1
        return b

    def decode_freq(self, total: int) -> int:
        if not 0 < total < MAX_TOTAL:
            raise ValueError(f"bad total {total}")
        self._r = self.range // total
        v = self.code // self._r
        if v >= total:
            raise CorruptStreamError("coded value outside the model interval")
        return v

    def confirm(self, cum_lo: int, cum_hi: int) -> None:
        r = self._r
        self.code -= r * cum_lo
        self.range = r * (cum_hi - cum_lo)
        while self.range < TOP:
            self.range <<= 8
            self.code = ((self.code << 8) | self._next_byte()) & MASK32

    def at_clean_end(self) -> bool:
        """True when the flushed tail matches the encoder's final ``low`` exactly.

        The encoder flushes ``low`` verbatim, so after the last symbol of an
        intact stream the decoder's offset into the interval is zero.
        """
        return self.code == 0
