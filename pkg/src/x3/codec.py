"""Parse loop, event coding and the container format.

Container layout::

    b"x3"  version (1 byte)  original length (LEB128)  range-coded payload

The payload holds the events followed by a 16-bit fold of the original length,
which lets the decoder catch a tampered length field.

Each event is coded as one symbol of the index alphabet under the selected
context.  A dictionary index means "copy that fragment"; the escape value
``N`` (current dictionary size) announces a raw fragment, followed by its
length and bytes under their own order-0 tables.  The raw fragment then
becomes dictionary entry ``N``.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Callable

from .context_model import ContextModel, FreqTable
from .dictionary import FragmentDict
from .errors import CorruptStreamError, DictionaryCapError, FormatError
from .range_coder import RangeDecoder, RangeEncoder
from .window_search import MAX_MATCH_LEN_LIMIT, SearchParams, WindowSearcher

MAGIC = b"x3"
VERSION = 1
HEADER = MAGIC + bytes([VERSION])
# keeps the index alphabet (entries + escape) below 2**21
MAX_DICTIONARY_SIZE = (1 << 21) - 2
# a 16-bit fold of the original length is coded again after the last event
LENGTH_CHECK = 1 << 16


def length_check(n: int) -> int:
    """XOR-fold of ``n`` into 16 bits; any single flipped bit of ``n`` changes it."""
    folded = 0
    while n:
        folded ^= n & 0xFFFF
        n >>= 16
    return folded

# raw lengths are coded over the largest length any parameter set allows
LENGTH_ALPHABET = MAX_MATCH_LEN_LIMIT


def encode_varint(n: int) -> bytes:
    if n < 0:
        raise ValueError("varint must be non-negative")
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def decode_varint(data: bytes, pos: int = 0) -> tuple[int, int]:
    """Return ``(value, next_pos)``; at most 10 bytes (64 bits) are accepted."""
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise CorruptStreamError("truncated varint")
        if shift > 63:
            raise CorruptStreamError("varint too long")
        b = data[pos]
        pos += 1
        value |= (b & 0x7F) << shift
        shift += 7
        if not b & 0x80:
            return value, pos


@dataclass(frozen=True)
class DictRef:
    index: int


@dataclass(frozen=True)
class RawFragment:
    data: bytes

    @property
    def length(self) -> int:
        return len(self.data)


Event = DictRef | RawFragment


@dataclass
class CompressStats:
    input_size: int = 0
    compressed_size: int = 0
    dict_refs: int = 0
    raw_fragments: int = 0
    raw_bytes: int = 0
    dictionary_entries: int = 0
    dictionary_bytes: int = 0
    order1_contexts: int = 0
    order2_contexts: int = 0
    structure_bytes: int = 0
    seconds: float = 0.0

    @property
    def ratio(self) -> float:
        return self.input_size / self.compressed_size if self.compressed_size else 0.0

    @property
    def factor(self) -> float:
        return self.structure_bytes / self.input_size if self.input_size else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ratio"] = round(self.ratio, 4)
        d["factor"] = round(self.factor, 4)
        return d


class _EventCoder:
    """State shared by both directions: dictionary, index contexts, raw tables."""

    def __init__(self) -> None:
        self.dictionary = FragmentDict()
        self.model = ContextModel()
        self.lengths = FreqTable(LENGTH_ALPHABET)
        self.bytes = FreqTable(256)

    def digest(self) -> tuple[bytes, bytes]:
        return self.dictionary.content_digest(), self.model.state_digest()


Observer = Callable[[Event, "_EventCoder"], None]


def _encode_symbol(enc: RangeEncoder, table: FreqTable, symbol: int, alphabet: int) -> None:
    lo = table.cum_low(symbol)
    enc.encode(lo, lo + table.freq(symbol), table.total(alphabet))


def _decode_symbol(dec: RangeDecoder, table: FreqTable, alphabet: int) -> int:
    v = dec.decode_freq(table.total(alphabet))
    symbol = table.find(v, alphabet)
    lo = table.cum_low(symbol)
    dec.confirm(lo, lo + table.freq(symbol))
    return symbol


def compress(data: bytes, params: SearchParams | None = None, *,
             observer: Observer | None = None) -> bytes:
    return compress_with_stats(data, params, observer=observer)[0]


def compress_with_stats(data: bytes, params: SearchParams | None = None, *,
                        observer: Observer | None = None) -> tuple[bytes, CompressStats]:
    started = time.perf_counter()
    params = params or SearchParams()
    data = bytes(data)
    n = len(data)
    state = _EventCoder()
    dictionary = state.dictionary
    model = state.model
    enc = RangeEncoder()
    stats = CompressStats(input_size=n)
    searcher = WindowSearcher(data, params) if n else None
    p = 0
    while p < n:
        hit = dictionary.longest_match(data, p, n - p)
        l_d = hit[1] if hit else 0
        l_w = searcher.search(p, dictionary)
        size = len(dictionary)
        alphabet = size + 1
        table = model.table_for(model.select(alphabet), alphabet)
        # l_d == l_w means the window string is that very dictionary entry
        if l_d >= l_w:
            index = hit[0]
            _encode_symbol(enc, table, index, alphabet)
            model.update(index, alphabet)
            stats.dict_refs += 1
            event = DictRef(index)
            p += l_d
        else:
            if size >= MAX_DICTIONARY_SIZE:
                raise DictionaryCapError(
                    f"input needs more than {MAX_DICTIONARY_SIZE} dictionary entries")
            fragment = data[p:p + l_w]
            _encode_symbol(enc, table, size, alphabet)
            model.update(size, alphabet)
            _encode_symbol(enc, state.lengths, l_w - 1, LENGTH_ALPHABET)
            state.lengths.add(l_w - 1)
            for b in fragment:
                _encode_symbol(enc, state.bytes, b, 256)
                state.bytes.add(b)
            dictionary.add_fragment(fragment)
            stats.raw_fragments += 1
            stats.raw_bytes += l_w
            event = RawFragment(fragment)
            p += l_w
        if observer is not None:
            observer(event, state)
    check = length_check(n)
    enc.encode(check, check + 1, LENGTH_CHECK)
    out = HEADER + encode_varint(n) + enc.finish()
    stats.compressed_size = len(out)
    stats.dictionary_entries = len(dictionary)
    stats.dictionary_bytes = dictionary.total_bytes
    stats.order1_contexts = len(model.order1)
    stats.order2_contexts = len(model.order2)
    stats.structure_bytes = dictionary.structure_bytes() + model.structure_bytes() + n + len(out)
    stats.seconds = time.perf_counter() - started
    return out, stats


def decompress(blob: bytes, *, observer: Observer | None = None) -> bytes:
    blob = bytes(blob)
    if len(blob) < len(HEADER) or blob[:2] != MAGIC:
        raise FormatError("not an x3 container (bad magic)")
    if blob[2] != VERSION:
        raise FormatError(f"unsupported container version {blob[2]}")
    n, pos = decode_varint(blob, 3)
    state = _EventCoder()
    dictionary = state.dictionary
    model = state.model
    dec = RangeDecoder(blob, pos)
    out = bytearray()
    while len(out) < n:
        size = len(dictionary)
        alphabet = size + 1
        table = model.table_for(model.select(alphabet), alphabet)
        symbol = _decode_symbol(dec, table, alphabet)
        model.update(symbol, alphabet)
        if symbol < size:
            fragment = dictionary.get_fragment(symbol)
            event: Event = DictRef(symbol)
        else:
            if size >= MAX_DICTIONARY_SIZE:
                raise CorruptStreamError("dictionary size limit exceeded")
            length = _decode_symbol(dec, state.lengths, LENGTH_ALPHABET) + 1
            state.lengths.add(length - 1)
            if len(out) + length > n:
                raise CorruptStreamError("raw fragment overruns the declared length")
            raw = bytearray()
            for _ in range(length):
                b = _decode_symbol(dec, state.bytes, 256)
                state.bytes.add(b)
                raw.append(b)
            fragment = bytes(raw)
            try:
                dictionary.add_fragment(fragment)
            except ValueError:
                raise CorruptStreamError("raw fragment duplicates a dictionary entry") from None
            event = RawFragment(fragment)
        if len(out) + len(fragment) > n:
            raise CorruptStreamError("fragment overruns the declared length")
        out += fragment
        if observer is not None:
            observer(event, state)
    check = dec.decode_freq(LENGTH_CHECK)
    if check != length_check(n):
        raise CorruptStreamError("output length does not match the coded length check")
    dec.confirm(check, check + 1)
    if dec.position != len(blob):
        raise CorruptStreamError("trailing bytes after the coded payload")
    if not dec.at_clean_end():
        raise CorruptStreamError("coded payload does not end on the encoder's final state")
    return bytes(out)
