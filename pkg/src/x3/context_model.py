"""Adaptive frequency tables and order-2/1/0 dictionary-index context selection.

Every table gives each symbol of the current alphabet an implicit count of 1
on top of what it has stored, so any symbol is codable under any context.
Symbols of the index alphabet are dictionary indexes ``0..N-1`` plus the
escape ``NEW`` which is coded as the value ``N``.
"""

from __future__ import annotations

import enum
import hashlib
import math

# a fresh symbol's implicit count is 1/128 of one observation
INCREMENT = 128
RESCALE_AT = 1 << 16
START = -1
# cost estimates are kept in 1/16 bit units
UNITS_PER_BIT = 16


class ContextClass(enum.IntEnum):
    ORDER2 = 2
    ORDER1 = 1
    ORDER0 = 0


# initial score of an unused instance: favours the two history-based contexts
INITIAL_SCORE = {
    ContextClass.ORDER2: 2 * UNITS_PER_BIT,
    ContextClass.ORDER1: 2 * UNITS_PER_BIT,
    ContextClass.ORDER0: 6 * UNITS_PER_BIT,
}
SELECTION_ORDER = (ContextClass.ORDER2, ContextClass.ORDER1, ContextClass.ORDER0)


def code_units(total: int, freq: int) -> int:
    """``round(16 * log2(total / freq))`` computed exactly in integers.

    A float first guess is corrected against ``2**(2k-1) <= (total/freq)**32 < 2**(2k+1)``;
    the bounds can never be hit with equality, so the rounding is unambiguous.
    """
    k = round(UNITS_PER_BIT * math.log2(total / freq))
    t32 = total ** 32
    f32 = freq ** 32
    while k > 0 and t32 < f32 << (2 * k - 1):
        k -= 1
    while t32 >= f32 << (2 * k + 1):
        k += 1
    return k


class FreqTable:
    """Sparse adaptive counts with a Fenwick tree for cumulative lookups.

    The tree lives in a dict so untouched nodes cost nothing; its capacity
    doubles as the alphabet grows (doubling a Fenwick tree only adds one
    node, holding the grand total).
    """

    __slots__ = ("counts", "stored_total", "_tree", "_cap")

    def __init__(self, alphabet_size: int = 1) -> None:
        self.counts: dict[int, int] = {}
        self.stored_total = 0
        self._tree: dict[int, int] = {}
        self._cap = 1
        self._grow(alphabet_size)

    def _grow(self, alphabet_size: int) -> None:
        while self._cap < alphabet_size:
            self._cap <<= 1
            if self.stored_total:
                self._tree[self._cap] = self.stored_total

    def freq(self, symbol: int) -> int:
        return self.counts.get(symbol, 0) + 1

    def total(self, alphabet_size: int) -> int:
        return self.stored_total + alphabet_size

    def cum_low(self, symbol: int) -> int:
        """Effective cumulative frequency of all symbols below ``symbol``."""
        tree = self._tree
        acc = symbol
        i = min(symbol, self._cap)
        while i > 0:
            acc += tree.get(i, 0)
            i &= i - 1
        return acc

    def find(self, value: int, alphabet_size: int) -> int:
        """Symbol whose effective interval contains ``value`` (``value < total``)."""
        self._grow(alphabet_size)
        tree = self._tree
        pos = 0
        step = self._cap
        while step:
            nxt = pos + step
            # stored mass of symbols pos..nxt-1 plus their implicit ones
            span = tree.get(nxt, 0) + max(0, min(nxt, alphabet_size) - pos)
            if span <= value:
                pos = nxt
                value -= span
            step >>= 1
        return pos

    def add(self, symbol: int, amount: int = INCREMENT) -> None:
        self._grow(symbol + 1)
        self.counts[symbol] = self.counts.get(symbol, 0) + amount
        self.stored_total += amount
        tree = self._tree
        cap = self._cap
        i = symbol + 1
        while i <= cap:
            tree[i] = tree.get(i, 0) + amount
            i += i & -i
        if self.stored_total >= RESCALE_AT:
            self.halve()

    def halve(self) -> None:
        counts = {s: c >> 1 for s, c in self.counts.items() if c > 1}
        self.counts = {}
        self.stored_total = 0
        self._tree = {}
        tree = self._tree
        cap = self._cap
        for s in sorted(counts):
            c = counts[s]
            self.counts[s] = c
            self.stored_total += c
            i = s + 1
            while i <= cap:
                tree[i] = tree.get(i, 0) + c
                i += i & -i

    def estimate(self, symbol: int, alphabet_size: int) -> int:
        return code_units(self.stored_total + alphabet_size, self.counts.get(symbol, 0) + 1)


def code_length_estimate(table: FreqTable, symbol: int, alphabet_size: int) -> int:
    return table.estimate(symbol, alphabet_size)


class ContextInstance:
    """One context's table plus its running counterfactual cost."""

    __slots__ = ("table", "uses", "bits")

    def __init__(self, alphabet_size: int) -> None:
        self.table = FreqTable(alphabet_size)
        self.uses = 0
        self.bits = 0


class ContextModel:
    """Deterministic model shared, step for step, by encoder and decoder."""

    def __init__(self) -> None:
        self.h2 = START
        self.h1 = START
        self.order0 = ContextInstance(1)
        self.order1: dict[int, ContextInstance] = {}
        # order-2 keys get dense ids in first-use order
        self.order2_ids: dict[tuple[int, int], int] = {}
        self.order2: list[ContextInstance] = []

    def instances(self, alphabet_size: int) -> tuple[ContextInstance, ContextInstance, ContextInstance]:
        """Order-2, order-1 and order-0 instances for the current history."""
        key = (self.h2, self.h1)
        cid = self.order2_ids.get(key)
        if cid is None:
            cid = len(self.order2)
            self.order2_ids[key] = cid
            self.order2.append(ContextInstance(alphabet_size))
        inst1 = self.order1.get(self.h1)
        if inst1 is None:
            inst1 = self.order1[self.h1] = ContextInstance(alphabet_size)
        return self.order2[cid], inst1, self.order0

    def select(self, alphabet_size: int) -> ContextClass:
        return select_context(self.instances(alphabet_size))

    def table_for(self, cls: ContextClass, alphabet_size: int) -> FreqTable:
        inst2, inst1, inst0 = self.instances(alphabet_size)
        return {ContextClass.ORDER2: inst2, ContextClass.ORDER1: inst1,
                ContextClass.ORDER0: inst0}[cls].table

    def update(self, symbol: int, alphabet_size: int) -> None:
        """Record ``symbol`` (coded under an alphabet of ``alphabet_size``) and advance history."""
        for inst in self.instances(alphabet_size):
            inst.bits += inst.table.estimate(symbol, alphabet_size)
            inst.uses += 1
            inst.table.add(symbol)
        self.h2 = self.h1
        self.h1 = symbol

    def state_digest(self) -> bytes:
        """Hash of every table and statistic; meant for lockstep checks in tests."""
        h = hashlib.blake2b(digest_size=16)

        def feed(inst: ContextInstance) -> None:
            h.update(repr((inst.uses, inst.bits, inst.table.stored_total,
                           sorted(inst.table.counts.items()))).encode())

        h.update(repr((self.h2, self.h1)).encode())
        feed(self.order0)
        for key in sorted(self.order1):
            h.update(repr(key).encode())
            feed(self.order1[key])
        for key, cid in self.order2_ids.items():
            h.update(repr((key, cid)).encode())
            feed(self.order2[cid])
        return h.digest()

    def structure_bytes(self) -> int:
        """Estimated compact footprint: 8 bytes per stored count, 32 per instance,
        24 per order-2 id map entry."""
        entries = len(self.order0.table.counts)
        entries += sum(len(inst.table.counts) for inst in self.order1.values())
        entries += sum(len(inst.table.counts) for inst in self.order2)
        n_instances = 1 + len(self.order1) + len(self.order2)
        return 8 * entries + 32 * n_instances + 24 * len(self.order2_ids)


def select_context(instances) -> ContextClass:
    """Pick the class with the lowest average past cost; ties favour higher orders.

    ``instances`` is the (order-2, order-1, order-0) triple.  Unused instances
    score their initial bias, except that an unused order-2 instance is passed
    over once its order-1 parent has history: its table is still uniform, so
    it would code the symbol at the full alphabet cost.  Averages are compared
    as exact fractions.
    """
    best = None
    best_num = best_den = 0
    for cls, inst in zip(SELECTION_ORDER, instances):
        if cls is ContextClass.ORDER2 and not inst.uses and instances[1].uses:
            continue
        if inst.uses:
            num, den = inst.bits, inst.uses
        else:
            num, den = INITIAL_SCORE[cls], 1
        if best is None or num * best_den < best_num * den:
            best, best_num, best_den = cls, num, den
    return best
