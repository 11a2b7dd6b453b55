"""Append-only fragment dictionary with longest full-fragment matching."""

from __future__ import annotations

import hashlib


class FragmentDict:
    """Maps dense integer indexes to byte fragments.

    Matching is backed by a byte trie stored flat in one ``dict`` keyed by
    ``node << 8 | byte``.  Fragments do not have the prefix property ("ab" may
    be stored without "a"), so a walk remembers the deepest *terminal* node it
    passed, not just the deepest node it reached.
    """

    def __init__(self) -> None:
        self._fragments: list[bytes] = []
        self._children: dict[int, int] = {}
        # fragment index stored at each trie node, -1 for interior nodes
        self._terminal: list[int] = [-1]
        self._total_bytes = 0
        self._hash = hashlib.blake2b(digest_size=16)

    def __len__(self) -> int:
        return len(self._fragments)

    @property
    def total_bytes(self) -> int:
        return self._total_bytes

    @property
    def node_count(self) -> int:
        return len(self._terminal)

    def add_fragment(self, fragment: bytes) -> int:
        if not fragment:
            raise ValueError("fragments must be non-empty")
        fragment = bytes(fragment)
        children = self._children
        terminal = self._terminal
        node = 0
        for b in fragment:
            key = (node << 8) | b
            child = children.get(key)
            if child is None:
                child = len(terminal)
                terminal.append(-1)
                children[key] = child
            node = child
        if terminal[node] != -1:
            raise ValueError(f"fragment {fragment!r} is already stored as {terminal[node]}")
        index = len(self._fragments)
        terminal[node] = index
        self._fragments.append(fragment)
        self._total_bytes += len(fragment)
        self._hash.update(len(fragment).to_bytes(4, "little"))
        self._hash.update(fragment)
        return index

    def get_fragment(self, index: int) -> bytes:
        if not 0 <= index < len(self._fragments):
            raise IndexError(f"dictionary index {index} out of range (size {len(self._fragments)})")
        return self._fragments[index]

    def longest_match(self, buffer: bytes, pos: int, limit: int) -> tuple[int, int] | None:
        """Return ``(index, length)`` of the longest fragment equal to ``buffer[pos:pos+length]``.

        At most ``limit`` bytes (and never past the end of ``buffer``) are
        considered.  Returns ``None`` when no stored fragment matches in full.
        """
        end = min(len(buffer), pos + limit)
        children = self._children
        terminal = self._terminal
        node = 0
        best = None
        i = pos
        while i < end:
            node = children.get((node << 8) | buffer[i])
            if node is None:
                break
            i += 1
            t = terminal[node]
            if t >= 0:
                best = (t, i - pos)
        return best

    def content_digest(self) -> bytes:
        """Digest of the insertion sequence; equal dictionaries give equal digests."""
        return self._hash.copy().digest()

    def structure_bytes(self) -> int:
        """Estimated footprint of a compact native layout (not CPython's).

        Fragment bytes, 8 bytes of offset/length per entry, 16 bytes per trie node.
        """
        return self._total_bytes + 8 * len(self._fragments) + 16 * len(self._terminal)
