"""Look-ahead window search: pick the longest, most frequently repeated string.

The window is the ``W`` not-yet-compressed bytes starting at the cursor ``p``.
An occurrence of the length-``l`` string at ``p`` is any ``q`` with
``p < q`` and ``q + l <= min(p + W, len(buffer))`` whose bytes match.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .dictionary import FragmentDict

MAX_MATCH_LEN_LIMIT = 4096


@dataclass(frozen=True)
class SearchParams:
    window_size: int = 8192
    max_matches: int = 28
    max_match_len: int = 64
    guard_dictionary: bool = True
    guard_window: bool = False

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")
        if self.max_matches < 1:
            raise ValueError("max_matches must be >= 1")
        if not 1 <= self.max_match_len <= MAX_MATCH_LEN_LIMIT:
            raise ValueError(f"max_match_len must be in 1..{MAX_MATCH_LEN_LIMIT}")


def count_occurrences(buffer: bytes, p: int, l: int, window_size: int) -> int:
    """Number of later occurrences of ``buffer[p:p+l]`` lying inside the window."""
    if l < 1 or p + l > len(buffer):
        raise ValueError("fragment must lie inside the buffer")
    end = min(p + window_size, len(buffer))
    needle = buffer[p:p + l]
    count = 0
    q = buffer.find(needle, p + 1, end)
    while q != -1:
        count += 1
        q = buffer.find(needle, q + 1, end)
    return count


def pick_length(counts: list[int], max_matches: int) -> int:
    """Resolve an occurrence profile to a fragment length.

    Equivalent to scanning ``m = M..1`` and, inside, ``l = L..1`` for the first
    ``counts[l-1] > m``.  Counts never increase with ``l``, so a hit exists for
    ``m`` exactly when ``counts[0] > m`` and it is the largest such ``l``.
    """
    if not counts or counts[0] <= 1:
        return 1
    m = min(max_matches, counts[0] - 1)
    l = len(counts)
    while counts[l - 1] <= m:
        l -= 1
    return l


@njit(cache=True, nogil=True)
def _profile_kernel(arr, p, end, k):
    # histogram of match lengths (capped at k and at the window end), then suffix sums
    hist = np.zeros(k + 1, dtype=np.int64)
    first = arr[p]
    for q in range(p + 1, end):
        if arr[q] != first:
            continue
        lim = min(k, end - q)
        ml = 1
        while ml < lim and arr[q + ml] == arr[p + ml]:
            ml += 1
        hist[ml] += 1
    counts = np.zeros(k, dtype=np.int64)
    acc = 0
    for l in range(k, 0, -1):
        acc += hist[l]
        counts[l - 1] = acc
    return counts


class WindowSearcher:
    """Window search bound to one input buffer.

    An occurrence at ``q`` counts for every length up to its common prefix
    with the cursor string, so one pass over the window yields the whole
    profile ``c_1..c_k``.
    """

    def __init__(self, buffer: bytes, params: SearchParams) -> None:
        self.buffer = buffer
        self.params = params
        self._arr = np.frombuffer(buffer, dtype=np.uint8)

    def occurrence_profile(self, p: int, max_len: int | None = None,
                           window_size: int | None = None) -> list[int]:
        """Counts ``c_1..c_k`` for ``k = min(L, len(buffer) - p)``, trailing zeros included."""
        n = len(self.buffer)
        W = self.params.window_size if window_size is None else window_size
        L = self.params.max_match_len if max_len is None else max_len
        k = min(L, n - p)
        return _profile_kernel(self._arr, p, min(p + W, n), k).tolist()

    def raw_length(self, p: int, max_matches: int | None = None) -> int:
        """Window search result without guards."""
        M = self.params.max_matches if max_matches is None else max_matches
        return pick_length(self.occurrence_profile(p), M)

    def search(self, p: int, dictionary: FragmentDict) -> int:
        """Window search at ``p`` followed by the configured future-match guards."""
        candidate = self.raw_length(p)
        return self.apply_guard(p, candidate, dictionary)

    def apply_guard(self, p: int, candidate_len: int, dictionary: FragmentDict) -> int:
        params = self.params
        if candidate_len <= 1 or not (params.guard_dictionary or params.guard_window):
            return candidate_len
        buf = self.buffer
        n = len(buf)
        threshold = 2 * candidate_len
        for d in range(1, candidate_len):
            q = p + d
            if params.guard_dictionary:
                hit = dictionary.longest_match(buf, q, n - q)
                if hit is not None and hit[1] >= threshold:
                    return d
            if params.guard_window and n - q >= threshold:
                if self.raw_length(q, max_matches=1) >= threshold:
                    return d
        return candidate_len


def search_in_window(buffer: bytes, p: int, params: SearchParams,
                     dictionary: FragmentDict | None = None) -> int:
    if not 0 <= p < len(buffer):
        raise ValueError("position must lie inside the buffer")
    searcher = WindowSearcher(buffer, params)
    return searcher.search(p, dictionary if dictionary is not None else FragmentDict())


def apply_future_match_guard(buffer: bytes, p: int, candidate_len: int, params: SearchParams,
                             dictionary: FragmentDict) -> int:
    if not 1 <= candidate_len <= len(buffer) - p:
        raise ValueError("candidate length must fit in the remaining buffer")
    return WindowSearcher(buffer, params).apply_guard(p, candidate_len, dictionary)
