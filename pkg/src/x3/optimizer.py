"""Per-file parameter search minimising compressed size.

For every window size (and match-length cap) the number of matches is tuned
by hill climbing from a start point proportional to the window, 28 matches
per 8 KiB.  Future-match guard combinations are then tried at the best count.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .codec import compress
from .window_search import SearchParams

KIB = 1024
DEFAULT_WINDOWS = tuple(k * KIB for k in (1, 2, 4, 8, 16, 32, 64))
# (guard_dictionary, guard_window)
DEFAULT_GUARDS = ((False, False), (True, False))
ANCHOR_WINDOW = 8 * KIB
ANCHOR_MATCHES = 28


def start_matches(window_size: int) -> int:
    """Matches count to start climbing from, linear in the window size."""
    return max(1, (ANCHOR_MATCHES * window_size + ANCHOR_WINDOW // 2) // ANCHOR_WINDOW)


@dataclass(frozen=True)
class SearchSpace:
    window_sizes: tuple[int, ...] = DEFAULT_WINDOWS
    # explicit match counts switch from hill climbing to a full grid
    matches: tuple[int, ...] | None = None
    max_match_lens: tuple[int, ...] = (64,)
    guards: tuple[tuple[bool, bool], ...] = DEFAULT_GUARDS
    time_budget: float | None = None

    def __post_init__(self) -> None:
        if not self.window_sizes or not self.max_match_lens or not self.guards:
            raise ValueError("search space must not be empty")
        if self.matches is not None and not self.matches:
            raise ValueError("explicit match list must not be empty")
        # constructing every corner validates the space
        for w in self.window_sizes:
            for l in self.max_match_lens:
                for m in self.matches or (1,):
                    SearchParams(w, m, l)

    @classmethod
    def single(cls, params: SearchParams) -> "SearchSpace":
        return cls(window_sizes=(params.window_size,), matches=(params.max_matches,),
                   max_match_lens=(params.max_match_len,),
                   guards=((params.guard_dictionary, params.guard_window),))

    def contains(self, params: SearchParams) -> bool:
        return (params.window_size in self.window_sizes
                and params.max_match_len in self.max_match_lens
                and (params.guard_dictionary, params.guard_window) in self.guards
                and (self.matches is None or params.max_matches in self.matches))


@dataclass(frozen=True)
class TrialResult:
    params: SearchParams
    input_size: int
    compressed_size: int
    seconds: float

    @property
    def ratio(self) -> float:
        return self.input_size / self.compressed_size

    def as_row(self) -> dict:
        p = self.params
        return {
            "window": p.window_size, "matches": p.max_matches, "max_len": p.max_match_len,
            "guard_dict": int(p.guard_dictionary), "guard_window": int(p.guard_window),
            "size": self.input_size, "compressed": self.compressed_size,
            "ratio": f"{self.ratio:.4f}", "seconds": f"{self.seconds:.3f}",
        }


@dataclass
class OptimizeResult:
    best: TrialResult
    trials: list[TrialResult] = field(default_factory=list)
    partial: bool = False

    def write_log(self, path: str | os.PathLike) -> None:
        write_trial_log(self.trials, path)


def write_trial_log(trials: list[TrialResult], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(TRIAL_FIELDS))
        writer.writeheader()
        for t in trials:
            writer.writerow(t.as_row())


TRIAL_FIELDS = ("window", "matches", "max_len", "guard_dict", "guard_window",
                "size", "compressed", "ratio", "seconds")


def evaluate_point(data: bytes, params: SearchParams) -> TrialResult:
    started = time.perf_counter()
    size = len(compress(data, params))
    return TrialResult(params, len(data), size, time.perf_counter() - started)


def _rank(t: TrialResult) -> tuple:
    p = t.params
    # guards-off sorts first among equal sizes
    return (t.compressed_size, p.window_size, p.max_matches, p.max_match_len,
            p.guard_dictionary, p.guard_window)


def default_workers() -> int:
    env = os.environ.get("X3_THREADS")
    if env:
        return max(1, int(env))
    return 1


class _Evaluator:
    """Caches trials, enforces the time budget, fans out batches to workers."""

    def __init__(self, data: bytes, budget: float | None, workers: int) -> None:
        self.data = data
        self.deadline = None if budget is None else time.monotonic() + budget
        self.workers = workers
        self.cache: dict[SearchParams, TrialResult] = {}
        self.log: list[TrialResult] = []
        self.partial = False
        self._pool = ProcessPoolExecutor(workers) if workers > 1 else None

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()

    def expired(self) -> bool:
        # the first trial always runs so there is a best-so-far to report
        if self.log and self.deadline is not None and time.monotonic() >= self.deadline:
            self.partial = True
        return self.partial

    def run(self, points: list[SearchParams]) -> list[TrialResult | None]:
        todo = [p for p in dict.fromkeys(points) if p not in self.cache]
        if todo and not self.expired():
            if self._pool is not None and len(todo) > 1:
                results = list(self._pool.map(evaluate_point, [self.data] * len(todo), todo))
            else:
                results = []
                for p in todo:
                    if self.expired():
                        break
                    results.append(evaluate_point(self.data, p))
            for r in results:
                self.cache[r.params] = r
                self.log.append(r)
        return [self.cache.get(p) for p in points]


def _params(w: int, m: int, l: int, guards: tuple[bool, bool]) -> SearchParams:
    return SearchParams(window_size=w, max_matches=m, max_match_len=l,
                        guard_dictionary=guards[0], guard_window=guards[1])


def _climb(ev: _Evaluator, w: int, l: int, guards: tuple[bool, bool]) -> TrialResult | None:
    current = start_matches(w)
    best = ev.run([_params(w, current, l, guards)])[0]
    if best is None:
        return None
    step = max(1, current // 2)
    while True:
        neighbours = [m for m in (current - step, current + step) if m >= 1]
        results = [r for r in ev.run([_params(w, m, l, guards) for m in neighbours]) if r]
        improved = min(results, key=_rank, default=None)
        if improved is not None and improved.compressed_size < best.compressed_size:
            best = improved
            current = improved.params.max_matches
        elif step == 1 or ev.expired():
            return best
        else:
            step //= 2


def optimize(data: bytes, space: SearchSpace | None = None, *,
             workers: int | None = None) -> OptimizeResult:
    if not data:
        raise ValueError("cannot optimise an empty input")
    space = space or SearchSpace()
    workers = default_workers() if workers is None else workers
    ev = _Evaluator(bytes(data), space.time_budget, workers)
    try:
        guards_sorted = sorted(space.guards)
        for w in space.window_sizes:
            for l in space.max_match_lens:
                if space.matches is not None:
                    ev.run([_params(w, m, l, g) for m in space.matches for g in guards_sorted])
                    continue
                # climb with the cheapest guard setting, then try every combination
                # at both the start point and the tuned count
                found = _climb(ev, w, l, guards_sorted[0])
                counts = {start_matches(w)}
                if found is not None:
                    counts.add(found.params.max_matches)
                ev.run([_params(w, m, l, g) for m in sorted(counts) for g in guards_sorted])
        best = min(ev.log, key=_rank)
        return OptimizeResult(best=best, trials=list(ev.log), partial=ev.partial)
    finally:
        ev.close()
