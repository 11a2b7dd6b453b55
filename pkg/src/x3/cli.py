"""Command line front end: ``x3 {c,d,bench,opt}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench
from .codec import compress_with_stats, decompress
from .errors import CorruptStreamError, DictionaryCapError
from .optimizer import DEFAULT_GUARDS, DEFAULT_WINDOWS, SearchSpace, default_workers, optimize
from .window_search import SearchParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CORRUPT = 4
EXIT_CAP = 5
EXIT_ROUNDTRIP = 6


def _on_off(value: str) -> bool:
    v = value.lower()
    if v in ("on", "1", "yes", "true"):
        return True
    if v in ("off", "0", "no", "false"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {value!r}")


def _int_list(value: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in value.split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {value!r}") from None


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    d = SearchParams()
    p.add_argument("--window", type=int, default=d.window_size, help="window size in bytes")
    p.add_argument("--max-matches", type=int, default=d.max_matches)
    p.add_argument("--max-len", type=int, default=d.max_match_len, help="maximum fragment length")
    p.add_argument("--guard-dict", type=_on_off, default=d.guard_dictionary, metavar="on|off")
    p.add_argument("--guard-window", type=_on_off, default=d.guard_window, metavar="on|off")


def _params(args: argparse.Namespace) -> SearchParams:
    return SearchParams(window_size=args.window, max_matches=args.max_matches,
                        max_match_len=args.max_len, guard_dictionary=args.guard_dict,
                        guard_window=args.guard_window)


def cmd_compress(args: argparse.Namespace) -> int:
    data = Path(args.input).read_bytes()
    blob, stats = compress_with_stats(data, _params(args))
    out = args.output or args.input + ".x3"
    Path(out).write_bytes(blob)
    if args.stats:
        Path(args.stats).write_text(json.dumps(stats.to_dict(), indent=2) + "\n")
    print(f"{args.input}: {len(data)} -> {len(blob)} bytes (ratio {stats.ratio:.4f})", file=sys.stderr)
    return EXIT_OK


def cmd_decompress(args: argparse.Namespace) -> int:
    blob = Path(args.input).read_bytes()
    data = decompress(blob)
    out = args.output
    if out is None:
        out = args.input[:-3] if args.input.endswith(".x3") else args.input + ".out"
    Path(out).write_bytes(data)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    report = bench.run_bench(args.corpus, _params(args), workers=default_workers())
    reference = None
    if args.reference == "silesia":
        reference = bench.SILESIA_REFERENCE
    elif args.reference:
        reference = bench.load_reference(args.reference)
    print(report.to_markdown(reference), end="")
    csv_text = report.to_csv()
    if args.csv:
        Path(args.csv).write_text(csv_text)
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    data = Path(args.input).read_bytes()
    guards = tuple((g, False) for g in args.guard_dict) if args.guard_dict else DEFAULT_GUARDS
    space = SearchSpace(
        window_sizes=tuple(k * 1024 for k in args.windows) if args.windows else DEFAULT_WINDOWS,
        matches=args.matches or None,
        max_match_lens=args.max_lens or (64,),
        guards=guards,
        time_budget=args.time_budget,
    )
    result = optimize(data, space, workers=default_workers())
    best = result.best
    p = best.params
    print(f"window={p.window_size} max_matches={p.max_matches} max_len={p.max_match_len} "
          f"guard_dict={'on' if p.guard_dictionary else 'off'} "
          f"guard_window={'on' if p.guard_window else 'off'} "
          f"size={best.compressed_size} ratio={best.ratio:.4f}"
          + (" (partial: time budget exhausted)" if result.partial else ""))
    if args.log:
        result.write_log(args.log)
    if args.apply:
        blob, _ = compress_with_stats(data, p)
        Path(args.apply).write_bytes(blob)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="x3", description="Dictionary compressor with context-modelled index coding.")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compress", aliases=["c"], help="compress a file")
    c.add_argument("input")
    c.add_argument("output", nargs="?")
    _add_search_flags(c)
    c.add_argument("--stats", metavar="PATH", help="write JSON statistics")
    c.set_defaults(func=cmd_compress)

    d = sub.add_parser("decompress", aliases=["d"], help="decompress a file")
    d.add_argument("input")
    d.add_argument("output", nargs="?")
    d.set_defaults(func=cmd_decompress)

    b = sub.add_parser("bench", help="benchmark every file of a corpus directory")
    b.add_argument("corpus")
    _add_search_flags(b)
    b.add_argument("--csv", metavar="PATH", help="write the CSV report here")
    b.add_argument("--reference", metavar="CSV|silesia",
                   help="external codec ratios to show alongside ('silesia' uses the built-in table)")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("opt", aliases=["optimize"], help="search parameters for one file")
    o.add_argument("input")
    o.add_argument("--windows", type=_int_list, help="window sizes in KiB, e.g. 1,2,4,8")
    o.add_argument("--matches", type=_int_list, help="explicit match counts (full grid instead of climbing)")
    o.add_argument("--max-lens", type=_int_list, help="maximum fragment lengths to try")
    o.add_argument("--guard-dict", type=lambda v: tuple(_on_off(x) for x in v.split(",")),
                   help="dictionary guard settings to try, e.g. off,on")
    o.add_argument("--time-budget", type=float, metavar="SECONDS")
    o.add_argument("--log", metavar="PATH", help="write the trial log as CSV")
    o.add_argument("--apply", metavar="OUTPUT", help="compress with the best parameters")
    o.set_defaults(func=cmd_optimize)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CorruptStreamError as exc:
        print(f"x3: corrupt stream: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except DictionaryCapError as exc:
        print(f"x3: {exc}", file=sys.stderr)
        return EXIT_CAP
    except bench.RoundtripError as exc:
        print(f"x3: {exc}", file=sys.stderr)
        return EXIT_ROUNDTRIP
    except ValueError as exc:
        print(f"x3: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"x3: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
