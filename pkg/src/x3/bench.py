"""Corpus benchmark: compress every file, verify the roundtrip, tabulate."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .codec import compress_with_stats, decompress
from .errors import X3Error
from .window_search import SearchParams

CSV_FIELDS = ("name", "size", "compressed", "ratio", "seconds", "structure_bytes", "factor")

# Published Silesia ratios of other codecs at their strongest settings
# (lz4 -9, gzip --best, xz -9 -e, zstd --ultra -22, brotli -q 11).
SILESIA_REFERENCE = {
    "dickens": {"lz4": 2.2948, "gzip": 2.6461, "xz": 3.6000, "zstd": 3.5765, "brotli": 3.6044},
    "mozilla": {"lz4": 2.3176, "gzip": 2.6966, "xz": 3.8292, "zstd": 3.3769, "brotli": 3.6922},
    "mr": {"lz4": 2.3472, "gzip": 2.7138, "xz": 3.6231, "zstd": 3.2132, "brotli": 3.5317},
    "nci": {"lz4": 9.1071, "gzip": 11.2311, "xz": 23.1519, "zstd": 20.7925, "brotli": 22.0780},
    "ooffice": {"lz4": 1.7349, "gzip": 1.9907, "xz": 2.5346, "zstd": 2.3587, "brotli": 2.4818},
    "osdb": {"lz4": 2.5290, "gzip": 2.7138, "xz": 3.5456, "zstd": 3.2855, "brotli": 3.5812},
    "reymont": {"lz4": 3.1345, "gzip": 3.6396, "xz": 5.0374, "zstd": 4.9060, "brotli": 4.9747},
    "samba": {"lz4": 3.5122, "gzip": 3.9950, "xz": 5.7778, "zstd": 5.5267, "brotli": 5.7367},
    "sao": {"lz4": 1.2639, "gzip": 1.3613, "xz": 1.6386, "zstd": 1.4479, "brotli": 1.5812},
    "webster": {"lz4": 2.9554, "gzip": 3.4372, "xz": 4.9540, "zstd": 4.8970, "brotli": 4.9188},
    "xml": {"lz4": 6.9277, "gzip": 8.0709, "xz": 12.2910, "zstd": 11.8004, "brotli": 12.4145},
    "x-ray": {"lz4": 1.1798, "gzip": 1.4035, "xz": 1.8868, "zstd": 1.6457, "brotli": 1.8096},
}


class RoundtripError(X3Error):
    """A benchmarked file did not decompress to its original bytes."""


@dataclass(frozen=True)
class BenchRow:
    name: str
    size: int
    compressed: int
    seconds: float
    structure_bytes: int

    @property
    def ratio(self) -> float:
        return self.size / self.compressed if self.compressed else 0.0

    @property
    def factor(self) -> float:
        return self.structure_bytes / self.size if self.size else 0.0

    def as_csv(self) -> dict:
        return {
            "name": self.name, "size": self.size, "compressed": self.compressed,
            "ratio": f"{self.ratio:.4f}", "seconds": f"{self.seconds:.3f}",
            "structure_bytes": self.structure_bytes, "factor": f"{self.factor:.4f}",
        }


@dataclass
class BenchReport:
    rows: list[BenchRow]

    @property
    def aggregate(self) -> BenchRow:
        return BenchRow(
            name="TOTAL",
            size=sum(r.size for r in self.rows),
            compressed=sum(r.compressed for r in self.rows),
            seconds=sum(r.seconds for r in self.rows),
            structure_bytes=sum(r.structure_bytes for r in self.rows),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(CSV_FIELDS), lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.as_csv())
        if self.rows:
            writer.writerow(self.aggregate.as_csv())
        return buf.getvalue()

    def to_markdown(self, reference: dict[str, dict[str, float]] | None = None) -> str:
        codecs: list[str] = []
        for ratios in (reference or {}).values():
            for codec in ratios:
                if codec not in codecs:
                    codecs.append(codec)
        header = ["File", "Size", "Compressed", *codecs, "x3", "Seconds", "Factor (est.)"]
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "|".join("---" for _ in header) + "|"]
        rows = list(self.rows)
        if rows:
            rows.append(self.aggregate)
        for r in rows:
            ref = (reference or {}).get(_stem(r.name), {})
            cells = [r.name, str(r.size), str(r.compressed),
                     *(f"{ref[c]:.4f}" if c in ref else "" for c in codecs),
                     f"{r.ratio:.4f}", f"{r.seconds:.2f}", f"{r.factor:.1f}"]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def _stem(name: str) -> str:
    return name.split(".", 1)[0] if name != "TOTAL" else name


def load_reference(path: str | os.PathLike) -> dict[str, dict[str, float]]:
    """Read ``name,<codec>,<codec>...`` rows of external ratios."""
    out: dict[str, dict[str, float]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            name = row.pop("name")
            out[_stem(name)] = {k: float(v) for k, v in row.items() if v not in (None, "")}
    return out


def bench_file(path: str | os.PathLike, params: SearchParams | None = None) -> BenchRow:
    path = Path(path)
    data = path.read_bytes()
    blob, stats = compress_with_stats(data, params)
    if decompress(blob) != data:
        raise RoundtripError(f"{path.name}: roundtrip mismatch")
    return BenchRow(path.name, len(data), len(blob), stats.seconds, stats.structure_bytes)


def run_bench(corpus: str | os.PathLike, params: SearchParams | None = None,
              workers: int = 1) -> BenchReport:
    files = sorted(p for p in Path(corpus).iterdir() if p.is_file())
    if workers > 1 and len(files) > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(bench_file, files, [params] * len(files)))
    else:
        rows = [bench_file(f, params) for f in files]
    rows.sort(key=lambda r: r.name)
    return BenchReport(rows)
