import csv
import io
import json
import subprocess
import sys

import pytest

from x3 import bench
from x3.cli import EXIT_CAP, EXIT_CORRUPT, EXIT_IO, EXIT_OK, main
from x3.codec import compress

SAMPLE = b"It was the best of times, it was the worst of times, " * 60


def test_compress_decompress_roundtrip(tmp_path):
    src = tmp_path / "in.txt"
    src.write_bytes(SAMPLE)
    stats = tmp_path / "stats.json"
    assert main(["c", str(src), "--stats", str(stats)]) == EXIT_OK
    packed = tmp_path / "in.txt.x3"
    assert packed.read_bytes() == compress(SAMPLE)
    out = tmp_path / "out.txt"
    assert main(["d", str(packed), str(out)]) == EXIT_OK
    assert out.read_bytes() == SAMPLE
    report = json.loads(stats.read_text())
    assert report["input_size"] == len(SAMPLE)
    assert report["compressed_size"] == packed.stat().st_size


def test_flags_map_to_params(tmp_path):
    src = tmp_path / "in.txt"
    src.write_bytes(SAMPLE)
    out = tmp_path / "o.x3"
    args = ["compress", str(src), str(out), "--window", "1024", "--max-matches", "7",
            "--max-len", "32", "--guard-dict", "off", "--guard-window", "on"]
    assert main(args) == EXIT_OK
    from x3.window_search import SearchParams
    assert out.read_bytes() == compress(SAMPLE, SearchParams(1024, 7, 32, False, True))


def test_default_output_name(tmp_path):
    src = tmp_path / "a.bin"
    src.write_bytes(b"abc" * 10)
    assert main(["c", str(src)]) == EXIT_OK
    src.unlink()
    assert main(["d", str(tmp_path / "a.bin.x3")]) == EXIT_OK
    assert src.read_bytes() == b"abc" * 10


def test_exit_codes(tmp_path, capsys):
    junk = tmp_path / "junk"
    junk.write_bytes(b"definitely not a container")
    assert main(["d", str(junk), str(tmp_path / "o")]) == EXIT_CORRUPT
    assert main(["d", str(tmp_path / "missing"), str(tmp_path / "o")]) == EXIT_IO
    assert main(["c", str(tmp_path / "missing")]) == EXIT_IO
    with pytest.raises(SystemExit) as exc:
        main(["c", str(junk), "--guard-dict", "maybe"])
    assert exc.value.code == 2


def test_cap_exit_code(tmp_path, monkeypatch):
    import x3.codec
    monkeypatch.setattr(x3.codec, "MAX_DICTIONARY_SIZE", 3)
    src = tmp_path / "r.bin"
    src.write_bytes(bytes(range(256)))
    assert main(["c", str(src)]) == EXIT_CAP


def test_module_entry_point(tmp_path):
    src = tmp_path / "in.txt"
    src.write_bytes(SAMPLE[:500])
    r = subprocess.run([sys.executable, "-m", "x3", "c", str(src)], capture_output=True)
    assert r.returncode == 0
    r = subprocess.run([sys.executable, "-m", "x3", "d", str(src)], capture_output=True)
    assert r.returncode == EXIT_CORRUPT


def _toy_corpus(root):
    root.mkdir()
    (root / "b.txt").write_bytes(SAMPLE)
    (root / "a.bin").write_bytes(bytes(range(256)) * 4)
    return root


def test_bench_empty_dir(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    out_csv = tmp_path / "r.csv"
    assert main(["bench", str(empty), "--csv", str(out_csv)]) == EXIT_OK
    assert out_csv.read_text().strip() == ",".join(bench.CSV_FIELDS)


def test_bench_toy_corpus(tmp_path, capsys):
    corpus = _toy_corpus(tmp_path / "corpus")
    out_csv = tmp_path / "r.csv"
    assert main(["bench", str(corpus), "--csv", str(out_csv), "--reference", "silesia"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out_csv.read_text())))
    assert [r["name"] for r in rows] == ["a.bin", "b.txt", "TOTAL"]
    for r in rows:
        assert set(r) == set(bench.CSV_FIELDS) and all(r[f] != "" for f in bench.CSV_FIELDS)
        assert r["ratio"] == f"{int(r['size']) / int(r['compressed']):.4f}"
        assert float(r["factor"]) == pytest.approx(int(r["structure_bytes"]) / int(r["size"]), abs=1e-4)
    assert int(rows[2]["size"]) == int(rows[0]["size"]) + int(rows[1]["size"])
    table = capsys.readouterr().out
    assert "| a.bin |" in table and "gzip" in table


def test_bench_reference_csv(tmp_path, capsys):
    corpus = _toy_corpus(tmp_path / "corpus")
    ref = tmp_path / "ref.csv"
    ref.write_text("name,gzip,lz4\nb,2.5,2.0\n")
    assert main(["bench", str(corpus), "--reference", str(ref)]) == EXIT_OK
    table = capsys.readouterr().out
    assert "| b.txt |" in table and "2.5000" in table


def test_bench_rows_are_roundtrip_verified(tmp_path, monkeypatch):
    corpus = _toy_corpus(tmp_path / "corpus")
    monkeypatch.setattr(bench, "decompress", lambda blob: b"wrong")
    with pytest.raises(bench.RoundtripError):
        bench.run_bench(corpus)


def test_opt_singleton_and_apply(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_bytes(SAMPLE)
    log = tmp_path / "log.csv"
    applied = tmp_path / "best.x3"
    args = ["opt", str(src), "--windows", "2", "--matches", "9", "--guard-dict", "off",
            "--log", str(log), "--apply", str(applied)]
    assert main(args) == EXIT_OK
    line = capsys.readouterr().out
    assert "window=2048 max_matches=9" in line
    assert len(log.read_text().splitlines()) == 2
    from x3.codec import decompress
    assert decompress(applied.read_bytes()) == SAMPLE


def test_opt_default_space_beats_defaults(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_bytes(SAMPLE)
    assert main(["opt", str(src), "--windows", "1,8"]) == EXIT_OK
    line = capsys.readouterr().out
    best = float(line.split("ratio=")[1].split()[0])
    assert best >= round(len(SAMPLE) / len(compress(SAMPLE)), 4)
