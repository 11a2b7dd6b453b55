import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def _dickens_path():
    direct = os.environ.get("X3_DICKENS")
    if direct:
        return Path(direct)
    corpus = os.environ.get("X3_SILESIA")
    if corpus:
        return Path(corpus) / "dickens"
    return None


# one line per acceptance criterion, repeated in the terminal summary
CRITERIA_LINES = []


def record_criterion(line):
    CRITERIA_LINES.append(line)
    print("\n" + line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)


DICKENS_MISSING = "Silesia dickens not available (set X3_DICKENS or X3_SILESIA)"
_dickens_cache = {}


def load_dickens():
    """Silesia dickens, optionally truncated by X3_DICKENS_BYTES; None if absent."""
    if "data" not in _dickens_cache:
        path = _dickens_path()
        data = None
        if path is not None and path.is_file():
            data = path.read_bytes()
            limit = os.environ.get("X3_DICKENS_BYTES")
            if limit:
                data = data[:int(limit)]
        _dickens_cache["data"] = data
    return _dickens_cache["data"]


@pytest.fixture
def dickens(request):
    data = load_dickens()
    if data is None:
        # acceptance tests are named test_c<N>_...
        name = request.node.name
        if name.startswith("test_c"):
            number = name[len("test_c"):].split("_")[0]
            record_criterion(f"[SKIP] criterion {number}: {name} ({DICKENS_MISSING})")
        pytest.skip(DICKENS_MISSING)
    return data


@pytest.fixture(scope="session")
def user_corpus():
    corpus = os.environ.get("X3_CORPUS") or os.environ.get("X3_SILESIA")
    if not corpus:
        return []
    return sorted(p for p in Path(corpus).iterdir() if p.is_file())
