import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qwheel import cipher  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def cached_tables(M: int, N: int, seeded_fallback: bool = False):
    cfg = cipher.CipherConfig(ablation=cipher.Ablation(seeded_fallback=seeded_fallback))
    return cipher.tables(cfg, M, N)


@pytest.fixture(scope="session")
def tables():
    return cached_tables


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
