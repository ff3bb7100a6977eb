import functools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from r3matroids.generation import generate_all  # noqa: E402


@functools.lru_cache(maxsize=None)
def all_matroids(n: int):
    return tuple(generate_all(n))


@functools.lru_cache(maxsize=None)
def split_matroids(n: int):
    return tuple(generate_all(n, int_split=True))


@functools.lru_cache(maxsize=None)
def raw_matroids(n: int):
    """Oracle set of canonical block lists by raw exact cover."""
    from oracles import all_matroids_raw
    from r3matroids.permgroup import canonical_form
    return frozenset(all_matroids_raw(n, canonical_form))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
