from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from faddeeva_fourier.oracle import OracleCache
from faddeeva_fourier.params import default_setup

DATA = Path(str(resources.files("faddeeva_fourier") / "data"))

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def setup():
    return default_setup()


def _cache(name: str) -> OracleCache:
    path = DATA / name
    if not path.exists():
        pytest.fail(f"oracle cache {path} missing; run scripts/build_oracle_cache.py")
    return OracleCache.load(path)


@pytest.fixture(scope="session")
def core_cache() -> OracleCache:
    return _cache("oracle_core_grid.txt")


@pytest.fixture(scope="session")
def hitran_cache() -> OracleCache:
    return _cache("oracle_hitran.txt")


@pytest.fixture(scope="session")
def cf_cache() -> OracleCache:
    return _cache("oracle_cf.txt")


@pytest.fixture(scope="session")
def wide_cache() -> OracleCache:
    return _cache("oracle_wide_grid.txt")


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion; returns the verdict."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
