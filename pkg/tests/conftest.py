import sys

import pytest

from quasimodular import tables


@pytest.fixture(autouse=True, scope="session")
def _isolated_cache(tmp_path_factory):
    """Keep iterate tables out of the user's home cache."""
    mp = pytest.MonkeyPatch()
    mp.setenv(tables.CACHE_ENV, str(tmp_path_factory.mktemp("iterates")))
    tables.forget_tables()
    yield
    tables.forget_tables()
    mp.undo()


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance.RESULTS, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
