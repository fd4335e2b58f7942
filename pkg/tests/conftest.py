import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from riskforge.corpus import load_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    return load_corpus("g1-healthcare")


@pytest.fixture(scope="session")
def tree(corpus):
    return corpus.require_tree()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
