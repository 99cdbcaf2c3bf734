import os

import pytest

from lpspec.cli import load_program
from lpspec.specification import load_spec

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "lpspec", "corpus")
CORPUS = os.path.normpath(CORPUS)

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE: dict = {}


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS, name)


@pytest.fixture
def corpus():
    def load(program, spec=None, depth=None):
        p = load_program(corpus_path(program))
        if spec is None:
            return p
        s = load_spec(corpus_path(spec))
        es = s.evaluate(s.make_universe(p, depth))
        return p, es

    return load


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
