from importlib.resources import files

import pytest
from hypothesis import HealthCheck, settings

from rlfg.grammar import load_grammar

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def shipped(name: str) -> str:
    return (files("rlfg") / "grammars" / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def english_rlfg():
    return load_grammar(shipped("english-rlfg.rlfg"))


@pytest.fixture(scope="session")
def icelandic():
    return load_grammar(shipped("icelandic.rlfg"))


@pytest.fixture(scope="session")
def english_defining():
    return load_grammar(shipped("english-lfg-defining.rlfg"))


@pytest.fixture(scope="session")
def english_constraining():
    return load_grammar(shipped("english-lfg-constraining.rlfg"))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
