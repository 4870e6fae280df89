import pytest

from monoid_points.core import MonoidPresentation
from monoid_points.io import corpus_names, load_json, presentation_from_json


def corpus():
    return {name: presentation_from_json(load_json(f"{name}.json")) for name in corpus_names()}


@pytest.fixture(scope="session")
def corpus_presentations():
    return corpus()


@pytest.fixture
def free2():
    return MonoidPresentation.free("xy")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
