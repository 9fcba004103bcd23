import os

import pytest

from msml.core import parse_signature
from msml.semantics import Frame, Model

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURES, name)


UNARY = """
sort s
op f : s -> s
var p : s
var q : s
var r : s
"""

TWO_SORTS = """
sort s
sort t
op f : s -> s
op g : s t -> s
op h : s -> t
var p : s
var q : s
var u : t
var v : t
"""


@pytest.fixture
def usig():
    return parse_signature(UNARY)


@pytest.fixture
def tsig():
    return parse_signature(TWO_SORTS)


@pytest.fixture
def two_world(usig):
    """W = {w0, w1}, f relates w0 to w1, p holds at w1."""
    frame = Frame({"s": ("w0", "w1")}, {"f": frozenset({("w0", "w1")})})
    return Model(usig, frame, {"p": {"w1"}})


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
