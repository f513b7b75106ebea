from importlib import resources

import pytest

from framesim.activation import SpreadParams
from framesim.graph import Frame, FrameElement, FrameGraph, FrameRelation, LexicalUnit, load_frame_database

DATA = resources.files("framesim") / "data"

# acceptance lines collected by test_acceptance, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# G5: B and C inherit from A, D is a perspective on B, E inherits from C.
G5_RELATIONS = [
    FrameRelation("inheritance", "A", "B"),
    FrameRelation("inheritance", "A", "C"),
    FrameRelation("perspective_on", "B", "D"),
    FrameRelation("inheritance", "C", "E"),
]


def make_g5(extra_frames=(), lexical_units=()):
    frames = [Frame(x, x) for x in "ABCDE"] + [Frame(x, x) for x in extra_frames]
    return FrameGraph(frames, lexical_units, G5_RELATIONS)


@pytest.fixture
def g5():
    return make_g5()


@pytest.fixture
def g5_params():
    return SpreadParams(decay=0.5, max_depth=3, threshold=0.0)


@pytest.fixture
def commerce():
    frames = [
        Frame(1, "Commerce_buy", (FrameElement("Buyer", "core"), FrameElement("Goods", "core"),
                                  FrameElement("Place", "non_core"))),
        Frame(2, "Getting"),
        Frame(3, "Commerce_goods-transfer"),
    ]
    lus = [LexicalUnit(10, "buy", "v", 1, "en"), LexicalUnit(11, "purchase", "n", 1, "en"),
           LexicalUnit(12, "buyer", "n", 1, "en"), LexicalUnit(13, "client", "n", 1, "en")]
    rels = [FrameRelation("inheritance", 2, 1), FrameRelation("perspective_on", 3, 1)]
    return FrameGraph(frames, lus, rels)


@pytest.fixture(scope="session")
def toy_graph():
    return load_frame_database(DATA / "toy_frames.jsonl")


@pytest.fixture(scope="session")
def data_dir():
    return DATA
