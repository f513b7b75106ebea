import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framesim.activation import SpreadParams, build_relatedness_table
from framesim.similarity import (AnnotationFrames, AssociativeArray, UndefinedSimilarityError, align, build_array,
                                 compare_annotations, cosine, dump_array)
from oracles import oracle_compare, random_dag

V_B = (0.5, 1.0, 0.25, 0.5, 0.125)
V_C = (0.5, 0.25, 1.0, 0.125, 0.5)


@pytest.fixture
def g5_table(g5, g5_params):
    return build_relatedness_table(g5, g5_params)


def arr(d):
    return AssociativeArray.from_dict(d)


def test_build_array_single(g5_table):
    a = build_array(AnnotationFrames("x", {"B"}), g5_table)
    assert a.index == tuple("ABCDE")
    assert a.values.tolist() == list(V_B)


def test_build_array_empty_and_duplicates(g5_table):
    assert len(build_array(AnnotationFrames("x", []), g5_table)) == 0
    assert build_array(AnnotationFrames("x", ["B", "B"]), g5_table) == build_array(AnnotationFrames("y", ["B"]), g5_table)


def test_build_array_missing_row(g5, g5_params):
    t = build_relatedness_table(g5, g5_params, frames=["A"])
    with pytest.raises(KeyError):
        build_array(AnnotationFrames("x", {"B"}), t)


def test_evoked_frames_have_full_activation(g5_table):
    a = build_array(AnnotationFrames("x", {"B", "E"}), g5_table).as_dict()
    assert a["B"] == a["E"] == 1.0


def test_align_disjoint():
    a1, a2 = align(arr({"A": 0.3}), arr({"B": 0.7}))
    assert a1.index == a2.index == ("A", "B")
    assert a1.values.tolist() == [0.3, 0.0]
    assert a2.values.tolist() == [0.0, 0.7]


def test_align_identity_and_overlap():
    x = arr({"A": 0.3, "B": 0.2})
    assert align(x, x) == (x, x)
    a1, a2 = align(x, arr({"B": 0.9, "C": 0.1}))
    assert a1.index == ("A", "B", "C")
    assert a1.values.tolist() == [0.3, 0.2, 0.0]
    assert a2.values.tolist() == [0.0, 0.9, 0.1]


def test_array_invariants():
    with pytest.raises(ValueError):
        AssociativeArray(("B", "A"), np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        AssociativeArray(("A",), np.array([1.5]))
    with pytest.raises(ValueError):
        AssociativeArray(("A", "B"), np.array([0.5]))


def test_cosine_basics():
    x = arr({"A": 0.3, "B": 0.9, "C": 0.1})
    assert abs(cosine(x, x) - 1.0) <= 1e-12
    assert cosine(arr({"A": 1.0}), arr({"B": 1.0})) == 0.0
    with pytest.raises(UndefinedSimilarityError):
        cosine(arr({"A": 0.0}), x)


def test_cosine_hand_value():
    # dot = .25+.25+.25+.0625+.0625, each squared norm = 1 + .25 + .25 + .0625 + .015625
    v1, v2 = arr(dict(zip("ABCDE", V_B))), arr(dict(zip("ABCDE", V_C)))
    assert abs(cosine(v1, v2) - 0.875 / 1.578125) <= 1e-12


def test_compare_annotations(g5_table):
    b, c = AnnotationFrames("b", {"B"}), AnnotationFrames("c", {"C"})
    assert compare_annotations(b, b, g5_table) == 1.0
    assert abs(compare_annotations(b, c, g5_table) - 0.5545) < 1e-4
    assert compare_annotations(b, c, g5_table) == compare_annotations(c, b, g5_table)
    with pytest.raises(UndefinedSimilarityError):
        compare_annotations(b, AnnotationFrames("e", []), g5_table)


def test_dump_array(g5_table):
    rec = json.loads(dump_array(build_array(AnnotationFrames("x", {"B"}), g5_table), "x"))
    assert rec == {"annotation": "x", "frames": [[f, v] for f, v in zip("ABCDE", V_B)]}


def _random_case(seed):
    rng = random.Random(seed)
    g = random_dag(rng)
    p = SpreadParams(rng.choice([0.3, 0.5, 0.9]), rng.choice([0, 1, 2, 4]), 0.0)
    table = build_relatedness_table(g, p)
    ann = [AnnotationFrames(str(i), rng.sample(g.frame_ids, rng.randint(1, min(4, len(g))))) for i in range(2)]
    return rng, g, p, table, ann


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_compare_matches_oracle(seed):
    _, g, p, table, (x, y) = _random_case(seed)
    got = compare_annotations(x, y, table)
    want = oracle_compare(g, x.evoked, y.evoked, p.decay, p.max_depth)
    assert abs(got - want) <= 1e-12


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_symmetry_range_self(seed):
    _, _, _, table, (x, y) = _random_case(seed)
    s = compare_annotations(x, y, table)
    assert s == compare_annotations(y, x, table)
    assert 0.0 <= s <= 1.0
    assert abs(compare_annotations(x, x, table) - 1.0) <= 1e-12


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_zero_padding_invariance(seed):
    rng, g, _, table, (x, y) = _random_case(seed)
    a1, a2 = align(build_array(x, table), build_array(y, table))
    extra = [f for f in range(-10, len(g) + 10) if f not in a1.index]
    pad = rng.sample(extra, rng.randint(1, len(extra)))
    p1 = {**a1.as_dict(), **{f: 0.0 for f in pad}}
    p2 = {**a2.as_dict(), **{f: 0.0 for f in pad}}
    assert cosine(arr(p1), arr(p2)) == cosine(a1, a2)
