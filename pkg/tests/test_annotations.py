"""Algebraic laws of the annotation-tuple calculus."""

from __future__ import annotations

import random

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from kgnp.annotations import combine, compare_tuples, neutral, propagate, resolve
from kgnp.ast import Annotation
from kgnp.errors import EngineError

MODES = ("f", "p")


def tuples(n):
    return st.lists(
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False, width=32),
        min_size=n,
        max_size=n,
    ).map(tuple)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(tuples(n), tuples(n), tuples(n))))
def test_combine_associative_commutative(xyz):
    x, y, z = xyz
    for mode in MODES:
        assert combine(mode, x, y) == combine(mode, y, x)
        lhs = combine(mode, combine(mode, x, y), z)
        rhs = combine(mode, x, combine(mode, y, z))
        assert all(abs(a - b) <= 1e-12 for a, b in zip(lhs, rhs))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: tuples(n)))
def test_neutral_element(x):
    for mode in MODES:
        assert combine(mode, x, neutral(mode, len(x))) == tuple(x)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(tuples(n), tuples(n), tuples(n))))
def test_combine_monotone(xyz):
    x, y, z = xyz
    lo = tuple(min(a, b) for a, b in zip(x, y))
    hi = tuple(max(a, b) for a, b in zip(x, y))
    for mode in MODES:
        a = combine(mode, lo, z)
        b = combine(mode, hi, z)
        assert compare_tuples(a, b) in ("le", "eq")


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(tuples(n), tuples(n))))
def test_combine_stays_in_unit_box(xy):
    x, y = xy
    for mode in MODES:
        assert all(0.0 <= v <= 1.0 for v in combine(mode, x, y))


def test_combine_values():
    assert combine("f", (0.3, 0.8), (0.5, 0.1)) == (0.5, 0.8)
    assert combine("p", (0.5, 0.8), (0.9, 0.5)) == (0.45, 0.4)


def test_combine_length_mismatch():
    with pytest.raises(EngineError):
        combine("f", (0.1,), (0.1, 0.2))


def test_propagate_folds_body():
    out = propagate((0.2, 0.9), [(0.5, 0.1), (0.7, 0.3)], "f")
    assert out == (0.7, 0.9)
    out = propagate((1.0, 0.5), [(0.5, 1.0)], "p")
    assert out == (0.5, 0.5)
    assert propagate((0.3,), [], "f") == (0.3,)


def test_resolve_concepts():
    ann = Annotation("f", ("good", 0.2))
    assert resolve(ann, {"good": 0.9}) == (0.9, 0.2)
    with pytest.raises(EngineError):
        resolve(ann, {})


# -- componentwise ordering ----------------------------------------------


def random_tuples(count, n, seed):
    rng = random.Random(seed)
    return [tuple(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]) for _ in range(n)) for _ in range(count)]


def test_compare_reflexive_and_antisymmetric():
    for x in random_tuples(200, 3, seed=1):
        assert compare_tuples(x, x) == "eq"
    pool = random_tuples(100, 3, seed=2)
    checked = 0
    for x in pool:
        for y in pool:
            cxy = compare_tuples(x, y)
            cyx = compare_tuples(y, x)
            if cxy == "le" and cyx == "le":
                assert x == tuple(y)
            assert (cxy == "eq") == (cyx == "eq")
            if cxy == "le":
                assert cyx == "ge"
            checked += 1
    assert checked == 10_000


def test_compare_transitive():
    pool = random_tuples(22, 2, seed=3)
    checked = 0
    for x in pool:
        for y in pool:
            for z in pool:
                if compare_tuples(x, y) in ("le", "eq") and compare_tuples(y, z) in (
                    "le",
                    "eq",
                ):
                    assert compare_tuples(x, z) in ("le", "eq")
                checked += 1
    assert checked >= 10_000


def test_compare_incomparable_witness():
    assert compare_tuples((0.9, 0.1), (0.1, 0.9)) == "incomparable"
