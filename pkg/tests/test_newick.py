"""Newick text round trips and grammar enforcement.

Claims covered here:
    - parse(serialize(x)) is the identity for all three styles
    - serialization is injective on canonical shapes of a fixed size
    - duplicate labels, arity violations, rank violations, branch lengths
      and comments are all rejected with positions
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from treeconfigs.errors import NewickError
from treeconfigs.newick import parse_history, parse_labeled, parse_shape, serialize
from treeconfigs.trees import (
    History,
    LabeledTopology,
    OrderedShape,
    canonicalize,
    enumerate_shapes,
    iter_histories,
)


def test_parse_labeled_example():
    tree = parse_labeled("(((a,b),c),(d,e))")
    assert tree.size == 5
    assert tree.labels() == ["a", "b", "c", "d", "e"]
    assert serialize(tree) == "(((a,b),c),(d,e))"


def test_parse_single_leaf():
    tree = parse_labeled("a")
    assert tree.size == 1 and tree.label == "a"
    assert parse_shape("*").is_leaf
    assert parse_shape("•").is_leaf


def test_whitespace_and_semicolon_tolerated():
    tree = parse_labeled(" ( ( a , b ) , c ) ; ")
    assert serialize(tree) == "((a,b),c)"


def test_duplicate_labels_rejected():
    with pytest.raises(NewickError, match="duplicate"):
        parse_labeled("((a,b),(a,c))")


def test_arity_errors():
    with pytest.raises(NewickError):
        parse_labeled("(a,b,c)")
    with pytest.raises(NewickError):
        parse_labeled("(a)")


def test_syntax_error_carries_position():
    with pytest.raises(NewickError) as err:
        parse_labeled("((a,b)")
    assert err.value.position is not None


def test_branch_lengths_and_comments_rejected():
    with pytest.raises(NewickError, match="branch length"):
        parse_labeled("((a:1.0,b),c)")
    with pytest.raises(NewickError, match="comment"):
        parse_labeled("((a[x],b),c)")


def test_parse_shape_canonicalizes():
    a = parse_shape("((*,*),*)")
    b = parse_shape("(*,(*,*))")
    assert a == b
    assert serialize(a) == "(*,(*,*))"


def test_parse_history_example():
    h = parse_history("(((*,*)_4,*)_2,(*,*)_3)_1")
    assert h.size == 5
    assert serialize(h) == "(((*,*)_4,*)_2,(*,*)_3)_1"


def test_history_rank_violations():
    with pytest.raises(NewickError):
        parse_history("((*,*)_1,*)_2")  # root not rank 1
    with pytest.raises(NewickError):
        parse_history("((*,*)_1,(*,*)_1)_2")
    with pytest.raises(NewickError):
        parse_history("((*,*)_3,*)_1")  # ranks not a bijection onto 1..2
    with pytest.raises(NewickError):
        parse_history("((*,*),*)_1")  # missing subscript


def test_rank_subscript_rejected_outside_history():
    with pytest.raises(NewickError):
        parse_shape("((*,*)_1,*)_2")


def _random_history(n, rng):
    cells = [None]
    tree = [None, None, None]  # rank, left, right
    leaves = [tree]
    for rank in range(1, n):
        cell = leaves.pop(rng.randrange(len(leaves)))
        cell[0] = rank
        cell[1] = [None, None, None]
        cell[2] = [None, None, None]
        leaves.extend([cell[1], cell[2]])

    def freeze(cell):
        if cell[1] is None:
            return History.leaf()
        return History.node(freeze(cell[1]), freeze(cell[2]), cell[0])

    return freeze(tree)


def test_random_history_round_trip_thousandfold():
    rng = random.Random(777)
    for _ in range(1000):
        h = _random_history(rng.randint(1, 10), rng)
        again = parse_history(serialize(h)) if h.size > 1 else h
        assert again == h


@pytest.mark.parametrize("n", range(1, 13))
def test_serialize_injective_on_shapes(n):
    shapes = enumerate_shapes(n)
    texts = {serialize(s) for s in shapes}
    assert len(texts) == len(shapes)


def test_shape_round_trip_exhaustive_small():
    for n in range(1, 11):
        for shape in enumerate_shapes(n):
            assert parse_shape(serialize(shape)) == shape


def test_history_round_trip_exhaustive_small():
    for n in range(1, 7):
        for h in iter_histories(n):
            if n == 1:
                continue
            assert parse_history(serialize(h)) == h


@st.composite
def labeled_trees(draw, max_size=9):
    n = draw(st.integers(min_value=1, max_value=max_size))
    labels = ["L%d" % i for i in range(n)]

    def build(lo, hi):
        if hi - lo == 1:
            return LabeledTopology.leaf(labels[lo])
        j = draw(st.integers(min_value=lo + 1, max_value=hi - 1))
        return LabeledTopology.node(build(lo, j), build(j, hi))

    return build(0, n)


@given(labeled_trees())
@settings(max_examples=150, deadline=None)
def test_labeled_round_trip_property(tree):
    assert parse_labeled(serialize(tree)) == tree


def test_ordered_style_round_trip():
    tree = OrderedShape.node(
        OrderedShape.node(OrderedShape.leaf(), OrderedShape.leaf()),
        OrderedShape.leaf(),
    )
    text = serialize(tree, "ordered")
    assert text == "((*,*),*)"
    # an ordered reading distinguishes embeddings that the shape reading merges
    assert serialize(canonicalize(tree)) == "(*,(*,*))"


def test_deep_parse_is_iterative():
    text = "a0"
    for i in range(1, 2000):
        text = "(%s,a%d)" % (text, i)
    tree = parse_labeled(text)
    assert tree.size == 2000
    assert serialize(tree) == text
