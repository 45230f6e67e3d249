"""Tree family invariants.

Claims covered here:
    - shape enumeration matches the independent pairing recurrence for all
      sizes up to 15, with no duplicates and deterministic canonical order
    - canonicalization is idempotent and invariant under plane reorderings
      and relabelings
    - the canonical order is a strict total order on shapes
    - plane trees are counted by Catalan numbers, histories by factorials
    - node references behave: 2n-1 of them, root subtree is the whole tree
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from treeconfigs import trees
from treeconfigs.errors import CapacityError, TreeDomainError
from treeconfigs.newick import parse_labeled, serialize
from treeconfigs.trees import (
    History,
    LabeledTopology,
    OrderedShape,
    Shape,
    canonicalize,
    catalan,
    count_histories,
    count_ordered,
    enumerate_shapes,
    iter_histories,
    iter_ordered,
    nodes,
    subtree,
    wedderburn_etherington,
)

WEDDERBURN = [1, 1, 1, 2, 3, 6, 11, 23, 46, 98, 207, 451, 983, 2179, 4850]


def random_plane_tree(n, rng):
    if n == 1:
        return OrderedShape.leaf()
    j = rng.randint(1, n - 1)
    return OrderedShape.node(random_plane_tree(j, rng), random_plane_tree(n - j, rng))


@pytest.mark.parametrize("n", range(1, 16))
def test_shape_counts_match_recurrence(n):
    shapes = enumerate_shapes(n)
    assert len(shapes) == WEDDERBURN[n - 1]
    assert len(shapes) == wedderburn_etherington(n)
    assert len({s.encoding for s in shapes}) == len(shapes)
    assert all(s.size == n for s in shapes)


def test_shape_enumeration_sorted_and_stable():
    shapes = enumerate_shapes(10)
    assert shapes == sorted(shapes)
    assert [s.encoding for s in shapes] == [s.encoding for s in enumerate_shapes(10)]


def test_single_leaf_and_small_cases():
    assert len(enumerate_shapes(1)) == 1
    assert enumerate_shapes(1)[0].is_leaf
    assert len(enumerate_shapes(5)) == 3
    assert len(enumerate_shapes(15)) == 4850


def test_enumeration_cap_is_explicit():
    with pytest.raises(CapacityError):
        enumerate_shapes(19)
    with pytest.raises(TreeDomainError):
        enumerate_shapes(0)


def test_canonicalize_idempotent_randomized():
    rng = random.Random(1234)
    for _ in range(200):
        tree = random_plane_tree(rng.randint(1, 12), rng)
        shape = canonicalize(tree)
        assert canonicalize(shape) is shape
        assert shape.size == tree.size


def test_plane_reorderings_and_relabelings_collapse():
    variants = [
        "(((a,b),c),(d,e))",
        "((d,e),((a,b),c))",
        "((c,(b,a)),(e,d))",
        "((x1,x2),((x3,x4),x5))",
    ]
    shapes = {canonicalize(parse_labeled(v)).encoding for v in variants}
    assert len(shapes) == 1


def test_all_plane_embeddings_of_one_shape_collapse():
    target = canonicalize(parse_labeled("(((a,b),c),(d,e))"))
    hits = [t for t in iter_ordered(5) if canonicalize(t) == target]
    assert len(hits) == 4  # the four plane embeddings of this shape
    assert {canonicalize(t).encoding for t in hits} == {target.encoding}


def test_canonical_order_is_strict_total_order():
    shapes = [s for n in range(1, 9) for s in enumerate_shapes(n)]
    for a in shapes:
        assert not a < a
    rng = random.Random(99)
    for _ in range(3000):
        a, b, c = rng.choice(shapes), rng.choice(shapes), rng.choice(shapes)
        assert (a < b) or (b < a) or a == b  # totality
        if a < b and b < c:
            assert a < c  # transitivity
        if a < b:
            assert not b < a  # antisymmetry


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 1), (3, 2), (5, 14), (7, 132)])
def test_ordered_counts(n, expected):
    assert count_ordered(n) == expected == catalan(n - 1)
    listed = list(iter_ordered(n))
    assert len(listed) == expected
    texts = {serialize(t, "ordered") for t in listed}
    assert len(texts) == expected


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 1), (3, 2), (5, 24), (6, 120)])
def test_history_counts(n, expected):
    assert count_histories(n) == expected
    listed = list(iter_histories(n))
    assert len(listed) == expected
    texts = {serialize(h, "history") for h in listed}
    assert len(texts) == expected


def test_history_n2_is_single_cherry():
    (only,) = list(iter_histories(2))
    assert serialize(only) == "(*,*)_1"


def test_iteration_caps():
    with pytest.raises(CapacityError):
        iter_ordered(15)
    with pytest.raises(CapacityError):
        iter_histories(13)


def test_nodes_and_subtree():
    tree = parse_labeled("(((a,b),c),(d,e))")
    refs = nodes(tree)
    assert len(refs) == 9
    assert subtree(tree, 0) == canonicalize(tree)
    # leaf subtree is the single-leaf shape
    leaf_refs = [r for r in refs if trees.preorder(tree)[r].is_leaf]
    assert all(subtree(tree, r).is_leaf for r in leaf_refs)
    with pytest.raises(TreeDomainError):
        subtree(tree, 99)


def test_subtree_at_named_internal_node():
    # the node joining {a, b, c} carries the 3-leaf shape
    tree = parse_labeled("(((a,b),c),(d,e))")
    order = trees.preorder(tree)
    idx = trees.TreeIndex(tree)
    for ref, node in enumerate(order):
        lo, hi = idx.span[ref]
        labels = {order[i].label for i in range(lo, hi + 1) if order[i].is_leaf}
        if labels == {"a", "b", "c"}:
            assert subtree(tree, ref).encoding == "(*,(*,*))"
            break
    else:
        pytest.fail("node for {a,b,c} not found")


def test_validate_history_rejects_bad_ranks():
    good = History.node(History.node(History.leaf(), History.leaf(), 2), History.leaf(), 1)
    trees.validate_history(good)
    bad_root = History.node(History.node(History.leaf(), History.leaf(), 1), History.leaf(), 2)
    with pytest.raises(TreeDomainError):
        trees.validate_history(bad_root)
    dup = History.node(History.node(History.leaf(), History.leaf(), 1), History.leaf(), 1)
    with pytest.raises(TreeDomainError):
        trees.validate_history(dup)


@st.composite
def plane_trees(draw, max_size=10):
    n = draw(st.integers(min_value=1, max_value=max_size))
    def build(k):
        if k == 1:
            return OrderedShape.leaf()
        j = draw(st.integers(min_value=1, max_value=k - 1))
        return OrderedShape.node(build(j), build(k - j))
    return build(n)


@given(plane_trees())
@settings(max_examples=150, deadline=None)
def test_canonicalize_idempotent_property(tree):
    shape = canonicalize(tree)
    assert canonicalize(shape) == shape
    assert shape.size == tree.size


def test_fold_handles_deep_trees():
    # a 3000-leaf caterpillar must not hit the recursion limit
    tree = OrderedShape.leaf()
    for _ in range(2999):
        tree = OrderedShape.node(tree, OrderedShape.leaf())
    assert canonicalize(tree).size == 3000


def test_labeled_topology_labels():
    tree = parse_labeled("((a,b),c)")
    assert tree.labels() == ["a", "b", "c"]
    assert isinstance(tree, LabeledTopology)
