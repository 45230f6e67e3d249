"""Model-weight recurrences and the two-route distribution equivalence.

Claims covered here:
    - the size-5 table: lab {60,15,30}, out {8,2,4}, ouh {8,4,12}, Yule
      per-labeling {1/180, 1/90, 1/60}, induced {4/7,1/7,2/7} and
      {1/3,1/6,1/2}
    - lab/out/ouh sum to (2n-3)!!, Catalan(n-1), (n-1)! respectively
    - both induced-distribution routes coincide exactly through n = 12
    - double-factorial identity for the labeled count through n = 30
"""

import math
from fractions import Fraction

import pytest

from treeconfigs import weights
from treeconfigs.errors import TreeDomainError
from treeconfigs.newick import parse_labeled, parse_shape
from treeconfigs.trees import catalan, enumerate_shapes, iter_histories, iter_ordered, canonicalize
from treeconfigs.weights import (
    UNIFORM,
    YULE,
    induced_distribution,
    lab,
    labeled_count,
    ouh,
    out,
    shape_weights,
    split_probability,
    yule_prob,
)

CATERPILLAR5 = "((((a,b),c),d),e)"
DOUBLE_CHERRY5 = "(((a,b),(c,d)),e)"
FIG5 = "(((a,b),c),(d,e))"


def test_table_for_size_five():
    rows = {
        CATERPILLAR5: (60, 8, 8, Fraction(1, 180), Fraction(4, 7), Fraction(1, 3)),
        DOUBLE_CHERRY5: (15, 2, 4, Fraction(1, 90), Fraction(1, 7), Fraction(1, 6)),
        FIG5: (30, 4, 12, Fraction(1, 60), Fraction(2, 7), Fraction(1, 2)),
    }
    for text, (l, o, h, p_yule, p_ind_u, p_ind_y) in rows.items():
        w = shape_weights(parse_labeled(text))
        assert w.lab == l
        assert w.out == o
        assert w.ouh == h
        assert w.p_yule_labeled == p_yule
        assert w.p_induced_uniform == p_ind_u
        assert w.p_induced_yule == p_ind_y
        assert w.p_uniform == Fraction(1, 105)


def test_lab_sum_is_105_at_five():
    assert sum(lab(s) for s in enumerate_shapes(5)) == 105 == labeled_count(5)


def test_cherry_trivials():
    cherry = parse_shape("(*,*)")
    assert lab(cherry) == 1
    assert out(cherry) == 1
    assert ouh(cherry) == 1
    assert yule_prob(cherry) == 1


def test_four_leaf_counts_vs_exhaustive_enumeration():
    caterpillar = parse_shape("(((*,*),*),*)")
    balanced = parse_shape("((*,*),(*,*))")
    assert out(caterpillar) == 4 and ouh(caterpillar) == 4
    assert out(balanced) == 1 and ouh(balanced) == 2
    # independent recount from the explicit plane-tree and history iterators
    plane = [canonicalize(t) for t in iter_ordered(4)]
    assert plane.count(caterpillar) == 4
    assert plane.count(balanced) == 1
    hist = [canonicalize(h) for h in iter_histories(4)]
    assert hist.count(caterpillar) == 4
    assert hist.count(balanced) == 2


@pytest.mark.parametrize("n", range(1, 13))
def test_weight_sums(n):
    shapes = enumerate_shapes(n)
    assert sum(out(s) for s in shapes) == catalan(n - 1)
    assert sum(ouh(s) for s in shapes) == math.factorial(n - 1)
    assert sum(lab(s) for s in shapes) == labeled_count(n)


def test_yule_probabilities_size_five():
    assert yule_prob(parse_labeled(FIG5)) == Fraction(1, 60)
    assert yule_prob(parse_labeled(CATERPILLAR5)) == Fraction(1, 180)
    assert yule_prob(parse_labeled(DOUBLE_CHERRY5)) == Fraction(1, 90)


def test_double_factorial_identity():
    for n in range(2, 31):
        expected = math.factorial(2 * n) // (2 ** n * (2 * n - 1) * math.factorial(n))
        assert labeled_count(n) == expected


@pytest.mark.parametrize("n", range(2, 13))
def test_lemma_routes_agree(n):
    for model in (UNIFORM, YULE):
        ordered = induced_distribution(n, model, route="ordered")
        labeled = induced_distribution(n, model, route="labeled")
        assert ordered == labeled
        assert sum(ordered.values()) == 1


def test_induced_distribution_values_n5():
    uniform = induced_distribution(5, UNIFORM)
    assert sorted(uniform.values()) == [Fraction(1, 7), Fraction(2, 7), Fraction(4, 7)]
    yule = induced_distribution(5, YULE)
    assert sorted(yule.values()) == [Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)]


def test_induced_distribution_trivial_n2():
    dist = induced_distribution(2, UNIFORM)
    assert list(dist.values()) == [Fraction(1)]


def test_split_probability():
    assert split_probability(UNIFORM, 4, 1) == Fraction(2, 5)
    assert split_probability(UNIFORM, 2, 1) == 1
    assert split_probability(YULE, 2, 1) == 1
    for j in range(1, 5):
        assert split_probability(YULE, 5, j) == Fraction(1, 4)
    for model in (UNIFORM, YULE):
        for n in range(2, 10):
            assert sum(split_probability(model, n, j) for j in range(1, n)) == 1
    with pytest.raises(TreeDomainError):
        split_probability(UNIFORM, 4, 4)
    with pytest.raises(TreeDomainError):
        split_probability("pda", 4, 1)


def test_half_factors_divide_exactly():
    # symmetric joins halve an even product; nothing ever truncates
    for n in range(2, 11):
        for s in enumerate_shapes(n):
            if s.left.encoding == s.right.encoding:
                assert 2 * lab(s) == lab(s.left) * lab(s.right) * math.comb(n, s.left.size)
