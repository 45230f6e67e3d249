"""Labeling, ordering and ranking counts per shape, and the two tree models.

For a shape t with root subtrees a and b (n = |t| leaves):

    lab(t) = lab(a) lab(b) C(n, |a|) / (1 + [a = b])     labelings
    out(t) = 2 out(a) out(b) / (1 + [a = b])             plane embeddings
    ouh(t) = 2 ouh(a) ouh(b) C(n-2, |a|-1) / (1 + [a = b])  ranked embeddings

with all three equal to 1 on a leaf. Summed over shapes of size n they
give (2n-3)!!, Catalan(n-1) and (n-1)! respectively, which is what makes
the uniform-labeled/uniform-plane and Yule/uniform-history equivalences
exact identities rather than approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import TreeDomainError
from .trees import (
    DEFAULT_SHAPE_CAP,
    Shape,
    canonicalize,
    catalan,
    enumerate_shapes,
    fold,
)

UNIFORM = "uniform"
YULE = "yule"
MODELS = (UNIFORM, YULE)

_LAB_MEMO: dict[str, int] = {"*": 1}
_OUT_MEMO: dict[str, int] = {"*": 1}
_OUH_MEMO: dict[str, int] = {"*": 1}


def check_model(model: str) -> str:
    if model not in MODELS:
        raise TreeDomainError("unknown model %r (expected 'uniform' or 'yule')" % (model,))
    return model


def _memoized_count(shape: Shape, memo, combine):
    stack = [shape]
    while stack:
        node = stack[-1]
        enc = node.encoding
        if enc in memo:
            stack.pop()
            continue
        le, re = node.left.encoding, node.right.encoding
        if le in memo and re in memo:
            memo[enc] = combine(node, memo[le], memo[re])
            stack.pop()
        else:
            if re not in memo:
                stack.append(node.right)
            if le not in memo:
                stack.append(node.left)
    return memo[shape.encoding]


def _lab_combine(node, a, b):
    value = a * b * math.comb(node.size, node.left.size)
    if node.left.encoding == node.right.encoding:
        value //= 2
    return value


def _out_combine(node, a, b):
    value = 2 * a * b
    if node.left.encoding == node.right.encoding:
        value //= 2
    return value


def _ouh_combine(node, a, b):
    value = 2 * a * b * math.comb(node.size - 2, node.left.size - 1)
    if node.left.encoding == node.right.encoding:
        value //= 2
    return value


def lab(tree) -> int:
    """Labeled topologies sharing the tree's shape."""
    return _memoized_count(canonicalize(tree), _LAB_MEMO, _lab_combine)


def out(tree) -> int:
    """Plane embeddings of the tree's shape."""
    return _memoized_count(canonicalize(tree), _OUT_MEMO, _out_combine)


def ouh(tree) -> int:
    """Ranked plane embeddings (histories) of the tree's shape."""
    return _memoized_count(canonicalize(tree), _OUH_MEMO, _ouh_combine)


def labeled_count(n: int) -> int:
    """Number of labeled topologies of size n: (2n-3)!! for n >= 2."""
    if n < 1:
        raise TreeDomainError("size must be at least 1, got %r" % (n,))
    result = 1
    for k in range(1, 2 * n - 2, 2):
        result *= k
    return result


def yule_prob(tree) -> Fraction:
    """Probability of one labeled topology with this shape under the Yule
    process; depends only on the shape."""
    shape = canonicalize(tree)
    n = shape.size
    # product over internal nodes with r >= 3 descending leaves of (r - 1)
    denom = fold(
        shape,
        lambda _: 1,
        lambda node, a, b: a * b * (node.size - 1 if node.size >= 3 else 1),
    )
    return Fraction(2 ** (n - 1), math.factorial(n) * denom)


def split_probability(model: str, n: int, j: int) -> Fraction:
    """Probability that the left root subtree has size j in a random plane
    tree (uniform) or history (yule) of size n."""
    check_model(model)
    if n < 2:
        raise TreeDomainError("split needs n >= 2, got %r" % (n,))
    if not 1 <= j <= n - 1:
        raise TreeDomainError("split size %r outside 1..%d" % (j, n - 1))
    if model == UNIFORM:
        return Fraction(catalan(j - 1) * catalan(n - 1 - j), catalan(n - 1))
    return Fraction(1, n - 1)


@dataclass(frozen=True)
class ShapeWeights:
    """Every per-shape weight and probability used by the two models."""

    shape: Shape
    lab: int
    out: int
    ouh: int
    p_uniform: Fraction          # per labeled topology, uniform model
    p_yule_labeled: Fraction     # per labeled topology, Yule model
    p_induced_uniform: Fraction  # induced on the shape, uniform model
    p_induced_yule: Fraction     # induced on the shape, Yule model


def shape_weights(tree) -> ShapeWeights:
    shape = canonicalize(tree)
    n = shape.size
    lab_n = lab(shape)
    p_yule = yule_prob(shape)
    return ShapeWeights(
        shape=shape,
        lab=lab_n,
        out=out(shape),
        ouh=ouh(shape),
        p_uniform=Fraction(1, labeled_count(n)),
        p_yule_labeled=p_yule,
        p_induced_uniform=Fraction(out(shape), catalan(n - 1)),
        p_induced_yule=lab_n * p_yule,
    )


def induced_distribution(n: int, model: str, route: str = "ordered",
                         cap: int = DEFAULT_SHAPE_CAP) -> dict[Shape, Fraction]:
    """Distribution induced on shapes of size n by the chosen model.

    Both routes must agree exactly: the ordered route weights by plane
    (resp. ranked) embeddings, the labeled route by labelings times the
    per-labeling probability.
    """
    check_model(model)
    if route not in ("ordered", "labeled"):
        raise TreeDomainError("unknown route %r" % (route,))
    dist: dict[Shape, Fraction] = {}
    for shape in enumerate_shapes(n, cap=cap):
        if model == UNIFORM:
            if route == "ordered":
                prob = Fraction(out(shape), catalan(n - 1))
            else:
                prob = Fraction(lab(shape), labeled_count(n))
        else:
            if route == "ordered":
                prob = Fraction(ouh(shape), math.factorial(n - 1))
            else:
                prob = lab(shape) * yule_prob(shape)
        dist[shape] = prob
    return dist
