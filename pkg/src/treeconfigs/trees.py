"""Binary rooted tree families and their exhaustive enumeration.

Four families share the same left/right node layout:

* ``Shape`` -- unlabeled topology kept in canonical form, so structural
  equality is value equality;
* ``OrderedShape`` -- plane tree (left/right orientation matters);
* ``History`` -- plane tree whose internal nodes carry ranks increasing
  away from the root (root has rank 1);
* ``LabeledTopology`` -- plane embedding of a leaf-labeled tree; equality
  ignores nothing here, labels included.

All values are immutable after construction and safe to share. Node
references are preorder indices (root = 0), stable under serialization.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .errors import CapacityError, TreeDomainError

DEFAULT_SHAPE_CAP = 18
DEFAULT_ORDERED_CAP = 14
DEFAULT_HISTORY_CAP = 12


class Shape:
    """Canonical unlabeled topology.

    At every internal node the two children are ordered by size first and
    then lexicographically by their canonical encodings, so distinct shape
    values are exactly distinct topologies.
    """

    __slots__ = ("left", "right", "size", "encoding")

    def __init__(self, left, right, size, encoding):
        self.left = left
        self.right = right
        self.size = size
        self.encoding = encoding

    @staticmethod
    def leaf() -> "Shape":
        return _SHAPE_LEAF

    @staticmethod
    def node(a: "Shape", b: "Shape") -> "Shape":
        if (b.size, b.encoding) < (a.size, a.encoding):
            a, b = b, a
        return Shape(a, b, a.size + b.size, "(%s,%s)" % (a.encoding, b.encoding))

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def sort_key(self):
        return (self.size, self.encoding)

    def __eq__(self, other):
        return isinstance(other, Shape) and self.encoding == other.encoding

    def __hash__(self):
        return hash(self.encoding)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        return self.sort_key() >= other.sort_key()

    def __repr__(self):
        return "Shape(%s)" % self.encoding


_SHAPE_LEAF = Shape(None, None, 1, "*")


def _structural_equal(a, b, fields=()):
    if type(a) is not type(b):
        return False
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if (x.left is None) != (y.left is None):
            return False
        for f in fields:
            if getattr(x, f) != getattr(y, f):
                return False
        if x.left is not None:
            stack.append((x.left, y.left))
            stack.append((x.right, y.right))
    return True


class OrderedShape:
    """Plane binary tree; distinct embeddings of one shape are distinct."""

    __slots__ = ("left", "right", "size")

    def __init__(self, left, right, size):
        self.left = left
        self.right = right
        self.size = size

    @staticmethod
    def leaf() -> "OrderedShape":
        return OrderedShape(None, None, 1)

    @staticmethod
    def node(a: "OrderedShape", b: "OrderedShape") -> "OrderedShape":
        return OrderedShape(a, b, a.size + b.size)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def __eq__(self, other):
        return _structural_equal(self, other)

    __hash__ = None

    def __repr__(self):
        return "OrderedShape(n=%d)" % self.size


class History:
    """Plane tree with internal ranks 1..n-1 increasing from the root."""

    __slots__ = ("left", "right", "rank", "size")

    def __init__(self, left, right, rank, size):
        self.left = left
        self.right = right
        self.rank = rank
        self.size = size

    @staticmethod
    def leaf() -> "History":
        return History(None, None, None, 1)

    @staticmethod
    def node(a: "History", b: "History", rank: int) -> "History":
        return History(a, b, rank, a.size + b.size)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def __eq__(self, other):
        return _structural_equal(self, other, ("rank",))

    __hash__ = None

    def __repr__(self):
        return "History(n=%d)" % self.size


class LabeledTopology:
    """Leaf-labeled tree stored with a plane embedding.

    The embedding is preserved for node addressing and round trips; use
    ``canonicalize`` to compare topologies regardless of plane order.
    """

    __slots__ = ("left", "right", "label", "size")

    def __init__(self, left, right, label, size):
        self.left = left
        self.right = right
        self.label = label
        self.size = size

    @staticmethod
    def leaf(label: str) -> "LabeledTopology":
        return LabeledTopology(None, None, label, 1)

    @staticmethod
    def node(a: "LabeledTopology", b: "LabeledTopology") -> "LabeledTopology":
        return LabeledTopology(a, b, None, a.size + b.size)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def labels(self):
        """Leaf labels in plane order."""
        return [x.label for x in preorder(self) if x.left is None]

    def __eq__(self, other):
        return _structural_equal(self, other, ("label",))

    __hash__ = None

    def __repr__(self):
        return "LabeledTopology(n=%d)" % self.size


# ---------------------------------------------------------------------------
# Generic traversal

def fold(tree, leaf_fn, node_fn):
    """Iterative postorder reduction; shared subobjects are computed once."""
    memo = {}
    stack = [tree]
    while stack:
        node = stack[-1]
        key = id(node)
        if key in memo:
            stack.pop()
            continue
        if node.left is None:
            memo[key] = leaf_fn(node)
            stack.pop()
            continue
        lk, rk = id(node.left), id(node.right)
        if lk in memo and rk in memo:
            memo[key] = node_fn(node, memo[lk], memo[rk])
            stack.pop()
        else:
            if rk not in memo:
                stack.append(node.right)
            if lk not in memo:
                stack.append(node.left)
    return memo[id(tree)]


def preorder(tree):
    """Nodes in preorder; the list index of each node is its NodeRef."""
    order = []
    stack = [tree]
    while stack:
        node = stack.pop()
        order.append(node)
        if node.left is not None:
            stack.append(node.right)
            stack.append(node.left)
    return order


def nodes(tree):
    """All NodeRefs of the tree (preorder indices, length 2n-1)."""
    return list(range(2 * tree.size - 1))


def node_at(tree, ref: int):
    order = preorder(tree)
    if not 0 <= ref < len(order):
        raise TreeDomainError("node reference %r outside tree with %d nodes" % (ref, len(order)))
    return order[ref]


def subtree(tree, ref: int) -> Shape:
    """Canonical shape of the subtree rooted at the referenced node."""
    return canonicalize(node_at(tree, ref))


def canonicalize(tree) -> Shape:
    """Canonical Shape underlying any tree value; idempotent."""
    if isinstance(tree, Shape):
        return tree
    return fold(tree, lambda _: Shape.leaf(), lambda _, a, b: Shape.node(a, b))


class TreeIndex:
    """Preorder bookkeeping for one tree: children, parents, subtree spans."""

    __slots__ = ("order", "child_refs", "parent", "span")

    def __init__(self, tree):
        order = preorder(tree)
        n = len(order)
        child_refs = [None] * n
        parent = [None] * n
        span = [None] * n
        for i, node in enumerate(order):
            span[i] = (i, i + 2 * node.size - 2)
            if node.left is not None:
                left_ref = i + 1
                right_ref = i + 2 * node.left.size
                child_refs[i] = (left_ref, right_ref)
                parent[left_ref] = i
                parent[right_ref] = i
        self.order = order
        self.child_refs = child_refs
        self.parent = parent
        self.span = span

    def is_leaf(self, ref) -> bool:
        return self.child_refs[ref] is None

    def descends(self, x: int, y: int) -> bool:
        """True when x is a descendant of y or equal to it."""
        lo, hi = self.span[y]
        return lo <= x <= hi


# ---------------------------------------------------------------------------
# Counting sequences

def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def wedderburn_etherington(n: int) -> int:
    """Number of canonical shapes of size n, by the pairing convolution."""
    if n < 1:
        return 0
    if n <= 2:
        return 1
    total = 0
    for i in range(1, (n - 1) // 2 + 1):
        total += wedderburn_etherington(i) * wedderburn_etherington(n - i)
    if n % 2 == 0:
        half = wedderburn_etherington(n // 2)
        total += half * (half + 1) // 2
    return total


# ---------------------------------------------------------------------------
# Enumeration

_shape_levels = [[], [Shape.leaf()]]


def enumerate_shapes(n: int, cap: int = DEFAULT_SHAPE_CAP):
    """All canonical shapes with n leaves, in canonical order."""
    if n < 1:
        raise TreeDomainError("size must be at least 1, got %r" % (n,))
    if n > cap:
        raise CapacityError("shape enumeration capped at %d leaves (asked %d)" % (cap, n))
    while len(_shape_levels) <= n:
        m = len(_shape_levels)
        level = []
        for i in range(1, m // 2 + 1):
            small = _shape_levels[i]
            big = _shape_levels[m - i]
            if i < m - i:
                for a in small:
                    for b in big:
                        level.append(Shape.node(a, b))
            else:
                for x in range(len(small)):
                    for y in range(x, len(small)):
                        level.append(Shape.node(small[x], small[y]))
        level.sort(key=Shape.sort_key)
        _shape_levels.append(level)
    return list(_shape_levels[n])


def count_ordered(n: int) -> int:
    return catalan(n - 1)


def iter_ordered(n: int, cap: int = DEFAULT_ORDERED_CAP):
    """Every plane tree with n leaves, exactly once."""
    if n < 1:
        raise TreeDomainError("size must be at least 1, got %r" % (n,))
    if n > cap:
        raise CapacityError("plane-tree iteration capped at %d leaves (asked %d)" % (cap, n))
    return _gen_ordered(n)


def _gen_ordered(n):
    if n == 1:
        yield OrderedShape.leaf()
        return
    for j in range(1, n):
        for a in _gen_ordered(j):
            for b in _gen_ordered(n - j):
                yield OrderedShape.node(a, b)


def count_histories(n: int) -> int:
    return math.factorial(n - 1)


def iter_histories(n: int, cap: int = DEFAULT_HISTORY_CAP):
    """Every ranked plane history with n leaves, exactly once.

    Grows trees by splitting leaves in rank order; reversing the largest
    rank is the unique inverse step, so each history appears once.
    """
    if n < 1:
        raise TreeDomainError("size must be at least 1, got %r" % (n,))
    if n > cap:
        raise CapacityError("history iteration capped at %d leaves (asked %d)" % (cap, n))
    return _gen_histories(n)


def _mutable_leaf():
    return [None, None, None]  # rank, left, right


def _collect_leaf_cells(root):
    out = []
    stack = [root]
    while stack:
        cell = stack.pop()
        if cell[1] is None:
            out.append(cell)
        else:
            stack.append(cell[2])
            stack.append(cell[1])
    out.reverse()
    return out


def _freeze_history(root):
    def build(cell):
        stack = [(cell, False)]
        done = {}
        while stack:
            cur, expanded = stack.pop()
            if cur[1] is None:
                done[id(cur)] = History.leaf()
                continue
            if expanded:
                done[id(cur)] = History.node(done[id(cur[1])], done[id(cur[2])], cur[0])
            else:
                stack.append((cur, True))
                stack.append((cur[2], False))
                stack.append((cur[1], False))
        return done[id(cell)]

    return build(root)


def _gen_histories(n):
    if n == 1:
        yield History.leaf()
        return
    root = _mutable_leaf()

    def grow(rank):
        if rank == n:
            yield _freeze_history(root)
            return
        for cell in _collect_leaf_cells(root):
            cell[0] = rank
            cell[1] = _mutable_leaf()
            cell[2] = _mutable_leaf()
            yield from grow(rank + 1)
            cell[0] = None
            cell[1] = None
            cell[2] = None

    yield from grow(1)


def validate_history(tree: History) -> None:
    """Raise TreeDomainError unless ranks are 1..n-1, increasing from the root."""
    n = tree.size
    if n == 1:
        if tree.rank is not None:
            raise TreeDomainError("a single leaf carries no rank")
        return
    seen = set()
    stack = [(tree, 0)]
    while stack:
        node, parent_rank = stack.pop()
        if node.left is None:
            if node.rank is not None:
                raise TreeDomainError("leaf with a rank")
            continue
        rank = node.rank
        if not isinstance(rank, int) or not 1 <= rank <= n - 1:
            raise TreeDomainError("rank %r outside 1..%d" % (rank, n - 1))
        if rank in seen:
            raise TreeDomainError("duplicate rank %d" % rank)
        if rank <= parent_rank:
            raise TreeDomainError("rank %d does not increase away from the root" % rank)
        seen.add(rank)
        stack.append((node.left, rank))
        stack.append((node.right, rank))
    if len(seen) != n - 1:
        raise TreeDomainError("ranks are not a bijection onto 1..%d" % (n - 1))
