"""Ancestral-configuration counts and their set-level oracles.

The fast path is the pair of recurrences on the canonical shape: the root
count multiplies child root counts plus one, the total adds child totals to
the root count. Two independent oracles cross-check them: an explicit
maximal-antichain enumeration per subtree, and (for small trees) a raw
subset filter. A third route enumerates realizations, monotone maps of
internal nodes into their ancestors, and rebuilds each configuration set
from first principles.

Counts are plain Python ints (arbitrary precision); they reach hundreds of
bits well inside the supported size range.
"""

from __future__ import annotations

from itertools import combinations

from .errors import CapacityError
from .trees import Shape, TreeIndex, canonicalize, fold

DEFAULT_ANTICHAIN_CAP = 14
DEFAULT_SUBSET_CAP = 8
DEFAULT_REALIZATION_CAP = 10

_SHAPE_COUNT_MEMO: dict[str, tuple[int, int]] = {"*": (0, 0)}


def _counts_for_shape(shape: Shape) -> tuple[int, int]:
    memo = _SHAPE_COUNT_MEMO
    stack = [shape]
    while stack:
        node = stack[-1]
        enc = node.encoding
        if enc in memo:
            stack.pop()
            continue
        le, re = node.left.encoding, node.right.encoding
        if le in memo and re in memo:
            rl, tl = memo[le]
            rr, tr = memo[re]
            root = (rl + 1) * (rr + 1)
            memo[enc] = (root, tl + tr + root)
            stack.pop()
        else:
            if re not in memo:
                stack.append(node.right)
            if le not in memo:
                stack.append(node.left)
    return memo[shape.encoding]


def _counts_generic(tree) -> tuple[int, int]:
    return fold(
        tree,
        lambda _: (0, 0),
        lambda _, a, b: _combine(a, b),
    )


def _combine(a, b):
    root = (a[0] + 1) * (b[0] + 1)
    return (root, a[1] + b[1] + root)


def root_configs(tree) -> int:
    """Number of configurations at the root; 0 for a single leaf."""
    if isinstance(tree, Shape):
        return _counts_for_shape(tree)[0]
    return _counts_generic(tree)[0]


def total_configs(tree) -> int:
    """Total configurations summed over all nodes."""
    if isinstance(tree, Shape):
        return _counts_for_shape(tree)[1]
    return _counts_generic(tree)[1]


def node_configs(tree) -> dict[int, int]:
    """Per-node configuration counts keyed by preorder NodeRef.

    Leaves map to 0; every internal node carries the root count of its own
    subtree, and the values sum to ``total_configs(tree)``.
    """
    idx = TreeIndex(tree)
    n = len(idx.order)
    counts = [0] * n
    for i in range(n - 1, -1, -1):
        refs = idx.child_refs[i]
        if refs is not None:
            counts[i] = (counts[refs[0]] + 1) * (counts[refs[1]] + 1)
    return {i: counts[i] for i in range(n)}


# ---------------------------------------------------------------------------
# Oracle 1: maximal antichains, built by the recursive set product

def oracle_configurations(tree, ref: int = 0, cap: int = DEFAULT_ANTICHAIN_CAP,
                          index: TreeIndex | None = None) -> set[frozenset[int]]:
    """Configuration sets at ``ref``: maximal antichains of its subtree
    minus the singleton of the node itself. Elements are NodeRefs of the
    host tree."""
    idx = index if index is not None else TreeIndex(tree)
    node = idx.order[ref]
    if node.size > cap:
        raise CapacityError(
            "antichain oracle capped at %d leaves (subtree has %d)" % (cap, node.size)
        )
    chains = maximal_antichains(tree, ref, index=idx)
    chains = set(chains)
    chains.discard(frozenset((ref,)))
    return chains


def maximal_antichains(tree, ref: int = 0, index: TreeIndex | None = None):
    """All maximal antichains of the subtree at ``ref`` as frozensets."""
    idx = index if index is not None else TreeIndex(tree)
    lo, hi = idx.span[ref]
    per_node: dict[int, list[frozenset[int]]] = {}
    for i in range(hi, lo - 1, -1):
        refs = idx.child_refs[i]
        if refs is None:
            per_node[i] = [frozenset((i,))]
        else:
            left, right = per_node[refs[0]], per_node[refs[1]]
            combined = [a | b for a in left for b in right]
            combined.append(frozenset((i,)))
            per_node[i] = combined
    return per_node[ref]


# ---------------------------------------------------------------------------
# Oracle 2: raw subset filter (small trees only)

def oracle_configurations_subsets(tree, ref: int = 0, cap: int = DEFAULT_SUBSET_CAP,
                                  index: TreeIndex | None = None) -> set[frozenset[int]]:
    """Independent check: filter every node subset of the subtree for the
    maximal-antichain property."""
    idx = index if index is not None else TreeIndex(tree)
    node = idx.order[ref]
    if node.size > cap:
        raise CapacityError(
            "subset oracle capped at %d leaves (subtree has %d)" % (cap, node.size)
        )
    lo, hi = idx.span[ref]
    refs = list(range(lo, hi + 1))
    pos = {r: i for i, r in enumerate(refs)}
    m = len(refs)
    # compat[i]: bitmask of nodes incomparable with refs[i]
    compat = [0] * m
    for i, x in enumerate(refs):
        mask = 0
        for j, y in enumerate(refs):
            if i != j and not idx.descends(x, y) and not idx.descends(y, x):
                mask |= 1 << j
        compat[i] = mask
    full = (1 << m) - 1
    found = set()
    for mask in range(1, full + 1):
        rest = mask
        ok = True
        allowed = full
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            if mask & ~(compat[i] | low):
                ok = False
                break
            allowed &= compat[i]
        if not ok:
            continue
        # maximal: no node outside the set is incomparable with all members
        if allowed & ~mask:
            continue
        found.add(frozenset(refs[i] for i in range(m) if mask >> i & 1))
    found.discard(frozenset((ref,)))
    return found


# ---------------------------------------------------------------------------
# Oracle 3: realizations

def oracle_realizations(tree, cap: int = DEFAULT_REALIZATION_CAP,
                        index: TreeIndex | None = None) -> list[dict[int, int]]:
    """Every monotone placement of internal nodes onto ancestor branches.

    A realization maps each internal node k to a node R(k) with k below or
    equal to R(k), preserving the ancestor order. Returned as dicts over
    internal NodeRefs.
    """
    idx = index if index is not None else TreeIndex(tree)
    if idx.order[0].size > cap:
        raise CapacityError(
            "realization oracle capped at %d leaves (tree has %d)"
            % (cap, idx.order[0].size)
        )
    internal = [i for i in range(len(idx.order)) if idx.child_refs[i] is not None]
    if not internal:
        return [dict()]
    out: list[dict[int, int]] = []
    assignment: dict[int, int] = {}

    def ancestors_upto(k, top):
        path = []
        cur = k
        while True:
            path.append(cur)
            if cur == top:
                return path
            cur = idx.parent[cur]
            if cur is None:
                return path  # top not an ancestor; caller guarantees it is

    def backtrack(i):
        if i == len(internal):
            out.append(dict(assignment))
            return
        k = internal[i]
        parent = idx.parent[k]
        top = k if parent is None else assignment[parent]
        for target in ancestors_upto(k, top):
            assignment[k] = target
            backtrack(i + 1)
        del assignment[k]

    backtrack(0)
    return out


def realization_configuration(tree, realization: dict[int, int], ref: int,
                              index: TreeIndex | None = None) -> frozenset[int]:
    """Gene lineages present just below ``ref`` under one realization.

    A lineage (edge above node x) is present right before node k when x is
    a strict descendant of k, its own forming coalescence (if any) happened
    strictly below k, and the coalescence absorbing it happens at k or
    above.
    """
    idx = index if index is not None else TreeIndex(tree)
    lo, hi = idx.span[ref]
    present = []
    for x in range(lo, hi + 1):
        if x == ref:
            continue
        if idx.child_refs[x] is not None:
            placed = realization[x]
            if not (idx.descends(placed, ref) and placed != ref):
                continue
        parent = idx.parent[x]
        if parent is None:
            continue
        if idx.descends(ref, realization[parent]):
            present.append(x)
    return frozenset(present)


def realization_configuration_sets(tree, cap: int = DEFAULT_REALIZATION_CAP
                                   ) -> dict[int, set[frozenset[int]]]:
    """Per-node configuration sets derived from all realizations."""
    idx = TreeIndex(tree)
    realizations = oracle_realizations(tree, cap=cap, index=idx)
    sets: dict[int, set[frozenset[int]]] = {i: set() for i in range(len(idx.order))}
    for realization in realizations:
        for ref in range(len(idx.order)):
            config = realization_configuration(tree, realization, ref, index=idx)
            if config:
                sets[ref].add(config)
    return sets


def oracle_matches(tree, cap: int = DEFAULT_ANTICHAIN_CAP) -> bool:
    """True when the antichain oracle agrees with the recurrence at every node."""
    idx = TreeIndex(tree)
    table = node_configs(tree)
    for ref in range(len(idx.order)):
        configs = oracle_configurations(tree, ref, cap=cap, index=idx)
        if len(configs) != table[ref]:
            return False
    return True
