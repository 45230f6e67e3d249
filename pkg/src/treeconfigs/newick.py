"""Newick-style text for all tree families.

Grammar (whitespace between tokens is ignored):

    Tree    := Node ';'?
    Node    := Leaf | '(' Node ',' Node ')' Rank?
    Leaf    := label            (labeled style; no '(' ')' ',' ';' '_' chars)
             | '*' | '•'   (shape and history styles)
    Rank    := '_' integer      (history style only)

Branch lengths, comments and non-binary nodes are rejected outright.
"""

from __future__ import annotations

from .errors import NewickError, TreeDomainError
from .trees import (
    History,
    LabeledTopology,
    OrderedShape,
    Shape,
    canonicalize,
    fold,
    validate_history,
)

_LABEL_FORBIDDEN = set("(),;_:[]")  # ':' and '[' so lengths/comments surface as errors
_LEAF_MARKS = {"*", "•"}


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise NewickError(message, self.pos)

    def skip_ws(self):
        t = self.text
        while self.pos < len(t) and t[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return ""

    def take(self):
        ch = self.peek()
        self.pos += 1
        return ch

    def read_label(self):
        self.skip_ws()
        t = self.text
        start = self.pos
        while self.pos < len(t):
            ch = t[self.pos]
            if ch in _LABEL_FORBIDDEN or ch.isspace():
                break
            self.pos += 1
        if self.pos == start:
            self.error("expected a leaf label")
        return t[start:self.pos]

    def read_int(self):
        self.skip_ws()
        t = self.text
        start = self.pos
        while self.pos < len(t) and t[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected an integer rank after '_'")
        return int(t[start:self.pos])


def _reject_decorations(sc):
    ch = sc.peek()
    if ch == ":":
        sc.error("branch lengths are not supported")
    if ch == "[":
        sc.error("comments are not supported")


def _parse_core(text, leaf_fn, with_ranks):
    """Token-loop parser; depth-safe for arbitrarily deep trees."""
    sc = _Scanner(text)
    frames = []  # list of child lists for open '(' groups
    pending_leaf = True  # True when the next token must start a node
    root = None

    def finish(value):
        """Attach a completed node; return True when it is the root."""
        nonlocal root
        _reject_decorations(sc)
        if not frames:
            root = value
            return True
        frames[-1].append(value)
        return False

    while True:
        if pending_leaf:
            ch = sc.peek()
            if ch == "(":
                sc.take()
                frames.append([])
                continue
            if ch == "" or ch in "),;_":
                sc.error("expected a node")
            value = leaf_fn(sc)
            pending_leaf = False
            if finish(value):
                break
            continue
        # A node just finished and frames is nonempty: expect ',' or ')'.
        ch = sc.peek()
        if ch == ",":
            if len(frames[-1]) >= 2:
                sc.error("nodes must have exactly two children")
            sc.take()
            pending_leaf = True
            continue
        if ch == ")":
            sc.take()
            children = frames.pop()
            if len(children) != 2:
                sc.error("nodes must have exactly two children")
            rank = None
            rank_pos = None
            if with_ranks:
                if sc.peek() != "_":
                    sc.error("history nodes need a '_rank' subscript")
                sc.take()
                rank_pos = sc.pos
                rank = sc.read_int()
            elif sc.peek() == "_":
                sc.error("rank subscripts are only valid for histories")
            if finish((children[0], children[1], rank, rank_pos)):
                break
            continue
        sc.error("expected ',' or ')'")

    if sc.peek() == ";":
        sc.take()
    if sc.peek() != "":
        sc.error("trailing characters after the tree")
    return root


def _shape_leaf(sc):
    ch = sc.peek()
    if ch in _LEAF_MARKS:
        sc.take()
        return "LEAF"
    sc.error("shape leaves are written '*' (or '•')")


def _labeled_leaf(sc):
    return sc.read_label()


def _build(nested, leaf_build, node_build):
    """Bottom-up construction from the parser's nested tuples."""
    done = {}
    stack = [nested]
    while stack:
        cur = stack[-1]
        key = id(cur)
        if key in done:
            stack.pop()
            continue
        if not isinstance(cur, tuple):
            done[key] = leaf_build(cur)
            stack.pop()
            continue
        lk, rk = id(cur[0]), id(cur[1])
        if lk in done and rk in done:
            done[key] = node_build(done[lk], done[rk], cur[2])
            stack.pop()
        else:
            stack.append(cur[1])
            stack.append(cur[0])
    return done[id(nested)]


def parse_labeled(text: str) -> LabeledTopology:
    """Parse a leaf-labeled tree; duplicate labels are rejected."""
    nested = _parse_core(text, _labeled_leaf, with_ranks=False)
    tree = _build(
        nested,
        LabeledTopology.leaf,
        lambda a, b, _: LabeledTopology.node(a, b),
    )
    labels = tree.labels()
    if len(set(labels)) != len(labels):
        dup = sorted(x for x in set(labels) if labels.count(x) > 1)[0]
        raise NewickError("duplicate leaf label %r" % dup)
    return tree


def parse_shape(text: str) -> Shape:
    """Parse a shape written with '*' or '•' leaves; canonicalizes."""
    nested = _parse_core(text, _shape_leaf, with_ranks=False)
    return _build(nested, lambda _: Shape.leaf(), lambda a, b, _: Shape.node(a, b))


def parse_history(text: str) -> History:
    """Parse a ranked history; rank bijectivity and ordering are enforced."""
    nested = _parse_core(text, _shape_leaf, with_ranks=True)
    tree = _build(
        nested,
        lambda _: History.leaf(),
        lambda a, b, rank: History.node(a, b, rank),
    )
    try:
        validate_history(tree)
    except TreeDomainError as exc:
        raise NewickError(str(exc)) from exc
    return tree


def serialize(tree, style: str | None = None) -> str:
    """Deterministic Newick text for any tree family.

    Styles: ``shape`` (canonical order, '*' leaves), ``labeled`` (plane
    order preserved), ``history`` (plane order plus '_rank' subscripts).
    The style defaults to the natural one for the given value.
    """
    if style is None:
        if isinstance(tree, Shape):
            style = "shape"
        elif isinstance(tree, History):
            style = "history"
        elif isinstance(tree, LabeledTopology):
            style = "labeled"
        elif isinstance(tree, OrderedShape):
            style = "ordered"
        else:
            raise TreeDomainError("cannot serialize %r" % (tree,))

    if style == "shape":
        shape = canonicalize(tree)
        return fold(shape, lambda _: "*", lambda _, a, b: "(%s,%s)" % (a, b))
    if style == "ordered":
        if isinstance(tree, Shape) or not hasattr(tree, "left"):
            raise TreeDomainError("ordered style needs a plane tree")
        return fold(tree, lambda _: "*", lambda _, a, b: "(%s,%s)" % (a, b))
    if style == "history":
        if not isinstance(tree, History):
            raise TreeDomainError("history style needs a History value")
        return fold(
            tree,
            lambda _: "*",
            lambda node, a, b: "(%s,%s)_%d" % (a, b, node.rank),
        )
    if style == "labeled":
        if not isinstance(tree, LabeledTopology):
            raise TreeDomainError("labeled style needs a LabeledTopology value")
        return fold(
            tree,
            lambda node: node.label,
            lambda _, a, b: "(%s,%s)" % (a, b),
        )
    raise TreeDomainError("unknown serialization style %r" % (style,))
