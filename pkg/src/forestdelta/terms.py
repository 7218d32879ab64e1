"""Concrete forests and contexts over a finite alphabet.

A forest is an ordered sequence of trees, a tree is a label with a child
forest.  A context is a forest in which exactly one leaf is the hole ``[]``.
Both kinds are immutable tuples of :class:`Tree` roots, so they can be hashed,
shared and used as dictionary keys.

Text syntax::

    Forest  := "0" | Item ("+" Item)*
    Item    := LABEL ["(" Forest ")"] | "[]"
    LABEL   := [A-Za-z][A-Za-z0-9_]*

``[]`` is only accepted when parsing a context, and then exactly once.
"""
from __future__ import annotations

import re
from collections import deque
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

from .errors import HoleCountError, KindMismatch, TermSyntaxError, UnknownLabel

HOLE_LABEL = "[]"
_LABEL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
# the hole collates after every label character
_COLLATE = str.maketrans({"[": "\x7e", "]": "\x7f"})


def text_key(text: str) -> str:
    """Sort key for rendered terms: plain character order, except ``[]`` sorts last."""
    return text.translate(_COLLATE)


class Tree(NamedTuple):
    label: str
    children: tuple = ()

    def is_hole(self) -> bool:
        return self.label == HOLE_LABEL


HOLE = Tree(HOLE_LABEL, ())


class Forest(tuple):
    """Hole-free sequence of root trees.  ``Forest()`` is the empty forest 0."""

    __slots__ = ()
    kind = "forest"

    def __repr__(self):
        return f"Forest({render_term(self)!r})"


class Context(tuple):
    """Sequence of root trees containing exactly one hole."""

    __slots__ = ()
    kind = "context"

    def __repr__(self):
        return f"Context({render_term(self)!r})"


Term = Union[Forest, Context]
EMPTY = Forest()
IDENTITY = Context((HOLE,))


# ---------------------------------------------------------------------------
# structural helpers on raw root tuples


def node_count(roots: Sequence[Tree]) -> int:
    """Number of labelled nodes; the hole is not a node."""
    total = 0
    for t in roots:
        if t.label != HOLE_LABEL:
            total += 1 + node_count(t.children)
    return total


def hole_count(roots: Sequence[Tree]) -> int:
    total = 0
    for t in roots:
        if t.label == HOLE_LABEL:
            total += 1
        else:
            total += hole_count(t.children)
    return total


def labels_of(roots: Sequence[Tree]) -> set:
    out = set()
    stack = list(roots)
    while stack:
        t = stack.pop()
        if t.label != HOLE_LABEL:
            out.add(t.label)
            stack.extend(t.children)
    return out


def make_term(roots: Iterable[Tree]) -> Term:
    """Wrap raw roots as a Forest or Context according to the hole count."""
    roots = tuple(roots)
    holes = hole_count(roots)
    if holes == 0:
        return Forest(roots)
    if holes == 1:
        return Context(roots)
    raise HoleCountError(f"term has {holes} holes")


def tree(label: str, *children: Tree) -> Tree:
    return Tree(label, tuple(children))


def as_tree(t: Term) -> Tree:
    if len(t) != 1:
        raise KindMismatch(f"{render_term(t)} is not a single tree")
    return t[0]


# ---------------------------------------------------------------------------
# parsing and printing


class _Parser:
    def __init__(self, text: str, alphabet):
        self.text = text
        self.pos = 0
        self.alphabet = None if alphabet is None else set(alphabet)

    def error(self, message):
        raise TermSyntaxError(message, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def forest(self) -> tuple:
        if self.peek() == "0":
            self.pos += 1
            return ()
        items = [self.item()]
        while self.peek() == "+":
            self.pos += 1
            items.append(self.item())
        return tuple(items)

    def item(self) -> Tree:
        self.skip()
        if self.text.startswith(HOLE_LABEL, self.pos):
            self.pos += len(HOLE_LABEL)
            return HOLE
        m = _LABEL_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a label")
        label = m.group(0)
        if self.alphabet is not None and label not in self.alphabet:
            raise UnknownLabel(f"label {label!r} at position {self.pos} is not in the alphabet")
        self.pos = m.end()
        children = ()
        if self.peek() == "(":
            self.pos += 1
            children = self.forest()
            self.expect(")")
        return Tree(label, children)

    def parse(self) -> tuple:
        roots = self.forest()
        if self.peek():
            self.error("unexpected trailing input")
        return roots


def parse_term(text: str, alphabet=None, kind: str = "forest") -> Term:
    """Parse ``text`` as a forest or a context.

    ``alphabet=None`` accepts any label.
    """
    if kind not in ("forest", "context"):
        raise ValueError(f"unknown term kind {kind!r}")
    roots = _Parser(text, alphabet).parse()
    holes = hole_count(roots)
    if kind == "forest":
        if holes:
            raise HoleCountError(f"a forest cannot contain a hole: {text!r}")
        return Forest(roots)
    if holes != 1:
        raise HoleCountError(f"context must contain exactly one hole, found {holes}: {text!r}")
    return Context(roots)


def parse_forest(text: str, alphabet=None) -> Forest:
    return parse_term(text, alphabet, "forest")


def parse_context(text: str, alphabet=None) -> Context:
    return parse_term(text, alphabet, "context")


def _render_roots(roots) -> str:
    if not roots:
        return "0"
    return "+".join(_render_tree(t) for t in roots)


def _render_tree(t: Tree) -> str:
    if t.label == HOLE_LABEL:
        return HOLE_LABEL
    if t.children:
        return f"{t.label}({_render_roots(t.children)})"
    return t.label


def render_term(term: Sequence[Tree]) -> str:
    return _render_roots(term)


# ---------------------------------------------------------------------------
# substitution, composition, concatenation


def _substitute(roots: tuple, filling: tuple) -> tuple:
    out = []
    for t in roots:
        if t.label == HOLE_LABEL:
            out.extend(filling)
        elif hole_count(t.children):
            out.append(Tree(t.label, _substitute(t.children, filling)))
        else:
            out.append(t)
    return tuple(out)


def _require(term, cls, what):
    if not isinstance(term, cls):
        raise KindMismatch(f"{what} must be a {cls.kind}, got {type(term).__name__}")


def apply_context(p: Context, s: Forest) -> Forest:
    """The forest ``ps``: ``s`` spliced into the hole of ``p``."""
    _require(p, Context, "p")
    _require(s, Forest, "s")
    return Forest(_substitute(p, s))


def compose_contexts(q: Context, p: Context) -> Context:
    """The context ``qp``: the hole of ``q`` replaced by ``p``."""
    _require(q, Context, "q")
    _require(p, Context, "p")
    return Context(_substitute(q, p))


def concat_forests(s: Forest, t: Forest) -> Forest:
    _require(s, Forest, "s")
    _require(t, Forest, "t")
    return Forest(tuple(s) + tuple(t))


def concat(s: Term, t: Term) -> Term:
    """Horizontal concatenation of two terms with at most one hole between them."""
    return make_term(tuple(s) + tuple(t))


def power(p: Context, n: int) -> Context:
    out = IDENTITY
    for _ in range(n):
        out = compose_contexts(out, p)
    return out


def letter_context(label: str) -> Context:
    """The context ``a[]``: a single node whose only child is the hole."""
    return Context((Tree(label, (HOLE,)),))


# ---------------------------------------------------------------------------
# pieces


def immediate_pieces(roots: tuple) -> Iterator[tuple]:
    """All root tuples obtained by deleting one labelled node.

    The children of the deleted node are spliced into its place.
    """
    for i, t in enumerate(roots):
        if t.label == HOLE_LABEL:
            continue
        yield roots[:i] + t.children + roots[i + 1:]
        for smaller in immediate_pieces(t.children):
            yield roots[:i] + (Tree(t.label, smaller),) + roots[i + 1:]


@lru_cache(maxsize=65536)
def _deletion_closure(roots: tuple) -> frozenset:
    seen = {roots}
    queue = deque([roots])
    while queue:
        current = queue.popleft()
        for smaller in immediate_pieces(current):
            if smaller not in seen:
                seen.add(smaller)
                queue.append(smaller)
    return frozenset(seen)


def pieces_of(t: Term) -> set:
    """Every piece of ``t`` (the reflexive-transitive deletion closure)."""
    return {type(t)(r) for r in _deletion_closure(tuple(t))}


def is_piece_oracle(s: Term, t: Term) -> bool:
    """Ground-truth piece test by breadth-first node deletion."""
    if type(s) is not type(t):
        raise KindMismatch("pieces relate terms of the same kind")
    if node_count(s) > node_count(t):
        return False
    return tuple(s) in _deletion_closure(tuple(t))


@lru_cache(maxsize=262144)
def _included(f: tuple, g: tuple) -> bool:
    # Ordered inclusion: can g be reduced to f by deleting labelled nodes?
    if not f:
        return hole_count(g) == 0
    if not g:
        return False
    g1 = g[0]
    if g1.label == HOLE_LABEL:
        return f[0].label == HOLE_LABEL and _included(f[1:], g[1:])
    if _included(f, g1.children + g[1:]):
        return True
    f1 = f[0]
    return (
        f1.label == g1.label
        and _included(f1.children, g1.children)
        and _included(f[1:], g[1:])
    )


def is_piece_term(s: Term, t: Term) -> bool:
    """True iff ``s`` is obtained from ``t`` by deleting nodes (the hole stays).

    Uses a memoized ordered-inclusion recursion; the test suite checks it
    against :func:`is_piece_oracle` exhaustively on small terms.
    """
    if type(s) is not type(t):
        raise KindMismatch("pieces relate terms of the same kind")
    if node_count(s) > node_count(t):
        return False
    return _included(tuple(s), tuple(t))


# ---------------------------------------------------------------------------
# decompositions


def forest_splits(t: Forest) -> Iterator[tuple]:
    """All pairs ``(q, s)`` with ``apply_context(q, s) == t``."""
    _require(t, Forest, "t")

    def walk(roots):
        # yields (context roots, forest roots) for splits inside `roots`
        n = len(roots)
        for i in range(n + 1):
            for j in range(i, n + 1):
                yield roots[:i] + (HOLE,) + roots[j:], roots[i:j]
        for k, child in enumerate(roots):
            for q, s in walk(child.children):
                yield roots[:k] + (Tree(child.label, q),) + roots[k + 1:], s

    for q, s in walk(tuple(t)):
        yield Context(q), Forest(s)


def context_splits(p: Context) -> Iterator[tuple]:
    """All pairs ``(q, r)`` of contexts with ``compose_contexts(q, r) == p``."""
    _require(p, Context, "p")

    def walk(roots):
        c = next(i for i, t in enumerate(roots) if t.label == HOLE_LABEL or hole_count(t.children))
        n = len(roots)
        for i in range(c + 1):
            for j in range(c + 1, n + 1):
                yield roots[:i] + (HOLE,) + roots[j:], roots[i:j]
        inner = roots[c]
        if inner.label != HOLE_LABEL:
            for q, r in walk(inner.children):
                yield roots[:c] + (Tree(inner.label, q),) + roots[c + 1:], r

    for q, r in walk(tuple(p)):
        yield Context(q), Context(r)


def factorize_context(p: Context) -> list:
    """Write ``p`` as a product of generator contexts, outermost first.

    Factors are ``("letter", a)`` for ``a[]``, ``("left", t)`` for ``t+[]``
    and ``("right", t)`` for ``[]+t`` where ``t`` is a single tree.
    """
    _require(p, Context, "p")
    factors = []
    roots = tuple(p)
    while True:
        c = next(i for i, t in enumerate(roots) if t.label == HOLE_LABEL or hole_count(t.children))
        factors.extend(("left", t) for t in roots[:c])
        factors.extend(("right", t) for t in reversed(roots[c + 1:]))
        if roots[c].label == HOLE_LABEL:
            return factors
        factors.append(("letter", roots[c].label))
        roots = roots[c].children


def factor_context(factor) -> Context:
    kind, payload = factor
    if kind == "letter":
        return letter_context(payload)
    if kind == "left":
        return Context((payload, HOLE))
    if kind == "right":
        return Context((HOLE, payload))
    raise ValueError(f"unknown factor kind {kind!r}")


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=None)
def _trees(alphabet: tuple, n: int) -> tuple:
    if n < 1:
        return ()
    return tuple(Tree(a, f) for a in alphabet for f in _forests(alphabet, n - 1))


@lru_cache(maxsize=None)
def _forests(alphabet: tuple, n: int) -> tuple:
    if n == 0:
        return ((),)
    out = []
    for k in range(1, n + 1):
        rests = _forests(alphabet, n - k)
        for t in _trees(alphabet, k):
            out.extend((t,) + rest for rest in rests)
    return tuple(out)


@lru_cache(maxsize=None)
def _hole_trees(alphabet: tuple, n: int) -> tuple:
    if n == 0:
        return (HOLE,)
    return tuple(Tree(a, c) for a in alphabet for c in _contexts(alphabet, n - 1))


@lru_cache(maxsize=None)
def _contexts(alphabet: tuple, n: int) -> tuple:
    out = []
    for k in range(0, n + 1):
        rests = _forests(alphabet, n - k)
        for t in _hole_trees(alphabet, k):
            out.extend((t,) + rest for rest in rests)
    for k in range(1, n + 1):
        rests = _contexts(alphabet, n - k)
        for t in _trees(alphabet, k):
            out.extend((t,) + rest for rest in rests)
    return tuple(out)


@lru_cache(maxsize=None)
def terms_of_size(alphabet: tuple, n: int, kind: str) -> tuple:
    """All terms with exactly ``n`` labelled nodes as ``(text, roots)`` pairs, sorted by text."""
    raw = _forests(alphabet, n) if kind == "forest" else _contexts(alphabet, n)
    return tuple(sorted(((_render_roots(r), r) for r in raw), key=lambda p: text_key(p[0])))


def enumerate_terms(alphabet, max_nodes: int, kind: str = "forest") -> Iterator[Term]:
    """Every term with at most ``max_nodes`` nodes, exactly once.

    Ordered by node count, then by rendered text (see :func:`text_key`).
    """
    if kind not in ("forest", "context"):
        raise ValueError(f"unknown term kind {kind!r}")
    alphabet = tuple(sorted(set(alphabet)))
    cls = Forest if kind == "forest" else Context
    for n in range(max_nodes + 1):
        for _, roots in terms_of_size(alphabet, n, kind):
            yield cls(roots)
