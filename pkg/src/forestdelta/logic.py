"""First-order formulas over forests and Σ₂ forest/context expressions.

Formulas talk about nodes with label tests ``a(x)``, the strict ancestor
order ``x<y``, the lexicographic order ``x<lex y`` and equality.  Text
syntax, loosest binding first::

    E x ...   A x ...      quantifiers (the body extends as far right as possible)
    ->                     implication (right associative)
    |   &   !              or, and, not
    a(x)  x<y  x<=y  x<lex y  x=y  x!=y
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import ForeignNode, KindMismatch, NotPrenex, SizeLimitExceeded, TermSyntaxError, UnboundVariable
from .terms import (HOLE_LABEL, IDENTITY, Context, Forest, Tree, context_splits, enumerate_terms, forest_splits,
                    immediate_pieces, is_piece_term, render_term)

MAX_QUANTIFIERS = 6
MAX_ORACLE_NODES = 14


# ---------------------------------------------------------------------------
# syntax


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Label(Formula):
    label: str
    var: str


@dataclass(frozen=True)
class Less(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class LexLess(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Equal(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


def leq(x: str, y: str) -> Formula:
    return Or(Equal(x, y), Less(x, y))


def free_vars(phi: Formula) -> frozenset:
    if isinstance(phi, Label):
        return frozenset([phi.var])
    if isinstance(phi, (Less, LexLess, Equal)):
        return frozenset([phi.left, phi.right])
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or, Implies)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Exists, Forall)):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def quantifier_count(phi: Formula) -> int:
    if isinstance(phi, (Exists, Forall)):
        return 1 + quantifier_count(phi.body)
    if isinstance(phi, Not):
        return quantifier_count(phi.body)
    if isinstance(phi, (And, Or, Implies)):
        return quantifier_count(phi.left) + quantifier_count(phi.right)
    return 0


def render_formula(phi: Formula) -> str:
    if isinstance(phi, Label):
        return f"{phi.label}({phi.var})"
    if isinstance(phi, Less):
        return f"{phi.left}<{phi.right}"
    if isinstance(phi, LexLess):
        return f"{phi.left}<lex {phi.right}"
    if isinstance(phi, Equal):
        return f"{phi.left}={phi.right}"
    if isinstance(phi, Not):
        return f"!{_wrap(phi.body)}"
    if isinstance(phi, And):
        return f"{_wrap(phi.left)} & {_wrap(phi.right)}"
    if isinstance(phi, Or):
        return f"{_wrap(phi.left)} | {_wrap(phi.right)}"
    if isinstance(phi, Implies):
        return f"{_wrap(phi.left)} -> {_wrap(phi.right)}"
    q = "E" if isinstance(phi, Exists) else "A"
    body = phi.body
    return f"{q} {phi.var} {render_formula(body) if isinstance(body, (Exists, Forall)) else _wrap(body)}"


def _wrap(phi: Formula) -> str:
    text = render_formula(phi)
    return text if isinstance(phi, (Label, Less, LexLess, Equal, Not)) else f"({text})"


_TOKEN = re.compile(r"\s*(->|<=|<lex\b|!=|[()&|!<=.,]|[A-Za-z_][A-Za-z0-9_]*)")


def _tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError("unexpected character", text, pos)
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


class _FormulaParser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j][0] if j < len(self.toks) else None

    def error(self, message):
        pos = self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)
        raise TermSyntaxError(message, self.text, pos)

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            self.error(f"expected {expected or 'a token'}")
        self.i += 1
        return tok

    def is_var(self, tok) -> bool:
        return tok is not None and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok) is not None

    def parse(self) -> Formula:
        phi = self.implication()
        if self.peek() is not None:
            self.error("trailing input")
        return phi

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        phi = self.conjunction()
        while self.peek() == "|":
            self.take()
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self) -> Formula:
        phi = self.unary()
        while self.peek() == "&":
            self.take()
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            phi = self.implication()
            self.take(")")
            return phi
        if tok in ("E", "A") and self.is_var(self.peek(1)):
            return self.quantifier()
        return self.atom()

    def quantifier(self) -> Formula:
        kind = Exists if self.take() == "E" else Forall
        names = [self.take()]
        while self.peek() == ",":
            self.take()
            names.append(self.take())
        if self.peek() == ".":
            self.take()
        body = self.implication()
        for name in reversed(names):
            body = kind(name, body)
        return body

    def atom(self) -> Formula:
        first = self.take()
        if not self.is_var(first):
            self.i -= 1
            self.error("expected an atom")
        if self.peek() == "(":
            self.take()
            var = self.take()
            self.take(")")
            return Label(first, var)
        op = self.take()
        second = self.take()
        if not self.is_var(second):
            self.i -= 1
            self.error("expected a variable")
        if op == "<":
            return Less(first, second)
        if op == "<lex":
            return LexLess(first, second)
        if op == "=":
            return Equal(first, second)
        if op == "<=":
            return leq(first, second)
        if op == "!=":
            return Not(Equal(first, second))
        self.i -= 2
        self.error(f"unknown relation {op!r}")


def parse_formula(text: str) -> Formula:
    return _FormulaParser(text).parse()


# ---------------------------------------------------------------------------
# evaluation


class NodeStructure:
    """Nodes of a forest or context as paths of child indices, with the order relations precomputed."""

    def __init__(self, term):
        self.nodes = []
        self.labels = {}
        self._walk(tuple(term), ())
        self.index = {p: i for i, p in enumerate(self.nodes)}
        n = len(self.nodes)
        self.less = [[False] * n for _ in range(n)]
        self.lex = [[False] * n for _ in range(n)]
        for i, x in enumerate(self.nodes):
            for j, y in enumerate(self.nodes):
                self.less[i][j] = len(x) < len(y) and y[:len(x)] == x
        for i, x in enumerate(self.nodes):
            for j, y in enumerate(self.nodes):
                self.lex[i][j] = self.less[i][j] or self._left_sibling_above(x, y)

    def _walk(self, roots, prefix):
        for k, t in enumerate(roots):
            path = prefix + (k,)
            self.nodes.append(path)
            self.labels[path] = None if t.label == HOLE_LABEL else t.label
            self._walk(t.children, path)

    @staticmethod
    def _left_sibling_above(x, y) -> bool:
        # some x' <= x and y' <= y are siblings (roots count as siblings) with x' left of y'
        for i in range(1, len(x) + 1):
            for j in range(1, len(y) + 1):
                xs, ys = x[:i], y[:j]
                if xs[:-1] == ys[:-1] and xs[-1] < ys[-1]:
                    return True
        return False

    def hole(self):
        for p, lab in self.labels.items():
            if lab is None:
                return p
        return None


def _eval(phi: Formula, st: NodeStructure, env: dict) -> bool:
    if isinstance(phi, Label):
        return st.labels[st.nodes[env[phi.var]]] == phi.label
    if isinstance(phi, Less):
        return st.less[env[phi.left]][env[phi.right]]
    if isinstance(phi, LexLess):
        return st.lex[env[phi.left]][env[phi.right]]
    if isinstance(phi, Equal):
        return env[phi.left] == env[phi.right]
    if isinstance(phi, Not):
        return not _eval(phi.body, st, env)
    if isinstance(phi, And):
        return _eval(phi.left, st, env) and _eval(phi.right, st, env)
    if isinstance(phi, Or):
        return _eval(phi.left, st, env) or _eval(phi.right, st, env)
    if isinstance(phi, Implies):
        return (not _eval(phi.left, st, env)) or _eval(phi.right, st, env)
    saved = env.get(phi.var)
    want = isinstance(phi, Exists)
    result = not want
    for i in range(len(st.nodes)):
        env[phi.var] = i
        if _eval(phi.body, st, env) == want:
            result = want
            break
    if saved is None:
        env.pop(phi.var, None)
    else:
        env[phi.var] = saved
    return result


def eval_formula(phi: Formula, t, assignment: Optional[dict] = None) -> bool:
    """Truth of ``phi`` in the forest (or context) ``t``; ``assignment`` maps free variables to node paths.

    Quantifiers range over all nodes, so over the empty forest every ``E``
    is false and every ``A`` is true.
    """
    st = t if isinstance(t, NodeStructure) else NodeStructure(t)
    assignment = dict(assignment or {})
    missing = free_vars(phi) - set(assignment)
    if missing:
        raise UnboundVariable(f"free variables without a value: {sorted(missing)}")
    env = {}
    for var, node in assignment.items():
        node = tuple(node)
        if node not in st.index:
            raise ForeignNode(f"{var} is mapped to {node}, which is not a node of the term")
        env[var] = st.index[node]
    return _eval(phi, st, env)


def eval_context_formula(phi: Formula, p: Context, hole_var: str) -> bool:
    """Truth of ``phi`` in a context, with ``hole_var`` mapped to the hole."""
    st = NodeStructure(p)
    return eval_formula(phi, st, {hole_var: st.hole()})


# ---------------------------------------------------------------------------
# prefix classification


def quantifier_prefix(phi: Formula) -> tuple:
    """``(prefix, matrix)`` where prefix is a string over ``E``/``A``."""
    prefix = []
    while isinstance(phi, (Exists, Forall)):
        prefix.append("E" if isinstance(phi, Exists) else "A")
        phi = phi.body
    if quantifier_count(phi):
        raise NotPrenex("a quantifier occurs below the prefix")
    return "".join(prefix), phi


def classify_prenex(phi: Formula) -> str:
    """``Sigma0``, ``Sigma1``, ``Pi1``, ``Sigma2``, ``Pi2`` or ``higher``, by alternation blocks."""
    prefix, _ = quantifier_prefix(phi)
    if not prefix:
        return "Sigma0"
    blocks = 1 + sum(1 for a, b in zip(prefix, prefix[1:]) if a != b)
    if blocks > 2:
        return "higher"
    return ("Sigma" if prefix[0] == "E" else "Pi") + str(blocks)


def negate_prenex(phi: Formula) -> Formula:
    """The prenex form of ``!phi``: quantifiers swapped, matrix negated."""
    if isinstance(phi, Exists):
        return Forall(phi.var, negate_prenex(phi.body))
    if isinstance(phi, Forall):
        return Exists(phi.var, negate_prenex(phi.body))
    if quantifier_count(phi):
        raise NotPrenex("a quantifier occurs below the prefix")
    return Not(phi)


# ---------------------------------------------------------------------------
# comparing a formula with a recognized language


def formula_language_equal(phi: Formula, alg, morph, accepting, max_nodes: int):
    """``(True, None)`` if ``phi`` and the language agree on all forests up to ``max_nodes``,
    else ``(False, first differing forest)``."""
    from .syntactic import member

    if free_vars(phi):
        raise UnboundVariable(f"formula has free variables {sorted(free_vars(phi))}")
    if quantifier_count(phi) > MAX_QUANTIFIERS or max_nodes > MAX_ORACLE_NODES:
        raise SizeLimitExceeded(f"oracle limited to {MAX_QUANTIFIERS} quantifiers and {MAX_ORACLE_NODES} nodes")
    for t in enumerate_terms(morph.alphabet, max_nodes, "forest"):
        if eval_formula(phi, t) != member(alg, morph, accepting, t):
            return False, t
    return True, None


# ---------------------------------------------------------------------------
# Σ₂ expressions


class Sigma2Expr:
    kind = "forest"

    def __or__(self, other):
        return Union(self, other)

    def __and__(self, other):
        return Intersect(self, other)


@dataclass(frozen=True)
class PieceClosed(Sigma2Expr):
    """Terms having none of ``forbidden`` as a piece; closed under pieces by construction."""

    forbidden: tuple
    kind: str = "forest"

    def __post_init__(self):
        cls = Forest if self.kind == "forest" else Context
        for f in self.forbidden:
            if not isinstance(f, cls):
                raise KindMismatch(f"forbidden piece {render_term(f)} is not a {self.kind}")


@dataclass(frozen=True)
class LetterContext(Sigma2Expr):
    label: str
    kind: str = "context"


@dataclass(frozen=True)
class HoleContext(Sigma2Expr):
    kind: str = "context"


def _require_kind(e: Sigma2Expr, kind: str, what: str):
    if e.kind != kind:
        raise KindMismatch(f"{what} needs a {kind} expression, got a {e.kind} expression")


@dataclass(frozen=True)
class Compose(Sigma2Expr):
    outer: Sigma2Expr
    inner: Sigma2Expr
    kind: str = "context"

    def __post_init__(self):
        _require_kind(self.outer, "context", "composition")
        _require_kind(self.inner, "context", "composition")


@dataclass(frozen=True)
class Concat(Sigma2Expr):
    left: Sigma2Expr
    right: Sigma2Expr
    kind: str = "forest"

    def __post_init__(self):
        _require_kind(self.left, "forest", "concatenation")
        _require_kind(self.right, "forest", "concatenation")


@dataclass(frozen=True)
class Apply(Sigma2Expr):
    context: Sigma2Expr
    forest: Sigma2Expr
    kind: str = "forest"

    def __post_init__(self):
        _require_kind(self.context, "context", "application")
        _require_kind(self.forest, "forest", "application")


@dataclass(frozen=True)
class Union(Sigma2Expr):
    left: Sigma2Expr
    right: Sigma2Expr

    def __post_init__(self):
        _require_kind(self.right, self.left.kind, "union")

    @property
    def kind(self):
        return self.left.kind


@dataclass(frozen=True)
class Intersect(Sigma2Expr):
    left: Sigma2Expr
    right: Sigma2Expr

    def __post_init__(self):
        _require_kind(self.right, self.left.kind, "intersection")

    @property
    def kind(self):
        return self.left.kind


ALL_FORESTS = PieceClosed(())
ALL_CONTEXTS = PieceClosed((), "context")


def expr_member(e: Sigma2Expr, t) -> bool:
    """Membership by search over all decompositions of ``t``, memoized per call."""
    want = Forest if e.kind == "forest" else Context
    if not isinstance(t, want):
        raise KindMismatch(f"{e.kind} expression applied to a {type(t).__name__.lower()}")

    @lru_cache(maxsize=None)
    def mem(e, t) -> bool:
        if isinstance(e, PieceClosed):
            return not any(is_piece_term(f, t) for f in e.forbidden)
        if isinstance(e, LetterContext):
            return t == Context((Tree(e.label, (Tree(HOLE_LABEL),)),))
        if isinstance(e, HoleContext):
            return t == IDENTITY
        if isinstance(e, Union):
            return mem(e.left, t) or mem(e.right, t)
        if isinstance(e, Intersect):
            return mem(e.left, t) and mem(e.right, t)
        if isinstance(e, Concat):
            return any(mem(e.left, Forest(t[:i])) and mem(e.right, Forest(t[i:])) for i in range(len(t) + 1))
        if isinstance(e, Apply):
            return any(mem(e.context, q) and mem(e.forest, s) for q, s in forest_splits(t))
        if isinstance(e, Compose):
            return any(mem(e.outer, q) and mem(e.inner, r) for q, r in context_splits(t))
        raise TypeError(f"unknown expression node {e!r}")

    return mem(e, t)


def validate_piece_closed(e: PieceClosed, alphabet, max_nodes: int = 5):
    """Check on all terms up to ``max_nodes`` that members only have member pieces.

    Returns ``(True, None)`` or ``(False, (piece, term))``.
    """
    cls = Forest if e.kind == "forest" else Context
    for t in enumerate_terms(alphabet, max_nodes, e.kind):
        if not expr_member(e, t):
            continue
        for s in immediate_pieces(tuple(t)):
            if not expr_member(e, cls(s)):
                return False, (cls(s), t)
    return True, None
