"""Word-level machinery: Green's relations, the DA identity and Σ₂ word expressions.

An expression is a finite union of blocks ``A0* B1 A1* ... Bi Ai*`` where
every ``Aj`` and ``Bj`` is a set of letters.  Letters are arbitrary hashable
values; a morphism ``beta`` sends each letter to a monoid element.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Hashable, Mapping, NamedTuple, Optional, Sequence

from .algebra import FiniteMonoid, ForestAlgebra, Morphism, eval_tree, omega_power
from .errors import IdentityFails, NotDA, NotStratified, UnknownLetter


# ---------------------------------------------------------------------------
# Green's relations and DA


def _classes(elements, key) -> list:
    groups = {}
    for x in elements:
        groups.setdefault(key(x), []).append(x)
    return sorted(groups.values())


def right_ideal(mon: FiniteMonoid, m: int) -> frozenset:
    return frozenset(mon.table[m][k] for k in mon.elements)


def left_ideal(mon: FiniteMonoid, m: int) -> frozenset:
    return frozenset(mon.table[k][m] for k in mon.elements)


def green_classes(mon: FiniteMonoid) -> tuple:
    """``(R-classes, L-classes)``, each a sorted list of sorted element lists."""
    return (_classes(mon.elements, lambda m: right_ideal(mon, m)),
            _classes(mon.elements, lambda m: left_ideal(mon, m)))


def r_equivalent(mon: FiniteMonoid, m: int, n: int) -> bool:
    return right_ideal(mon, m) == right_ideal(mon, n)


def l_equivalent(mon: FiniteMonoid, m: int, n: int) -> bool:
    return left_ideal(mon, m) == left_ideal(mon, n)


@dataclass(frozen=True)
class DAResult:
    holds: bool
    witness: Optional[tuple] = None

    @property
    def answer(self) -> str:
        return "yes" if self.holds else "no"


def check_da(mon: FiniteMonoid) -> DAResult:
    """Check ``(mn)^ω m (mn)^ω = (mn)^ω``; the first failing ``(m, n)`` is the witness."""
    t = mon.table
    for m in mon.elements:
        for n in mon.elements:
            e = omega_power(mon, t[m][n])
            if t[t[e][m]][e] != e:
                return DAResult(False, (m, n))
    return DAResult(True)


def reversed_monoid(mon: FiniteMonoid) -> FiniteMonoid:
    t = mon.table
    return FiniteMonoid(mon.names, tuple(tuple(t[y][x] for y in mon.elements) for x in mon.elements),
                        mon.identity)


# ---------------------------------------------------------------------------
# stratified monoids


@dataclass(frozen=True, eq=False)
class StratifiedMonoid:
    """A monoid with a pre-order, stored as pairs ``(n, m)`` meaning ``n ⪯ m``."""

    mon: FiniteMonoid
    pre: frozenset

    def __post_init__(self):
        els = self.mon.elements
        for m in els:
            if (m, m) not in self.pre:
                raise NotStratified(f"pre-order is not reflexive at {self.mon.names[m]}")
        below = {m: {n for n, x in self.pre if x == m} for m in els}
        for n, m in self.pre:
            if not below[n] <= below[m]:
                raise NotStratified("pre-order is not transitive")
        t = self.mon.table
        for n, m in sorted(self.pre):
            e = omega_power(self.mon, m)
            if t[t[e][n]][e] != e:
                raise NotStratified(f"m^ω n m^ω != m^ω for n={self.mon.names[n]}, m={self.mon.names[m]}")

    @classmethod
    def closure_of(cls, mon: FiniteMonoid, pairs=()) -> "StratifiedMonoid":
        """Stratified monoid under the reflexive-transitive closure of ``pairs``."""
        rel = {(m, m) for m in mon.elements} | set(pairs)
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        return cls(mon, frozenset(rel))

    @classmethod
    def trivial(cls, mon: FiniteMonoid) -> "StratifiedMonoid":
        return cls.closure_of(mon)

    def leq(self, n: int, m: int) -> bool:
        return (n, m) in self.pre

    def reversed(self) -> "StratifiedMonoid":
        return StratifiedMonoid(reversed_monoid(self.mon), self.pre)


# ---------------------------------------------------------------------------
# expressions


class Block(NamedTuple):
    """``stars[0]* markers[0] stars[1]* ... markers[-1] stars[-1]*``."""

    stars: tuple
    markers: tuple

    def reversed(self) -> "Block":
        return Block(self.stars[::-1], self.markers[::-1])


def _sorted_letters(s) -> list:
    return sorted(s, key=repr)


def _block_key(b: Block):
    return (len(b.markers), [_sorted_letters(x) for x in b.stars], [_sorted_letters(x) for x in b.markers])


def _step(b: Block, states: frozenset, c) -> frozenset:
    out = set()
    last = len(b.markers)
    for p in states:
        if c in b.stars[p]:
            out.add(p)
        if p < last and c in b.markers[p]:
            out.add(p + 1)
    return frozenset(out)


def _included(x: Block, y: Block) -> bool:
    """Is the language of block ``x`` inside that of block ``y``?  Subset construction on ``y``."""
    end_x, end_y = len(x.markers), len(y.markers)
    start = (0, frozenset([0]))
    seen = {start}
    stack = [start]
    while stack:
        p, S = stack.pop()
        if p == end_x and end_y not in S:
            return False
        moves = [(p, c) for c in x.stars[p]]
        if p < end_x:
            moves += [(p + 1, c) for c in x.markers[p]]
        for q, c in moves:
            nxt = (q, _step(y, S, c))
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def _merge_pair(x: Block, y: Block) -> Optional[Block]:
    """A single block equal to ``x ∪ y``, for two easy shapes; otherwise ``None``."""
    if len(x.markers) == len(y.markers):
        if x.stars != y.stars:
            return None
        diff = [j for j, (b, c) in enumerate(zip(x.markers, y.markers)) if b != c]
        if len(diff) != 1:
            return None
        j = diff[0]
        return Block(x.stars, x.markers[:j] + (x.markers[j] | y.markers[j],) + x.markers[j + 1:])
    if len(x.markers) > len(y.markers):
        x, y = y, x
    if len(y.markers) != len(x.markers) + 1:
        return None
    for j in range(len(y.markers)):
        if y.markers[:j] + y.markers[j + 1:] != x.markers:
            continue
        B, P = y.markers[j], x.stars[j]
        if y.stars[:j] != x.stars[:j] or y.stars[j + 2:] != x.stars[j + 1:]:
            continue
        Q = P | B
        # P* ∪ P* B Q* = Q*  and  Q* B P* ∪ P* = Q*
        if (y.stars[j], y.stars[j + 1]) in ((P, Q), (Q, P)):
            return Block(x.stars[:j] + (Q,) + x.stars[j + 1:], x.markers)
    return None


def _normalize(blocks) -> tuple:
    """Drop empty and redundant blocks, merge what can be merged, and order canonically."""
    work = {b for b in blocks if all(b.markers)}
    changed = True
    while changed:
        changed = False
        uniq = sorted(work, key=lambda b: repr(_block_key(b)))
        for i, b in enumerate(uniq):
            for c in uniq[i + 1:]:
                m = _merge_pair(b, c)
                if m is not None:
                    work -= {b, c}
                    work.add(m)
                    changed = True
                    break
            if changed:
                break
    uniq = sorted(work, key=lambda b: repr(_block_key(b)))
    keep = []
    for i, b in enumerate(uniq):
        if any(j != i and _included(b, c) and (j < i or not _included(c, b)) for j, c in enumerate(uniq)):
            continue
        keep.append(b)
    return tuple(keep)


def _split_markers(blocks, classes) -> tuple:
    """Rewrite every marker as a single class of letters with one image."""
    out = []
    for b in blocks:
        options = [[m & c for c in classes if m & c] for m in b.markers]
        for choice in product(*options):
            out.append(Block(b.stars, tuple(choice)))
    return tuple(sorted(set(out), key=lambda b: repr(_block_key(b))))


@dataclass(frozen=True)
class WordExpr:
    alphabet: frozenset
    blocks: tuple

    def to_json(self, show=str) -> list:
        return [{"stars": [sorted(map(show, s)) for s in b.stars],
                 "markers": [sorted(map(show, m)) for m in b.markers]} for b in self.blocks]

    def render(self, show=str) -> str:
        if not self.blocks:
            return "{}"
        parts = []
        for b in self.blocks:
            items = ["{" + ",".join(sorted(map(show, b.stars[0]))) + "}*"]
            for m, s in zip(b.markers, b.stars[1:]):
                items.append("{" + ",".join(sorted(map(show, m))) + "}")
                items.append("{" + ",".join(sorted(map(show, s))) + "}*")
            parts.append(" ".join(items))
        return " | ".join(parts)


def _star(S) -> list:
    return [Block((frozenset(S),), ())]


def _letter_block(B) -> list:
    return [Block((frozenset(), frozenset()), (frozenset(B),))]


def _concat_blocks(x: Block, y: Block, classes) -> list:
    last, first = x.stars[-1], y.stars[0]
    if last >= first or last <= first:
        return [Block(x.stars[:-1] + (last | first,) + y.stars[1:], x.markers + y.markers)]
    # last* first* = last*  ∪  last* b first*  for each class b inside first \ last
    out = [Block(x.stars[:-1] + (last,) + y.stars[1:], x.markers + y.markers)]
    rest = first - last
    for cls in classes:
        b = cls & rest
        if b:
            out.append(Block(x.stars + y.stars, x.markers + (b,) + y.markers))
    return out


def concat(X: Sequence[Block], Y: Sequence[Block], classes) -> list:
    return [b for x in X for y in Y for b in _concat_blocks(x, y, classes)]


def _intersect_blocks(x: Block, y: Block) -> list:
    i, j = len(x.markers), len(y.markers)
    out = []

    def walk(p, q, stars, markers):
        stars = stars + (x.stars[p] & y.stars[q],)
        if p == i and q == j:
            out.append(Block(stars, markers))
            return
        if p < i:
            walk(p + 1, q, stars, markers + (x.markers[p] & y.stars[q],))
        if q < j:
            walk(p, q + 1, stars, markers + (x.stars[p] & y.markers[q],))
        if p < i and q < j:
            walk(p + 1, q + 1, stars, markers + (x.markers[p] & y.markers[q],))

    walk(0, 0, (), ())
    return [b for b in out if all(b.markers)]


def intersect(X: Sequence[Block], Y: Sequence[Block]) -> list:
    return [b for x in X for y in Y for b in _intersect_blocks(x, y)]


def word_expr_member(e: WordExpr, word: Sequence[Hashable]) -> bool:
    """Membership of a letter sequence, by simulating each block as a small automaton."""
    for c in word:
        if c not in e.alphabet:
            raise UnknownLetter(f"letter {c!r} is not in the expression's alphabet")
    for b in e.blocks:
        states = frozenset([0])
        for c in word:
            states = _step(b, states, c)
            if not states:
                break
        if len(b.markers) in states:
            return True
    return False


# ---------------------------------------------------------------------------
# synthesis


class _Synth:
    """Memoized construction for one morphism into one stratified monoid."""

    def __init__(self, beta: Mapping, mon: FiniteMonoid):
        self.beta = dict(beta)
        self.mon = mon
        self.t = mon.table
        self.r_ideal = [right_ideal(mon, m) for m in mon.elements]
        self.memo = {}
        self.v_memo = {}
        self.active = set()

    def rsim(self, m, n) -> bool:
        return self.r_ideal[m] == self.r_ideal[n]

    def classes(self, letters) -> list:
        groups = {}
        for a in letters:
            groups.setdefault(self.beta[a], set()).add(a)
        return [frozenset(groups[k]) for k in sorted(groups)]

    def stable_letters(self, letters, m) -> frozenset:
        return frozenset(a for a in letters if self.rsim(self.t[m][self.beta[a]], m))

    def prefix_part(self, letters: frozenset, m: int) -> list:
        """Words over ``letters`` of value ``m`` whose proper prefixes are not R-equivalent to ``m``."""
        key = (letters, m)
        if key in self.v_memo:
            return self.v_memo[key]
        out = _star(()) if m == self.mon.identity else []
        classes = self.classes(letters)
        for k in self.mon.elements:
            if self.rsim(k, m):
                continue
            for cls in classes:
                if self.t[k][self.beta[next(iter(cls))]] != m:
                    continue
                for n in self.mon.elements:
                    if not self.rsim(n, k):
                        continue
                    head = self.prefix_part(letters, n)
                    if not head:
                        continue
                    middle = self.between(letters, n, k)
                    if not middle:
                        continue
                    out += concat(concat(head, _normalize(middle), classes), _letter_block(cls), classes)
        out = list(_normalize(out))
        self.v_memo[key] = out
        return out

    def between(self, letters: frozenset, n: int, k: int) -> list:
        """Words ``w`` over ``letters`` with ``n * beta(w) = k``, for ``n`` R-equivalent to ``k``."""
        sub = self.stable_letters(letters, n)
        assert sub < letters, "alphabet must shrink"
        out = []
        for x in self.mon.elements:
            if self.t[n][x] == k:
                out += self.exact(sub, x)
        return out

    def r_side(self, letters: frozenset, m: int) -> list:
        classes = self.classes(letters)
        tail = _star(self.stable_letters(letters, m))
        out = []
        for n in self.mon.elements:
            if self.rsim(n, m):
                out += concat(self.prefix_part(letters, n), tail, classes)
        return list(_normalize(out))

    def exact(self, letters: frozenset, m: int) -> list:
        key = (letters, m)
        if key in self.memo:
            return self.memo[key]
        if key in self.active:
            raise AssertionError(f"synthesis recursion cycled at {key}")
        self.active.add(key)
        right = self.r_side(letters, m)
        left = [b.reversed() for b in self.dual.r_side(letters, m)] if right else []
        out = list(_normalize(intersect(right, left)))
        self.active.discard(key)
        self.memo[key] = out
        return out


def _downward_closed(letters: frozenset, beta: Mapping, strat: StratifiedMonoid, alphabet) -> bool:
    images = {beta[a] for a in letters}
    return all(a in letters for a in alphabet if any(strat.leq(beta[a], m) for m in images))


def synth_sigma2_word(beta: Mapping, strat: StratifiedMonoid, target: int) -> WordExpr:
    """Σ₂ word expression for the words ``w`` with ``beta(w) = target``.

    The words reaching the R-class of ``target`` are split at their shortest
    prefix already in that class, the tail staying in a star of stable
    letters; prefixes are built by recursion on the R-order and on smaller
    alphabets.  The same is done on the L side (through the reversed
    monoid), and the two are intersected, which is exact since R- and
    L-equivalence together are equality in DA.
    """
    mon = strat.mon
    da = check_da(mon)
    if not da.holds:
        raise NotDA(tuple(mon.names[x] for x in da.witness))
    alphabet = frozenset(beta)
    right = _Synth(beta, mon)
    left = _Synth(beta, reversed_monoid(mon))
    right.dual, left.dual = left, right
    blocks = _split_markers(_normalize(right.exact(alphabet, target)), right.classes(alphabet))
    for b in blocks:
        for s in b.stars:
            assert _downward_closed(s, beta, strat, alphabet), f"star set {sorted(map(str, s))} is not downward closed"
    return WordExpr(alphabet, blocks)


def eval_word(beta: Mapping, mon: FiniteMonoid, word) -> int:
    return mon.product(*(beta[c] for c in word))


# ---------------------------------------------------------------------------
# contexts as words over generators


def generator_alphabet(alg: ForestAlgebra, morph: Morphism) -> dict:
    """Generator letters and their context types: letters ``a[]`` and insertions ``h+[]``, ``[]+h``."""
    beta = {("letter", a): morph.letter_image[a] for a in morph.alphabet}
    for h in alg.H.elements:
        beta[("ins_left", h)] = alg.ins_left[h]
        beta[("ins_right", h)] = alg.ins_right[h]
    return beta


def show_generator(alg: ForestAlgebra):
    def show(g):
        kind, x = g
        if kind == "letter":
            return f"{x}([])"
        name = alg.h_name(x)
        return f"{name}+[]" if kind == "ins_left" else f"[]+{name}"
    return show


def context_word(morph: Morphism, p) -> list:
    """Factor sequence of a context over the generator alphabet."""
    from .terms import factorize_context

    out = []
    for kind, x in factorize_context(p):
        if kind == "letter":
            out.append(("letter", x))
        else:
            out.append(("ins_left" if kind == "left" else "ins_right", eval_tree(morph, x)))
    return out


@dataclass(frozen=True)
class ContextDecomposition:
    v: int
    expr: WordExpr
    morph: Morphism

    def matches(self, p) -> bool:
        return word_expr_member(self.expr, context_word(self.morph, p))


def decompose_context_types(alg: ForestAlgebra, morph: Morphism, rel, v: int) -> ContextDecomposition:
    """Expression over generator letters matching exactly the factorizations of contexts of type ``v``.

    Requires the algebra to pass the identity for its piece relation; the
    context monoid is then stratified by the pieces.
    """
    from .decide import identity_violations

    bad = next(identity_violations(alg, rel), None)
    if bad is not None:
        raise IdentityFails(f"identity fails at {tuple(alg.v_name(x) for x in bad)}")
    try:
        strat = StratifiedMonoid.closure_of(alg.V, rel.pv)
    except NotStratified as exc:
        raise IdentityFails(str(exc)) from None
    beta = generator_alphabet(alg, morph)
    return ContextDecomposition(v, synth_sigma2_word(beta, strat, v), morph)


def words_up_to(alphabet, length: int):
    letters = sorted(alphabet, key=repr)
    for n in range(length + 1):
        yield from product(letters, repeat=n)
