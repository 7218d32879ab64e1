"""The piece relation on forest and context types, and shortest realizing terms."""
from __future__ import annotations

import heapq
import logging
from itertools import count
from dataclasses import dataclass, field
from typing import Optional

from .algebra import ForestAlgebra, Morphism
from .errors import ElementUnrealized
from .terms import (HOLE, Context, Forest, Tree, apply_context, compose_contexts, node_count, render_term,
                    text_key)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PieceRelation:
    """Pairs ``(w, v)`` meaning "w is a piece of v", on V and on H."""

    pv: frozenset
    ph: frozenset
    rounds: int = 0
    history: tuple = ()
    transitive: bool = False

    def v_piece(self, w: int, v: int) -> bool:
        return (w, v) in self.pv

    def h_piece(self, g: int, h: int) -> bool:
        return (g, h) in self.ph

    def v_pieces_of(self, v: int) -> list:
        return sorted(w for w, x in self.pv if x == v)

    def h_pieces_of(self, h: int) -> list:
        return sorted(g for g, x in self.ph if x == h)


def _transitive_closure(pairs: set) -> set:
    out = set(pairs)
    changed = True
    while changed:
        changed = False
        succ = {}
        for a, b in out:
            succ.setdefault(a, set()).add(b)
        for a, b in list(out):
            for c in succ.get(b, ()):
                if (a, c) not in out:
                    out.add((a, c))
                    changed = True
    return out


def compute_pieces(alg: ForestAlgebra, morph: Morphism, transitive: bool = False) -> PieceRelation:
    """Least relation containing the generator pairs and closed under composition.

    Generator pairs: ``(a, a)`` and ``([], a)`` for each letter image, and the
    insertions ``(g+[], h+[])``, ``([]+g, []+h)`` for each forest pair
    ``(g, h)``.  Forest pairs are the projections ``(w0, v0)`` of context
    pairs.  With ``transitive`` the relation is also closed transitively.
    """
    vt, act, zero = alg.V.table, alg.act, alg.zero
    base = []
    for a in morph.alphabet:
        va = morph.letter_image[a]
        base += [(va, va), (alg.box, va)]
    pv = {(alg.box, alg.box)}
    ph: set = set()
    rounds = 0
    history = []
    bound = len(alg.V) ** 2 + len(alg.H) ** 2 + 1
    while True:
        rounds += 1
        ph_now = {(act[w][zero], act[v][zero]) for w, v in pv}
        gens = list(base)
        for g, h in sorted(ph_now):
            gens.append((alg.ins_left[g], alg.ins_left[h]))
            gens.append((alg.ins_right[g], alg.ins_right[h]))
        closed = set(pv)
        queue = list(closed)
        for gen in gens:
            if gen not in closed:
                closed.add(gen)
                queue.append(gen)
        while queue:
            w, v = queue.pop()
            for gw, gv in gens:
                y = (vt[w][gw], vt[v][gv])
                if y not in closed:
                    closed.add(y)
                    queue.append(y)
        if transitive:
            closed = _transitive_closure(closed)
        assert closed >= pv, "fixpoint iteration must be monotone"
        history.append((len(closed), len(ph_now)))
        if closed == pv and ph_now == ph:
            break
        pv, ph = closed, ph_now
        assert rounds <= bound, "piece fixpoint exceeded its round bound"
    log.debug("piece fixpoint stable after %d rounds: %s", rounds, history)
    ph = {(act[w][zero], act[v][zero]) for w, v in pv}
    return PieceRelation(frozenset(pv), frozenset(ph), rounds, tuple(history), transitive)


def is_downward_closed(rel: PieceRelation, X, kind: str = "forest"):
    """``(True, None)`` if every piece of a member of ``X`` is in ``X``, else ``(False, (g, h))``."""
    X = set(X)
    pairs = rel.ph if kind == "forest" else rel.pv
    for g, h in sorted(pairs, key=lambda p: (p[1], p[0])):
        if h in X and g not in X:
            return False, (g, h)
    return True, None


# ---------------------------------------------------------------------------
# shortest witnesses


@dataclass
class WitnessTable:
    """Lex-least term among the smallest ones, for every realized type.

    Entries are ``(size, text, term)``.
    """

    forests: dict = field(default_factory=dict)
    contexts: dict = field(default_factory=dict)
    max_nodes: Optional[int] = None

    def forest(self, h: int) -> Forest:
        try:
            return self.forests[h][2]
        except KeyError:
            raise ElementUnrealized(f"no forest of type {h} within the search bound") from None

    def context(self, v: int) -> Context:
        try:
            return self.contexts[v][2]
        except KeyError:
            raise ElementUnrealized(f"no context of type {v} within the search bound") from None

    def size(self, x: int, kind: str = "context") -> int:
        table = self.contexts if kind == "context" else self.forests
        if x not in table:
            raise ElementUnrealized(f"no {kind} of type {x} within the search bound")
        return table[x][0]

    def ordered(self, kind: str) -> list:
        """Types in order of their witnesses (size, then text)."""
        table = self.contexts if kind == "context" else self.forests
        return sorted(table, key=lambda x: (table[x][0], text_key(table[x][1])))


def _keep_min(level: dict, typ: int, text: str, roots: tuple):
    old = level.get(typ)
    if old is None or text_key(text) < text_key(old[0]):
        level[typ] = (text, roots)


def build_witness_table(alg: ForestAlgebra, morph: Morphism, max_nodes: Optional[int] = None,
                        level_cap: int = 64) -> WitnessTable:
    """Shortest realizing terms by dynamic programming over term size.

    For each size and type the least text (under :func:`text_key`) is kept;
    since tree texts of a fixed size are prefix-free, least composites are
    built from least parts.  The result agrees with taking the first term of
    each type in :func:`enumerate_terms` order.  Stops once every element is realized or at ``max_nodes``.
    """
    act, vt, plus = alg.act, alg.V.table, alg.H.table
    letters = sorted(morph.alphabet)
    F = [{alg.zero: ("0", ())}]
    T = [{}]
    CT = [{alg.box: ("[]", (HOLE,))}]
    C = [{alg.box: ("[]", (HOLE,))}]
    table = WitnessTable(max_nodes=max_nodes)
    table.forests[alg.zero] = (0, "0", Forest())
    table.contexts[alg.box] = (0, "[]", Context((HOLE,)))
    limit = level_cap if max_nodes is None else max_nodes
    n = 0
    while n < limit:
        if max_nodes is None and len(table.forests) == len(alg.H) and len(table.contexts) == len(alg.V):
            break
        n += 1
        t_level, f_level, ct_level, c_level = {}, {}, {}, {}
        for a in letters:
            va = morph.letter_image[a]
            for h, (text, roots) in F[n - 1].items():
                _keep_min(t_level, act[va][h], f"{a}({text})" if roots else a, (Tree(a, roots),))
            for v, (text, roots) in C[n - 1].items():
                _keep_min(ct_level, vt[va][v], f"{a}({text})", (Tree(a, roots),))
        T.append(t_level)
        CT.append(ct_level)
        for k in range(1, n + 1):
            for ht, (tt, tr) in T[k].items():
                if k == n:
                    _keep_min(f_level, ht, tt, tr)
                    continue
                for hr, (rt, rr) in F[n - k].items():
                    _keep_min(f_level, plus[ht][hr], f"{tt}+{rt}", tr + rr)
                for c, (rt, rr) in C[n - k].items():
                    _keep_min(c_level, vt[alg.ins_left[ht]][c], f"{tt}+{rt}", tr + rr)
        F.append(f_level)
        for k in range(0, n + 1):
            for c, (ct, cr) in CT[k].items():
                if k == n:
                    _keep_min(c_level, c, ct, cr)
                    continue
                for hr, (rt, rr) in F[n - k].items():
                    _keep_min(c_level, vt[alg.ins_right[hr]][c], f"{ct}+{rt}", cr + rr)
        C.append(c_level)
        for h, (text, roots) in sorted(f_level.items()):
            table.forests.setdefault(h, (n, text, Forest(roots)))
        for v, (text, roots) in sorted(c_level.items()):
            table.contexts.setdefault(v, (n, text, Context(roots)))
    return table


def witness_term(table: WitnessTable, x: int, kind: str = "context"):
    """The shortest (then lex-least) term of type ``x``."""
    return table.context(x) if kind == "context" else table.forest(x)


# ---------------------------------------------------------------------------
# realizing piece pairs by concrete terms


def realize_piece_pairs(alg: ForestAlgebra, morph: Morphism, rel: PieceRelation) -> dict:
    """For every derivable pair ``(w, v)``, contexts ``p`` piece of ``q`` of types ``w``, ``v``.

    Shortest-first search over products of generator term pairs: the letter
    pairs ``(a[], a[])``, ``([], a[])`` and, for each forest pair met, its
    two insertion pairs.  Each pair keeps the first realization popped,
    which has the smallest larger context (ties by text).  Returns
    ``{(w, v): (p, q)}``.
    """
    vt, act = alg.V.table, alg.act

    def key(p, q):
        return node_count(q), text_key(render_term(q)), text_key(render_term(p))

    heap = []
    tick = count()

    def push(pair, p, q):
        if pair not in best:
            heapq.heappush(heap, (key(p, q), next(tick), pair, p, q))

    best: dict = {}
    gens = []
    box = Context((HOLE,))
    push((alg.box, alg.box), box, box)
    for a in sorted(morph.alphabet):
        va = morph.letter_image[a]
        ctx = Context((Tree(a, (HOLE,)),))
        gens += [((va, va), ctx, ctx), ((alg.box, va), box, ctx)]
    forest_pairs = set()
    while heap:
        _, _, pair, p, q = heapq.heappop(heap)
        if pair in best:
            continue
        best[pair] = (p, q)
        w, v = pair
        fp = (act[w][alg.zero], act[v][alg.zero])
        fresh = []
        if fp not in forest_pairs:
            forest_pairs.add(fp)
            g, h = fp
            s_small, s_big = tuple(apply_context(p, Forest())), tuple(apply_context(q, Forest()))
            fresh = [((alg.ins_left[g], alg.ins_left[h]), Context(s_small + (HOLE,)), Context(s_big + (HOLE,))),
                     ((alg.ins_right[g], alg.ins_right[h]), Context((HOLE,) + s_small), Context((HOLE,) + s_big))]
            for (gw, gv), gp, gq in fresh:
                for (xw, xv), (xp, xq) in list(best.items()):
                    push((vt[xw][gw], vt[xv][gv]), compose_contexts(xp, gp), compose_contexts(xq, gq))
            gens += fresh
        for (gw, gv), gp, gq in gens[:len(gens) - len(fresh)] if fresh else gens:
            push((vt[w][gw], vt[v][gv]), compose_contexts(p, gp), compose_contexts(q, gq))
    assert set(best) == set(rel.pv), "realized pairs must coincide with the piece relation"
    return best
