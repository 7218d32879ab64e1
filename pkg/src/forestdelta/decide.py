"""Deciding the Δ₂ identity, structural analyses, and term-level counterexamples."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .algebra import AutomatonSpec, ForestAlgebra, Morphism, build_transition_algebra, omega_power
from .errors import PipelineOrderWarning
from .pieces import PieceRelation, WitnessTable, build_witness_table, compute_pieces, realize_piece_pairs
from .syntactic import QuotientMap, is_minimal, member, restrict_reachable, syntactic_quotient
from .terms import (Context, Forest, apply_context, compose_contexts, concat_forests, is_piece_term, node_count,
                    power, render_term)

log = logging.getLogger(__name__)

ORDERS = ("lex", "desc")


@dataclass(frozen=True)
class Witness:
    """``kind`` is ``"identity"`` (pair ``(v, w)``) or ``"commutativity"`` (pair ``(g, h)``)."""

    kind: str
    pair: tuple

    @property
    def v(self):
        return self.pair[0]

    @property
    def w(self):
        return self.pair[1]


@dataclass(frozen=True)
class Counterexample:
    """Terms ``r p^(2n) s`` and ``r p^n q p^n s`` that the language tells apart."""

    r: Context
    p: Context
    q: Context
    s: Forest
    n: int
    left_member: bool
    right_member: bool

    @property
    def left(self) -> Forest:
        return apply_context(compose_contexts(self.r, power(self.p, 2 * self.n)), self.s)

    @property
    def right(self) -> Forest:
        pn = power(self.p, self.n)
        return apply_context(compose_contexts(self.r, compose_contexts(pn, compose_contexts(self.q, pn))), self.s)

    def total_nodes(self) -> int:
        return node_count(self.left) + node_count(self.right)

    def to_json(self) -> dict:
        return {
            "r": render_term(self.r), "p": render_term(self.p), "q": render_term(self.q),
            "s": render_term(self.s), "n": self.n,
            "left": render_term(self.left), "right": render_term(self.right),
            "left_member": self.left_member, "right_member": self.right_member,
        }


@dataclass(frozen=True)
class SwapCounterexample:
    """A context ``r`` with ``r(s+t)`` and ``r(t+s)`` on different sides of the language."""

    r: Context
    s: Forest
    t: Forest
    left_member: bool
    right_member: bool

    @property
    def left(self) -> Forest:
        return apply_context(self.r, concat_forests(self.s, self.t))

    @property
    def right(self) -> Forest:
        return apply_context(self.r, concat_forests(self.t, self.s))

    def to_json(self) -> dict:
        return {
            "r": render_term(self.r), "s": render_term(self.s), "t": render_term(self.t),
            "left": render_term(self.left), "right": render_term(self.right),
            "left_member": self.left_member, "right_member": self.right_member,
        }


@dataclass
class Verdict:
    definable: bool
    order: str
    witness: Optional[Witness] = None
    lifted: object = None
    notes: list = field(default_factory=list)

    @property
    def answer(self) -> str:
        return "yes" if self.definable else "no"


# ---------------------------------------------------------------------------
# the identity


def identity_violations(alg: ForestAlgebra, rel: PieceRelation):
    """Pairs ``(v, w)`` with ``w`` a piece of ``v`` and ``v^ω w v^ω != v^ω``, in element order."""
    vt = alg.V.table
    pieces_of = {}
    for w, v in rel.pv:
        pieces_of.setdefault(v, []).append(w)
    for v in alg.V.elements:
        e = omega_power(alg.V, v)
        for w in sorted(pieces_of.get(v, ())):
            if vt[vt[e][w]][e] != e:
                yield v, w


def commutativity_violations(alg: ForestAlgebra):
    plus = alg.H.table
    for g in alg.H.elements:
        for h in alg.H.elements:
            if plus[g][h] != plus[h][g]:
                yield g, h


def check_delta2(alg: ForestAlgebra, rel: PieceRelation, order: str = "lex", accepting=None) -> Verdict:
    """Check ``v^ω w v^ω = v^ω`` for every piece pair, plus ``g+h = h+g`` when ``order`` is ``desc``.

    The criterion is only meaningful on the syntactic algebra.  When
    ``accepting`` is given and the algebra is not minimal for it, a
    :class:`PipelineOrderWarning` is emitted and the check runs anyway.
    """
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    if accepting is not None and not is_minimal(alg, accepting):
        warnings.warn("checking a recognizer that is not the syntactic algebra", PipelineOrderWarning,
                      stacklevel=2)
    bad = next(identity_violations(alg, rel), None)
    if bad is not None:
        return Verdict(False, order, Witness("identity", bad))
    if order == "desc":
        bad = next(commutativity_violations(alg), None)
        if bad is not None:
            return Verdict(False, order, Witness("commutativity", bad))
    return Verdict(True, order)


def recheck_witness(alg: ForestAlgebra, rel: PieceRelation, witness: Witness) -> bool:
    """Independent recheck that a witness is a genuine violation."""
    if witness.kind == "identity":
        v, w = witness.pair
        e = omega_power(alg.V, v)
        assert alg.vmul(e, e) == e
        return (w, v) in rel.pv and alg.vmul(alg.vmul(e, w), e) != e
    g, h = witness.pair
    return alg.plus(g, h) != alg.plus(h, g)


# ---------------------------------------------------------------------------
# reachability and stabilizers


@dataclass(frozen=True)
class ReachOrder:
    """``reach[g]`` is the set of types reachable from ``g``; ``cls[h]`` its mutual-reachability class."""

    reach: tuple
    cls: tuple

    def reachable(self, g: int, h: int) -> bool:
        """Is ``h`` reachable from ``g``?"""
        return h in self.reach[g]

    def equivalent(self, g: int, h: int) -> bool:
        return self.cls[g] == self.cls[h]

    @property
    def classes(self) -> list:
        out = {}
        for h, c in enumerate(self.cls):
            out.setdefault(c, []).append(h)
        return [out[c] for c in sorted(out)]


def reachability_classes(alg: ForestAlgebra) -> ReachOrder:
    reach = tuple(frozenset(alg.act[v][g] for v in alg.V.elements) for g in alg.H.elements)
    cls = []
    rep = {}
    for h in alg.H.elements:
        key = frozenset(g for g in alg.H.elements if g in reach[h] and h in reach[g])
        cls.append(rep.setdefault(key, len(rep)))
    return ReachOrder(reach, tuple(cls))


def h_bottom(alg: ForestAlgebra, order: Optional[ReachOrder] = None) -> frozenset:
    """Types reachable from every type."""
    order = order or reachability_classes(alg)
    out = frozenset(h for h in alg.H.elements if all(h in order.reach[g] for g in alg.H.elements))
    total = alg.zero
    for h in alg.H.elements:
        total = alg.plus(total, h)
    assert total in out, "the sum of all types must be reachable from everywhere"
    return out


def stabilizer(alg: ForestAlgebra, h: int, order: Optional[ReachOrder] = None) -> frozenset:
    """Context types ``v`` with ``vh`` mutually reachable with ``h``."""
    order = order or reachability_classes(alg)
    return frozenset(v for v in alg.V.elements if order.equivalent(alg.act[v][h], h))


def stabilizer_violations(alg: ForestAlgebra, rel: PieceRelation) -> list:
    """Failures of the stabilizer properties as ``(property, detail)`` pairs; empty when all hold.

    Checked: stabilizers depend only on the class of ``h`` and are submonoids,
    stabilizers are closed under pieces, and for ``h`` outside the bottom
    types with ``h+h ~ h`` the pieces of ``h`` with ``stab(h)`` form a
    proper subalgebra.
    """
    order = reachability_classes(alg)
    stabs = {h: stabilizer(alg, h, order) for h in alg.H.elements}
    bottom = h_bottom(alg, order)
    vt = alg.V.table
    out = []
    for h in alg.H.elements:
        S = stabs[h]
        for g in alg.H.elements:
            if g > h and order.equivalent(g, h) and stabs[g] != S:
                out.append(("class independence", (h, g)))
        if alg.box not in S:
            out.append(("submonoid", (h, alg.box)))
        for v in sorted(S):
            for w in sorted(S):
                if vt[v][w] not in S:
                    out.append(("submonoid", (h, v, w)))
        for w, v in sorted(rel.pv):
            if v in S and w not in S:
                out.append(("closed under pieces", (h, w, v)))
        if h in bottom or not order.equivalent(alg.plus(h, h), h):
            continue
        G = {g for g, x in rel.ph if x == h}
        for g in sorted(G):
            for g2 in sorted(G):
                if alg.plus(g, g2) not in G:
                    out.append(("pieces closed under +", (h, g, g2)))
            if alg.ins_left[g] not in S or alg.ins_right[g] not in S:
                out.append(("insertions stabilize", (h, g)))
            for v in sorted(S):
                if alg.act[v][g] not in G:
                    out.append(("stabilizer acts on pieces", (h, v, g)))
        if G & bottom:
            out.append(("proper subalgebra", (h, min(G & bottom))))
    return out


# ---------------------------------------------------------------------------
# lifting witnesses to terms


def _piece_realization(alg, morph, rel, table: WitnessTable, v: int, w: int):
    p, q = table.context(v), table.context(w)
    if is_piece_term(q, p):
        return p, q
    q2, p2 = realize_piece_pairs(alg, morph, rel)[(w, v)]
    assert is_piece_term(q2, p2)
    return p2, q2


def semantic_counterexample(alg: ForestAlgebra, morph: Morphism, accepting, rel: PieceRelation,
                            witness: tuple, max_n: int = 3, max_nodes: int = 6,
                            table: Optional[WitnessTable] = None) -> Optional[Counterexample]:
    """Search ``r p^(2n) s`` versus ``r p^n q p^n s`` for a membership change.

    ``witness`` is a pair ``(v, w)`` of context types with ``w`` a piece of
    ``v``; ``p`` and ``q`` are realizations with ``q`` a term-level piece of
    ``p``.  The search runs over ``n <= max_n`` and all ``r``, ``s`` with at
    most ``max_nodes`` nodes, in enumeration order.  Since membership only
    depends on types, one representative per type of ``r`` and of ``s``
    covers that space exactly.  Returns ``None`` if nothing is found, which
    says nothing about definability.
    """
    v, w = witness
    full = table or build_witness_table(alg, morph)
    p, q = _piece_realization(alg, morph, rel, full, v, w)
    small = build_witness_table(alg, morph, max_nodes=max_nodes)
    rs = small.ordered("context")
    ss = small.ordered("forest")
    vt, act = alg.V.table, alg.act
    acc = frozenset(accepting)
    for n in range(1, max_n + 1):
        pn = alg.V.power(v, n)
        left = vt[pn][pn]
        right = vt[vt[pn][w]][pn]
        for r in rs:
            lr, rr = vt[r][left], vt[r][right]
            for s in ss:
                a, b = act[lr][s] in acc, act[rr][s] in acc
                if a != b:
                    return Counterexample(small.context(r), p, q, small.forest(s), n, a, b)
    return None


def swap_counterexample(alg: ForestAlgebra, morph: Morphism, accepting, g: int, h: int,
                        table: Optional[WitnessTable] = None) -> Optional[SwapCounterexample]:
    """A context telling ``s+t`` from ``t+s`` for forests of types ``g`` and ``h``."""
    table = table or build_witness_table(alg, morph)
    gh, hg = alg.plus(g, h), alg.plus(h, g)
    for r in table.ordered("context"):
        a, b = alg.act[r][gh] in accepting, alg.act[r][hg] in accepting
        if a != b:
            return SwapCounterexample(table.context(r), table.forest(g), table.forest(h), a, b)
    return None


# ---------------------------------------------------------------------------
# the full pipeline


@dataclass
class PipelineResult:
    spec: AutomatonSpec
    algebra: ForestAlgebra
    morphism: Morphism
    accepting: frozenset
    source_algebra: ForestAlgebra
    source_morphism: Morphism
    source_accepting: frozenset
    quotient: Optional[QuotientMap]
    pieces: PieceRelation
    table: WitnessTable

    def member(self, t: Forest) -> bool:
        return member(self.algebra, self.morphism, self.accepting, t)

    def source_member(self, t: Forest) -> bool:
        return member(self.source_algebra, self.source_morphism, self.source_accepting, t)


def prepare(spec: AutomatonSpec, minimize: bool = True, transitive: bool = False) -> PipelineResult:
    """Build, restrict, quotient (unless ``minimize`` is off) and compute pieces and witnesses."""
    alg, morph, acc = build_transition_algebra(spec)
    alg, morph, acc, _ = restrict_reachable(alg, morph, acc)
    quotient = None
    work = (alg, morph, acc)
    if minimize:
        quotient = syntactic_quotient(alg, morph, acc)
        work = (quotient.quotient, quotient.morphism, quotient.accepting)
    elif not is_minimal(alg, acc):
        warnings.warn("minimization skipped on a non-minimal recognizer; a negative verdict may be spurious",
                      PipelineOrderWarning, stacklevel=2)
    rel = compute_pieces(work[0], work[1], transitive=transitive)
    table = build_witness_table(work[0], work[1])
    return PipelineResult(spec, *work, alg, morph, acc, quotient, rel, table)


def decide(spec: AutomatonSpec, order: str = "lex", minimize: bool = True, transitive: bool = False,
           lift: bool = True, max_n: int = 3, max_nodes: int = 6, prepared: Optional[PipelineResult] = None):
    """Full decision: returns ``(Verdict, PipelineResult)``.

    Negative verdicts get a lifted counterexample when one is found within
    the bounds; lifted terms are rechecked against the unreduced recognizer.
    """
    pr = prepared or prepare(spec, minimize=minimize, transitive=transitive)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PipelineOrderWarning)
        verdict = check_delta2(pr.algebra, pr.pieces, order)
    if verdict.witness is not None:
        assert recheck_witness(pr.algebra, pr.pieces, verdict.witness)
    if lift and verdict.witness is not None:
        if verdict.witness.kind == "identity":
            cx = semantic_counterexample(pr.algebra, pr.morphism, pr.accepting, pr.pieces, verdict.witness.pair,
                                         max_n=max_n, max_nodes=max_nodes, table=pr.table)
        else:
            cx = swap_counterexample(pr.algebra, pr.morphism, pr.accepting, *verdict.witness.pair, table=pr.table)
        if cx is not None:
            assert pr.source_member(cx.left) == cx.left_member
            assert pr.source_member(cx.right) == cx.right_member
            verdict.lifted = cx
        else:
            verdict.notes.append("counterexample search inconclusive within the bounds")
    return verdict, pr


def verdict_to_json(verdict: Verdict, pr: PipelineResult) -> dict:
    alg = pr.algebra
    out = {"definable": verdict.answer, "order": verdict.order, "sizes": {"H": len(alg.H), "V": len(alg.V)}}
    wit = verdict.witness
    if wit is not None:
        if wit.kind == "identity":
            v, w = wit.pair
            out["witness"] = {
                "kind": "identity-violation",
                "v": alg.v_name(v), "w": alg.v_name(w),
                "v_term": render_term(pr.table.context(v)), "w_term": render_term(pr.table.context(w)),
            }
        else:
            g, h = wit.pair
            out["witness"] = {
                "kind": "commutativity-violation",
                "g": alg.h_name(g), "h": alg.h_name(h),
                "g_term": render_term(pr.table.forest(g)), "h_term": render_term(pr.table.forest(h)),
            }
    if verdict.lifted is not None:
        out["lifted"] = verdict.lifted.to_json()
    if verdict.notes:
        out["notes"] = list(verdict.notes)
    return out
