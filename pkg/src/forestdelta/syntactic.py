"""Reachability restriction and the syntactic forest algebra of a language."""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import ForestAlgebra, FiniteMonoid, Morphism, eval_morphism, generate_algebra, reachable_types
from .errors import KindMismatch, NotReachableRestricted
from .terms import Forest


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """Result of quotienting by the syntactic congruence.

    ``h_class[h]`` / ``v_class[v]`` give the class of an original element.
    """

    h_class: tuple
    v_class: tuple
    quotient: ForestAlgebra
    morphism: Morphism
    accepting: frozenset


def _letter_maps(alg: ForestAlgebra, morph: Morphism) -> list:
    return [alg.act[morph.letter_image[a]] for a in morph.alphabet]


def _generated_v(alg: ForestAlgebra, morph: Morphism) -> set:
    gens = [morph.letter_image[a] for a in morph.alphabet]
    for g in alg.H.elements:
        gens.append(alg.ins_left[g])
        gens.append(alg.ins_right[g])
    seen = {alg.box}
    stack = [alg.box]
    while stack:
        x = stack.pop()
        for g in gens:
            y = alg.vmul(x, g)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def is_reachable_restricted(alg: ForestAlgebra, morph: Morphism) -> bool:
    reach = reachable_types(len(alg.H), alg.H.table, alg.zero, _letter_maps(alg, morph))
    if len(reach) != len(alg.H):
        return False
    return len(_generated_v(alg, morph)) == len(alg.V)


def restrict_reachable(alg: ForestAlgebra, morph: Morphism, accepting=frozenset()):
    """Drop forest types no forest evaluates to, and regenerate V on what is left.

    Returns ``(algebra, morphism, accepting, h_map)`` where ``h_map`` sends old
    forest types to new ones (``None`` for removed types).
    """
    maps = _letter_maps(alg, morph)
    keep = sorted(reachable_types(len(alg.H), alg.H.table, alg.zero, maps))
    new = {old: k for k, old in enumerate(keep)}
    plus = alg.H.table
    alg2, morph2 = generate_algebra(
        [alg.H.names[h] for h in keep],
        [[new[plus[g][h]] for h in keep] for g in keep],
        new[alg.zero],
        morph.alphabet,
        [[new[m[h]] for h in keep] for m in maps],
        max_v=max(len(alg.V), 1) * 2 + 16,
    )
    acc = frozenset(new[h] for h in accepting if h in new)
    h_map = tuple(new.get(h) for h in alg.H.elements)
    return alg2, morph2, acc, h_map


def _number_by_signature(items, signature) -> tuple:
    classes = {}
    out = []
    for x in items:
        key = signature(x)
        if key not in classes:
            classes[key] = len(classes)
        out.append(classes[key])
    return tuple(out)


def syntactic_quotient(alg: ForestAlgebra, morph: Morphism, accepting) -> QuotientMap:
    """Quotient a reachable-restricted recognizer by the syntactic congruence.

    Forest types are identified when no context type separates them with
    respect to ``accepting``; context types are identified when they agree on
    every forest class.  Classes are numbered by their smallest member.
    """
    if not is_reachable_restricted(alg, morph):
        raise NotReachableRestricted("call restrict_reachable before quotienting")
    X = frozenset(accepting)
    act = alg.act
    Hs, Vs = list(alg.H.elements), list(alg.V.elements)

    h_class = _number_by_signature(Hs, lambda h: tuple(act[v][h] in X for v in Vs))
    v_class = _number_by_signature(Vs, lambda v: tuple(h_class[act[v][h]] for h in Hs))
    h_rep = _representatives(h_class)
    v_rep = _representatives(v_class)
    nh, nv = len(h_rep), len(v_rep)

    plus = alg.H.table
    plus_l = tuple(tuple(h_class[plus[h_rep[a]][h_rep[b]]] for b in range(nh)) for a in range(nh))
    for g in Hs:
        for h in Hs:
            assert h_class[plus[g][h]] == plus_l[h_class[g]][h_class[h]], "plus is not a congruence"

    act_l = tuple(tuple(h_class[act[v_rep[c]][h_rep[k]]] for k in range(nh)) for c in range(nv))
    if len(set(act_l)) != nv:
        raise AssertionError("internal error: quotient action is not faithful")
    index = {t: c for c, t in enumerate(act_l)}
    compose = tuple(
        tuple(index[tuple(act_l[c][act_l[d][k]] for k in range(nh))] for d in range(nv))
        for c in range(nv)
    )
    vt = alg.V.table
    for v in Vs:
        for w in Vs:
            assert v_class[vt[v][w]] == compose[v_class[v]][v_class[w]], "composition is not a congruence"

    ins_left = tuple(v_class[alg.ins_left[h_rep[k]]] for k in range(nh))
    ins_right = tuple(v_class[alg.ins_right[h_rep[k]]] for k in range(nh))
    for h in Hs:
        assert v_class[alg.ins_left[h]] == ins_left[h_class[h]]
        assert v_class[alg.ins_right[h]] == ins_right[h_class[h]]

    quotient = ForestAlgebra(
        H=FiniteMonoid(tuple(alg.H.names[h_rep[k]] for k in range(nh)), plus_l, h_class[alg.zero]),
        V=FiniteMonoid(tuple(f"v{c}" for c in range(nv)), compose, v_class[alg.box]),
        act=act_l,
        ins_left=ins_left,
        ins_right=ins_right,
    )
    morph_l = Morphism(
        morph.alphabet, {a: v_class[morph.letter_image[a]] for a in morph.alphabet}, quotient
    )
    acc_l = frozenset(h_class[h] for h in X)
    assert {h for h in Hs if h_class[h] in acc_l} == set(X), "accepting set is not saturated"
    return QuotientMap(h_class, v_class, quotient, morph_l, acc_l)


def _representatives(classes: tuple) -> list:
    reps = {}
    for x, c in enumerate(classes):
        reps.setdefault(c, x)
    return [reps[c] for c in range(len(reps))]


def member(alg: ForestAlgebra, morph: Morphism, accepting, t: Forest) -> bool:
    """Membership of the forest ``t`` in the language recognized by ``accepting``."""
    if not isinstance(t, Forest):
        raise KindMismatch("membership is defined for forests")
    return eval_morphism(morph, t) in accepting


def is_minimal(alg: ForestAlgebra, accepting) -> bool:
    """True iff every two distinct forest types are separated by some context type."""
    X = frozenset(accepting)
    sigs = {tuple(alg.act[v][h] in X for v in alg.V.elements) for h in alg.H.elements}
    return len(sigs) == len(alg.H)
