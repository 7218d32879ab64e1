import pytest

from forestdelta import corpus
from forestdelta.algebra import build_transition_algebra, eval_morphism
from forestdelta.errors import ElementUnrealized
from forestdelta.pieces import (
    build_witness_table, compute_pieces, is_downward_closed, realize_piece_pairs, witness_term,
)
from forestdelta.terms import enumerate_terms, is_piece_term, node_count, parse_context, pieces_of, render_term

SPECS = [corpus.some_a(), corpus.chain_abc(), corpus.leftmost_root_a(), corpus.binary_even_leaf(),
         corpus.single_tree(), corpus.a_above_b()]


@pytest.fixture(scope="module", params=SPECS, ids=lambda s: s.name)
def built(request):
    alg, morph, acc = build_transition_algebra(request.param)
    return alg, morph, acc, compute_pieces(alg, morph)


def test_f1_pieces(f1):
    alg, morph, _ = f1
    rel = compute_pieces(alg, morph)
    const_y = morph.letter_image["a"]
    assert rel.v_piece(alg.box, const_y)
    assert not rel.v_piece(const_y, alg.box)
    n, y = alg.H.index("n"), alg.H.index("y")
    assert rel.h_piece(n, y) and not rel.h_piece(y, n)


def test_reflexive_and_empty_piece(built):
    alg, morph, _, rel = built
    for v in alg.V.elements:
        assert rel.v_piece(v, v)
    for h in alg.H.elements:
        assert rel.h_piece(alg.zero, h)


def test_projection_law(built):
    alg, _, _, rel = built
    assert rel.ph == {(alg.apply(w, alg.zero), alg.apply(v, alg.zero)) for w, v in rel.pv}


def test_fixpoint_is_monotone(built):
    alg, _, _, rel = built
    sizes = [n for n, _ in rel.history]
    assert sizes == sorted(sizes)
    assert rel.rounds <= len(alg.V) ** 2 + len(alg.H) ** 2 + 1


def test_closed_under_composition(built):
    alg, _, _, rel = built
    for w1, v1 in rel.pv:
        for w2, v2 in rel.pv:
            assert rel.v_piece(alg.vmul(w1, w2), alg.vmul(v1, v2))


def test_transitive_flag_only_adds(built):
    alg, morph, _, rel = built
    closed = compute_pieces(alg, morph, transitive=True)
    assert closed.pv >= rel.pv
    for a, b in closed.pv:
        for c, d in closed.pv:
            if b == c:
                assert (a, d) in closed.pv


def test_downward_closure_examples(f1):
    alg, morph, _ = f1
    rel = compute_pieces(alg, morph)
    n, y = alg.H.index("n"), alg.H.index("y")
    assert is_downward_closed(rel, {y}) == (False, (n, y))
    assert is_downward_closed(rel, {n}) == (True, None)
    assert is_downward_closed(rel, set(alg.H.elements)) == (True, None)


def test_witness_terms(f1, f2):
    alg, morph, _ = f1
    table = build_witness_table(alg, morph)
    assert render_term(witness_term(table, alg.box)) == "[]"
    assert render_term(witness_term(table, morph.letter_image["a"])) == "a([])"
    alg2, morph2, _ = f2
    table2 = build_witness_table(alg2, morph2)
    vab = eval_morphism(morph2, parse_context("a(b([]))"))
    assert render_term(witness_term(table2, vab)) == "a(b([]))"


def test_witness_terms_have_their_type_and_are_shortest(built):
    alg, morph, _, _ = built
    table = build_witness_table(alg, morph)
    for v in alg.V.elements:
        assert eval_morphism(morph, table.context(v)) == v
    for h in alg.H.elements:
        assert eval_morphism(morph, table.forest(h)) == h
    # brute force: the first enumerated context of each type has the witness size
    first = {}
    for p in enumerate_terms(morph.alphabet, 4, "context"):
        first.setdefault(eval_morphism(morph, p), p)
    for v, p in first.items():
        assert table.size(v) == node_count(p)


def test_unrealized_element(f1):
    alg, morph, _ = f1
    table = build_witness_table(alg, morph, max_nodes=0)
    with pytest.raises(ElementUnrealized):
        table.context(morph.letter_image["a"])


@pytest.mark.parametrize("spec", [corpus.some_a(), corpus.chain_abc(), corpus.a_above_b()], ids=lambda s: s.name)
def test_term_pieces_are_sound(spec):
    alg, morph, _ = build_transition_algebra(spec)
    rel = compute_pieces(alg, morph)
    for q in enumerate_terms(spec.alphabet, 4, "context"):
        v = eval_morphism(morph, q)
        for p in pieces_of(q):
            assert rel.v_piece(eval_morphism(morph, p), v), (render_term(p), render_term(q))


@pytest.mark.parametrize("name", ["F1", "F2", "F6", "F7", "trees", "a-above-b"])
def test_piece_pairs_realized(name, pipelines):
    pr = pipelines(name)
    alg, morph, rel, table = pr.algebra, pr.morphism, pr.pieces, pr.table
    found = realize_piece_pairs(alg, morph, rel)
    assert set(found) == set(rel.pv)
    long = {}
    for (w, v), (p, q) in found.items():
        assert is_piece_term(p, q)
        assert eval_morphism(morph, p) == w and eval_morphism(morph, q) == v
        bound = 2 * table.size(v) + 2
        if node_count(q) > bound:
            long[(w, v)] = bound
    # pairs beyond 2*|witness of the whole|+2 nodes must really have no smaller realization
    # (brute force where the bound is at most 6 nodes)
    if long:
        reach = min(6, max(long.values()))
        for q in enumerate_terms(morph.alphabet, reach, "context"):
            v = eval_morphism(morph, q)
            for p in pieces_of(q):
                pair = (eval_morphism(morph, p), v)
                assert pair not in long or node_count(q) > long[pair], render_term(q)
    assert bool(long) == (name in ("F2", "F7"))
