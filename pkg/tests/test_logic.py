import pytest
from hypothesis import given, settings

from forestdelta import corpus
from forestdelta.algebra import build_transition_algebra
from forestdelta.errors import ForeignNode, KindMismatch, NotPrenex, SizeLimitExceeded, TermSyntaxError, UnboundVariable
from forestdelta.logic import (
    ALL_FORESTS, Apply, Compose, Concat, HoleContext, LetterContext, NodeStructure, Not,
    PieceClosed, classify_prenex, eval_context_formula, eval_formula, expr_member, formula_language_equal,
    negate_prenex, parse_formula, render_formula, validate_piece_closed,
)
from forestdelta.terms import (
    EMPTY, Forest, apply_context, enumerate_terms, parse_context, parse_forest, pieces_of,
)

from test_terms import forests

SIGMA2_TREE = "E x A y (y=x | x<y)"
PI2_TREE = "A y1 A y2 E x (x<=y1 & x<=y2)"
CORPUS_FORMULAS = [f for e in corpus.builtin_corpus() for f in e.formulas.values()]
PI1 = ["A x !a(x)", "A x A y !(a(x) & b(y) & x<y)", "A x A y (x<y -> a(x))"]


def ev(text, term):
    return eval_formula(parse_formula(text), parse_forest(term))


def test_evaluation_examples():
    assert ev("E x a(x)", "a+b")
    assert not ev(SIGMA2_TREE, "0")
    assert ev(PI2_TREE, "0")
    assert ev(SIGMA2_TREE, "a(b+c)")
    assert not ev(SIGMA2_TREE, "a+b")


def test_parse_and_render():
    phi = parse_formula("E x A y (a(x) & (x<lex y | x=y) -> !b(y))")
    assert parse_formula(render_formula(phi)) == phi
    assert parse_formula("E x, y . x<y") == parse_formula("E x E y x<y")
    with pytest.raises(TermSyntaxError):
        parse_formula("E x (a(x)")
    with pytest.raises(TermSyntaxError):
        parse_formula("x # y")


def test_classification():
    assert classify_prenex(parse_formula("E x A y x<y")) == "Sigma2"
    assert classify_prenex(parse_formula("A x a(x)")) == "Pi1"
    assert classify_prenex(parse_formula("a(x) | x=y")) == "Sigma0"
    assert classify_prenex(parse_formula("E x E y x<y")) == "Sigma1"
    assert classify_prenex(parse_formula(PI2_TREE)) == "Pi2"
    assert classify_prenex(parse_formula("E x A y E z x<z")) == "higher"
    with pytest.raises(NotPrenex):
        classify_prenex(parse_formula("a(x) & E y x<y"))


def test_evaluation_errors():
    with pytest.raises(UnboundVariable):
        ev("a(x)", "a")
    with pytest.raises(ForeignNode):
        eval_formula(parse_formula("a(x)"), parse_forest("a"), {"x": (3,)})
    assert eval_formula(parse_formula("a(x)"), parse_forest("b+a"), {"x": (1,)})


def test_context_formula_hole():
    p = parse_context("a(b+[])")
    assert eval_context_formula(parse_formula("E x (a(x) & x<h)"), p, "h")
    assert not eval_context_formula(parse_formula("E x (b(x) & x<h)"), p, "h")
    assert eval_context_formula(parse_formula("E x (b(x) & x<lex h)"), p, "h")


def preorder(roots, prefix=()):
    for k, t in enumerate(roots):
        yield prefix + (k,)
        yield from preorder(t.children, prefix + (k,))


@settings(max_examples=120, deadline=None)
@given(forests)
def test_lex_order_is_preorder(t):
    st = NodeStructure(t)
    order = list(preorder(t))
    for i, x in enumerate(st.nodes):
        for j, y in enumerate(st.nodes):
            assert st.lex[i][j] == (order.index(x) < order.index(y))
            assert st.less[i][j] == (len(x) < len(y) and y[:len(x)] == x)


@settings(max_examples=60, deadline=None)
@given(forests)
def test_negation_duality(t):
    for text in CORPUS_FORMULAS + PI1:
        phi = parse_formula(text)
        assert eval_formula(Not(phi), t) == (not eval_formula(phi, t))
        assert eval_formula(negate_prenex(phi), t) == (not eval_formula(phi, t))


def test_negation_swaps_classes():
    swap = {"Sigma1": "Pi1", "Pi1": "Sigma1", "Sigma2": "Pi2", "Pi2": "Sigma2"}
    for text in CORPUS_FORMULAS + PI1:
        phi = parse_formula(text)
        assert classify_prenex(negate_prenex(phi)) == swap[classify_prenex(phi)]


def test_empty_forest_convention():
    for text in CORPUS_FORMULAS + PI1:
        phi = parse_formula(text)
        assert eval_formula(phi, EMPTY) == (classify_prenex(phi)[0] == "P")


@pytest.mark.parametrize("text", PI1)
def test_pi1_formulas_closed_under_pieces(text):
    phi = parse_formula(text)
    for t in enumerate_terms("ab", 5):
        if eval_formula(phi, t):
            for s in pieces_of(t):
                assert eval_formula(phi, s)


def test_formula_language_equal(f1):
    alg, morph, acc = f1
    phi = parse_formula("E x a(x)")
    assert formula_language_equal(phi, alg, morph, acc, 6) == (True, None)
    ok, where = formula_language_equal(phi, alg, morph, set(alg.H.elements) - acc, 4)
    assert not ok and where == EMPTY
    with pytest.raises(SizeLimitExceeded):
        formula_language_equal(phi, alg, morph, acc, 20)


def test_tree_tests_against_single_tree_language():
    alg, morph, acc = build_transition_algebra(corpus.single_tree())
    assert formula_language_equal(parse_formula(SIGMA2_TREE), alg, morph, acc, 5) == (True, None)
    assert formula_language_equal(parse_formula(PI2_TREE), alg, morph, acc, 5) == (False, EMPTY)


def test_tree_tests_agree_on_nonempty_forests():
    s2, p2 = parse_formula(SIGMA2_TREE), parse_formula(PI2_TREE)
    for t in enumerate_terms("ab", 6):
        if t:
            assert eval_formula(s2, t) == eval_formula(p2, t) == (len(t) == 1)


NO_A = PieceClosed((parse_forest("a"),))


def test_expression_examples():
    root_a = Apply(LetterContext("a"), ALL_FORESTS)
    assert expr_member(root_a, parse_forest("a(b)"))
    assert not expr_member(root_a, parse_forest("b"))
    boxed = Apply(HoleContext(), NO_A)
    for text in ["b+b", "b(a)", "0"]:
        assert expr_member(boxed, parse_forest(text)) == expr_member(NO_A, parse_forest(text))
    assert expr_member(NO_A, parse_forest("b+b"))
    assert not expr_member(NO_A, parse_forest("b(a)"))


def test_expression_kinds():
    with pytest.raises(KindMismatch):
        expr_member(NO_A, parse_context("a([])"))
    with pytest.raises(KindMismatch):
        Apply(NO_A, NO_A)
    with pytest.raises(KindMismatch):
        NO_A | LetterContext("a")
    with pytest.raises(KindMismatch):
        PieceClosed((parse_context("a([])"),))


def test_apply_matches_brute_force():
    K = LetterContext("a") | Compose(LetterContext("b"), HoleContext())
    L = PieceClosed((parse_forest("b"),))
    e = Apply(K, L)
    members = set()
    for q in enumerate_terms("ab", 4, "context"):
        if expr_member(K, q):
            for s in enumerate_terms("ab", 4):
                if expr_member(L, s):
                    members.add(apply_context(q, s))
    for t in enumerate_terms("ab", 5):
        assert expr_member(e, t) == (t in members)


def test_concat_and_compose_match_brute_force():
    A = Concat(NO_A, Apply(LetterContext("a"), ALL_FORESTS))
    for t in enumerate_terms("ab", 4):
        # a-free forest followed by one last tree rooted at a
        expected = bool(t) and t[-1].label == "a" and expr_member(NO_A, Forest(t[:-1]))
        assert expr_member(A, t) == expected
    C = Compose(LetterContext("a"), LetterContext("b"))
    for p in enumerate_terms("ab", 3, "context"):
        assert expr_member(C, p) == (p == parse_context("a(b([]))"))


def test_piece_closed_bases_validate():
    assert validate_piece_closed(NO_A, "ab") == (True, None)
    assert validate_piece_closed(PieceClosed((parse_forest("a+b"), parse_forest("b(a)"))), "ab", 4) == (True, None)
