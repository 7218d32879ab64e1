import pytest

from forestdelta import corpus
from forestdelta.algebra import AutomatonSpec, FiniteMonoid, build_transition_algebra, eval_morphism, omega_power
from forestdelta.decide import prepare
from forestdelta.errors import IdentityFails, NotDA, NotStratified, UnknownLetter
from forestdelta.pieces import compute_pieces
from forestdelta.terms import enumerate_terms, parse_context
from forestdelta.words import (
    StratifiedMonoid, WordExpr, Block, check_da, decompose_context_types, eval_word, green_classes,
    l_equivalent, r_equivalent, synth_sigma2_word, word_expr_member, words_up_to,
)


def transition_monoid(n_states, letter_maps):
    """Monoid of state maps generated by the letters; returns (monoid, beta)."""
    ident = tuple(range(n_states))
    elems = [ident]
    i = 0
    while i < len(elems):
        x = elems[i]
        i += 1
        for m in letter_maps.values():
            y = tuple(m[s] for s in x)  # apply x then the letter
            if y not in elems:
                elems.append(y)
    table = [[elems.index(tuple(y[s] for s in x)) for y in elems] for x in elems]
    mon = FiniteMonoid.from_table([f"m{k}" for k in range(len(elems))], table, 0)
    beta = {a: elems.index(tuple(m)) for a, m in letter_maps.items()}
    return mon, beta


def one_element():
    return FiniteMonoid.from_table(["1"], [["1"]], "1")


# (monoid, beta, extra pre-order pairs) for every DA fixture
def da_fixtures():
    out = []
    for name in ("F3", "F5"):
        e = corpus.find_entry(name)
        out.append((name, e.monoid, e.beta_indices(), e.stratified()))
    mon = one_element()
    out.append(("one", mon, {"a": 0, "b": 0}, StratifiedMonoid.trivial(mon)))
    # contains the subword ab: states 0 (nothing), 1 (seen a), 2 (seen a then b)
    mon, beta = transition_monoid(3, {"a": (1, 1, 2), "b": (0, 2, 2)})
    out.append(("subword-ab", mon, beta, StratifiedMonoid.trivial(mon)))
    # last letter is a, over three letters
    mon, beta = transition_monoid(2, {"a": (1, 1), "b": (0, 0), "c": (0, 0)})
    out.append(("ends-a", mon, beta, StratifiedMonoid.trivial(mon)))
    return out


DA = da_fixtures()


@pytest.mark.parametrize("name,mon,beta,strat", DA, ids=[d[0] for d in DA])
def test_synthesis_is_exact(name, mon, beta, strat):
    assert len(mon) <= 6 and len(beta) <= 3
    words = list(words_up_to(beta, 8 if len(beta) < 3 else 6))
    for target in mon.elements:
        e = synth_sigma2_word(beta, strat, target)
        for w in words:
            assert word_expr_member(e, w) == (eval_word(beta, mon, w) == target), (target, w)
        # every star set is downward closed under the pre-order, through beta
        for block in e.blocks:
            for s in block.stars:
                for a in beta:
                    if any(strat.leq(beta[a], beta[b]) for b in s):
                        assert a in s


@pytest.mark.parametrize("name,mon,beta,strat", DA, ids=[d[0] for d in DA])
def test_green_relation_equations(name, mon, beta, strat):
    assert check_da(mon).holds
    t = mon.table
    for m in mon.elements:
        for n in mon.elements:
            if r_equivalent(mon, m, n) and l_equivalent(mon, m, n):
                assert m == n
            for k in mon.elements:
                if r_equivalent(mon, m, n) and r_equivalent(mon, n, t[m][k]):
                    assert r_equivalent(mon, t[n][k], n)


@pytest.mark.parametrize("name,mon,beta,strat", DA, ids=[d[0] for d in DA])
def test_stable_letters(name, mon, beta, strat):
    t = mon.table

    def stable(m):
        return frozenset(a for a in beta if r_equivalent(mon, t[m][beta[a]], m))

    for m in mon.elements:
        A_m = stable(m)
        for w in words_up_to(beta, 6):
            assert r_equivalent(mon, t[m][eval_word(beta, mon, w)], m) == (set(w) <= A_m)
        for n in mon.elements:
            if r_equivalent(mon, m, n):
                assert stable(n) == A_m


def test_green_examples():
    b2 = corpus.brandt_monoid()
    R, L = green_classes(b2)
    assert [b2.identity] in [sorted(c) for c in R]
    assert len(green_classes(one_element())[0]) == 1


def test_da_examples():
    b2 = corpus.brandt_monoid()
    res = check_da(b2)
    assert res.answer == "no"
    m, n = res.witness
    assert (b2.names[m], b2.names[n]) == ("a", "b")
    ab = b2.mul(m, n)
    assert omega_power(b2, ab) == ab
    assert b2.names[b2.product(ab, m, ab)] == "z"
    assert check_da(corpus.left_zero_monoid()).answer == "yes"
    assert check_da(one_element()).answer == "yes"


def test_not_da_raises():
    e = corpus.find_entry("F4")
    with pytest.raises(NotDA) as info:
        synth_sigma2_word(e.beta_indices(), StratifiedMonoid(e.monoid, frozenset((m, m) for m in e.monoid.elements)), 0)
    assert info.value.witness == ("a", "b")


def test_left_zero_expression():
    e = corpus.find_entry("F3")
    A = e.monoid.index("A")
    expr = synth_sigma2_word(e.beta_indices(), e.stratified(), A)
    for w in words_up_to("ab", 8):
        assert word_expr_member(expr, w) == (len(w) > 0 and w[0] == "a")
    assert word_expr_member(expr, "ab") and not word_expr_member(expr, "ba")


def test_one_element_expression():
    mon = one_element()
    expr = synth_sigma2_word({"a": 0, "b": 0}, StratifiedMonoid.trivial(mon), 0)
    assert expr.blocks == (Block((frozenset("ab"),), ()),)
    assert word_expr_member(expr, "")
    with pytest.raises(UnknownLetter):
        word_expr_member(expr, "c")


def test_hand_written_expression():
    expr = WordExpr(frozenset("ab"), (Block((frozenset(), frozenset("ab")), (frozenset("a"),)),))
    assert word_expr_member(expr, "ab") and word_expr_member(expr, "a")
    assert not word_expr_member(expr, "ba")


def test_stratification_checked():
    e = corpus.find_entry("F5")
    idx = e.monoid.index
    with pytest.raises(NotStratified):
        StratifiedMonoid.closure_of(e.monoid, [(idx("z"), idx("1"))])
    with pytest.raises(NotStratified):
        StratifiedMonoid(e.monoid, frozenset())


def test_declared_order_shapes_star_sets():
    e = corpus.find_entry("F5")
    strat = e.stratified()
    expr = synth_sigma2_word(e.beta_indices(), strat, e.monoid.index("z"))
    # b is above a, so any star containing b also contains a
    for block in expr.blocks:
        for s in block.stars:
            assert "b" not in s or "a" in s


def test_f1_context_decomposition():
    pr = prepare(corpus.some_a())
    alg, morph = pr.algebra, pr.morphism
    decs = {v: decompose_context_types(alg, morph, pr.pieces, v) for v in alg.V.elements}
    for p in enumerate_terms("ab", 4, "context"):
        v = eval_morphism(morph, p)
        for x, d in decs.items():
            assert d.matches(p) == (x == v)
    box = decs[alg.box]
    assert box.matches(parse_context("b(b([]))"))
    assert not box.matches(parse_context("a([])"))


def test_context_decomposition_empty_alphabet():
    spec = AutomatonSpec((), ("0",), "0", (("0",),), {}, ())
    alg, morph, _ = build_transition_algebra(spec)
    d = decompose_context_types(alg, morph, compute_pieces(alg, morph), alg.box)
    assert d.matches(parse_context("[]"))


def test_context_decomposition_needs_identity():
    pr = prepare(corpus.chain_abc())
    with pytest.raises(IdentityFails):
        decompose_context_types(pr.algebra, pr.morphism, pr.pieces, pr.algebra.box)
