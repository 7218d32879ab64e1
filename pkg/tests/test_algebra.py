import json

import pytest
from hypothesis import given, settings

from forestdelta import corpus
from forestdelta.algebra import (
    AutomatonSpec, FiniteMonoid, ForestAlgebra, build_transition_algebra, describe_algebra, eval_morphism,
    omega_power, validate_axioms,
)
from forestdelta.errors import AlphabetMismatch, SizeLimitExceeded, SpecInvalid
from forestdelta.terms import (
    apply_context, compose_contexts, concat_forests, enumerate_terms, parse_context, parse_forest,
)

from test_terms import contexts, forests

SPECS = [corpus.some_a(), corpus.chain_abc(), corpus.leftmost_root_a(), corpus.binary_even_leaf(),
         corpus.single_tree(), corpus.a_above_b(), corpus.some_a_duplicated()]


def run_automaton(spec, roots):
    # direct bottom-up evaluation on the spec tables
    pos = {h: i for i, h in enumerate(spec.H)}
    h = spec.zero
    for t in roots:
        h = spec.plus[pos[h]][pos[run_tree(spec, t)]]
    return h


def run_tree(spec, t):
    return spec.delta[t.label][run_automaton(spec, t.children)]


def test_f1_sizes(f1):
    alg, morph, acc = f1
    assert alg.sizes() == (2, 2)
    assert sorted(tuple(alg.act[v]) for v in alg.V.elements) == [(0, 1), (1, 1)]
    assert [alg.h_name(h) for h in acc] == ["y"]


def test_empty_alphabet():
    spec = AutomatonSpec((), ("0",), "0", (("0",),), {}, ())
    alg, morph, acc = build_transition_algebra(spec)
    assert alg.sizes() == (1, 1)


def test_f2_chain_elements(f2):
    alg, morph, _ = f2
    H = {alg.h_name(h): h for h in alg.H.elements}
    va = eval_morphism(morph, parse_context("a([])"))
    vb = eval_morphism(morph, parse_context("b([])"))
    vab = eval_morphism(morph, parse_context("a(b([]))"))
    assert len({va, vb, vab}) == 3
    assert vab == alg.vmul(va, vb)
    assert alg.apply(vab, H["s_c"]) == H["s_a"]
    assert alg.apply(vab, H["s_b"]) == H["bot"]


def test_f1_evaluation(f1):
    alg, morph, _ = f1
    assert alg.h_name(eval_morphism(morph, parse_forest("b(a)"))) == "y"
    assert eval_morphism(morph, parse_forest("0")) == alg.zero
    assert eval_morphism(morph, parse_context("a([])")) == morph.letter_image["a"]
    assert alg.act[morph.letter_image["a"]] == (1, 1)


def test_alphabet_mismatch(f1):
    with pytest.raises(AlphabetMismatch):
        eval_morphism(f1[1], parse_forest("c"))


def test_omega_power():
    mon = corpus.brandt_monoid()
    a, z = mon.index("a"), mon.index("z")
    assert omega_power(mon, a) == z
    assert omega_power(mon, mon.identity) == mon.identity
    ab = mon.index("ab")
    assert omega_power(mon, ab) == ab


@pytest.mark.parametrize("mon", [corpus.brandt_monoid(), corpus.left_zero_monoid(), corpus.few_non_a_monoid()])
def test_omega_power_is_idempotent_power(mon):
    for x in mon.elements:
        e = omega_power(mon, x)
        assert mon.is_idempotent(e)
        assert any(mon.power(x, k) == e for k in range(1, len(mon) + 1))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.name)
def test_corpus_algebras_satisfy_axioms(spec):
    alg, _, _ = build_transition_algebra(spec)
    assert validate_axioms(alg).ok


def test_unfaithful_algebra_reported():
    H = FiniteMonoid(("0",), ((0,),), 0)
    V = FiniteMonoid(("box", "v"), ((0, 1), (1, 1)), 0)
    alg = ForestAlgebra(H, V, ((0,), (0,)), (0,), (0,))
    report = validate_axioms(alg)
    assert report.axioms() == ["faithfulness"]
    assert report.violations[0][1] == (0, 1)


def test_nonassociative_plus_reported():
    # 0 is the identity, x+x = y, everything else collapses to x
    table = ((0, 1, 2), (1, 2, 1), (2, 1, 1))
    H = FiniteMonoid(("0", "x", "y"), table, 0)
    V = FiniteMonoid(("box",), ((0,),), 0)
    alg = ForestAlgebra(H, V, ((0, 1, 2),), (0, 0, 0), (0, 0, 0))
    report = validate_axioms(alg)
    axiom, (x, y, z) = report.violations[0]
    assert axiom == "H associativity"
    assert table[table[x][y]][z] != table[x][table[y][z]]


def test_spec_validation():
    data = corpus.some_a().to_json()
    bad = json.loads(json.dumps(data))
    bad["plus"][0][0] = "y"
    with pytest.raises(SpecInvalid):
        build_transition_algebra(AutomatonSpec.from_json(bad))
    missing = json.loads(json.dumps(data))
    del missing["delta"]["b"]
    with pytest.raises(SpecInvalid):
        build_transition_algebra(AutomatonSpec.from_json(missing))
    with pytest.raises(SizeLimitExceeded):
        build_transition_algebra(corpus.chain_abc(), max_v=3)


def test_spec_json_roundtrip():
    spec = corpus.chain_abc()
    again = AutomatonSpec.from_json(json.loads(json.dumps(spec.to_json())))
    assert again.to_json() == spec.to_json()


@pytest.mark.parametrize("spec", SPECS[:4], ids=lambda s: s.name)
def test_morphism_agrees_with_automaton(spec):
    alg, morph, _ = build_transition_algebra(spec)
    for t in enumerate_terms(spec.alphabet, 5):
        assert alg.h_name(eval_morphism(morph, t)) == run_automaton(spec, t)


@settings(max_examples=80, deadline=None)
@given(contexts(), contexts(), forests, forests)
def test_morphism_is_homomorphism(p, q, s, t):
    alg, morph, _ = build_transition_algebra(corpus.a_above_b())
    ev = lambda x: eval_morphism(morph, x)
    assert ev(concat_forests(s, t)) == alg.plus(ev(s), ev(t))
    assert ev(apply_context(p, s)) == alg.apply(ev(p), ev(s))
    assert ev(compose_contexts(q, p)) == alg.vmul(ev(q), ev(p))


def test_describe_algebra_is_json(f1):
    alg, morph, acc = f1
    out = describe_algebra(alg, morph, acc)
    assert json.loads(json.dumps(out)) == out
    assert out["H"] == ["n", "y"]
