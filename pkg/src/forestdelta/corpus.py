"""Built-in fixture languages with their expected verdicts."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .algebra import AutomatonSpec, FiniteMonoid
from .words import StratifiedMonoid, check_da


@dataclass(frozen=True)
class CorpusEntry:
    """A forest automaton (``spec``) or a word monoid (``monoid`` with ``beta``), plus expectations.

    ``expected`` maps a check name (``lex``, ``desc`` or ``da``) to ``yes``/``no``.
    """

    name: str
    description: str
    expected: dict
    spec: Optional[AutomatonSpec] = None
    monoid: Optional[FiniteMonoid] = None
    beta: dict = field(default_factory=dict)
    pre: tuple = ()
    formulas: dict = field(default_factory=dict)
    note: str = ""

    @property
    def kind(self) -> str:
        return "forest" if self.spec is not None else "monoid"

    def stratified(self) -> StratifiedMonoid:
        idx = self.monoid.index
        return StratifiedMonoid.closure_of(self.monoid, [(idx(n), idx(m)) for n, m in self.pre])

    def beta_indices(self) -> dict:
        return {a: self.monoid.index(m) for a, m in self.beta.items()}

    def to_json(self) -> dict:
        if self.spec is not None:
            return {"name": self.name, **{k: v for k, v in self.spec.to_json().items() if k != "name"}}
        out = {"name": self.name, **self.monoid.to_json(), "beta": dict(self.beta)}
        if self.pre:
            out["pre"] = [list(p) for p in self.pre]
        return out


def _table(names, op):
    return [[op(x, y) for y in names] for x in names]


def _spec(name, alphabet, H, zero, plus, delta, accepting) -> AutomatonSpec:
    return AutomatonSpec(
        alphabet=tuple(alphabet), H=tuple(H), zero=zero,
        plus=tuple(tuple(r) for r in _table(H, plus)),
        delta={a: {h: delta(a, h) for h in H} for a in alphabet},
        accepting=tuple(accepting), name=name,
    )


def some_a() -> AutomatonSpec:
    """Some node is labelled ``a``."""
    return _spec("F1", "ab", ["n", "y"], "n",
                 lambda g, h: "y" if "y" in (g, h) else "n",
                 lambda a, h: "y" if a == "a" else h, ["y"])


def some_a_duplicated() -> AutomatonSpec:
    """Same language as :func:`some_a`, with ``y`` split into ``y`` and ``y2`` (one vs several a-trees)."""
    def plus(g, h):
        nonzero = [x for x in (g, h) if x != "n"]
        if not nonzero:
            return "n"
        return nonzero[0] if len(nonzero) == 1 else "y2"
    return _spec("F1-dup", "ab", ["n", "y", "y2"], "n", plus,
                 lambda a, h: "y" if a == "a" else h, ["y", "y2"])


def some_a_with_junk() -> AutomatonSpec:
    """Same language as :func:`some_a`, with an absorbing unreachable type ``j``."""
    def plus(g, h):
        if "j" in (g, h):
            return "j"
        return "y" if "y" in (g, h) else "n"
    return _spec("F1-junk", "ab", ["n", "y", "j"], "n", plus,
                 lambda a, h: "y" if a == "a" else h, ["y"])


def chain_abc() -> AutomatonSpec:
    """Unary chains spelling a word of ``(ab)*c`` from the root down."""
    H = ["0", "s_c", "s_a", "s_b", "bot"]

    def plus(g, h):
        if g == "0":
            return h
        if h == "0":
            return g
        return "bot"

    def delta(a, h):
        if a == "c":
            return "s_c" if h == "0" else "bot"
        if a == "a":
            return "s_a" if h == "s_b" else "bot"
        return "s_b" if h in ("s_c", "s_a") else "bot"

    return _spec("F2", "abc", H, "0", plus, delta, ["s_c", "s_a"])


def leftmost_root_a() -> AutomatonSpec:
    """The first root is labelled ``a``."""
    return _spec("F6", "ab", ["zero", "A", "B"], "zero",
                 lambda g, h: h if g == "zero" else g,
                 lambda a, h: "A" if a == "a" else "B", ["A"])


def binary_even_leaf() -> AutomatonSpec:
    """Single trees over ``a`` where every node has zero or two children and some leaf has even depth.

    Types record the number of trees (1, 2, 3 meaning three or more) and
    the set of leaf-depth parities, ``e`` and ``o``.
    """
    parities = ["e", "o", "eo"]
    H = ["0"] + [f"{k}{p}" for k in (1, 2, 3) for p in parities] + ["bot"]

    def split(h):
        return int(h[0]), set(h[1:])

    def join(k, P):
        return f"{min(k, 3)}{''.join(x for x in 'eo' if x in P)}"

    def plus(g, h):
        if g == "0":
            return h
        if h == "0":
            return g
        if "bot" in (g, h):
            return "bot"
        (k1, p1), (k2, p2) = split(g), split(h)
        return join(k1 + k2, p1 | p2)

    def delta(a, h):
        if h == "0":
            return "1e"
        if h == "bot" or h[0] != "2":
            return "bot"
        flipped = {"o" if x == "e" else "e" for x in split(h)[1]}
        return join(1, flipped)

    return _spec("F7", "a", H, "0", plus, delta, ["1e", "1eo"])


def single_tree() -> AutomatonSpec:
    """Forests over ``a`` that consist of exactly one tree."""
    def plus(g, h):
        if g == "0":
            return h
        if h == "0":
            return g
        return "many"
    return _spec("trees", "a", ["0", "tree", "many"], "0", plus, lambda a, h: "tree", ["tree"])


def a_above_b() -> AutomatonSpec:
    """Some ``a`` node has a ``b`` node below it."""
    H = ["none", "b", "ab"]
    rank = {x: i for i, x in enumerate(H)}

    def plus(g, h):
        return max(g, h, key=rank.get)

    def delta(a, h):
        if h == "ab":
            return "ab"
        if a == "a":
            return "ab" if h == "b" else "none"
        return "b"

    return _spec("a-above-b", "ab", H, "none", plus, delta, ["ab"])


def left_zero_monoid() -> FiniteMonoid:
    names = ["1", "A", "B"]
    return FiniteMonoid.from_table(names, _table(names, lambda x, y: y if x == "1" else x), "1")


def brandt_monoid() -> FiniteMonoid:
    """The monoid ``B2^1``: ``aba = a``, ``bab = b``, ``aa = bb = 0``."""
    names = ["1", "a", "b", "ab", "ba", "z"]

    def op(x, y):
        if x == "1":
            return y
        if y == "1":
            return x
        if "z" in (x, y) or x[-1] == y[0]:
            return "z"
        return x[0] + y[-1] if x[0] != y[-1] else x[0]

    return FiniteMonoid.from_table(names, _table(names, op), "1")


def few_non_a_monoid() -> FiniteMonoid:
    """Nonempty words with at most two letters other than ``a``: counts ``b`` up to three."""
    names = ["1", "a", "b", "bb", "z"]
    count = {"1": (0, 0), "a": (1, 0), "b": (1, 1), "bb": (1, 2), "z": (1, 3)}
    back = {v: k for k, v in count.items()}

    def op(x, y):
        (e1, c1), (e2, c2) = count[x], count[y]
        return back[(max(e1, e2), min(3, c1 + c2))]

    return FiniteMonoid.from_table(names, _table(names, op), "1")


def builtin_corpus() -> list:
    return [
        CorpusEntry("F1", "some node labelled a", {"lex": "yes", "desc": "yes"}, spec=some_a(),
                    formulas={"sigma1": "E x a(x)"}),
        CorpusEntry("F1-dup", "some node labelled a, with a redundant type", {"lex": "yes", "desc": "yes"},
                    spec=some_a_duplicated()),
        CorpusEntry("F2", "unary chains in (ab)*c", {"lex": "no", "desc": "no"}, spec=chain_abc()),
        CorpusEntry("F6", "leftmost root labelled a", {"lex": "yes", "desc": "no"}, spec=leftmost_root_a(),
                    formulas={"sigma2": "E x A y (a(x) & (x=y | x<lex y))"}),
        CorpusEntry("F7", "binary trees with a leaf at even depth", {"lex": "no", "desc": "no"},
                    spec=binary_even_leaf()),
        CorpusEntry("trees", "exactly one tree", {"lex": "yes", "desc": "yes"}, spec=single_tree(),
                    formulas={"sigma2": "E x A y (y=x | x<y)", "pi2": "A y1 A y2 E x (x<=y1 & x<=y2)"}),
        CorpusEntry("a-above-b", "some a with a b below it", {"lex": "yes", "desc": "yes"}, spec=a_above_b(),
                    formulas={"sigma1": "E x E y (a(x) & b(y) & x<y)"}),
        CorpusEntry("F3", "words starting with a (left-zero monoid)", {"da": "yes"}, monoid=left_zero_monoid(),
                    beta={"a": "A", "b": "B"}),
        CorpusEntry("F4", "Brandt monoid B2^1", {"da": "no"}, monoid=brandt_monoid(),
                    beta={"a": "a", "b": "b"}),
        CorpusEntry("F5", "nonempty words with at most two non-a letters", {"da": "yes"},
                    monoid=few_non_a_monoid(), beta={"a": "a", "b": "b"},
                    pre=(("1", "a"), ("a", "b"), ("b", "bb"), ("bb", "z"))),
    ]


def find_entry(name: str, corpus=None) -> CorpusEntry:
    for e in corpus or builtin_corpus():
        if e.name == name:
            return e
    raise KeyError(f"no corpus entry named {name!r}")


def evaluate_entry(entry: CorpusEntry, **options) -> dict:
    """Actual verdicts for every check the entry has an expectation for."""
    from .decide import decide

    out = {}
    if entry.kind == "monoid":
        out["da"] = check_da(entry.monoid).answer
        return out
    for order in ("lex", "desc"):
        if order in entry.expected:
            verdict, _ = decide(entry.spec, order, lift=False, **options)
            out[order] = verdict.answer
    return out


def corpus_run(corpus=None, only=None, **options) -> list:
    """Rows ``{entry, check, expected, actual, match}`` in corpus order."""
    entries = corpus if corpus is not None else builtin_corpus()
    if only:
        entries = [e for e in entries if e.name in set(only)]
    rows = []
    for entry in entries:
        actual = evaluate_entry(entry, **options)
        for check, expected in entry.expected.items():
            rows.append({"entry": entry.name, "check": check, "expected": expected,
                         "actual": actual[check], "match": expected == actual[check]})
    return rows


def export_corpus(directory, corpus=None) -> list:
    """Write every entry as ``NAME.json``; returns the written paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for entry in corpus or builtin_corpus():
        path = os.path.join(directory, f"{entry.name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(entry.to_json(), fh, indent=2, sort_keys=False)
            fh.write("\n")
        paths.append(path)
    return paths

