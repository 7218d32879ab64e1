"""Finite monoids and finite forest algebras.

Elements are dense integers; every structure keeps a tuple of display names.
Context types are realized as transformations of the forest types, so the
action is faithful by construction.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .errors import AlphabetMismatch, SizeLimitExceeded, SpecInvalid
from .terms import HOLE_LABEL, Context, Tree

log = logging.getLogger(__name__)

DEFAULT_MAX_V = 20000


@dataclass(frozen=True, eq=False)
class FiniteMonoid:
    names: tuple
    table: tuple
    identity: int

    def __len__(self):
        return len(self.names)

    @property
    def elements(self) -> range:
        return range(len(self.names))

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def product(self, *xs: int) -> int:
        out = self.identity
        for x in xs:
            out = self.table[out][x]
        return out

    def power(self, x: int, k: int) -> int:
        out = self.identity
        for _ in range(k):
            out = self.table[out][x]
        return out

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown element {name!r}") from None

    def is_idempotent(self, x: int) -> bool:
        return self.table[x][x] == x

    @classmethod
    def from_table(cls, names: Sequence[str], table, identity, check: bool = True) -> "FiniteMonoid":
        """Build a monoid from a table of names or indices; validates it unless ``check`` is off."""
        names = tuple(str(n) for n in names)
        if len(set(names)) != len(names):
            raise SpecInvalid("duplicate element names")
        pos = {n: i for i, n in enumerate(names)}

        def idx(x):
            if isinstance(x, int) and not isinstance(x, bool) and 0 <= x < len(names):
                return x
            if x in pos:
                return pos[x]
            raise SpecInvalid(f"unknown element {x!r} in monoid table")

        if len(table) != len(names) or any(len(row) != len(names) for row in table):
            raise SpecInvalid("operation table must be square over the element list")
        rows = tuple(tuple(idx(x) for x in row) for row in table)
        mon = cls(names, rows, idx(identity))
        if check:
            problems = monoid_violations(mon)
            if problems:
                axiom, witness = problems[0]
                raise SpecInvalid(f"{axiom} fails at {tuple(names[w] for w in witness)}")
        return mon

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteMonoid":
        try:
            return cls.from_table(data["elements"], data["op"], data["identity"])
        except KeyError as exc:
            raise SpecInvalid(f"monoid JSON is missing field {exc}") from None

    def to_json(self) -> dict:
        return {
            "elements": list(self.names),
            "identity": self.names[self.identity],
            "op": [[self.names[x] for x in row] for row in self.table],
        }


def monoid_violations(mon: FiniteMonoid, label: str = "") -> list:
    """First associativity and identity failures of ``mon`` as ``(axiom, witness)`` pairs."""
    prefix = f"{label} " if label else ""
    out = []
    t = mon.table
    n = len(mon)
    found = next(
        ((x, y, z) for x, y, z in product(range(n), repeat=3) if t[t[x][y]][z] != t[x][t[y][z]]),
        None,
    )
    if found:
        out.append((prefix + "associativity", found))
    e = mon.identity
    bad = next((x for x in range(n) if t[e][x] != x or t[x][e] != x), None)
    if bad is not None:
        out.append((prefix + "identity", (e, bad)))
    return out


def omega_power(mon: FiniteMonoid, x: int) -> int:
    """The idempotent power of ``x``, found by cycle detection on ``x, x^2, ...``."""
    powers = [x]
    first_seen = {x: 0}
    p = x
    while True:
        p = mon.table[p][x]
        if p in first_seen:
            break
        first_seen[p] = len(powers)
        powers.append(p)
    for q in powers[first_seen[p]:]:
        if mon.table[q][q] == q:
            return q
    raise AssertionError("finite cyclic semigroup without an idempotent")


@dataclass(frozen=True, eq=False)
class ForestAlgebra:
    """A pair (H, V) with a left action of V on H and the insertion contexts.

    ``act[v][h]`` is ``vh``; ``ins_left[g]`` is the context type ``g+[]`` and
    ``ins_right[g]`` is ``[]+g``.
    """

    H: FiniteMonoid
    V: FiniteMonoid
    act: tuple
    ins_left: tuple
    ins_right: tuple

    @property
    def zero(self) -> int:
        return self.H.identity

    @property
    def box(self) -> int:
        return self.V.identity

    def plus(self, g: int, h: int) -> int:
        return self.H.table[g][h]

    def vmul(self, v: int, w: int) -> int:
        return self.V.table[v][w]

    def apply(self, v: int, h: int) -> int:
        return self.act[v][h]

    def h_name(self, h: int) -> str:
        return self.H.names[h]

    def v_name(self, v: int) -> str:
        return self.V.names[v]

    def sizes(self) -> tuple:
        return len(self.H), len(self.V)


@dataclass(frozen=True, eq=False)
class Morphism:
    """Assignment of a context type to every letter, extended to all terms."""

    alphabet: tuple
    letter_image: Mapping[str, int]
    algebra: ForestAlgebra


@dataclass(frozen=True)
class AutomatonSpec:
    """User-facing presentation of a recognizing forest algebra.

    ``plus`` is a row-major table of names, ``delta[a][h]`` the type of the
    tree ``a(s)`` when ``s`` has type ``h``.
    """

    alphabet: tuple
    H: tuple
    zero: str
    plus: tuple
    delta: Mapping[str, Mapping[str, str]]
    accepting: tuple
    name: str = ""

    @classmethod
    def from_json(cls, data: Mapping, name: str = "") -> "AutomatonSpec":
        missing = [k for k in ("alphabet", "H", "zero", "plus", "delta", "accepting") if k not in data]
        if missing:
            raise SpecInvalid(f"automaton spec is missing fields {missing}")
        return cls(
            alphabet=tuple(data["alphabet"]),
            H=tuple(data["H"]),
            zero=data["zero"],
            plus=tuple(tuple(row) for row in data["plus"]),
            delta={a: dict(m) for a, m in data["delta"].items()},
            accepting=tuple(data["accepting"]),
            name=data.get("name", name),
        )

    @classmethod
    def load(cls, path) -> "AutomatonSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh), name=str(path))

    def to_json(self) -> dict:
        out = {
            "alphabet": list(self.alphabet),
            "H": list(self.H),
            "zero": self.zero,
            "plus": [list(r) for r in self.plus],
            "delta": {a: dict(self.delta[a]) for a in self.alphabet},
            "accepting": list(self.accepting),
        }
        if self.name:
            out = {"name": self.name, **out}
        return out

    def validate(self) -> None:
        """Raise :class:`SpecInvalid` unless tables are total and ``plus`` is a monoid."""
        names = self.H
        if len(set(names)) != len(names):
            raise SpecInvalid("duplicate forest type names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise SpecInvalid("duplicate letters")
        if any(a == HOLE_LABEL for a in self.alphabet):
            raise SpecInvalid("the hole marker cannot be a letter")
        known = set(names)
        if self.zero not in known:
            raise SpecInvalid(f"zero {self.zero!r} is not a forest type")
        if len(self.plus) != len(names) or any(len(r) != len(names) for r in self.plus):
            raise SpecInvalid("plus must be a |H| x |H| table")
        for row in self.plus:
            for x in row:
                if x not in known:
                    raise SpecInvalid(f"plus table mentions unknown type {x!r}")
        FiniteMonoid.from_table(names, self.plus, self.zero)
        for a in self.alphabet:
            if a not in self.delta:
                raise SpecInvalid(f"delta has no entry for letter {a!r}")
            for h in names:
                if h not in self.delta[a]:
                    raise SpecInvalid(f"delta[{a!r}] has no entry for {h!r}")
                if self.delta[a][h] not in known:
                    raise SpecInvalid(f"delta[{a!r}][{h!r}] is unknown type {self.delta[a][h]!r}")
        extra = set(self.delta) - set(self.alphabet)
        if extra:
            raise SpecInvalid(f"delta mentions letters outside the alphabet: {sorted(extra)}")
        for x in self.accepting:
            if x not in known:
                raise SpecInvalid(f"accepting type {x!r} is unknown")


# ---------------------------------------------------------------------------
# construction


def reachable_types(n_h: int, plus, zero: int, letter_maps: Iterable[Sequence[int]]) -> list:
    """Closure of {zero} under ``plus`` and the letter maps, in discovery order."""
    letter_maps = list(letter_maps)
    found = [zero]
    seen = {zero}
    i = 0
    while i < len(found):
        h = found[i]
        i += 1
        candidates = [m[h] for m in letter_maps]
        for g in list(found):
            candidates.append(plus[g][h])
            candidates.append(plus[h][g])
        for c in candidates:
            if c not in seen:
                seen.add(c)
                found.append(c)
    return found


def generate_algebra(
    h_names: Sequence[str],
    plus,
    zero: int,
    letters: Sequence[str],
    letter_maps: Sequence[Sequence[int]],
    max_v: int = DEFAULT_MAX_V,
) -> tuple:
    """Transition algebra on the given forest types.

    V is the monoid of maps on H generated by the letter maps and the maps
    ``h -> g+h`` and ``h -> h+g``.  Elements are numbered in breadth-first
    order: identity, then generators (letters, then insertions by H order),
    then longer products ``x * gen``.
    """
    n = len(h_names)
    identity = tuple(range(n))
    gens = [tuple(m) for m in letter_maps]
    for g in range(n):
        gens.append(tuple(plus[g][h] for h in range(n)))
        gens.append(tuple(plus[h][g] for h in range(n)))
    elements = [identity]
    index = {identity: 0}
    i = 0
    while i < len(elements):
        x = elements[i]
        i += 1
        for gen in gens:
            y = tuple(x[gen[h]] for h in range(n))
            if y not in index:
                if len(elements) >= max_v:
                    raise SizeLimitExceeded(f"context monoid exceeds {max_v} elements")
                index[y] = len(elements)
                elements.append(y)
    log.debug("generated %d context types over %d forest types", len(elements), n)
    table = tuple(
        tuple(index[tuple(x[y[h]] for h in range(n))] for y in elements) for x in elements
    )
    V = FiniteMonoid(tuple(f"v{k}" for k in range(len(elements))), table, 0)
    H = FiniteMonoid(tuple(h_names), tuple(tuple(r) for r in plus), zero)
    alg = ForestAlgebra(
        H=H,
        V=V,
        act=tuple(elements),
        ins_left=tuple(index[tuple(plus[g][h] for h in range(n))] for g in range(n)),
        ins_right=tuple(index[tuple(plus[h][g] for h in range(n))] for g in range(n)),
    )
    images = {a: index[tuple(m)] for a, m in zip(letters, letter_maps)}
    return alg, Morphism(tuple(letters), images, alg)


def build_transition_algebra(spec: AutomatonSpec, max_v: int = DEFAULT_MAX_V, restrict: bool = True):
    """Build ``(algebra, morphism, accepting)`` from an automaton spec.

    With ``restrict`` (the default) forest types not reachable from the empty
    forest are dropped first, so every insertion context is realizable.
    """
    spec.validate()
    pos = {h: i for i, h in enumerate(spec.H)}
    plus = [[pos[x] for x in row] for row in spec.plus]
    zero = pos[spec.zero]
    maps = [[pos[spec.delta[a][h]] for h in spec.H] for a in spec.alphabet]
    keep = list(range(len(spec.H)))
    if restrict:
        keep = sorted(reachable_types(len(spec.H), plus, zero, maps))
    new = {old: k for k, old in enumerate(keep)}
    alg, morph = generate_algebra(
        [spec.H[i] for i in keep],
        [[new[plus[g][h]] for h in keep] for g in keep],
        new[zero],
        spec.alphabet,
        [[new[m[h]] for h in keep] for m in maps],
        max_v=max_v,
    )
    accepting = frozenset(new[pos[x]] for x in spec.accepting if pos[x] in new)
    assert len(alg.V) <= len(alg.H) ** len(alg.H)
    return alg, morph, accepting


# ---------------------------------------------------------------------------
# evaluation


def _eval_roots(morph: Morphism, roots) -> tuple:
    # returns (is_context, value)
    alg = morph.algebra
    plus = alg.H.table
    left = alg.zero
    right = alg.zero
    inner = None
    for t in roots:
        if t.label == HOLE_LABEL:
            inner = alg.box
            continue
        try:
            image = morph.letter_image[t.label]
        except KeyError:
            raise AlphabetMismatch(f"label {t.label!r} is not in the alphabet {morph.alphabet}") from None
        is_ctx, val = _eval_roots(morph, t.children)
        if is_ctx:
            inner = alg.V.table[image][val]
        elif inner is None:
            left = plus[left][alg.act[image][val]]
        else:
            right = plus[right][alg.act[image][val]]
    if inner is None:
        return False, left
    vt = alg.V.table
    return True, vt[alg.ins_left[left]][vt[alg.ins_right[right]][inner]]


def eval_morphism(morph: Morphism, term) -> int:
    """Type of a forest (an H element) or of a context (a V element)."""
    is_ctx, value = _eval_roots(morph, tuple(term))
    if isinstance(term, Context) and not is_ctx:
        raise ValueError("context without a hole")
    return value


def eval_tree(morph: Morphism, t: Tree) -> int:
    return _eval_roots(morph, (t,))[1]


# ---------------------------------------------------------------------------
# axioms


@dataclass
class AxiomReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms(self) -> list:
        return [a for a, _ in self.violations]


def validate_axioms(alg: ForestAlgebra) -> AxiomReport:
    """Check every forest algebra axiom on the tables; report the first witness per axiom."""
    report = AxiomReport()
    report.violations.extend(monoid_violations(alg.H, "H"))
    report.violations.extend(monoid_violations(alg.V, "V"))
    Hs, Vs = alg.H.elements, alg.V.elements
    act, vt = alg.act, alg.V.table

    def first(axiom, candidates):
        hit = next(candidates, None)
        if hit is not None:
            report.violations.append((axiom, hit))

    first(
        "action law",
        ((w, v, h) for w in Vs for v in Vs for h in Hs if act[w][act[v][h]] != act[vt[w][v]][h]),
    )
    first("monoidal action", ((alg.box, h) for h in Hs if act[alg.box][h] != h))
    first(
        "faithfulness",
        ((v, w) for v in Vs for w in Vs if v < w and all(act[v][h] == act[w][h] for h in Hs)),
    )
    first(
        "insertion g+[]",
        ((g, h) for g in Hs for h in Hs if act[alg.ins_left[g]][h] != alg.plus(g, h)),
    )
    first(
        "insertion []+g",
        ((g, h) for g in Hs for h in Hs if act[alg.ins_right[g]][h] != alg.plus(h, g)),
    )
    return report


def describe_algebra(alg: ForestAlgebra, morph: Optional[Morphism] = None, accepting=()) -> dict:
    """JSON-ready dump of all tables, using element names."""
    hn, vn = alg.H.names, alg.V.names
    out = {
        "H": list(hn),
        "zero": hn[alg.zero],
        "plus": [[hn[x] for x in row] for row in alg.H.table],
        "V": list(vn),
        "box": vn[alg.box],
        "compose": [[vn[x] for x in row] for row in alg.V.table],
        "action": {vn[v]: [hn[x] for x in alg.act[v]] for v in alg.V.elements},
        "ins_left": {hn[g]: vn[alg.ins_left[g]] for g in alg.H.elements},
        "ins_right": {hn[g]: vn[alg.ins_right[g]] for g in alg.H.elements},
    }
    if morph is not None:
        out["alphabet"] = list(morph.alphabet)
        out["letters"] = {a: vn[morph.letter_image[a]] for a in morph.alphabet}
        out["delta"] = {
            a: {hn[h]: hn[alg.act[morph.letter_image[a]][h]] for h in alg.H.elements}
            for a in morph.alphabet
        }
    out["accepting"] = [hn[h] for h in sorted(accepting)]
    return out
