"""Command-line interface.

Exit codes: 0 for a positive verdict or success, 1 for a negative verdict,
2 for usage and input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

from .algebra import AutomatonSpec, FiniteMonoid, describe_algebra, eval_morphism
from .corpus import builtin_corpus, corpus_run, export_corpus, find_entry
from .errors import ForestDeltaError, NotDA, PipelineOrderWarning, SpecInvalid
from .logic import classify_prenex, eval_formula, formula_language_equal, parse_formula, render_formula
from .pieces import is_downward_closed
from .syntactic import syntactic_quotient
from .terms import parse_forest, render_term
from .words import StratifiedMonoid, check_da, synth_sigma2_word

OK, NEGATIVE, ERROR = 0, 1, 2

_NO_MINIMIZE = "minimization skipped (--no-minimize); a negative verdict is only conclusive on the syntactic algebra"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _emit(obj, out):
    out.write(json.dumps(obj, indent=2, ensure_ascii=False))
    out.write("\n")


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_spec(ref: str) -> AutomatonSpec:
    """A spec file, or the name of a built-in corpus entry."""
    if not os.path.exists(ref):
        try:
            entry = find_entry(ref)
        except KeyError:
            raise SpecInvalid(f"no such file or corpus entry: {ref}") from None
        if entry.spec is None:
            raise SpecInvalid(f"corpus entry {ref} is a monoid, not a forest automaton")
        return entry.spec
    return AutomatonSpec.from_json(_load_json(ref), name=os.path.basename(ref))


def load_monoid(ref: str):
    """``(monoid, pre pairs, beta)`` from a monoid file or a built-in corpus name."""
    if not os.path.exists(ref):
        try:
            entry = find_entry(ref)
        except KeyError:
            raise SpecInvalid(f"no such file or corpus entry: {ref}") from None
        if entry.monoid is None:
            raise SpecInvalid(f"corpus entry {ref} is not a monoid")
        data = entry.to_json()
    else:
        data = _load_json(ref)
    mon = FiniteMonoid.from_json(data)
    pre = []
    raw = data.get("pre", [])
    if raw and all(isinstance(r, list) and len(r) == len(mon) and all(isinstance(x, bool) for x in r) for r in raw):
        pre = [(n, m) for n in mon.elements for m in mon.elements if raw[n][m]]
    else:
        try:
            pre = [(mon.index(n), mon.index(m)) for n, m in raw]
        except (KeyError, ValueError, TypeError):
            raise SpecInvalid("pre must be a list of [smaller, larger] pairs or a boolean table") from None
    return mon, pre, dict(data.get("beta", {}))


def _parse_beta(text: str) -> dict:
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise SpecInvalid(f"bad --beta item {item!r}; expected letter=element")
        a, m = item.split("=", 1)
        out[a.strip()] = m.strip()
    return out


# ---------------------------------------------------------------------------
# commands


def _cmd_decide(args, out):
    from .decide import decide, verdict_to_json

    spec = load_spec(args.spec)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PipelineOrderWarning)
        verdict, pr = decide(spec, args.order, minimize=not args.no_minimize, transitive=args.pieces_transitive,
                             max_n=args.max_n, max_nodes=args.max_nodes)
    report = verdict_to_json(verdict, pr)
    notes = sorted({str(w.message) for w in caught})
    if args.no_minimize:
        notes.insert(0, _NO_MINIMIZE)
    for note in notes:
        args.err.write(f"warning: {note}\n")
    if notes:
        report["warnings"] = notes
    _emit(report, out)
    return OK if verdict.definable else NEGATIVE


def _cmd_counterexample(args, out):
    from .decide import decide, verdict_to_json

    spec = load_spec(args.spec)
    verdict, pr = decide(spec, args.order, transitive=args.pieces_transitive, max_n=args.max_n,
                         max_nodes=args.max_nodes)
    report = verdict_to_json(verdict, pr)
    if verdict.definable:
        report["notes"] = ["the identity holds; there is nothing to lift"]
    _emit(report, out)
    return OK if verdict.lifted is not None else NEGATIVE


def _cmd_syntactic(args, out):
    from .algebra import build_transition_algebra
    from .syntactic import restrict_reachable

    spec = load_spec(args.spec)
    alg, morph, acc = build_transition_algebra(spec)
    alg, morph, acc, _ = restrict_reachable(alg, morph, acc)
    q = syntactic_quotient(alg, morph, acc)
    report = describe_algebra(q.quotient, q.morphism, q.accepting)
    report["source_sizes"] = {"H": len(alg.H), "V": len(alg.V)}
    report["h_class"] = {alg.h_name(h): q.quotient.h_name(c) for h, c in enumerate(q.h_class)}
    _emit(report, out)
    return OK


def _cmd_pieces(args, out):
    from .decide import prepare

    spec = load_spec(args.spec)
    if args.no_minimize:
        args.err.write(f"warning: {_NO_MINIMIZE}\n")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PipelineOrderWarning)
        pr = prepare(spec, minimize=not args.no_minimize, transitive=args.pieces_transitive)
    alg, rel = pr.algebra, pr.pieces
    closed, bad = is_downward_closed(rel, pr.accepting)
    transitive = all((a, d) in rel.pv for a, b in rel.pv for c, d in rel.pv if b == c)
    report = {
        "P_V": [[alg.v_name(w), alg.v_name(v)] for w, v in sorted(rel.pv)],
        "P_H": [[alg.h_name(g), alg.h_name(h)] for g, h in sorted(rel.ph)],
        "rounds": rel.rounds,
        "transitive": transitive,
        "accepting_closed_under_pieces": closed,
        "witness_terms": {alg.v_name(v): render_term(pr.table.context(v)) for v in alg.V.elements},
    }
    if bad:
        report["violation"] = [alg.h_name(bad[0]), alg.h_name(bad[1])]
    _emit(report, out)
    return OK


def _cmd_member(args, out):
    from .decide import prepare

    spec = load_spec(args.spec)
    pr = prepare(spec)
    t = parse_forest(args.forest, spec.alphabet)
    h = eval_morphism(pr.morphism, t)
    ok = h in pr.accepting
    _emit({"forest": render_term(t), "type": pr.algebra.h_name(h), "member": ok}, out)
    return OK if ok else NEGATIVE


def _cmd_eval(args, out):
    phi = parse_formula(args.formula)
    report = {"formula": render_formula(phi)}
    try:
        report["class"] = classify_prenex(phi)
    except ForestDeltaError:
        report["class"] = "not prenex"
    if args.spec:
        from .decide import prepare

        pr = prepare(load_spec(args.spec))
        equal, diff = formula_language_equal(phi, pr.algebra, pr.morphism, pr.accepting, args.max_nodes)
        report["max_nodes"] = args.max_nodes
        report["equal"] = equal
        if not equal:
            report["first_difference"] = render_term(diff)
        _emit(report, out)
        return OK if equal else NEGATIVE
    if args.forest is None:
        raise _UsageError("eval needs --forest or --spec")
    t = parse_forest(args.forest)
    value = eval_formula(phi, t)
    report.update({"forest": render_term(t), "value": value})
    _emit(report, out)
    return OK if value else NEGATIVE


def _cmd_synth_word(args, out):
    mon, pre, beta = load_monoid(args.monoid)
    if args.beta:
        beta = _parse_beta(args.beta)
    if not beta:
        raise SpecInvalid("no letter assignment; give --beta or a beta field in the monoid file")
    try:
        beta_idx = {a: mon.index(m) for a, m in beta.items()}
    except KeyError as exc:
        raise SpecInvalid(str(exc)) from None
    da = check_da(mon)
    if not da.holds:
        _emit({"da": "no", "witness": [mon.names[x] for x in da.witness]}, out)
        return NEGATIVE
    strat = StratifiedMonoid.closure_of(mon, pre)
    targets = [mon.index(args.target)] if args.target else list(mon.elements)
    report = {"da": "yes", "expressions": {}}
    for m in targets:
        e = synth_sigma2_word(beta_idx, strat, m)
        report["expressions"][mon.names[m]] = {"render": e.render(), "blocks": e.to_json()}
    _emit(report, out)
    return OK


def _cmd_corpus(args, out):
    if args.action == "list":
        rows = [{"name": e.name, "kind": e.kind, "description": e.description, "expected": e.expected}
                for e in builtin_corpus()]
        _emit(rows, out)
        return OK
    if args.action == "export":
        if not args.directory:
            raise _UsageError("corpus export needs a directory")
        _emit({"written": export_corpus(args.directory)}, out)
        return OK
    corpus = builtin_corpus()
    for item in args.flip or ():
        name, _, check = item.partition(":")
        corpus = [_flipped(e, check) if e.name == name else e for e in corpus]
    rows = corpus_run(corpus, only=args.only, transitive=args.pieces_transitive)
    _emit(rows, out)
    if not rows:
        return ERROR
    return OK if all(r["match"] for r in rows) else NEGATIVE


def _flipped(entry, check):
    from dataclasses import replace

    if check not in entry.expected:
        raise _UsageError(f"entry {entry.name} has no {check!r} expectation")
    expected = dict(entry.expected)
    expected[check] = "no" if expected[check] == "yes" else "yes"
    return replace(entry, expected=expected)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="forestdelta", description="Decide first-order definability of regular forest languages.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def spec_arg(p):
        p.add_argument("--spec", required=True, help="automaton JSON file, or a built-in corpus name")

    def search_args(p):
        p.add_argument("--order", choices=("lex", "desc"), default="lex")
        p.add_argument("--max-n", type=int, default=3)
        p.add_argument("--max-nodes", type=int, default=6)
        p.add_argument("--pieces-transitive", action="store_true")

    p = sub.add_parser("decide", help="decide the identity for a language")
    spec_arg(p)
    search_args(p)
    p.add_argument("--no-minimize", action="store_true", help="skip the syntactic quotient (unsound, warns)")
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("counterexample", help="search a term-level counterexample")
    spec_arg(p)
    search_args(p)
    p.set_defaults(func=_cmd_counterexample)

    p = sub.add_parser("syntactic", help="print the syntactic forest algebra")
    spec_arg(p)
    p.set_defaults(func=_cmd_syntactic)

    p = sub.add_parser("pieces", help="print the piece relation")
    spec_arg(p)
    p.add_argument("--pieces-transitive", action="store_true")
    p.add_argument("--no-minimize", action="store_true")
    p.set_defaults(func=_cmd_pieces)

    p = sub.add_parser("member", help="test membership of a forest")
    spec_arg(p)
    p.add_argument("--forest", required=True)
    p.set_defaults(func=_cmd_member)

    p = sub.add_parser("eval", help="evaluate a formula on a forest, or compare it with a language")
    p.add_argument("--formula", required=True)
    p.add_argument("--forest")
    p.add_argument("--spec")
    p.add_argument("--max-nodes", type=int, default=6)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("synth-word", help="Σ₂ word expressions for a DA monoid")
    p.add_argument("--monoid", required=True, help="monoid JSON file, or a built-in corpus name")
    p.add_argument("--beta", help="letter assignment such as a=A,b=B")
    p.add_argument("--target", help="target element (default: all)")
    p.set_defaults(func=_cmd_synth_word)

    p = sub.add_parser("corpus", help="run, list or export the built-in corpus")
    p.add_argument("action", choices=("run", "list", "export"), nargs="?", default="run")
    p.add_argument("directory", nargs="?")
    p.add_argument("--only", action="append")
    p.add_argument("--flip", action="append", metavar="NAME:CHECK", help="invert one expectation (negative control)")
    p.add_argument("--pieces-transitive", action="store_true")
    p.set_defaults(func=_cmd_corpus)
    return parser


def run_command(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.err = err
        if not getattr(args, "func", None):
            raise _UsageError(parser.format_usage().strip())
        return args.func(args, out)
    except _UsageError as exc:
        err.write(f"{exc}\n")
        return ERROR
    except NotDA as exc:
        err.write(f"error: {exc}\n")
        return NEGATIVE
    except (ForestDeltaError, OSError, json.JSONDecodeError, KeyError) as exc:
        err.write(f"error: {exc}\n")
        return ERROR
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
