"""Decide Δ₂ definability of regular forest languages through their syntactic forest algebra."""

from .algebra import AutomatonSpec, FiniteMonoid, ForestAlgebra, Morphism, build_transition_algebra, eval_morphism
from .decide import Verdict, check_delta2, decide, prepare, semantic_counterexample
from .errors import ForestDeltaError
from .logic import eval_formula, formula_language_equal, parse_formula
from .pieces import build_witness_table, compute_pieces
from .syntactic import syntactic_quotient
from .terms import parse_context, parse_forest, render_term
from .words import StratifiedMonoid, check_da, synth_sigma2_word, word_expr_member

__version__ = "0.1.0"

__all__ = [
    "AutomatonSpec",
    "FiniteMonoid",
    "ForestAlgebra",
    "ForestDeltaError",
    "Morphism",
    "StratifiedMonoid",
    "Verdict",
    "build_transition_algebra",
    "build_witness_table",
    "check_da",
    "check_delta2",
    "compute_pieces",
    "decide",
    "eval_formula",
    "eval_morphism",
    "formula_language_equal",
    "parse_context",
    "parse_forest",
    "parse_formula",
    "prepare",
    "render_term",
    "semantic_counterexample",
    "syntactic_quotient",
    "synth_sigma2_word",
    "word_expr_member",
]
