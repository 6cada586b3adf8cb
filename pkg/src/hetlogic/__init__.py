"""Heterogeneous quantifiers over finite structures.

Formulas with alternating omega-length quantifier blocks are evaluated as
safety/reachability games; a proof kernel checks derivations; theories are
translated into coherent ones; finite Kripke models give intuitionistic forcing.
"""
from .games import (
    check_determinacy, check_preservation, check_well_determined, class_games, eval_het,
    het_extension, play_step, solve_game,
)
from .kernel import check_proof
from .kripke import KripkeModel, check_kripke_model, force
from .morley import (
    back_translate_proof, expand_model, lint, morleyize_classical, morleyize_intuitionistic,
)
from .oracles import oracle_eval
from .parser import (
    parse_formula, parse_kripke, parse_proof, parse_sequent, parse_signature, parse_structure,
    parse_theory,
)
from .printer import print_formula, print_proof, print_theory
from .structures import Structure, eval_tarski
from .syntax import Signature, Theory

__version__ = "0.1.0"

__all__ = [
    "KripkeModel", "Signature", "Structure", "Theory", "back_translate_proof", "check_determinacy",
    "check_kripke_model", "check_preservation", "check_proof", "check_well_determined",
    "class_games", "eval_het", "eval_tarski", "expand_model", "force", "het_extension", "lint",
    "morleyize_classical", "morleyize_intuitionistic", "oracle_eval", "parse_formula",
    "parse_kripke", "parse_proof", "parse_sequent", "parse_signature", "parse_structure",
    "parse_theory", "play_step", "print_formula", "print_proof", "print_theory", "solve_game",
]
