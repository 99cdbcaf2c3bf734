"""Verification of normal logic programs against approximate specifications."""

__version__ = "0.1.0"

from .checker import check_correctness_ks, check_correctness_wfs, check_stable_proposition, covered
from .engine import Budget, answers, build_main_tree, check_semi_completeness_empirical
from .oracles import fitting_fixpoint, least_model, stable_models, well_founded_model
from .specification import Spec, load_spec, parse_spec
from .syntax import parse_program, parse_query
from .universe import GroundUniverse, ground_program

__all__ = [
    "__version__",
    "Budget",
    "GroundUniverse",
    "Spec",
    "answers",
    "build_main_tree",
    "check_correctness_ks",
    "check_correctness_wfs",
    "check_semi_completeness_empirical",
    "check_stable_proposition",
    "covered",
    "fitting_fixpoint",
    "ground_program",
    "least_model",
    "load_spec",
    "parse_program",
    "parse_query",
    "parse_spec",
    "stable_models",
    "well_founded_model",
]
