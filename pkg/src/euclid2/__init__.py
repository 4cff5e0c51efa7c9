"""Proof-checking toolkit for the deductive calculus of Euclid's Elements
Book II: a statement language for visible and invisible figures, a rule
engine with per-step color classes, an exact-geometry backend for
diagram-based steps, and an algebraic oracle for cross-checking equalities.
"""

from .rules import ColorClass, Rule, check_proof, color_of
from .script import CheckReport, emit_report, format_script, parse_script
from .terms import mk_segment, normalize, stmt_equal

__all__ = [
    "CheckReport",
    "ColorClass",
    "Rule",
    "check_proof",
    "color_of",
    "emit_report",
    "format_script",
    "mk_segment",
    "normalize",
    "parse_script",
    "stmt_equal",
]

__version__ = "0.1.0"
