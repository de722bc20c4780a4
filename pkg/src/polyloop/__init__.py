"""Polynomial invariants of affine loops, and loops from polynomial invariants."""

from .polycore import MonomialOrder, Polynomial, parse_poly
from .groebner import buchberger, eliminate, ideal_member, normal_form
from .loopfront import parse_loop, print_loop, to_simultaneous
from .cfinite import closed_forms
from .invgen import check_inductive, invariant_ideal, oracle_check
from .loopsynth import TemplateConfig, synthesize

__version__ = "0.1.0"

__all__ = [
    "MonomialOrder",
    "Polynomial",
    "TemplateConfig",
    "buchberger",
    "check_inductive",
    "closed_forms",
    "eliminate",
    "ideal_member",
    "invariant_ideal",
    "normal_form",
    "oracle_check",
    "parse_loop",
    "parse_poly",
    "print_loop",
    "synthesize",
    "to_simultaneous",
]
