"""Loop synthesis from polynomial invariants."""

from .template import SynthesisTemplate, TemplateConfig, build_template, extend_vars
from .pcp import PCP, Case, Constraint, build_pcp, gen_c1, gen_c2, pcp_to_json, set_partitions
from .search import Model, solve_builtin
from .decode import model_recurrence, model_to_loop, pack_model, sequentialize, verify_model
from .pipeline import SynthesisResult, Synthesized, check_invariant_input, roundtrip, synthesize

__all__ = [
    "Case",
    "Constraint",
    "Model",
    "PCP",
    "SynthesisResult",
    "SynthesisTemplate",
    "Synthesized",
    "TemplateConfig",
    "build_pcp",
    "build_template",
    "check_invariant_input",
    "extend_vars",
    "gen_c1",
    "gen_c2",
    "model_recurrence",
    "model_to_loop",
    "pack_model",
    "pcp_to_json",
    "roundtrip",
    "sequentialize",
    "set_partitions",
    "solve_builtin",
    "synthesize",
    "verify_model",
]
