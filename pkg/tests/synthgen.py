"""Solvable synthesis instances: small integer loops whose packed template
model lies inside the builtin search box."""

import random
from fractions import Fraction

from polyloop.errors import PolyloopError
from polyloop.invgen import invariant_ideal
from polyloop.loopfront import RecurrenceSystem
from polyloop.loopsynth import TemplateConfig, build_pcp, build_template, pack_model
from polyloop.polycore import Polynomial


def solvable_instances(seed, count, bound=2, size=2):
    rng = random.Random(seed)
    out = []
    seen = set()
    while len(out) < count:
        matrix = tuple(tuple(Fraction(rng.choice([0, 0, 1, 1, -1, 2])) for _ in range(size))
                       for _ in range(size))
        offset = tuple(Fraction(rng.randint(-1, 1)) for _ in range(size))
        init = tuple(Polynomial.const(rng.randint(-1, 1)) for _ in range(size))
        names = ("x", "y", "z")[:size]
        sys = RecurrenceSystem(names, matrix, offset, init)
        key = (matrix, offset, init)
        if key in seen:
            continue
        seen.add(key)
        try:
            basis = invariant_ideal(sys).basis
        except PolyloopError:
            continue
        if basis.is_zero() or basis.is_unit() or len(basis) > 2:
            continue
        template = build_template(names, TemplateConfig(size))
        pcp = build_pcp(template, basis.generators)
        model = pack_model(template, pcp, sys)
        if model is None or model.case < 0:
            continue
        if any(abs(v) > bound or v.denominator != 1 for v in model.values.values()):
            continue
        out.append((sys, basis.generators, model))
    return out
