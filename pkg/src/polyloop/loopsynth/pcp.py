"""Polynomial constraint problems for loop synthesis.

``gen_c1`` ties the closed-form template to the recurrence template;
``gen_c2`` makes every invariant vanish identically on the closed forms.
Identities over all ``n`` are split into coefficient equations, which is only
sound while the exponential bases are distinct, so C2 is generated once per
admissible grouping of coinciding bases.
"""

from dataclasses import dataclass
from itertools import combinations

from ..polycore import Monomial, MonomialOrder, Polynomial, collect, substitute


@dataclass(frozen=True)
class Constraint:
    poly: Polynomial
    tag: str


@dataclass(frozen=True)
class Case:
    equalities: tuple
    disequalities: tuple
    partition: tuple = ()

    def label(self):
        if not self.partition:
            return "single"
        return " | ".join("{" + ", ".join(str(m) for m in block) + "}" for block in self.partition)


@dataclass(frozen=True)
class PCP:
    unknowns: tuple
    cases: tuple

    def unknown_names(self):
        return tuple(name for name, _ in self.unknowns)


def _nonzero_constraints(polys, tag):
    out = []
    seen = set()
    for p in polys:
        if p.is_zero() or p in seen:
            continue
        seen.add(p)
        out.append(Constraint(p, tag))
    return out


def _coefficients(p, group):
    order = MonomialOrder("deglex", tuple(sorted(group)))
    parts = collect(p, group)
    return [parts[m] for m in sorted(parts, key=order.key, reverse=True)]


def gen_c1(template):
    """Returns ``(equalities, disequalities)`` of clause set C1."""
    T = template
    group = {T.counter, *T.exp_vars}
    eqs = []
    zero_n = {T.counter: Polynomial.const(0)}
    zero_n.update({u: Polynomial.const(1) for u in T.exp_vars})
    for i, v in enumerate(T.vars):
        eqs.append(substitute(T.forms[v], zero_n) - T.init[i])
    init = _nonzero_constraints(eqs, "C1-init")

    shift_map = {T.counter: Polynomial.var(T.counter) + 1}
    for u, root in zip(T.exp_vars, T.roots[1:]):
        shift_map[u] = root * Polynomial.var(u)
    shifted = []
    for i, v in enumerate(T.vars):
        lhs = substitute(T.forms[v], shift_map)
        rhs = T.offset[i] + sum(
            (b * T.forms[w] for b, w in zip(T.matrix[i], T.vars)), start=Polynomial()
        )
        shifted.extend(_coefficients(lhs - rhs, group))
    shift = _nonzero_constraints(shifted, "C1-shift")

    diseqs = []
    symbolic = list(T.roots[1:])
    for root in symbolic:
        diseqs.append(root)
        diseqs.append(root - 1)
    for a, b in combinations(symbolic, 2):
        diseqs.append(a - b)
    return init + shift, _nonzero_constraints(diseqs, "distinctness")


def expand_invariants(template, invariants):
    """Per invariant: base monomial over exp vars -> {n-degree: coefficient}."""
    T = template
    tables = []
    for p in invariants:
        p = Polynomial.coerce(p)
        extra = p.variables() - set(T.vars)
        if extra:
            raise ValueError(f"invariant uses variables outside the template: {sorted(extra)}")
        q = substitute(p, T.forms)
        table = {}
        for base, rest in collect(q, T.exp_vars).items():
            table[base] = {
                ndeg.exponent(T.counter): coeff
                for ndeg, coeff in collect(rest, [T.counter]).items()
            }
        tables.append(table)
    return tables


def set_partitions(items):
    """All set partitions of ``items`` in a deterministic order (Bell-many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for idx in range(len(part)):
            yield part[:idx] + [[first] + part[idx]] + part[idx + 1:]


def _forced_distinct(a, b, exp_vars):
    """True if ``a == b`` in value would contradict root distinctness or root != 1."""
    diff = [a.exponent(u) - b.exponent(u) for u in exp_vars]
    nz = [d for d in diff if d]
    if len(nz) == 1 and abs(nz[0]) == 1:
        return True
    if len(nz) == 2 and sorted(nz) == [-1, 1]:
        return True
    return False


def admissible(partition, exp_vars):
    return all(
        not _forced_distinct(a, b, exp_vars)
        for block in partition
        for a, b in combinations(block, 2)
    )


def base_value(template, base):
    value = Polynomial.const(1)
    for u, root in zip(template.exp_vars, template.roots[1:]):
        e = base.exponent(u)
        if e:
            value = value * root ** e
    return value


def _base_key(template):
    order = MonomialOrder("deglex", tuple(template.exp_vars))
    return lambda m: order.key(m)


def gen_c2(template, invariants, filter_forced=True):
    """One constraint group per admissible grouping of the exponential bases.

    Each group is ``(partition, equalities, disequalities)``.
    """
    T = template
    tables = expand_invariants(T, invariants)
    bases = sorted({m for table in tables for m in table}, key=_base_key(T))
    groups = []
    for partition in set_partitions(bases):
        if filter_forced and not admissible(partition, T.exp_vars):
            continue
        partition = [sorted(block, key=_base_key(T)) for block in partition]
        partition.sort(key=lambda block: _base_key(T)(block[0]))
        eqs, diseqs = [], []
        for block in partition:
            rep = base_value(T, block[0])
            for other in block[1:]:
                eqs.append(Constraint(base_value(T, other) - rep, "case"))
        values = [base_value(T, block[0]) for block in partition]
        for a, b in combinations(values, 2):
            diseqs.append(Constraint(a - b, "case"))
        for v in values:
            if not v.is_constant():
                diseqs.append(Constraint(v, "case"))
        sums = []
        for table in tables:
            for block in partition:
                degrees = sorted({k for m in block for k in table.get(m, ())}, reverse=True)
                for k in degrees:
                    total = Polynomial()
                    for m in block:
                        total = total + table.get(m, {}).get(k, Polynomial())
                    sums.append(total)
        eqs = _nonzero_constraints([c.poly for c in eqs], "case") + _nonzero_constraints(sums, "C2")
        diseqs = _nonzero_constraints([c.poly for c in diseqs], "case")
        groups.append((tuple(tuple(b) for b in partition), eqs, diseqs))
    return groups


def build_pcp(template, invariants, filter_forced=True):
    c1_eqs, c1_diseqs = gen_c1(template)
    cases = []
    for partition, eqs, diseqs in gen_c2(template, invariants, filter_forced):
        cases.append(
            Case(tuple(c1_eqs + eqs), tuple(c1_diseqs + diseqs), partition)
        )
    return PCP(template.unknowns, tuple(cases))


def pcp_to_json(pcp):
    """JSON-ready dict; ``tags`` lists equality tags then disequality tags."""
    return {
        "unknowns": [{"name": n, "role": r} for n, r in pcp.unknowns],
        "cases": [
            {
                "partition": case.label(),
                "equalities": [str(c.poly) for c in case.equalities],
                "disequalities": [str(c.poly) for c in case.disequalities],
                "tags": [c.tag for c in case.equalities] + [c.tag for c in case.disequalities],
            }
            for case in pcp.cases
        ],
    }
