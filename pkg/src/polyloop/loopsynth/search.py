"""Bounded integer search over PCP cases.

Depth-first search over ``[-bound, bound]`` with constraint propagation:
constraints are partially evaluated as unknowns get values, constraints left
with a single unknown filter its domain, and a single-term equality forces
the one factor that may still be zero.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from ..errors import ResourceLimit, Unsat

DEFAULT_NODE_BUDGET = 2_000_000
DEFAULT_MODEL_CAP = 10_000


@dataclass(frozen=True)
class Model:
    values: dict
    case: int

    def __getitem__(self, name):
        return self.values[name]


def value_order(bound):
    out = [0]
    for k in range(1, bound + 1):
        out += [k, -k]
    return out


def _compile(poly, index):
    """Integer-coefficient term list ``[(coeff, ((var, exp), ...)), ...]``."""
    den = 1
    for _, c in poly.items():
        den = lcm(den, c.denominator)
    terms = {}
    for mono, c in poly.items():
        key = tuple(sorted((index[n], e) for n, e in mono))
        terms[key] = int(c * den)
    return terms


def _vars_of(terms):
    return {v for mono in terms for v, _ in mono}


def _substitute(terms, var, val):
    out = {}
    for mono, c in terms.items():
        new = []
        for v, e in mono:
            if v == var:
                c = c * val ** e
            else:
                new.append((v, e))
        if not c:
            continue
        key = tuple(new)
        total = out.get(key, 0) + c
        if total:
            out[key] = total
        else:
            out.pop(key, None)
    return out


def _eval_univariate(terms, x):
    total = 0
    for mono, c in terms.items():
        for _, e in mono:
            c = c * x ** e
        total += c
    return total


class _CaseSearch:
    def __init__(self, case, names, bound, node_budget):
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.bound = bound
        self.node_budget = node_budget
        self.nodes = 0
        self.constraints = []
        for c in case.equalities:
            self.constraints.append((_compile(c.poly, self.index), True))
        for c in case.disequalities:
            self.constraints.append((_compile(c.poly, self.index), False))
        self.occurs = [[] for _ in names]
        for ci, (terms, _) in enumerate(self.constraints):
            for v in _vars_of(terms):
                self.occurs[v].append(ci)
        self.weight = [len(o) for o in self.occurs]

    # state: (terms list [dict|None], domains list[list], values list)

    def _check(self, ci, terms, is_eq, domains, values, pending):
        """Simplified constraint bookkeeping; returns False on conflict."""
        if not terms:
            return is_eq
        vs = _vars_of(terms)
        if not vs:
            (c,) = terms.values()
            return (c == 0) == is_eq
        if len(vs) == 1:
            (v,) = vs
            dom = [x for x in domains[v] if (_eval_univariate(terms, x) == 0) == is_eq]
            if len(dom) != len(domains[v]):
                domains[v] = dom
                if not dom:
                    return False
                if len(dom) == 1:
                    pending.append(v)
            return True
        if is_eq and len(terms) == 1:
            (mono,) = terms
            maybe_zero = [v for v, _ in mono if 0 in domains[v]]
            if not maybe_zero:
                return False
            if len(maybe_zero) == 1:
                v = maybe_zero[0]
                if domains[v] != [0]:
                    domains[v] = [0]
                    pending.append(v)
        return True

    def _propagate(self, cons, domains, values, pending):
        while pending:
            v = pending.pop()
            if values[v] is not None:
                if domains[v] != [values[v]]:
                    return False
                continue
            if len(domains[v]) != 1:
                continue
            val = domains[v][0]
            values[v] = val
            for ci in self.occurs[v]:
                entry = cons[ci]
                if entry is None:
                    continue
                terms = _substitute(entry, v, val)
                is_eq = self.constraints[ci][1]
                if not self._check(ci, terms, is_eq, domains, values, pending):
                    return False
                cons[ci] = terms if _vars_of(terms) else None
        return True

    def run(self):
        n = len(self.names)
        domains = [value_order(self.bound) for _ in range(n)]
        values = [None] * n
        cons = [terms for terms, _ in self.constraints]
        pending = []
        for ci, (terms, is_eq) in enumerate(self.constraints):
            if not self._check(ci, terms, is_eq, domains, values, pending):
                return
            if not _vars_of(terms):
                cons[ci] = None
        if not self._propagate(cons, domains, values, pending):
            return
        yield from self._dfs(cons, domains, values)

    def _dfs(self, cons, domains, values):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise ResourceLimit(f"builtin search exceeded {self.node_budget} nodes")
        free = [v for v in range(len(values)) if values[v] is None]
        if not free:
            yield list(values)
            return
        var = min(free, key=lambda v: (len(domains[v]), -self.weight[v], v))
        for val in list(domains[var]):
            c2, d2, v2 = list(cons), list(domains), list(values)
            d2[var] = [val]
            if self._propagate(c2, d2, v2, [var]):
                yield from self._dfs(c2, d2, v2)


def solve_builtin(pcp, bound, enumerate_all=False, max_models=DEFAULT_MODEL_CAP,
                  node_budget=DEFAULT_NODE_BUDGET):
    """Integer models of the PCP with all unknowns in ``[-bound, bound]``.

    Cases are searched in order; within a case, models come out in DFS order
    with values tried as 0, 1, -1, 2, -2, ...  Raises Unsat if no case has a
    model.
    """
    names = pcp.unknown_names()
    models = []
    for idx, case in enumerate(pcp.cases):
        search = _CaseSearch(case, names, bound, node_budget)
        for assignment in search.run():
            models.append(Model({n: Fraction(v) for n, v in zip(names, assignment)}, idx))
            if not enumerate_all or len(models) >= max_models:
                return models
    if not models:
        raise Unsat(f"no integer model with entries in [-{bound}, {bound}]")
    return models
