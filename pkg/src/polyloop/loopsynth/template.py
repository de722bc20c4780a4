"""Loop, recurrence and closed-form templates with symbolic unknowns.

Unknown names follow the index scheme of the loop template: ``a{i}`` initial
values, ``b{i}_{j}`` matrix entries with ``b{i}_{s+1}`` the offset, ``w{j}``
symbolic roots and ``c{i}_{r}_{k}`` the coefficient of ``root_r^n * n^k`` in
variable ``i`` (root 0 is the fixed root 1).
"""

from dataclasses import dataclass, field
from fractions import Fraction

from ..polycore import Polynomial, as_rat, fresh_name

ROLES = ("init", "matrix", "offset", "root", "coeff")


@dataclass(frozen=True)
class TemplateConfig:
    size: int
    extra_roots: int = 1
    degree: int = None
    fixed_init: dict = field(default_factory=dict)
    fixed_entries: dict = field(default_factory=dict)
    coefficient_domain: str = "integer"

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("template size must be positive")
        if self.extra_roots < 0:
            raise ValueError("number of extra roots must be non-negative")
        if self.degree is None:
            object.__setattr__(self, "degree", self.size)
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if self.coefficient_domain not in ("integer", "rational"):
            raise ValueError("coefficient domain must be 'integer' or 'rational'")
        object.__setattr__(self, "fixed_init", {k: as_rat(v) for k, v in self.fixed_init.items()})
        object.__setattr__(
            self, "fixed_entries", {k: as_rat(v) for k, v in self.fixed_entries.items()}
        )


@dataclass(frozen=True)
class SynthesisTemplate:
    vars: tuple
    config: TemplateConfig
    init: tuple
    matrix: tuple
    offset: tuple
    roots: tuple
    exp_vars: tuple
    counter: str
    coeffs: dict
    forms: dict
    unknowns: tuple

    @property
    def size(self):
        return len(self.vars)

    def unknown_names(self):
        return tuple(name for name, _ in self.unknowns)

    def recurrence_polys(self):
        """Right-hand sides ``sum_j b_ij x_j + b_i,s+1`` of the simultaneous update."""
        xs = [Polynomial.var(v) for v in self.vars]
        return tuple(
            sum((b * x for b, x in zip(row, xs)), start=Polynomial()) + off
            for row, off in zip(self.matrix, self.offset)
        )


_EXTRA_NAMES = ("z", "w", "v", "t", "s", "r", "q", "p")


def extend_vars(names, size):
    """Pad ``names`` with fresh variable names up to ``size``."""
    names = list(names)
    if len(names) > size:
        raise ValueError(
            f"template size {size} is smaller than the number of invariant variables ({len(names)})"
        )
    taken = set(names)
    pool = iter(_EXTRA_NAMES)
    while len(names) < size:
        cand = next(pool, None)
        if cand is None:
            cand = fresh_name("x", taken)
        if cand in taken:
            continue
        names.append(cand)
        taken.add(cand)
    return tuple(names)


def build_template(vars, cfg):
    vars = extend_vars(vars, cfg.size)
    s, r, d = cfg.size, cfg.extra_roots, cfg.degree
    fixed = dict(cfg.fixed_entries)
    for v, value in cfg.fixed_init.items():
        if v not in vars:
            raise ValueError(f"fixed initial value for unknown variable {v!r}")
        fixed[f"a{vars.index(v) + 1}"] = value
    unknowns = []
    seen = set()

    def unknown(name, role):
        seen.add(name)
        if name in fixed:
            return Polynomial.const(fixed[name])
        unknowns.append((name, role))
        return Polynomial.var(name)

    init = tuple(unknown(f"a{i + 1}", "init") for i in range(s))
    matrix = tuple(
        tuple(unknown(f"b{i + 1}_{j + 1}", "matrix") for j in range(s)) for i in range(s)
    )
    offset = tuple(unknown(f"b{i + 1}_{s + 1}", "offset") for i in range(s))
    roots = (Polynomial.const(1),) + tuple(unknown(f"w{j + 1}", "root") for j in range(r))
    counter = "n"
    exp_vars = tuple(f"u{j + 1}" for j in range(r))
    coeffs = {}
    for i in range(s):
        for rho in range(r + 1):
            for k in range(d + 1):
                coeffs[(i, rho, k)] = unknown(f"c{i + 1}_{rho}_{k}", "coeff")
    unused = set(fixed) - seen
    if unused:
        raise ValueError(f"fixed entries name no template unknown: {sorted(unused)}")

    n = Polynomial.var(counter)
    forms = {}
    for i, v in enumerate(vars):
        form = Polynomial()
        for rho in range(r + 1):
            base = Polynomial.const(1) if rho == 0 else Polynomial.var(exp_vars[rho - 1])
            for k in range(d + 1):
                form = form + coeffs[(i, rho, k)] * base * n ** k
        forms[v] = form
    return SynthesisTemplate(
        vars, cfg, init, matrix, offset, roots, exp_vars, counter, coeffs, forms, tuple(unknowns)
    )


def root_values(template, values):
    """Numeric values of all roots (index 0 is the fixed root 1)."""
    out = [Fraction(1)]
    for root in template.roots[1:]:
        if root.is_constant():
            out.append(root.constant)
        else:
            (name,) = root.variables()
            out.append(values[name])
    return out
