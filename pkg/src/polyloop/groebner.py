"""Buchberger's algorithm, normal forms and elimination.

Internally polynomials are dense-exponent dicts ``{exponent tuple: Fraction}``
over the precedence list of the active :class:`MonomialOrder`; the public
functions accept and return :class:`Polynomial` values.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import ResourceLimit
from .polycore import Monomial, MonomialOrder, Polynomial, fresh_name

DEFAULT_STEP_BUDGET = 50_000


@dataclass(frozen=True)
class IdealBasis:
    generators: tuple
    order: MonomialOrder
    reduced: bool = True

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def is_unit(self):
        return any(g.is_constant() and not g.is_zero() for g in self.generators)

    def is_zero(self):
        return not self.generators


class _Ring:
    """Conversion between Polynomial and exponent-vector dicts."""

    def __init__(self, order):
        self.order = order
        self.names = order.precedence
        self.nvars = len(self.names)
        self.key = order._vector_key

    def to_dense(self, p):
        out = {}
        for mono, coeff in Polynomial.coerce(p).items():
            out[tuple(self.order.vector(mono))] = coeff
        return out

    def to_poly(self, f):
        names = self.names
        return Polynomial(
            {Monomial._raw(tuple((names[i], e) for i, e in enumerate(vec) if e)): c
             for vec, c in f.items()}
        )

    def lead(self, f):
        return max(f, key=self.key)


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a, b):
    return all(not (x and y) for x, y in zip(a, b))


def _monic(ring, f):
    lm = ring.lead(f)
    lc = f[lm]
    if lc == 1:
        return f
    return {m: c / lc for m, c in f.items()}


def _reduce(ring, f, basis):
    """Full reduction of ``f`` by ``basis`` (list of (lm, lc, poly))."""
    f = dict(f)
    rem = {}
    key = ring.key
    while f:
        lm = max(f, key=key)
        c = f[lm]
        for g_lm, g_lc, g in basis:
            if _divides(g_lm, lm):
                q = c / g_lc
                shift = tuple(x - y for x, y in zip(lm, g_lm))
                for m, gc in g.items():
                    mm = tuple(x + y for x, y in zip(m, shift))
                    v = f.get(mm, 0) - q * gc
                    if v:
                        f[mm] = v
                    else:
                        del f[mm]
                break
        else:
            rem[lm] = c
            del f[lm]
    return rem


def _spoly(ring, f, g):
    lf, lg = ring.lead(f), ring.lead(g)
    lcm = _lcm(lf, lg)
    out = {}
    for poly, lm, sign in ((f, lf, 1), (g, lg, -1)):
        lc = poly[lm]
        shift = tuple(x - y for x, y in zip(lcm, lm))
        for m, c in poly.items():
            mm = tuple(x + y for x, y in zip(m, shift))
            v = out.get(mm, 0) + sign * c / lc
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
    return out


def _entry(ring, f):
    lm = ring.lead(f)
    return (lm, f[lm], f)


def _buchberger_dense(ring, polys, budget):
    G = []
    for f in polys:
        if f:
            G.append(_monic(ring, f))
    if not G:
        return []
    if any(len(f) == 1 and not any(next(iter(f))) for f in G):
        return [{(0,) * ring.nvars: Fraction(1)}]
    leads = [ring.lead(f) for f in G]
    pairs = {(i, j) for j in range(len(G)) for i in range(j)}
    steps = 0
    while pairs:
        i, j = min(pairs, key=lambda p: (ring.key(_lcm(leads[p[0]], leads[p[1]])), p))
        pairs.discard((i, j))
        if _coprime(leads[i], leads[j]):
            continue
        lcm = _lcm(leads[i], leads[j])
        skip = False
        for k in range(len(G)):
            if k in (i, j) or not _divides(leads[k], lcm):
                continue
            if (min(i, k), max(i, k)) not in pairs and (min(j, k), max(j, k)) not in pairs:
                skip = True
                break
        if skip:
            continue
        steps += 1
        if steps > budget:
            raise ResourceLimit(f"Groebner basis computation exceeded {budget} reduction steps")
        h = _reduce(ring, _spoly(ring, G[i], G[j]), [_entry(ring, g) for g in G])
        if h:
            h = _monic(ring, h)
            new = len(G)
            G.append(h)
            leads.append(ring.lead(h))
            if not any(leads[-1]):
                return [{(0,) * ring.nvars: Fraction(1)}]
            pairs.update((k, new) for k in range(new))
    return _interreduce(ring, G)


def _interreduce(ring, G):
    items = sorted(G, key=lambda f: ring.key(ring.lead(f)))
    minimal = []
    for f in items:
        lf = ring.lead(f)
        if not any(_divides(ring.lead(g), lf) for g in minimal):
            minimal.append(f)
    reduced = []
    for idx, f in enumerate(minimal):
        others = [_entry(ring, g) for k, g in enumerate(minimal) if k != idx]
        lm = ring.lead(f)
        tail = {m: c for m, c in f.items() if m != lm}
        tail = _reduce(ring, tail, others)
        tail[lm] = f[lm]
        reduced.append(_monic(ring, tail))
    reduced.sort(key=lambda f: ring.key(ring.lead(f)))
    return reduced


def _order_for(polys, order):
    if order is None:
        names = set()
        for p in polys:
            names |= p.variables()
        order = MonomialOrder("grevlex", tuple(sorted(names)))
    return order


def buchberger(gens, order=None, budget=DEFAULT_STEP_BUDGET):
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    gens = [Polynomial.coerce(g) for g in gens]
    order = _order_for(gens, order)
    ring = _Ring(order)
    dense = _buchberger_dense(ring, [ring.to_dense(g) for g in gens], budget)
    return IdealBasis(tuple(ring.to_poly(f) for f in dense), order, True)


def _extend(order, names):
    extra = tuple(sorted(set(names) - set(order.precedence)))
    if not extra:
        return order
    if order.scheme == "block":
        blocks = list(order.blocks)
        scheme, vs = blocks[-1]
        blocks[-1] = (scheme, vs + extra)
        return MonomialOrder("block", blocks=tuple(blocks))
    return MonomialOrder(order.scheme, order.precedence + extra)


def normal_form(p, basis):
    p = Polynomial.coerce(p)
    ring = _Ring(_extend(basis.order, p.variables()))
    entries = [_entry(ring, ring.to_dense(g)) for g in basis.generators]
    return ring.to_poly(_reduce(ring, ring.to_dense(p), entries))


def ideal_member(p, basis):
    return normal_form(p, basis).is_zero()


def s_polynomial(f, g, order):
    ring = _Ring(order)
    return ring.to_poly(_spoly(ring, ring.to_dense(f), ring.to_dense(g)))


def eliminate(gens, drop, keep, budget=DEFAULT_STEP_BUDGET):
    """Basis of ``<gens>`` intersected with the ring over ``keep``."""
    drop, keep = tuple(drop), tuple(keep)
    if set(drop) & set(keep):
        raise ValueError("drop and keep variables overlap")
    gens = [Polynomial.coerce(g) for g in gens]
    allowed = set(drop) | set(keep)
    for g in gens:
        extra = g.variables() - allowed
        if extra:
            raise ValueError(f"variables {sorted(extra)} are neither dropped nor kept")
    full = buchberger(gens, MonomialOrder.elimination(drop, keep), budget)
    keep_order = MonomialOrder("grevlex", keep)
    dropped = set(drop)
    kept = [g for g in full.generators if not (g.variables() & dropped)]
    kept.sort(key=lambda g: keep_order.key(g.leading_term(keep_order)[0]))
    return IdealBasis(tuple(kept), keep_order, True)


def intersect_ideals(G, H, budget=DEFAULT_STEP_BUDGET):
    keep = list(G.order.precedence)
    keep += [v for v in H.order.precedence if v not in keep]
    t = fresh_name("t", set(keep))
    tv = Polynomial.var(t)
    gens = [tv * g for g in G.generators] + [(1 - tv) * h for h in H.generators]
    return eliminate(gens, [t], keep, budget)


def ideals_equal(G, H):
    return all(ideal_member(g, H) for g in G.generators) and all(
        ideal_member(h, G) for h in H.generators
    )
