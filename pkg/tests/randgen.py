"""Random instances plus a direct evaluator that bypasses the region engine.

A region is generated together with its ``spec``: a list of cubes, each a
list of ``(coeffs, const, rel)`` triples meaning ``sum(c*v) + const <= 0``
(or ``= 0``).  ``eval_spec`` evaluates that with plain integer arithmetic.
"""

from __future__ import annotations

import itertools
import random

from ppa import ctl as C
from ppa.frontend import Predicate, PredicateSet
from ppa.kripke import BOOL, ENUM, INT, VarDecl, make_model, prime
from ppa.presburger import EQ, LE, BoolLit, linear
from ppa.region import Region

BOX = (-4, 4)


def box_points(names, lo=BOX[0], hi=BOX[1]):
    for vals in itertools.product(range(lo, hi + 1), repeat=len(names)):
        yield dict(zip(names, vals))


def rand_lin(rng: random.Random, names, coef=3, const=3, rels=(LE, LE, EQ)):
    """A satisfiable-looking linear constraint spec over a random subset of ``names``."""
    while True:
        k = rng.randint(1, min(2, len(names)))
        vs = rng.sample(list(names), k)
        coeffs = {v: rng.randint(-coef, coef) for v in vs}
        if any(coeffs.values()):
            return coeffs, rng.randint(-const, const), rng.choice(rels)


def spec_atom(spec):
    coeffs, const, rel = spec
    return linear(coeffs, const, rel)


def eval_lin(spec, point) -> bool:
    coeffs, const, rel = spec
    s = sum(c * point[v] for v, c in coeffs.items()) + const
    return s <= 0 if rel == LE else s == 0


def rand_region(rng: random.Random, names, max_cubes=3, max_atoms=3, coef=3, const=3):
    spec = []
    for _ in range(rng.randint(1, max_cubes)):
        spec.append([rand_lin(rng, names, coef, const) for _ in range(rng.randint(1, max_atoms))])
    return region_of_spec(spec, names), spec


def region_of_spec(spec, names) -> Region:
    cubes = []
    for cube in spec:
        atoms = [spec_atom(s) for s in cube]
        if any(a is False for a in atoms):
            continue
        cubes.append([a for a in atoms if a is not True])
    return Region(cubes, names)


def eval_spec(spec, point) -> bool:
    return any(all(eval_lin(s, point) for s in cube) for cube in spec)


def int_model(names):
    return make_model([VarDecl(n, INT) for n in names], Region.full(names))


def rand_preds(rng: random.Random, names, max_preds=3, coef=3, const=3):
    """Random single-atom predicates plus their specs."""
    preds, specs = [], []
    for _ in range(rng.randint(1, max_preds)):
        while True:
            s = rand_lin(rng, names, coef, const)
            a = spec_atom(s)
            if a not in (True, False):
                break
        preds.append(Predicate(str(a), Region.of(a)))
        specs.append(s)
    return PredicateSet(tuple(preds)), specs


def rand_bool_region(rng: random.Random, names, max_cubes=3) -> Region:
    """Random DNF over boolean variables ``names``."""
    cubes = []
    for _ in range(rng.randint(1, max_cubes)):
        k = rng.randint(1, len(names))
        cubes.append([BoolLit(n, rng.random() < 0.5) for n in rng.sample(list(names), k)])
    return Region(cubes, names)


def bool_points(names):
    for bits in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, bits))


# -- deterministic transitions: guard plus per-variable update x' = a.v + c

def rand_update_transition(rng: random.Random, names, coef=2, const=3):
    """``(relation, guard_spec, updates)`` with ``updates[v] = (coeffs, c)`` or ``None`` (frame)."""
    guard = rand_lin(rng, names, coef, const, rels=(LE,)) if rng.random() < 0.8 else None
    updates = {}
    for v in names:
        r = rng.random()
        if r < 0.3:
            updates[v] = None
        else:
            src = rng.choice(list(names))
            updates[v] = ({src: rng.choice((1, 1, -1, 2))}, rng.randint(-const, const))
    atoms = []
    if guard is not None:
        atoms.append(spec_atom(guard))
    for v, up in updates.items():
        if up is None:
            atoms.append(linear({prime(v): 1, v: -1}, 0, EQ))
        else:
            coeffs, c = up
            lhs = {prime(v): 1}
            for u, k in coeffs.items():
                lhs[u] = lhs.get(u, 0) - k
            atoms.append(linear(lhs, -c, EQ))
    atoms = [a for a in atoms if a is not True]
    universe = list(names) + [prime(n) for n in names]
    return Region.of(*atoms, vars=universe), guard, updates


def apply_update(point, guard, updates):
    if guard is not None and not eval_lin(guard, point):
        return None
    out = {}
    for v, up in updates.items():
        if up is None:
            out[v] = point[v]
        else:
            coeffs, c = up
            out[v] = sum(k * point[u] for u, k in coeffs.items()) + c
    return out


# -- small finite models and ACTL formulas

def rand_bounded_model(rng: random.Random, max_vars=3, max_dom=4, max_trans=3):
    n = rng.randint(1, max_vars)
    decls = []
    for i in range(n):
        kind = rng.choice(("range", "range", "bool", "enum"))
        if kind == "bool":
            decls.append(VarDecl(f"v{i}", BOOL))
        elif kind == "enum":
            k = rng.randint(2, max_dom)
            decls.append(VarDecl(f"v{i}", ENUM, tuple(f"e{j}" for j in range(k))))
        else:
            decls.append(VarDecl(f"v{i}", INT, lo=0, hi=rng.randint(1, max_dom - 1)))
    names = [d.name for d in decls]
    init_atoms = []
    for d in decls:
        if rng.random() < 0.7:
            init_atoms.append(_value_atom(d, rng.choice(d.values_range())))
    init = Region.of(*init_atoms, vars=names)
    trans = []
    for t in range(rng.randint(1, max_trans)):
        rel = Region.full(names + [prime(x) for x in names])
        if rng.random() < 0.7:
            rel = rel & _rand_state_atom(rng, decls)
        for d in decls:
            r = rng.random()
            if r < 0.4:
                continue
            p = prime(d.name)
            if d.kind == BOOL:
                if r < 0.7:
                    upd = Region([(BoolLit(d.name, True), BoolLit(p, False)),
                                  (BoolLit(d.name, False), BoolLit(p, True))])
                else:
                    upd = Region.of(BoolLit(p, rng.random() < 0.5))
            elif r < 0.7:
                upd = Region.of(linear({p: 1, d.name: -1}, -rng.choice((-1, 1)), EQ))
            else:
                upd = Region.of(linear({p: 1}, -rng.choice(d.values_range()), EQ))
            rel = rel & upd
        trans.append((f"t{t}", rel))
    return make_model(decls, init, trans)


def _value_atom(d: VarDecl, val):
    if d.kind == BOOL:
        return BoolLit(d.name, val)
    return linear({d.name: 1}, -val, EQ)


def _rand_state_atom(rng: random.Random, decls) -> Region:
    d = rng.choice(decls)
    if d.kind == BOOL:
        return Region.of(BoolLit(d.name, rng.random() < 0.5))
    val = rng.choice(d.values_range())
    rel = rng.choice((LE, EQ, "GE"))
    if rel == "GE":
        return Region.of(linear({d.name: -1}, val))
    return Region.of(linear({d.name: 1}, -val, rel))


def rand_actl(rng: random.Random, decls, depth=3) -> C.Ctl:
    if depth == 0 or rng.random() < 0.2:
        r = _rand_state_atom(rng, decls)
        if rng.random() < 0.3:
            return C.mk(C.NOT, C.atom(r))
        return C.atom(r)
    op = rng.choice((C.AND, C.OR, C.AX, C.AG, C.AF, C.AU))
    if op in (C.AND, C.OR, C.AU):
        return C.mk(op, rand_actl(rng, decls, depth - 1), rand_actl(rng, decls, depth - 1))
    return C.mk(op, rand_actl(rng, decls, depth - 1))
