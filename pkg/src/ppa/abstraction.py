"""Partial predicate abstraction.

Only the integer variables mentioned by the predicates are abstracted; each
predicate ``phi_i`` gets a boolean proxy ``b_i`` and every other variable
keeps its concrete semantics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from . import ctl as C
from .frontend import Predicate, PredicateSet, format_region
from .kripke import BOOL, Model, Transition, VarDecl, prime
from .presburger import BoolLit
from .region import (
    Region,
    compact,
    equivalent,
    region_and,
    region_exists,
    region_not,
    region_or,
    region_substitute,
    rename,
)


class PreconditionViolated(ValueError):
    pass


def _iff(a: Region, b: Region) -> Region:
    return region_or(region_and(a, b), region_and(region_not(a), region_not(b)))


@dataclass
class AbstractionContext:
    model: Model
    preds: PredicateSet
    proxies: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.proxies:
            taken = set(self.model.names)
            names = []
            for i in range(1, len(self.preds) + 1):
                n = f"b{i}"
                while n in taken:
                    n = "_" + n
                taken.add(n)
                names.append(n)
            self.proxies = tuple(names)
        if len(self.proxies) != len(self.preds):
            raise ValueError("one proxy per predicate required")
        for p in self.preds:
            for v in p.vars:
                d = self.model.decl(v)
                if d.kind != "int":
                    raise PreconditionViolated(f"predicate {p.text!r} mentions non-integer {v!r}")

    # -- variable sets
    @cached_property
    def abstracted(self) -> frozenset[str]:
        """V(phi)."""
        return self.preds.vars

    @cached_property
    def abstracted_primed(self) -> frozenset[str]:
        return frozenset(prime(v) for v in self.abstracted)

    @cached_property
    def retained(self) -> tuple[VarDecl, ...]:
        return tuple(d for d in self.model.vars if d.name not in self.abstracted)

    @cached_property
    def abstract_vars(self) -> tuple[VarDecl, ...]:
        """Retained concrete variables followed by the proxies."""
        return self.retained + tuple(VarDecl(b, BOOL) for b in self.proxies)

    @cached_property
    def env(self) -> dict[str, VarDecl]:
        out = {d.name: d for d in self.model.vars}
        out.update({b: VarDecl(b, BOOL) for b in self.proxies})
        return out

    def show(self, r: Region) -> str:
        return format_region(r, self.env)

    # -- building blocks
    def proxy(self, i: int, primed: bool = False) -> Region:
        name = prime(self.proxies[i]) if primed else self.proxies[i]
        return Region.of(BoolLit(name, True), vars=[name])

    def pred_region(self, i: int, primed: bool = False) -> Region:
        r = self.preds[i].region
        return rename(r, {v: prime(v) for v in r.vars}) if primed else r

    def bicond(self, primed: bool = False) -> Region:
        key = "_bicond_p" if primed else "_bicond"
        cached = self.__dict__.get(key)
        if cached is None:
            cached = Region.full()
            for i in range(len(self.preds)):
                cached = region_and(cached, _iff(self.proxy(i, primed), self.pred_region(i, primed)))
            self.__dict__[key] = cached
        return cached

    @cached_property
    def consistency(self) -> Region:
        """Per predicate: unchanged variables force an unchanged proxy."""
        cs = Region.full()
        for i, p in enumerate(self.preds):
            same = Region.full()
            for v in sorted(p.vars):
                same = region_and(same, self.model.decl(v).frame())
            clause = region_or(region_not(same), _iff(self.proxy(i, True), self.proxy(i)))
            cs = region_and(cs, clause)
        return cs

    @cached_property
    def feasible(self) -> Region:
        """alpha(true): proxy valuations with a concrete witness."""
        return self.alpha(Region.full())

    # -- states
    def alpha(self, s: Region) -> Region:
        if not self.preds:
            return s
        return region_exists(self.abstracted, region_and(s, self.bicond()))

    def gamma(self, s: Region) -> Region:
        if not self.preds:
            return s
        return region_substitute(s, {b: self.preds[i].region for i, b in enumerate(self.proxies)})

    # -- transitions
    def alpha_relation(self, r: Region) -> Region:
        if not self.preds:
            return r
        # conjoin onto r first: every step prunes against the relation
        body = r
        for part in (self.bicond(), self.bicond(True), self.consistency):
            body = region_and(body, part)
            if body.is_empty():
                break
        return region_exists(self.abstracted | self.abstracted_primed, body)

    def gamma_relation(self, r: Region) -> Region:
        if not self.preds:
            return r
        binding = {b: self.preds[i].region for i, b in enumerate(self.proxies)}
        binding.update({prime(b): self.pred_region(i, True) for i, b in enumerate(self.proxies)})
        return region_substitute(r, binding)

    def alpha_trans(self, t: Transition) -> Transition:
        return Transition(t.name, self.alpha_relation(t.relation))

    def gamma_trans(self, t: Transition) -> Transition:
        return Transition(t.name, self.gamma_relation(t.relation))

    # -- systems
    def abstract_model(self) -> Model:
        names = [d.name for d in self.abstract_vars]
        universe = names + [prime(n) for n in names]
        trans = tuple(Transition(t.name, self.alpha_relation(t.relation).with_vars(universe))
                      for t in self.model.transitions)
        props = []
        for p in self.model.props:
            try:
                props.append(self.abstract_formula(p))
            except PreconditionViolated:
                pass
        return Model(self.abstract_vars, self.alpha(self.model.init).with_vars(names), trans,
                     tuple(props))

    # -- formulas
    def abstract_atom(self, r: Region) -> Region:
        if not (r.vars & self.abstracted):
            return r
        # exactness only matters on well-typed states
        dom = Region.full()
        for v in sorted(self.abstracted):
            dom = dom & self.model.decl(v).domain()
        a = self.alpha(r & dom)
        if not equivalent(self.gamma(a) & dom, r & dom):
            raise PreconditionViolated(
                f"atom {format_region(r, self.env)!r} is not expressible over the predicates")
        if a.vars <= set(self.proxies):
            a = self._minimize(a)
        return a

    def abstract_formula(self, f: C.Ctl) -> C.Ctl:
        def fn(node: C.Ctl) -> C.Ctl:
            r = self.abstract_atom(node.region)
            if r is node.region:
                return node
            return C.atom(r, self.show(r))
        return C.map_atoms(f, fn)

    def concretize_formula(self, f: C.Ctl) -> C.Ctl:
        def fn(node: C.Ctl) -> C.Ctl:
            if not (node.region.vars & set(self.proxies)):
                return node
            r = compact(self.gamma(node.region))
            return C.atom(r, format_region(r, self.env))
        return C.map_atoms(f, fn)

    def _minimize(self, a: Region) -> Region:
        """Smallest-looking DNF over the proxies, using infeasible valuations as don't-cares."""
        names = sorted(a.vars | self.feasible.vars & set(self.proxies))
        on, dc = [], []
        for bits in itertools.product((0, 1), repeat=len(names)):
            point = dict(zip(names, map(bool, bits)))
            if a.contains(point):
                on.append(bits)
            elif not self.feasible.contains(point):
                dc.append(bits)
        cover = minimize_dnf(on, dc, len(names))
        cubes = [tuple(BoolLit(names[i], bool(v)) for i, v in enumerate(imp) if v is not None)
                 for imp in cover]
        return Region(cubes, a.vars)


def minimize_dnf(on, dc, n: int) -> list[tuple]:
    """Prime-implicant cover of ``on`` allowing ``dc`` (0/1 tuples)."""
    if not on:
        return []
    terms = {tuple(t) for t in on} | {tuple(t) for t in dc}
    primes: set[tuple] = set()
    while terms:
        merged: set[tuple] = set()
        used: set[tuple] = set()
        tl = sorted(terms, key=lambda t: tuple(-1 if x is None else x for x in t))
        for x, y in itertools.combinations(tl, 2):
            diff = [i for i in range(n) if x[i] != y[i]]
            if len(diff) == 1 and x[diff[0]] is not None and y[diff[0]] is not None:
                m = list(x)
                m[diff[0]] = None
                merged.add(tuple(m))
                used.update((x, y))
        primes |= terms - used
        terms = merged

    def covers(imp, t):
        return all(v is None or v == t[i] for i, v in enumerate(imp))

    def key(imp):
        return (sum(v is not None for v in imp), tuple(-1 if v is None else v for v in imp))

    remaining = {tuple(t) for t in on}
    chosen: list[tuple] = []
    for imp in sorted(primes, key=key):
        if any(covers(imp, t) and not any(covers(p, t) for p in primes if p != imp) for t in remaining):
            chosen.append(imp)
    for imp in chosen:
        remaining = {t for t in remaining if not covers(imp, t)}
    while remaining:
        best = max(sorted(primes, key=key), key=lambda p: sum(covers(p, t) for t in remaining))
        chosen.append(best)
        remaining = {t for t in remaining if not covers(best, t)}
    return sorted(set(chosen), key=key)


def alpha_state(s: Region, ctx: AbstractionContext) -> Region:
    return ctx.alpha(s)


def gamma_state(s: Region, ctx: AbstractionContext) -> Region:
    return ctx.gamma(s)


def consistency_constraint(ctx: AbstractionContext) -> Region:
    return ctx.consistency


def alpha_trans(t: Transition, ctx: AbstractionContext) -> Transition:
    return ctx.alpha_trans(t)


def gamma_trans(t: Transition, ctx: AbstractionContext) -> Transition:
    return ctx.gamma_trans(t)


def build_abstract_model(m: Model, preds: PredicateSet) -> tuple[Model, AbstractionContext]:
    ctx = AbstractionContext(m, preds)
    return ctx.abstract_model(), ctx


def abstract_formula(f: C.Ctl, ctx: AbstractionContext) -> C.Ctl:
    return ctx.abstract_formula(f)


def concretize_formula(f: C.Ctl, ctx: AbstractionContext) -> C.Ctl:
    return ctx.concretize_formula(f)


def make_predicate(r: Region, env=None) -> Predicate:
    return Predicate(format_region(r, env), r)
