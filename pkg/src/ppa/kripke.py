"""Transition systems over boolean, enum and integer variables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .presburger import EQ, BoolLit, linear
from .region import Region, entails, region_exists, rename, widen

INT, BOOL, ENUM = "int", "bool", "enum"


def prime(name: str) -> str:
    return name + "'"


def unprime(name: str) -> str:
    return name[:-1] if name.endswith("'") else name


def is_primed(name: str) -> bool:
    return name.endswith("'")


@dataclass(frozen=True)
class VarDecl:
    name: str
    kind: str = INT
    values: tuple[str, ...] = ()
    lo: int | None = None
    hi: int | None = None

    def __post_init__(self):
        if self.kind == ENUM:
            if not self.values or len(set(self.values)) != len(self.values):
                raise ValueError(f"enum {self.name}: values must be non-empty and distinct")
            object.__setattr__(self, "lo", 0)
            object.__setattr__(self, "hi", len(self.values) - 1)

    @property
    def is_int(self) -> bool:
        """Integer-valued (plain ints, ranges and enums)."""
        return self.kind != BOOL

    @property
    def bounded(self) -> bool:
        return self.kind == BOOL or (self.lo is not None and self.hi is not None)

    def domain(self, primed: bool = False) -> Region:
        name = prime(self.name) if primed else self.name
        atoms = []
        if self.kind != BOOL:
            if self.lo is not None:
                atoms.append(linear({name: -1}, self.lo))
            if self.hi is not None:
                atoms.append(linear({name: 1}, -self.hi))
        return Region.of(*atoms, vars=[name])

    def frame(self) -> Region:
        """``v' = v``."""
        p = prime(self.name)
        if self.kind == BOOL:
            return Region([(BoolLit(self.name, True), BoolLit(p, True)),
                           (BoolLit(self.name, False), BoolLit(p, False))], [self.name, p])
        return Region.of(linear({p: 1, self.name: -1}, 0, EQ), vars=[self.name, p])

    def values_range(self) -> list:
        if self.kind == BOOL:
            return [False, True]
        return list(range(self.lo, self.hi + 1))


@dataclass(frozen=True)
class Transition:
    name: str
    relation: Region


@dataclass(frozen=True)
class Model:
    vars: tuple[VarDecl, ...]
    init: Region
    transitions: tuple[Transition, ...] = ()
    props: tuple = ()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.vars)

    @property
    def primed_names(self) -> tuple[str, ...]:
        return tuple(prime(v.name) for v in self.vars)

    def decl(self, name: str) -> VarDecl:
        for v in self.vars:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def discrete(self) -> frozenset[str]:
        """Variables (both copies) with a finite domain."""
        out = set()
        for v in self.vars:
            if v.bounded:
                out.update((v.name, prime(v.name)))
        return frozenset(out)

    @property
    def finite(self) -> bool:
        return all(v.bounded for v in self.vars)

    def domain(self, primed: bool = False) -> Region:
        r = Region.full([prime(v.name) if primed else v.name for v in self.vars])
        for v in self.vars:
            r = r & v.domain(primed)
        return r

    @property
    def relation(self) -> Region:
        r = Region.empty(self.names + self.primed_names)
        for t in self.transitions:
            r = r | t.relation
        return r

    def post(self, a: Region) -> Region:
        out = Region.empty(self.names)
        for t in self.transitions:
            out = out | post_image(t.relation, a, self.names)
        return out

    def pre(self, a: Region) -> Region:
        out = Region.empty(self.names)
        for t in self.transitions:
            out = out | pre_image(t.relation, a, self.names)
        return out


def post_image(r: Region, a: Region, names: Sequence[str] | None = None) -> Region:
    if names is None:
        names = sorted({v for v in r.vars | a.vars if not is_primed(v)})
    img = region_exists(names, r & a)
    return rename(img, {prime(v): v for v in names})


def pre_image(r: Region, a: Region, names: Sequence[str] | None = None) -> Region:
    if names is None:
        names = sorted({v for v in r.vars | a.vars if not is_primed(v)})
    primed = rename(a, {v: prime(v) for v in names})
    return region_exists([prime(v) for v in names], r & primed)


def elaborate_frames(vars: Sequence[VarDecl], relation: Region) -> Region:
    """Add ``v' = v`` for every variable whose primed copy does not occur."""
    mentioned = set()
    for c in relation.cubes:
        mentioned |= c.vars
    out = relation
    for v in vars:
        if prime(v.name) not in mentioned:
            out = out & v.frame()
    return out.with_vars([v.name for v in vars] + [prime(v.name) for v in vars])


def make_model(vars: Sequence[VarDecl], init: Region,
               transitions: Iterable[tuple[str, Region]] = (), props: Sequence = ()) -> Model:
    """Elaborate frames and conjoin domain constraints."""
    vars = tuple(vars)
    names = [v.name for v in vars]
    if len(set(names)) != len(names):
        raise ValueError("duplicate variable declaration")
    cur = Region.full(names)
    nxt = Region.full([prime(n) for n in names])
    for v in vars:
        cur = cur & v.domain()
        nxt = nxt & v.domain(True)
    trans = []
    for name, rel in transitions:
        rel = elaborate_frames(vars, rel) & cur & nxt
        trans.append(Transition(name, rel))
    return Model(vars, (init & cur).with_vars(names), tuple(trans), tuple(props))


def reach_over(m: Model, ws: int | None, max_iter: int | None = None) -> Region:
    """Over-approximation of the reachable states.

    ``ws=None`` disables widening, which is exact but only terminates on
    finite reachable sets (``max_iter`` then bounds the loop).
    """
    z = m.init
    n = 0
    disc = m.discrete
    while max_iter is None or n < max_iter:
        nxt = widen(z, z | m.post(z), n, ws, disc)
        if entails(nxt, z):
            return z
        z = nxt
        n += 1
    return Region.full(m.names)
