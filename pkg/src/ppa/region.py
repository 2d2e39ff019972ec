"""Symbolic state sets over booleans and unbounded integers.

A :class:`Region` is a finite disjunction of :class:`Cube` values; each cube
is a conjunction of atoms from :mod:`ppa.presburger`.  Regions are immutable
and every stored cube is satisfiable, so ``is_empty`` is a length test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .presburger import (
    EQ,
    Atom,
    BoolLit,
    Congruence,
    Linear,
    UnsupportedCoefficient,
    atom_key,
    congruence,
    conjoin,
    int_vars,
    linear,
    negate_atom,
    project,
    satisfiable,
    split_equalities,
)

__all__ = [
    "Atom",
    "BoolLit",
    "Congruence",
    "Cube",
    "EmptyRegion",
    "Linear",
    "PickedModel",
    "Region",
    "compact",
    "UnsupportedCoefficient",
    "dual_widen",
    "entails",
    "equivalent",
    "is_empty",
    "pick_model",
    "region_and",
    "region_exists",
    "region_not",
    "region_or",
    "region_substitute",
    "rename",
    "simplify",
    "widen",
]

# Hard stop for pathological ascending chains: past this many widened
# applications the result is the full space.
WIDEN_GIVE_UP = 64


class EmptyRegion(Exception):
    pass


@dataclass(frozen=True)
class Cube:
    atoms: tuple[Atom, ...] = ()

    @property
    def vars(self) -> frozenset[str]:
        out: set[str] = set()
        for a in self.atoms:
            out.update(a.vars)
        return frozenset(out)

    def contains(self, point: Mapping[str, object]) -> bool:
        return all(a.evaluate(point) for a in self.atoms)

    def __str__(self) -> str:
        if not self.atoms:
            return "true"
        return " && ".join(str(a) for a in self.atoms)


def _cube_key(cube: Cube):
    return tuple(atom_key(a) for a in cube.atoms)


def _sat(atoms: tuple[Atom, ...]) -> bool:
    return satisfiable(atoms)


def _drop_subsumed(cubes: list[tuple[Atom, ...]]) -> list[tuple[Atom, ...]]:
    # a cube whose atom set contains another cube's atom set is redundant
    cubes = sorted(set(cubes), key=len)
    sets = [frozenset(c) for c in cubes]
    keep: list[int] = []
    for i, s in enumerate(sets):
        if not any(sets[j] <= s for j in keep):
            keep.append(i)
    return [cubes[i] for i in keep]


class Region:
    """Immutable disjunction of satisfiable cubes over a variable universe."""

    __slots__ = ("cubes", "vars", "_hash")

    def __init__(self, cubes: Iterable[Cube | Iterable[Atom]] = (), vars: Iterable[str] = ()):
        normal: list[tuple[Atom, ...]] = []
        for c in cubes:
            atoms = c.atoms if isinstance(c, Cube) else tuple(c)
            n = conjoin(atoms)
            if n is not None and _sat(n):
                normal.append(n)
        normal = _drop_subsumed(normal)
        ordered = sorted((Cube(c) for c in normal), key=_cube_key)
        universe = set(vars)
        for c in ordered:
            universe |= c.vars
        object.__setattr__(self, "cubes", tuple(ordered))
        object.__setattr__(self, "vars", frozenset(universe))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Region is immutable")

    @classmethod
    def full(cls, vars: Iterable[str] = ()) -> "Region":
        return cls([()], vars)

    @classmethod
    def empty(cls, vars: Iterable[str] = ()) -> "Region":
        return cls([], vars)

    @classmethod
    def of(cls, *atoms: Atom | bool, vars: Iterable[str] = ()) -> "Region":
        """Single-cube region from atoms (``True``/``False`` allowed)."""
        if any(a is False for a in atoms):
            return cls.empty(vars)
        return cls([tuple(a for a in atoms if a is not True)], vars)

    def is_empty(self) -> bool:
        return not self.cubes

    def is_full(self) -> bool:
        return any(not c.atoms for c in self.cubes)

    def contains(self, point: Mapping[str, object]) -> bool:
        return any(c.contains(point) for c in self.cubes)

    def with_vars(self, vars: Iterable[str]) -> "Region":
        return Region(self.cubes, set(self.vars) | set(vars))

    def __and__(self, other: "Region") -> "Region":
        return region_and(self, other)

    def __or__(self, other: "Region") -> "Region":
        return region_or(self, other)

    def __invert__(self) -> "Region":
        return region_not(self)

    def __sub__(self, other: "Region") -> "Region":
        return difference(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, Region) and self.cubes == other.cubes

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(self.cubes)
            object.__setattr__(self, "_hash", h)
        return h

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def __str__(self) -> str:
        if not self.cubes:
            return "false"
        if len(self.cubes) == 1:
            return str(self.cubes[0])
        return " || ".join(f"({c})" if len(c.atoms) > 1 else str(c) for c in self.cubes)

    def __repr__(self) -> str:
        return f"Region({self})"


# ---------------------------------------------------------------------------
# boolean algebra


def region_and(a: Region, b: Region) -> Region:
    out = []
    for ca in a.cubes:
        for cb in b.cubes:
            n = conjoin(ca.atoms + cb.atoms)
            if n is not None:
                out.append(n)
    return Region(out, a.vars | b.vars)


def region_or(a: Region, b: Region) -> Region:
    return Region(a.cubes + b.cubes, a.vars | b.vars)


def _subtract_cube(pieces: list[tuple[Atom, ...]], cube: tuple[Atom, ...]) -> list[tuple[Atom, ...]]:
    negs = [negate_atom(a) for a in cube]
    out: list[tuple[Atom, ...]] = []
    for p in pieces:
        meet = conjoin(p + cube)
        if meet is None or not _sat(meet):
            out.append(p)
            continue
        if set(cube) <= set(p):
            continue
        # p \ cube = OR_i (p & a_1 & .. & a_{i-1} & !a_i), disjoint pieces
        prefix: tuple[Atom, ...] = p
        for atom, neg in zip(cube, negs):
            for n in neg:
                c = conjoin(prefix + (n,))
                if c is not None and _sat(c):
                    out.append(c)
            nxt = conjoin(prefix + (atom,))
            if nxt is None:
                break
            prefix = nxt
    return out


def difference(a: Region, b: Region) -> Region:
    pieces = [c.atoms for c in a.cubes]
    for cb in b.cubes:
        if not pieces:
            break
        pieces = _subtract_cube(pieces, cb.atoms)
    return Region(pieces, a.vars | b.vars)


def region_not(a: Region) -> Region:
    return difference(Region.full(a.vars), a)


def is_empty(a: Region) -> bool:
    return a.is_empty()


def entails(a: Region, b: Region) -> bool:
    """``a`` is a subset of ``b``."""
    bsets = [frozenset(cb.atoms) for cb in b.cubes]
    for ca in a.cubes:
        s = frozenset(ca.atoms)
        if any(bs <= s for bs in bsets):
            continue
        pieces = [ca.atoms]
        for cb in b.cubes:
            pieces = _subtract_cube(pieces, cb.atoms)
            if not pieces:
                break
        if pieces:
            return False
    return True


def equivalent(a: Region, b: Region) -> bool:
    return entails(a, b) and entails(b, a)


def cube_entails_atom(atoms: tuple[Atom, ...], atom: Atom) -> bool:
    return _cube_entails_atom(atoms, atom)


@lru_cache(maxsize=200_000)
def _cube_entails_atom(atoms: tuple[Atom, ...], atom: Atom) -> bool:
    for n in negate_atom(atom):
        c = conjoin(atoms + (n,))
        if c is not None and _sat(c):
            return False
    return True


# ---------------------------------------------------------------------------
# quantification and substitution


def region_exists(vars: Iterable[str], a: Region, general: bool = True) -> Region:
    """Exact projection of ``vars`` out of ``a``."""
    vs = frozenset(vars)
    if not vs:
        return a
    out: list[tuple[Atom, ...]] = []
    for c in a.cubes:
        atoms = tuple(x for x in c.atoms if not (isinstance(x, BoolLit) and x.var in vs))
        ints = vs & int_vars(atoms)
        if ints:
            out.extend(project(atoms, ints, general))
        else:
            out.append(atoms)
    return Region(out, a.vars - vs)


def _rename_atom(atom: Atom, mapping: Mapping[str, str]) -> Atom | bool:
    if isinstance(atom, BoolLit):
        return BoolLit(mapping.get(atom.var, atom.var), atom.polarity)
    coeffs: dict[str, int] = {}
    for v, c in atom.coeffs:
        w = mapping.get(v, v)
        coeffs[w] = coeffs.get(w, 0) + c
    if isinstance(atom, Linear):
        return linear(coeffs, atom.const, atom.rel)
    return congruence(coeffs, atom.const, atom.modulus)


def rename(a: Region, mapping: Mapping[str, str]) -> Region:
    if not mapping:
        return a
    cubes = [tuple(_rename_atom(x, mapping) for x in c.atoms) for c in a.cubes]
    return Region(cubes, {mapping.get(v, v) for v in a.vars})


def region_substitute(a: Region, binding: Mapping[str, Region] | None = None,
                      rename_map: Mapping[str, str] | None = None) -> Region:
    """Replace boolean variables by formulas, then rename variables."""
    binding = binding or {}
    result = Region.empty(a.vars - set(binding))
    negated: dict[str, Region] = {}
    for c in a.cubes:
        rest = tuple(x for x in c.atoms if not (isinstance(x, BoolLit) and x.var in binding))
        part = Region([rest], a.vars - set(binding))
        for x in c.atoms:
            if isinstance(x, BoolLit) and x.var in binding:
                if x.polarity:
                    part = part & binding[x.var]
                else:
                    if x.var not in negated:
                        negated[x.var] = region_not(binding[x.var])
                    part = part & negated[x.var]
                if part.is_empty():
                    break
        result = result | part
    return rename(result, rename_map or {})


# ---------------------------------------------------------------------------
# widening


def _signature(atoms: tuple[Atom, ...], discrete: frozenset[str]) -> tuple[Atom, ...]:
    return tuple(x for x in atoms if set(x.vars) <= discrete)


def widen(a: Region, b: Region, iteration: int, seed: int | None,
          discrete: Iterable[str] = ()) -> Region:
    """Widening of ``a`` by ``b``; plain union while ``iteration < seed``.

    Each cube of ``b`` not already covered by ``a`` is paired with the cube
    of ``a`` that has the same discrete signature (atoms over ``discrete``
    variables) and the most atoms entailed by it; the pair is replaced by
    the entailed atoms of the ``a`` cube.  All ``b`` cubes paired with the
    same ``a`` cube share one relaxed cube.  Unpaired cubes are kept.
    """
    if seed is None or iteration < seed:
        return region_or(a, b)
    if iteration - seed >= WIDEN_GIVE_UP:
        return Region.full(a.vars | b.vars)
    disc = frozenset(discrete)
    a_cubes = [c.atoms for c in a.cubes]
    split = [split_equalities(c) for c in a_cubes]
    sigs = [_signature(c, disc) for c in a_cubes]
    kept: dict[int, set[Atom]] = {}
    verbatim: list[tuple[Atom, ...]] = []
    for cb in b.cubes:
        if entails(Region([cb.atoms]), a):
            continue
        sig = _signature(cb.atoms, disc)
        best, best_atoms = None, None
        for i, ca in enumerate(split):
            if sigs[i] != sig:
                continue
            ent = {x for x in ca if _cube_entails_atom(cb.atoms, x)}
            if best is None or len(ent) > len(best_atoms):
                best, best_atoms = i, ent
        if best is None:
            verbatim.append(cb.atoms)
        elif best in kept:
            kept[best] &= best_atoms
        else:
            kept[best] = best_atoms
    out = [c for i, c in enumerate(a_cubes) if i not in kept]
    out.extend(tuple(sorted(s, key=atom_key)) for s in kept.values())
    out.extend(verbatim)
    return Region(out, a.vars | b.vars)


def dual_widen(a: Region, b: Region, iteration: int, bound: int | None) -> Region:
    """Dual widening: exact meet before ``bound``, then the common-cube core.

    From ``iteration >= 2 * bound`` on, a core that still differs from ``a``
    collapses to the empty region.
    """
    if bound is None or iteration < bound:
        return region_and(a, b)
    sa, sb = simplify(a), simplify(b)
    common = set(sb.cubes)
    core = Region([c for c in sa.cubes if c in common], a.vars | b.vars)
    if core != sa and iteration >= 2 * bound:
        return Region.empty(a.vars | b.vars)
    return core


# ---------------------------------------------------------------------------
# models and simplification


@dataclass(frozen=True)
class PickedModel:
    cube: Cube
    point: dict[str, object] = field(default_factory=dict)


def _closest_to_zero(atoms: tuple[Atom, ...], var: str) -> int:
    lo = hi = None
    mods: list[Congruence] = []
    for x in atoms:
        if isinstance(x, Linear):
            c = x.coeff(var)
            bound = -x.const
            if x.rel == EQ:
                v = bound // c
                lo = v if lo is None else max(lo, v)
                hi = v if hi is None else min(hi, v)
            elif c > 0:
                v = bound // c
                hi = v if hi is None else min(hi, v)
            else:
                v = -(bound // -c)
                lo = v if lo is None else max(lo, v)
        elif isinstance(x, Congruence):
            mods.append(x)
    period = 1
    for m in mods:
        period = period * m.modulus // math.gcd(period, m.modulus)
    x0 = 0
    if lo is not None and x0 < lo:
        x0 = lo
    if hi is not None and x0 > hi:
        x0 = hi
    best = None
    for v in range(x0 - period, x0 + period + 1):
        if lo is not None and v < lo or hi is not None and v > hi:
            continue
        if all(m.evaluate({var: v}) for m in mods):
            if best is None or (abs(v), v < 0) < (abs(best), best < 0):
                best = v
    if best is None:  # pragma: no cover - the cube is satisfiable
        raise EmptyRegion(var)
    return best


def pick_model(a: Region) -> PickedModel:
    """First cube of ``a`` plus its smallest-magnitude point (lexicographic)."""
    if a.is_empty():
        raise EmptyRegion("pick_model on an empty region")
    cube = a.cubes[0]
    atoms = cube.atoms
    point: dict[str, object] = {}
    for x in atoms:
        if isinstance(x, BoolLit):
            point[x.var] = x.polarity
    for var in sorted(int_vars(atoms)):
        current = conjoin(atoms)
        others = int_vars(current) - {var}
        values = [_closest_to_zero(p, var) for p in project(current, others)]
        value = min(values, key=lambda v: (abs(v), v < 0))
        point[var] = value
        atoms = conjoin(atoms + (linear({var: 1}, -value, EQ),))
    return PickedModel(cube, dict(sorted(point.items())))


def simplify(a: Region) -> Region:
    """Drop cubes that are contained in another cube of ``a``."""
    cubes = [c.atoms for c in a.cubes]
    keep: list[tuple[Atom, ...]] = []
    for i, c in enumerate(cubes):
        redundant = False
        for j, d in enumerate(cubes):
            if i == j:
                continue
            if all(_cube_entails_atom(c, x) for x in d):
                # mutual containment keeps the earlier one
                if j < i or not all(_cube_entails_atom(d, x) for x in c):
                    redundant = True
                    break
        if not redundant:
            keep.append(c)
    return Region(keep, a.vars)


def compact(a: Region) -> Region:
    """Single-cube equivalent of ``a`` built from its own atoms, if one exists."""
    if len(a.cubes) < 2:
        return a
    candidates: list[Atom] = []
    for c in a.cubes:
        for x in split_equalities(c.atoms):
            if x not in candidates:
                candidates.append(x)
    hull = [x for x in candidates if all(_cube_entails_atom(c.atoms, x) for c in a.cubes)]
    cube = Region([tuple(hull)], a.vars)
    return cube if entails(cube, a) else a
