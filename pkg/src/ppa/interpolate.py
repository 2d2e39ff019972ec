"""Refinement predicates from a (deadend, bad) conflict."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .frontend import Predicate, PredicateSet, format_region
from .presburger import Linear, linear
from .region import Region, equivalent, region_and, region_not


class NoNewPredicates(Exception):
    pass


@dataclass(frozen=True)
class Conflict:
    deadend: Region
    bad: Region


def _linear_vars(r: Region) -> Counter:
    count: Counter = Counter()
    for c in r.cubes:
        for a in c.atoms:
            if not isinstance(a, Linear):
                continue
            for v in a.vars:
                count[v] += 1
    return count


def common_vars(c: Conflict, allowed: Iterable[str] | None = None, limit: int = 4) -> list[str]:
    d, b = _linear_vars(c.deadend), _linear_vars(c.bad)
    names = set(d) & set(b)
    if allowed is not None:
        names &= set(allowed)
    ranked = sorted(names, key=lambda v: (-(d[v] + b[v]), v))
    return sorted(ranked[:limit])


def _half(coeffs: dict[str, int], c: int, upper: bool) -> Region:
    """``a.v <= c`` when ``upper``, else ``a.v >= c``."""
    if upper:
        return Region.of(linear(coeffs, -c), vars=coeffs)
    return Region.of(linear({v: -k for v, k in coeffs.items()}, c), vars=coeffs)


def _tightest_upper(deadend: Region, coeffs: dict[str, int], const_bound: int) -> int | None:
    """Least ``c`` in the box with ``deadend`` inside ``a.v <= c``."""
    def inside(c: int) -> bool:
        return region_and(deadend, _half(coeffs, c + 1, upper=False)).is_empty()

    if not inside(const_bound):
        return None
    lo, hi = -const_bound, const_bound
    if inside(lo):
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return hi


def half_space_interpolant(c: Conflict, coeff_bound: int = 2, const_bound: int = 64,
                           allowed: Iterable[str] | None = None, max_vars: int = 4) -> list:
    """A single atom ``p`` with deadend inside ``p`` and bad disjoint from ``p``.

    Candidates ``a.v <= c`` range over coefficient vectors in
    ``[-coeff_bound, coeff_bound]`` on the most frequent shared variables.
    Fewer nonzero coefficients win, then smaller coefficients, then a
    smaller constant.  An empty list means no candidate in the box works.
    """
    if c.deadend.is_empty() or c.bad.is_empty():
        return []
    names = common_vars(c, allowed, max_vars)
    if not names:
        return []
    groups: dict[tuple[int, int], list[tuple[int, ...]]] = {}
    for vec in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=len(names)):
        nz = [abs(x) for x in vec if x]
        if not nz or math.gcd(*nz) != 1:
            continue
        groups.setdefault((len(nz), sum(nz)), []).append(vec)
    for key in sorted(groups):
        found = []
        for vec in groups[key]:
            coeffs = {v: a for v, a in zip(names, vec) if a}
            bound = _tightest_upper(c.deadend, coeffs, const_bound)
            if bound is None:
                continue
            if region_and(c.bad, _half(coeffs, bound, upper=True)).is_empty():
                found.append((abs(bound), tuple(-x for x in vec), bound, coeffs))
        if found:
            _, _, bound, coeffs = min(found)
            return [linear(coeffs, -bound)]
    return []


def fallback_predicates(c: Conflict) -> list:
    """Every linear atom occurring in the deadend cubes, first occurrence order."""
    out = []
    for cube in c.deadend.cubes:
        for a in cube.atoms:
            if isinstance(a, Linear) and a not in out:
                out.append(a)
    return out


def candidates(c: Conflict, coeff_bound: int = 2, const_bound: int = 64,
               allowed: Iterable[str] | None = None) -> list:
    found = half_space_interpolant(c, coeff_bound, const_bound, allowed)
    if found:
        return found
    allowed = None if allowed is None else set(allowed)
    return [a for a in fallback_predicates(c) if allowed is None or set(a.vars) <= allowed]


def refine(c: Conflict, preds: PredicateSet, coeff_bound: int = 2, const_bound: int = 64,
           allowed: Iterable[str] | None = None, env=None) -> list[PredicateSet]:
    """One extension of ``preds`` per new candidate predicate, in candidate order."""
    out = []
    seen: list[Region] = [p.region for p in preds]
    for atom in candidates(c, coeff_bound, const_bound, allowed):
        r = Region.of(atom)
        if any(equivalent(r, q) or equivalent(r, region_not(q)) for q in seen):
            continue
        seen.append(r)
        out.append(preds.extend(Predicate(format_region(r, env), r)))
    if not out:
        raise NoNewPredicates("no new predicate separates the conflict")
    return out
