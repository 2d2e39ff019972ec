"""Explicit-state CTL checking for bounded models (a test and debugging aid)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from . import ctl as C
from .kripke import Model, prime


@dataclass
class ExplicitGraph:
    names: tuple[str, ...]
    states: list[dict]
    init: list[int]
    succ: list[list[int]]

    @property
    def pred(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.states]
        for i, ss in enumerate(self.succ):
            for j in ss:
                out[j].append(i)
        return out


def domains(m: Model, box: Mapping[str, tuple[int, int]] | None = None) -> dict[str, list]:
    out = {}
    for d in m.vars:
        if d.bounded:
            out[d.name] = d.values_range()
        elif box and d.name in box:
            lo, hi = box[d.name]
            out[d.name] = list(range(lo, hi + 1))
        else:
            raise ValueError(f"variable {d.name} is unbounded; give a box")
    return out


def explore(m: Model, box: Mapping[str, tuple[int, int]] | None = None) -> ExplicitGraph:
    """All states of the (boxed) model with their in-box successors."""
    dom = domains(m, box)
    names = m.names
    states = [dict(zip(names, vals)) for vals in itertools.product(*(dom[n] for n in names))]
    init = [i for i, s in enumerate(states) if m.init.contains(s)]
    succ: list[list[int]] = []
    rels = [t.relation for t in m.transitions]
    for s in states:
        out = []
        for j, t in enumerate(states):
            point = dict(s)
            point.update({prime(n): t[n] for n in names})
            if any(r.contains(point) for r in rels):
                out.append(j)
        succ.append(out)
    return ExplicitGraph(names, states, init, succ)


def sat_set(f: C.Ctl, g: ExplicitGraph) -> set[int]:
    n = len(g.states)
    every = set(range(n))
    pred = g.pred

    def ex(z: set[int]) -> set[int]:
        return {i for j in z for i in pred[j]}

    def eu(a: set[int], b: set[int]) -> set[int]:
        z = set(b)
        frontier = list(b)
        while frontier:
            j = frontier.pop()
            for i in pred[j]:
                if i in a and i not in z:
                    z.add(i)
                    frontier.append(i)
        return z

    def eg(a: set[int]) -> set[int]:
        z = set(a)
        while True:
            nxt = {i for i in z if any(j in z for j in g.succ[i])}
            if nxt == z:
                return z
            z = nxt

    def go(h: C.Ctl) -> set[int]:
        k, a = h.kind, h.args
        if k == C.ATOM:
            return {i for i, s in enumerate(g.states) if h.region.contains(s)}
        if k == C.NOT:
            return every - go(a[0])
        if k == C.AND:
            return go(a[0]) & go(a[1])
        if k == C.OR:
            return go(a[0]) | go(a[1])
        if k == C.EX:
            return ex(go(a[0]))
        if k == C.EU:
            return eu(go(a[0]), go(a[1]))
        if k == C.EF:
            return eu(every, go(a[0]))
        if k == C.EG:
            return eg(go(a[0]))
        if k == C.AX:
            return every - ex(every - go(a[0]))
        if k == C.AG:
            return every - eu(every, every - go(a[0]))
        if k == C.AF:
            return every - eg(every - go(a[0]))
        if k == C.AU:
            n1, n2 = every - go(a[0]), every - go(a[1])
            return every - (eu(n2, n1 & n2) | eg(n2))
        raise ValueError(k)

    return go(f)


def check_explicit(m: Model, f: C.Ctl, box: Mapping[str, tuple[int, int]] | None = None) -> bool:
    """``True`` iff every initial state satisfies ``f``."""
    g = explore(m, box)
    sat = sat_set(f, g)
    return all(i in sat for i in g.init)


def reachable(g: ExplicitGraph, steps: int | None = None) -> set[int]:
    seen = set(g.init)
    frontier = list(g.init)
    depth = 0
    while frontier and (steps is None or depth < steps):
        nxt = []
        for i in frontier:
            for j in g.succ[i]:
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
        depth += 1
    return seen
