"""Approximate CTL model checking with recorded fixpoint iterates.

Each node is evaluated in a mode: ``over`` widens least fixpoints and
truncates greatest fixpoints, ``under`` truncates least fixpoints and
dual-widens greatest fixpoints.  Universal operators are evaluated as
complements of existential ones in the opposite mode.  Every result is
restricted to an over-approximation of the reachable states.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import ctl as C
from .kripke import Model, reach_over
from .region import Region, dual_widen, entails, region_and, region_or, widen

log = logging.getLogger(__name__)

OVER, UNDER = "over", "under"
VERIFIED, INCONCLUSIVE, VIOLATED_FINITE = "Verified", "Inconclusive", "ViolatedFinite"


def _flip(mode: str) -> str:
    return UNDER if mode == OVER else OVER


@dataclass
class IterMap:
    iters: dict[int, list[Region]] = field(default_factory=dict)
    modes: dict[int, str] = field(default_factory=dict)

    def __getitem__(self, nid: int) -> list[Region]:
        return self.iters[nid]

    def __contains__(self, nid: int) -> bool:
        return nid in self.iters

    def last(self, nid: int) -> Region:
        return self.iters[nid][-1]

    def total(self) -> int:
        return sum(len(v) for v in self.iters.values())


class Engine:
    def __init__(self, m: Model, ws: int | None, bound: int | None,
                 universe: Region | None = None):
        self.m = m
        self.ws = ws
        self.bound = bound
        self.universe = universe if universe is not None else reach_over(m, ws)
        self.disc = m.discrete
        self.iters = IterMap()
        self._memo: dict[tuple, tuple[Region, list[Region]]] = {}

    def restrict(self, r: Region) -> Region:
        return region_and(r, self.universe)

    def complement(self, r: Region) -> Region:
        return self.universe - r

    def solve(self, f: C.Ctl, mode: str = OVER) -> Region:
        key = (f, mode)
        hit = self._memo.get(key)
        if hit is None:
            out = self._solve(f, mode)
            hit = out if isinstance(out, tuple) else (out, [out])
            self._memo[key] = hit
        elif f.kind not in C.UNIVERSAL:
            # an equal subtree was solved under other node ids: register these too
            child_mode = _flip(mode) if f.kind == C.NOT else mode
            for a in f.args:
                self.solve(a, child_mode)
        if f.nid >= 0 and f.nid not in self.iters:
            self.iters.iters[f.nid] = hit[1]
            self.iters.modes[f.nid] = mode
        return hit[0]

    def _solve(self, f: C.Ctl, mode: str):
        k, a = f.kind, f.args
        if k == C.ATOM:
            return self.restrict(f.region)
        if k == C.NOT:
            return self.complement(self.solve(a[0], _flip(mode)))
        if k == C.AND:
            return region_and(self.solve(a[0], mode), self.solve(a[1], mode))
        if k == C.OR:
            return region_or(self.solve(a[0], mode), self.solve(a[1], mode))
        if k == C.EX:
            return self.restrict(self.m.pre(self.solve(a[0], mode)))
        if k == C.EU:
            return self._eu(f, self.solve(a[0], mode), self.solve(a[1], mode), mode)
        if k == C.EF:
            return self._eu(f, self.universe, self.solve(a[0], mode), mode)
        if k == C.EG:
            return self._eg(f, self.solve(a[0], mode), mode)
        # universal operators: complements of existential ones
        other = _flip(mode)
        neg = lambda g: C.to_nnf(g, True)  # noqa: E731
        if k == C.AX:
            inner = C.mk(C.EX, neg(a[0]))
        elif k == C.AG:
            inner = C.mk(C.EF, neg(a[0]))
        elif k == C.AF:
            inner = C.mk(C.EG, neg(a[0]))
        elif k == C.AU:
            n1, n2 = neg(a[0]), neg(a[1])
            inner = C.mk(C.OR, C.mk(C.EU, n2, C.mk(C.AND, n1, n2)), C.mk(C.EG, n2))
        else:
            raise ValueError(f"unknown node kind {k}")
        return self.complement(self.solve(inner, other))

    def _eu(self, f: C.Ctl, s1: Region, s2: Region, mode: str):
        z = s2
        chain = [z]
        n = 0
        while True:
            step = region_or(z, region_and(s1, self.m.pre(z)))
            if mode == OVER:
                nxt = self.restrict(widen(z, step, n, self.ws, self.disc))
            else:
                if self.bound is not None and n >= self.bound:
                    break
                nxt = self.restrict(step)
            n += 1
            if entails(nxt, z):
                break
            z = nxt
            chain.append(z)
        log.debug("EU node %d (%s): %d iterates", f.nid, mode, len(chain))
        return z, chain

    def _eg(self, f: C.Ctl, s1: Region, mode: str):
        z = s1
        chain = [z]
        n = 0
        while True:
            step = self.restrict(region_and(s1, self.m.pre(z)))
            if mode == OVER:
                if self.bound is not None and n >= self.bound:
                    break
                nxt = step
            else:
                nxt = dual_widen(z, step, n, self.bound)
            n += 1
            if entails(z, nxt):
                break
            z = nxt
            chain.append(z)
        log.debug("EG node %d (%s): %d iterates", f.nid, mode, len(chain))
        return z, chain


def compute_iter(g: C.Ctl, m: Model, ws: int | None, bound: int | None,
                 universe: Region | None = None) -> tuple[Region, IterMap]:
    """Over-approximate solution of ``g`` and its iterate map."""
    eng = Engine(m, ws, bound, universe)
    sol = eng.solve(g, OVER)
    return sol, eng.iters


def compute_under(g: C.Ctl, m: Model, ws: int | None, bound: int | None,
                  universe: Region | None = None) -> Region:
    eng = Engine(m, ws, bound, universe)
    return eng.solve(g, UNDER)


@dataclass
class CheckVerdict:
    verdict: str
    solution: Region
    iters: IterMap
    negated: C.Ctl
    universe: Region


def check_approx(m: Model, f: C.Ctl, ws: int | None = 1, bound: int | None = 5) -> CheckVerdict:
    """Decide ``f`` on ``m`` where the approximations allow it."""
    g = C.to_nnf_negate(f)
    eng = Engine(m, ws, bound)
    over = eng.solve(g, OVER)
    if region_and(m.init, over).is_empty():
        return CheckVerdict(VERIFIED, over, eng.iters, g, eng.universe)
    if m.finite:
        under = Engine(m, ws, bound, eng.universe).solve(g, UNDER)
        if not region_and(m.init, under).is_empty():
            return CheckVerdict(VIOLATED_FINITE, over, eng.iters, g, eng.universe)
    return CheckVerdict(INCONCLUSIVE, over, eng.iters, g, eng.universe)
