"""Counter-example guided abstraction and approximation refinement.

The loop abstracts the model with the current predicates, approximates the
negated property, and when the abstract check fails walks an abstract
witness next to the concrete states it stands for.  The first point where
the concrete side runs empty is classified: if some concretization of the
previous abstract state can make the step the predicates are too coarse
(ABST, refine with an interpolant), otherwise the step was invented by
fixpoint approximation (APPR, delay widening and raise the bound).
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field

from . import ctl as C
from .abstraction import AbstractionContext, PreconditionViolated
from .approx import Engine, IterMap, OVER
from .frontend import PredicateSet, format_cube
from .interpolate import Conflict, NoNewPredicates, refine
from .kripke import INT, Model
from .region import PickedModel, Region, entails, pick_model, region_and, region_not, region_or

log = logging.getLogger(__name__)

ABST, APPR, NODIV, INVALID, FAIL = "ABST", "APPR", "NODIV", "INVALID", "FAIL"
VERIFIED, VIOLATED, EXHAUSTED = "Verified", "Violated", "Exhausted"


@dataclass
class WitnessStep:
    model: PickedModel
    node: int


@dataclass
class DivergenceReport:
    kind: str
    depth: int = 0
    conf: Conflict | None = None
    witness: list[WitnessStep] = field(default_factory=list)


@dataclass(frozen=True)
class WorklistEntry:
    preds: PredicateSet
    generation: int = 0


@dataclass
class Config:
    widening_seed: int | None = 1
    over_approx_bound: int | None = 5
    max_worklist: int = 64
    max_iterations: int = 256
    time_budget: float | None = None
    interp_coeff_bound: int = 2
    interp_const_bound: int = 64


@dataclass
class CegaarOutcome:
    verdict: str
    preds: PredicateSet
    property: str
    abst_refinements: int = 0
    appr_refinements: int = 0
    iterations: int = 0
    worklist_processed: int = 0
    witness: list[WitnessStep] = field(default_factory=list)
    history: list[tuple] = field(default_factory=list)
    interpolants: list[tuple] = field(default_factory=list)
    elapsed: float = 0.0


class WitnessWalker:
    """Abstract witness generation over one iterate map."""

    def __init__(self, ctx: AbstractionContext, abstract: Model, iters: IterMap, bound: int | None):
        self.ctx = ctx
        self.concrete = ctx.model
        self.abstract = abstract
        self.iters = iters
        self.bound = bound
        self.witness: list[WitnessStep] = []

    # -- helpers
    def insert(self, s_abs: Region, node: C.Ctl):
        if not s_abs.is_empty():
            self.witness.append(WitnessStep(pick_model(s_abs), node.nid))

    def narrow(self, s: Region, s_abs: Region) -> Region:
        return region_and(s, self.ctx.gamma(s_abs))

    def advance(self, s: Region, s_abs: Region, slice_: Region):
        """Successors on both sides; the concrete side is narrowed first."""
        s_now = self.narrow(s, s_abs)
        return s_now, self.concrete.post(s_now), s_abs, region_and(self.abstract.post(s_abs), slice_)

    def report(self, kind: str, conf: Conflict | None = None) -> DivergenceReport:
        return DivergenceReport(kind, len(self.witness), conf, list(self.witness))

    # -- divergence
    def divergence(self, s, s_prev, s_abs, s_abs_prev) -> DivergenceReport | None:
        if s_prev is None and s_abs_prev is None:
            return None
        if not self.narrow(s, s_abs).is_empty():
            return None
        g_now = self.ctx.gamma(s_abs)
        g_prev = self.ctx.gamma(s_abs_prev)
        pre = self.concrete.pre(g_now)
        deadend = region_and(region_and(s_prev, g_prev), region_not(pre))
        bad = region_and(g_prev, pre)
        if bad.is_empty():
            return self.report(APPR)
        return self.report(ABST, Conflict(deadend, bad))

    def check_validity(self, s, s_prev, s_abs, s_abs_prev, f: C.Ctl):
        s_w = region_and(s_abs, self.iters.last(f.nid))
        if s_w.is_empty():
            return self.report(INVALID), s_w
        self.insert(s_w, f)
        div = self.divergence(s, s_prev, s_w, s_abs_prev)
        return (div or self.report(NODIV)), s_w

    # -- dispatch
    def helper(self, s, s_prev, s_abs, s_abs_prev, f: C.Ctl) -> DivergenceReport:
        if f.kind == C.EX:
            return self.ex(s, s_prev, s_abs, s_abs_prev, f)
        if f.kind == C.EU:
            return self.eu(s, s_prev, s_abs, s_abs_prev, f)
        if f.kind == C.EG:
            return self.eg(s, s_prev, s_abs, s_abs_prev, f)
        if f.kind == C.AND:
            return self.conj(s, s_prev, s_abs, s_abs_prev, f)
        if f.kind == C.OR:
            return self.disj(s, s_prev, s_abs, s_abs_prev, f)
        rep, _ = self.check_validity(s, s_prev, s_abs, s_abs_prev, f)
        return rep

    def ex(self, s, s_prev, s_abs, s_abs_prev, f):
        rep, s_w = self.check_validity(s, s_prev, s_abs, s_abs_prev, f)
        if rep.kind != NODIV:
            return rep
        s_now = self.narrow(s, s_w)
        return self.helper(self.concrete.post(s_now), s_now, self.abstract.post(s_w), s_w, f.args[0])

    def eu(self, s, s_prev, s_abs, s_abs_prev, f):
        it = self.iters[f.nid]
        k = next((i for i in range(len(it)) if not region_and(s_abs, it[i]).is_empty()), None)
        if k is None:
            return self.report(INVALID)
        s_abs = region_and(s_abs, it[k])
        self.insert(s_abs, f)
        for i in range(k - 1, -1, -1):
            div = self.divergence(s, s_prev, s_abs, s_abs_prev)
            if div is not None:
                return div
            if entails(s_abs, it[0]):
                break
            rep = self.helper(s, s_prev, s_abs, s_abs_prev, f.args[0])
            if rep.kind != NODIV:
                return rep
            s_prev, s, s_abs_prev, s_abs = self.advance(s, s_abs, it[i])
            self.insert(s_abs, f)
        return self.helper(s, s_prev, s_abs, s_abs_prev, f.args[1])

    def eg(self, s, s_prev, s_abs, s_abs_prev, f):
        sol = self.iters.last(f.nid)
        s_abs = region_and(s_abs, sol)
        if s_abs.is_empty():
            return self.report(INVALID)
        self.insert(s_abs, f)
        segment = [(s, s_prev, s_abs, s_abs_prev)]
        visited = Region.empty()
        cycle = False
        i = 1
        limit = self.bound if self.bound is not None else float("inf")
        while i <= limit:
            div = self.divergence(s, s_prev, s_abs, s_abs_prev)
            if div is not None:
                return div
            s_prev, s, s_abs_prev, s_abs = self.advance(s, s_abs, sol)
            if s_abs.is_empty():
                # the abstract solution has no successor inside itself
                return self.divergence(s, s_prev, s_abs, s_abs_prev) or self.report(APPR)
            self.insert(s_abs, f)
            if entails(s_abs, visited):
                cycle = True
                break
            segment.append((s, s_prev, s_abs, s_abs_prev))
            visited = region_or(visited, s_abs)
            i += 1
        if not cycle:
            return self.report(APPR)
        rep = self.report(NODIV)
        for st in segment:
            rep = self.helper(*st, f.args[0])
            if rep.kind != NODIV:
                return rep
        return rep

    def conj(self, s, s_prev, s_abs, s_abs_prev, f):
        rep, s_w = self.check_validity(s, s_prev, s_abs, s_abs_prev, f)
        if rep.kind != NODIV:
            return rep
        rep = self.helper(s, s_prev, s_w, s_abs_prev, f.args[0])
        if rep.kind == NODIV:
            rep = self.helper(s, s_prev, s_w, s_abs_prev, f.args[1])
        return rep

    def disj(self, s, s_prev, s_abs, s_abs_prev, f):
        rep, s_w = self.check_validity(s, s_prev, s_abs, s_abs_prev, f)
        if rep.kind != NODIV:
            return rep
        rep = self.helper(s, s_prev, s_w, s_abs_prev, f.args[0])
        if rep.kind == INVALID:
            return self.helper(s, s_prev, s_w, s_abs_prev, f.args[1])
        return rep


def check_validity_and_divergence(w: WitnessWalker, s, s_prev, s_abs, s_abs_prev, g: C.Ctl) -> DivergenceReport:
    return w.check_validity(s, s_prev, s_abs, s_abs_prev, g)[0]


def genwit_ex(w: WitnessWalker, s, s_prev, s_abs, s_abs_prev, g: C.Ctl) -> DivergenceReport:
    return w.ex(s, s_prev, s_abs, s_abs_prev, g)


def genwit_eu(w: WitnessWalker, s, s_prev, s_abs, s_abs_prev, g: C.Ctl) -> DivergenceReport:
    return w.eu(s, s_prev, s_abs, s_abs_prev, g)


def genwit_eg(w: WitnessWalker, s, s_prev, s_abs, s_abs_prev, g: C.Ctl) -> DivergenceReport:
    return w.eg(s, s_prev, s_abs, s_abs_prev, g)


def genwit_and(w: WitnessWalker, s, s_prev, s_abs, s_abs_prev, g: C.Ctl) -> DivergenceReport:
    return w.conj(s, s_prev, s_abs, s_abs_prev, g)


def genwit_or(w: WitnessWalker, s, s_prev, s_abs, s_abs_prev, g: C.Ctl) -> DivergenceReport:
    return w.disj(s, s_prev, s_abs, s_abs_prev, g)


def gen_abs_witness(ctx: AbstractionContext, abstract: Model, g: C.Ctl, iters: IterMap,
                    bound: int | None) -> DivergenceReport:
    """Walk an abstract witness for ``g`` from the initial states."""
    w = WitnessWalker(ctx, abstract, iters, bound)
    return w.helper(ctx.model.init, None, abstract.init, None, g)


def check_precondition(m: Model, f: C.Ctl, seeds: PredicateSet) -> None:
    covered = seeds.vars
    for node in C.walk(f):
        if node.kind != C.ATOM:
            continue
        for v in sorted(node.region.vars):
            d = m.decl(v)
            if d.kind == INT and v not in covered:
                raise PreconditionViolated(f"integer variable {v!r} of the property is not covered "
                                           f"by the seed predicates")


def cegaar(m: Model, f: C.Ctl, seeds: PredicateSet, cfg: Config | None = None) -> CegaarOutcome:
    cfg = cfg or Config()
    start = time.monotonic()
    check_precondition(m, f, seeds)
    AbstractionContext(m, seeds).abstract_formula(f)
    allowed = {d.name for d in m.vars if d.kind == INT}
    env = {d.name: d for d in m.vars}

    worklist: deque[WorklistEntry] = deque([WorklistEntry(seeds, 0)])
    out = CegaarOutcome(EXHAUSTED, seeds, C.to_text(f))
    approx_refinement = False
    ws, bound = cfg.widening_seed, cfg.over_approx_bound
    entry = None
    ctx = abstract = g = None
    while True:
        if cfg.time_budget is not None and time.monotonic() - start > cfg.time_budget:
            log.info("time budget exhausted")
            break
        if out.iterations >= cfg.max_iterations:
            log.info("iteration cap reached")
            break
        if not approx_refinement:
            if not worklist or out.worklist_processed >= cfg.max_worklist:
                break
            entry = worklist.popleft()
            out.worklist_processed += 1
            ws, bound = cfg.widening_seed, cfg.over_approx_bound
            ctx = AbstractionContext(m, entry.preds)
            abstract = ctx.abstract_model()
            g = C.to_nnf_negate(ctx.abstract_formula(f))
        out.iterations += 1
        out.preds = entry.preds
        eng = Engine(abstract, ws, bound)
        sol = eng.solve(g, OVER)
        log.info("iteration %d: %d predicates, ws=%s bound=%s", out.iterations,
                 len(entry.preds), ws, bound)
        if region_and(abstract.init, sol).is_empty():
            out.verdict = VERIFIED
            out.property = C.to_text(ctx.concretize_formula(ctx.abstract_formula(f)))
            break
        rep = gen_abs_witness(ctx, abstract, g, eng.iters, bound)
        if rep.kind == INVALID:
            # the witness left the approximated solution: an approximation artifact
            rep = DivergenceReport(APPR, rep.depth, None, rep.witness)
        out.history.append((rep.kind, rep.depth, len(entry.preds)))
        log.info("divergence %s at depth %d", rep.kind, rep.depth)
        if rep.kind == ABST:
            out.abst_refinements += 1
            approx_refinement = False
            try:
                exts = refine(rep.conf, entry.preds, cfg.interp_coeff_bound,
                              cfg.interp_const_bound, allowed, env)
            except NoNewPredicates:
                log.info("no new predicates for this entry")
                continue
            for ext in exts:
                p = ext[len(ext) - 1]
                out.interpolants.append((p.text, rep.conf))
                worklist.append(WorklistEntry(ext, entry.generation + 1))
        elif rep.kind == APPR:
            out.appr_refinements += 1
            approx_refinement = True
            # raise both knobs monotonically so repeated APPR reports make progress
            if ws is not None:
                ws = max(rep.depth + 1, ws + 1)
            if bound is not None:
                bound = max(cfg.over_approx_bound or 0, rep.depth + 1, bound + 1)
        else:
            out.verdict = VIOLATED
            out.witness = rep.witness
            break
    out.elapsed = time.monotonic() - start
    return out


def witness_json(witness: list[WitnessStep], env=None) -> list[dict]:
    return [{"cube": format_cube(w.model.cube, env),
             "point": {k: v for k, v in w.model.point.items()},
             "formula_node": w.node} for w in witness]
