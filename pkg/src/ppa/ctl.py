"""CTL formula trees with per-node ids."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

from .region import Region, region_and, region_not, region_or

ATOM, NOT, AND, OR = "Atom", "Not", "And", "Or"
EX, EG, EU, EF = "EX", "EG", "EU", "EF"
AX, AG, AU, AF = "AX", "AG", "AU", "AF"

UNARY = (EX, EG, EF, AX, AG, AF)
EXISTENTIAL = (EX, EG, EU, EF)
UNIVERSAL = (AX, AG, AU, AF)


class NotACTL(ValueError):
    pass


@dataclass(frozen=True)
class Ctl:
    kind: str
    args: tuple["Ctl", ...] = ()
    region: Region | None = None
    text: str = ""
    nid: int = field(default=-1, compare=False)

    def __str__(self) -> str:
        return to_text(self)


def atom(region: Region, text: str | None = None) -> Ctl:
    return Ctl(ATOM, (), region, text if text is not None else str(region))


def mk(kind: str, *args: Ctl) -> Ctl:
    return Ctl(kind, tuple(args))


def true_atom(vars=()) -> Ctl:
    return atom(Region.full(vars), "true")


def walk(f: Ctl) -> Iterator[Ctl]:
    yield f
    for a in f.args:
        yield from walk(a)


def number(f: Ctl) -> Ctl:
    """Copy of ``f`` with preorder node ids starting at 0."""
    counter = [0]

    def go(g: Ctl) -> Ctl:
        nid = counter[0]
        counter[0] += 1
        return replace(g, args=tuple(go(a) for a in g.args), nid=nid)

    return go(f)


def map_atoms(f: Ctl, fn: Callable[[Ctl], Ctl]) -> Ctl:
    if f.kind == ATOM:
        return fn(f)
    return replace(f, args=tuple(map_atoms(a, fn) for a in f.args))


def fold_atoms(f: Ctl, printer: Callable[[Region], str] | None = None) -> Ctl:
    """Merge boolean combinations of atoms into single atoms."""
    show = printer or str
    if f.kind == ATOM:
        return f
    args = tuple(fold_atoms(a, printer) for a in f.args)
    if all(a.kind == ATOM for a in args):
        if f.kind == NOT:
            r = region_not(args[0].region)
            return atom(r, show(r))
        if f.kind in (AND, OR):
            op = region_and if f.kind == AND else region_or
            r = op(args[0].region, args[1].region)
            return atom(r, show(r))
    return replace(f, args=args)


def _neg_atom(a: Ctl, printer) -> Ctl:
    r = region_not(a.region)
    return atom(r, printer(r) if printer else str(r))


def to_nnf(f: Ctl, negate: bool = False, printer: Callable[[Region], str] | None = None) -> Ctl:
    """Negation normal form of ``f`` (or of ``!f`` when ``negate``)."""
    k, a = f.kind, f.args
    if k == ATOM:
        return _neg_atom(f, printer) if negate else f
    if k == NOT:
        return to_nnf(a[0], not negate, printer)
    rec = lambda g, n=negate: to_nnf(g, n, printer)  # noqa: E731
    if k in (AND, OR):
        kind = k if not negate else (OR if k == AND else AND)
        return mk(kind, rec(a[0]), rec(a[1]))
    if not negate:
        return mk(k, *(rec(g) for g in a))
    dual = {EX: AX, AX: EX, EG: AF, AF: EG, EF: AG, AG: EF}
    if k in dual:
        return mk(dual[k], rec(a[0]))
    f1, f2 = a
    n1, n2 = rec(f1, True), rec(f2, True)
    if k == EU:
        # !E[f U g] = A[!g U (!f && !g)] || AG !g
        return mk(OR, mk(AU, n2, mk(AND, n1, n2)), mk(AG, n2))
    # !A[f U g] = E[!g U (!f && !g)] || EG !g
    return mk(OR, mk(EU, n2, mk(AND, n1, n2)), mk(EG, n2))


def is_actl(f: Ctl) -> bool:
    return not any(g.kind in EXISTENTIAL for g in walk(to_nnf(f)))


def expand_ef(f: Ctl) -> Ctl:
    """Rewrite ``EF g`` as ``E[true U g]``."""
    args = tuple(expand_ef(a) for a in f.args)
    if f.kind == EF:
        return mk(EU, true_atom(args[0].region.vars if args[0].kind == ATOM else ()), args[0])
    return replace(f, args=args)


def to_nnf_negate(f: Ctl, printer: Callable[[Region], str] | None = None) -> Ctl:
    """ECTL negation normal form of ``!f`` for an ACTL formula ``f``."""
    g = to_nnf(f, True, printer)
    bad = [h.kind for h in walk(g) if h.kind in UNIVERSAL]
    if bad:
        raise NotACTL(f"formula is not ACTL (negation contains {bad[0]})")
    return number(expand_ef(g))


def to_text(f: Ctl) -> str:
    k, a = f.kind, f.args
    if k == ATOM:
        return f.text
    if k == NOT:
        return f"!{_wrap(a[0], unary=True)}"
    if k in (AND, OR):
        op = " && " if k == AND else " || "
        return op.join(_wrap(x, parent=k) for x in a)
    if k in UNARY:
        return f"{k}({to_text(a[0])})"
    q = "E" if k == EU else "A"
    return f"{q}[{to_text(a[0])} U {to_text(a[1])}]"


def _wrap(g: Ctl, parent: str | None = None, unary: bool = False) -> str:
    text = to_text(g)
    if g.kind == ATOM:
        needs = ("||" in text and parent != OR) or (unary and ("&&" in text or " " in text))
    elif g.kind in (AND, OR):
        needs = unary or g.kind != parent
    else:
        needs = False
    return f"({text})" if needs else text
