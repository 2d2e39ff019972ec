"""Exact linear integer arithmetic over conjunctions of atoms.

A conjunction is a tuple of atoms.  Three atom kinds exist:

* ``Linear``      -- ``sum(c_i * v_i) + k <= 0`` or ``... = 0``
* ``Congruence``  -- ``sum(c_i * v_i) + k == 0 (mod m)``
* ``BoolLit``     -- a boolean variable or its negation

Variable elimination is exact over the integers.  Equalities are used for
substitution first (a non-unit coefficient leaves a divisibility congruence
behind), Fourier-Motzkin is applied when every bound pair has a unit
coefficient on the eliminated variable, and everything else goes through a
Cooper-style finite expansion over the smallest lower (or upper) bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Union

LE = "<="
EQ = "="


class UnsupportedCoefficient(Exception):
    """Raised when exact elimination needs the general-coefficient path but it is disabled."""


@dataclass(frozen=True)
class Linear:
    coeffs: tuple[tuple[str, int], ...]
    const: int
    rel: str

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def coeff(self, var: str) -> int:
        for v, c in self.coeffs:
            if v == var:
                return c
        return 0

    def evaluate(self, point: Mapping[str, int]) -> bool:
        value = self.const + sum(c * point[v] for v, c in self.coeffs)
        return value <= 0 if self.rel == LE else value == 0

    def __str__(self) -> str:
        if self.rel == LE and all(c < 0 for _, c in self.coeffs):
            return f"{_term_str(tuple((v, -c) for v, c in self.coeffs), 0)} >= {self.const}"
        rel = "=" if self.rel == EQ else "<="
        return f"{_term_str(self.coeffs, 0)} {rel} {-self.const}"


@dataclass(frozen=True)
class Congruence:
    coeffs: tuple[tuple[str, int], ...]
    const: int
    modulus: int

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def coeff(self, var: str) -> int:
        for v, c in self.coeffs:
            if v == var:
                return c
        return 0

    def evaluate(self, point: Mapping[str, int]) -> bool:
        value = self.const + sum(c * point[v] for v, c in self.coeffs)
        return value % self.modulus == 0

    def __str__(self) -> str:
        return f"{_term_str(self.coeffs, 0)} = {-self.const % self.modulus} (mod {self.modulus})"


@dataclass(frozen=True)
class BoolLit:
    var: str
    polarity: bool

    @property
    def vars(self) -> tuple[str, ...]:
        return (self.var,)

    def coeff(self, var: str) -> int:
        return 0

    def evaluate(self, point: Mapping[str, object]) -> bool:
        return bool(point[self.var]) == self.polarity

    def __str__(self) -> str:
        return self.var if self.polarity else f"!{self.var}"


Atom = Union[Linear, Congruence, BoolLit]


def _term_str(coeffs, const) -> str:
    parts = []
    for v, c in coeffs:
        if c == 1:
            parts.append(v)
        elif c == -1:
            parts.append(f"-{v}")
        else:
            parts.append(f"{c}*{v}")
    if const or not parts:
        parts.append(str(const))
    if len(parts) > 1 and parts[-1] == "0":
        parts.pop()
    text = " + ".join(parts)
    return text.replace("+ -", "- ")


def atom_key(atom: Atom):
    """Canonical sort key: variables, then relation kind, then constant."""
    if isinstance(atom, BoolLit):
        return ((atom.var,), (), 0, int(atom.polarity), 0)
    names = atom.vars
    cs = tuple(c for _, c in atom.coeffs)
    if isinstance(atom, Linear):
        return (names, cs, 1 if atom.rel == EQ else 2, atom.const, 0)
    return (names, cs, 3, atom.const, atom.modulus)


# ---------------------------------------------------------------------------
# atom construction / normalisation


def _gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
    return g


def linear(coeffs: Mapping[str, int], const: int, rel: str = LE) -> Linear | bool:
    """Normalised linear atom, or a boolean when it has no variables."""
    items = tuple(sorted((v, c) for v, c in coeffs.items() if c))
    if not items:
        return const <= 0 if rel == LE else const == 0
    g = _gcd_all(abs(c) for _, c in items)
    if rel == EQ:
        if const % g:
            return False
        if items[0][1] < 0:
            g = -g
        return Linear(tuple((v, c // g) for v, c in items), const // g, EQ)
    # sum(c/g * v) <= -const/g  ->  integer tightening
    return Linear(tuple((v, c // g) for v, c in items), -((-const) // g), LE)


def congruence(coeffs: Mapping[str, int], const: int, modulus: int) -> Congruence | bool:
    m = abs(modulus)
    if m == 0:
        return linear(coeffs, const, EQ)
    items = tuple(sorted((v, c % m) for v, c in coeffs.items() if c % m))
    const %= m
    if not items:
        return const == 0
    g = math.gcd(_gcd_all(c for _, c in items), m)
    if const % g:
        return False
    if g > 1:
        m //= g
        items = tuple((v, c // g) for v, c in items)
        const //= g
    if m == 1:
        return True
    lead = items[0][1]
    if lead != 1 and math.gcd(lead, m) == 1:
        inv = pow(lead, -1, m)
        items = tuple((v, c * inv % m) for v, c in items)
        const = const * inv % m
    return Congruence(items, const, m)


def negate_atom(atom: Atom) -> list[Atom | bool]:
    """Disjuncts of the complement of a single atom."""
    if isinstance(atom, BoolLit):
        return [BoolLit(atom.var, not atom.polarity)]
    neg = {v: -c for v, c in atom.coeffs}
    pos = dict(atom.coeffs)
    if isinstance(atom, Linear):
        if atom.rel == LE:
            return [linear(neg, -atom.const + 1)]
        return [linear(pos, atom.const + 1), linear(neg, -atom.const + 1)]
    return [congruence(pos, atom.const + r, atom.modulus) for r in range(1, atom.modulus)]


def split_equalities(atoms: Iterable[Atom]) -> list[Atom]:
    """Replace every equality by its two inequalities."""
    out: list[Atom] = []
    for a in atoms:
        if isinstance(a, Linear) and a.rel == EQ:
            out.append(linear(dict(a.coeffs), a.const))
            out.append(linear({v: -c for v, c in a.coeffs}, -a.const))
        else:
            out.append(a)
    return out


def conjoin(atoms: Iterable[Atom | bool]) -> tuple[Atom, ...] | None:
    """Syntactic normal form of a conjunction; ``None`` if trivially false.

    Parallel inequalities over the same linear form are merged into one
    interval (an equality when the interval is a point); duplicate
    congruences and boolean literals collapse.
    """
    bools: dict[str, bool] = {}
    bounds: dict[tuple, list] = {}
    congs: dict[tuple, int] = {}
    for a in atoms:
        if a is True:
            continue
        if a is False:
            return None
        if isinstance(a, BoolLit):
            prev = bools.get(a.var)
            if prev is not None and prev != a.polarity:
                return None
            bools[a.var] = a.polarity
        elif isinstance(a, Linear):
            key = a.coeffs if a.coeffs[0][1] > 0 else tuple((v, -c) for v, c in a.coeffs)
            flipped = key is not a.coeffs
            lo_hi = bounds.setdefault(key, [None, None])
            if a.rel == EQ:
                lo = hi = -a.const
            elif not flipped:
                lo, hi = None, -a.const
            else:
                lo, hi = a.const, None
            if lo is not None and (lo_hi[0] is None or lo > lo_hi[0]):
                lo_hi[0] = lo
            if hi is not None and (lo_hi[1] is None or hi < lo_hi[1]):
                lo_hi[1] = hi
            if lo_hi[0] is not None and lo_hi[1] is not None and lo_hi[0] > lo_hi[1]:
                return None
        else:
            key = (a.coeffs, a.modulus)
            prev = congs.get(key)
            if prev is not None and prev != a.const:
                return None
            congs[key] = a.const
    out: list[Atom] = [BoolLit(v, p) for v, p in bools.items()]
    for key, (lo, hi) in bounds.items():
        if lo is not None and lo == hi:
            out.append(Linear(key, -lo, EQ))
            continue
        if hi is not None:
            out.append(Linear(key, -hi, LE))
        if lo is not None:
            out.append(Linear(tuple((v, -c) for v, c in key), lo, LE))
    for (coeffs, m), k in congs.items():
        out.append(Congruence(coeffs, k, m))
    out.sort(key=atom_key)
    return tuple(out)


# ---------------------------------------------------------------------------
# substitution helpers


def _combine(a: Mapping[str, int], ka: int, b: Mapping[str, int], kb: int,
             sa: int = 1, sb: int = 1) -> tuple[dict[str, int], int]:
    out = {v: sa * c for v, c in a.items()}
    for v, c in b.items():
        out[v] = out.get(v, 0) + sb * c
    return out, sa * ka + sb * kb


def _rebuild(atom: Atom, coeffs: dict[str, int], const: int, mod_scale: int = 1) -> Atom | bool:
    if isinstance(atom, Linear):
        return linear(coeffs, const, atom.rel)
    return congruence(coeffs, const, atom.modulus * mod_scale)


def substitute_var(atom: Atom, var: str, expr: Mapping[str, int], expr_const: int) -> Atom | bool:
    """Replace ``var`` by the affine expression ``expr + expr_const``."""
    if isinstance(atom, BoolLit):
        return atom
    c = atom.coeff(var)
    if not c:
        return atom
    rest = {v: k for v, k in atom.coeffs if v != var}
    coeffs, const = _combine(rest, atom.const, expr, expr_const, 1, c)
    return _rebuild(atom, coeffs, const)


def _scaled_eq_substitute(atom: Atom, var: str, a: int, t: Mapping[str, int], tk: int) -> Atom | bool:
    # a*var + t = 0; multiply atom by |a| and replace |a|*var by -sign(a)*t
    c = atom.coeff(var)
    if isinstance(atom, BoolLit) or not c:
        return atom
    s = abs(a)
    sign = 1 if a > 0 else -1
    rest = {v: k for v, k in atom.coeffs if v != var}
    coeffs, const = _combine(rest, atom.const, t, tk, s, -c * sign)
    return _rebuild(atom, coeffs, const, s)


# ---------------------------------------------------------------------------
# elimination


def int_vars(atoms: Iterable[Atom]) -> set[str]:
    out: set[str] = set()
    for a in atoms:
        if not isinstance(a, BoolLit):
            out.update(a.vars)
    return out


def _elim_cost(atoms: tuple[Atom, ...], var: str) -> tuple[int, int]:
    lowers = uppers = 0
    unit = True
    for a in atoms:
        if isinstance(a, BoolLit):
            continue
        c = a.coeff(var)
        if not c:
            continue
        if isinstance(a, Linear) and a.rel == EQ:
            return (0, 0) if abs(c) == 1 else (1, abs(c))
        if isinstance(a, Congruence):
            return (4, 0)
        if c > 0:
            uppers += 1
            unit = unit and c == 1
        else:
            lowers += 1
            unit = unit and c == -1
    if lowers == 0 or uppers == 0:
        return (2, 0)
    return (3 if unit else 4, lowers * uppers)


def eliminate(atoms: tuple[Atom, ...], var: str, general: bool = True) -> list[tuple[Atom, ...]]:
    """Exact existential elimination of one integer variable.

    Returns the disjuncts of ``exists var. atoms`` in normal form.
    """
    rel = [a for a in atoms if not isinstance(a, BoolLit) and a.coeff(var)]
    if not rel:
        return [atoms]
    rest = [a for a in atoms if isinstance(a, BoolLit) or not a.coeff(var)]

    eqs = [a for a in rel if isinstance(a, Linear) and a.rel == EQ]
    if eqs:
        eq = min(eqs, key=lambda e: (abs(e.coeff(var)), len(e.coeffs), atom_key(e)))
        a = eq.coeff(var)
        t = {v: c for v, c in eq.coeffs if v != var}
        new: list[Atom | bool] = list(rest)
        for other in rel:
            if other is eq:
                continue
            if abs(a) == 1:
                # var = -a * (t + k)
                new.append(substitute_var(other, var, {v: -a * c for v, c in t.items()}, -a * eq.const))
            else:
                if not general:
                    raise UnsupportedCoefficient(f"coefficient {a} on {var} in {eq}")
                new.append(_scaled_eq_substitute(other, var, a, t, eq.const))
        if abs(a) > 1:
            new.append(congruence(t, eq.const, abs(a)))
        cube = conjoin(new)
        return [] if cube is None else [cube]

    congs = [a for a in rel if isinstance(a, Congruence)]
    lowers = [a for a in rel if isinstance(a, Linear) and a.coeff(var) < 0]
    uppers = [a for a in rel if isinstance(a, Linear) and a.coeff(var) > 0]

    if not congs:
        if not lowers or not uppers:
            cube = conjoin(rest)
            return [] if cube is None else [cube]
        if all(u.coeff(var) == 1 for u in uppers) or all(l.coeff(var) == -1 for l in lowers):
            new = list(rest)
            for lo in lowers:
                cl = -lo.coeff(var)
                lrest = {v: c for v, c in lo.coeffs if v != var}
                for up in uppers:
                    cu = up.coeff(var)
                    urest = {v: c for v, c in up.coeffs if v != var}
                    coeffs, const = _combine(lrest, lo.const, urest, up.const, cu, cl)
                    new.append(linear(coeffs, const))
            cube = conjoin(new)
            return [] if cube is None else [cube]

    # general case: normalise every coefficient of var to +-1 (var now
    # stands for L*var), then expand over the tightest bound.
    lcm = 1
    for r in rel:
        lcm = lcm * abs(r.coeff(var)) // math.gcd(lcm, abs(r.coeff(var)))
    if lcm > 1 and not general:
        raise UnsupportedCoefficient(f"non-unit coefficients on {var}")
    scaled: list[Atom] = []
    for r in rel:
        c = r.coeff(var)
        f = lcm // abs(c)
        coeffs = {v: k * f for v, k in r.coeffs}
        coeffs[var] = 1 if c > 0 else -1
        atom = _rebuild(r, coeffs, r.const * f, f)
        if atom is False:
            return []
        if atom is not True:
            scaled.append(atom)
    if lcm > 1:
        scaled.append(Congruence(((var, 1),), 0, lcm))
    lowers = [a for a in scaled if isinstance(a, Linear) and a.coeff(var) < 0]
    uppers = [a for a in scaled if isinstance(a, Linear) and a.coeff(var) > 0]
    congs = [a for a in scaled if isinstance(a, Congruence) and a.coeff(var)]
    if not congs:
        cube = conjoin(rest + scaled)
        return [] if cube is None else eliminate(cube, var, general)
    period = 1
    for c in congs:
        period = period * c.modulus // math.gcd(period, c.modulus)

    if lowers and (not uppers or len(lowers) <= len(uppers)):
        # -var + u <= 0  ->  var >= u
        bases = [({v: c for v, c in lo.coeffs if v != var}, lo.const) for lo in lowers]
        sign = 1
    elif uppers:
        # var + u <= 0  ->  var <= -u
        bases = [({v: -c for v, c in up.coeffs if v != var}, -up.const) for up in uppers]
        sign = -1
    else:
        bases = [({}, 0)]
        sign = 1
    out: list[tuple[Atom, ...]] = []
    seen = set()
    for base, bk in bases:
        for j in range(period):
            new = list(rest)
            for a in scaled:
                new.append(substitute_var(a, var, base, bk + sign * j))
            cube = conjoin(new)
            if cube is not None and cube not in seen:
                seen.add(cube)
                out.append(cube)
    return out


def project(atoms: tuple[Atom, ...], variables: Iterable[str], general: bool = True) -> list[tuple[Atom, ...]]:
    """Disjuncts of ``exists variables. atoms`` (integer variables only)."""
    todo = set(variables)
    return list(_project(atoms, frozenset(todo), general))


@lru_cache(maxsize=100_000)
def _project(atoms: tuple[Atom, ...], todo: frozenset[str], general: bool) -> tuple[tuple[Atom, ...], ...]:
    work = [(atoms, todo & int_vars(atoms))]
    done: list[tuple[Atom, ...]] = []
    seen: set[tuple[Atom, ...]] = set()
    while work:
        cube, remaining = work.pop()
        if not remaining:
            if cube not in seen:
                seen.add(cube)
                done.append(cube)
            continue
        var = min(remaining, key=lambda v: (_elim_cost(cube, v), v))
        for branch in eliminate(cube, var, general):
            if len(branch) == 0 or satisfiable(branch, general):
                work.append((branch, remaining - {var}))
    return tuple(done)


def satisfiable(atoms: tuple[Atom, ...], general: bool = True) -> bool:
    return _sat(atoms, general)


@lru_cache(maxsize=200_000)
def _sat(atoms: tuple[Atom, ...], general: bool) -> bool:
    remaining = int_vars(atoms)
    if not remaining:
        return True
    if not _bounds_ok(atoms):
        return False
    var = min(remaining, key=lambda v: (_elim_cost(atoms, v), v))
    return any(_sat(branch, general) for branch in eliminate(atoms, var, general))


def _bounds_ok(atoms: tuple[Atom, ...]) -> bool:
    # cheap interval propagation over single-variable atoms
    lo: dict[str, int] = {}
    hi: dict[str, int] = {}
    for a in atoms:
        if isinstance(a, Linear) and len(a.coeffs) == 1:
            v, c = a.coeffs[0]
            bound = -a.const
            if a.rel == EQ:
                if bound % c:
                    return False
                lo[v] = max(lo.get(v, bound // c), bound // c)
                hi[v] = min(hi.get(v, bound // c), bound // c)
            elif c > 0:
                b = bound // c
                hi[v] = min(hi.get(v, b), b)
            else:
                b = -((bound) // (-c))
                lo[v] = max(lo.get(v, b), b)
    return all(lo[v] <= hi[v] for v in lo.keys() & hi.keys())
