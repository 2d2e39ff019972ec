"""Parsers and printers for models, CTL properties and predicate lists.

Model syntax::

    var s, t : int;
    var pc : enum { idle, busy };
    var k : 0..3;
    init s = t && pc = idle;
    trans step : pc = idle -> t' = t + 1, pc' = busy;
    prop AG(s <= t);

Updates are formulas that may mention primed variables; every variable
without a primed occurrence keeps its value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from . import ctl as C
from .kripke import BOOL, ENUM, INT, Model, VarDecl, is_primed, make_model, prime, unprime
from .presburger import EQ, BoolLit, Congruence, Linear, congruence, linear
from .region import Region, region_and, region_not, region_or

KEYWORDS = {"var", "init", "trans", "prop", "pred", "int", "bool", "enum", "true", "false",
            "skip", "mod"}
TEMPORAL = {"EX", "EG", "EF", "AX", "AG", "AF", "E", "A", "U"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||->|\.\.|<=|>=|!=|==|[!<>=+\-*(){}\[\],;:'])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, pos - start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


@dataclass
class Term:
    coeffs: dict = field(default_factory=dict)
    const: int = 0
    etype: tuple | None = None
    lit: str | None = None

    @property
    def is_const(self) -> bool:
        return not self.coeffs and self.lit is None


@dataclass(frozen=True)
class Predicate:
    text: str
    region: Region

    @property
    def vars(self) -> frozenset[str]:
        return self.region.vars


@dataclass(frozen=True)
class PredicateSet:
    preds: tuple[Predicate, ...] = ()

    def __len__(self) -> int:
        return len(self.preds)

    def __iter__(self):
        return iter(self.preds)

    def __getitem__(self, i):
        return self.preds[i]

    @property
    def vars(self) -> frozenset[str]:
        out: set[str] = set()
        for p in self.preds:
            out |= p.vars
        return frozenset(out)

    def extend(self, pred: Predicate) -> "PredicateSet":
        return PredicateSet(self.preds + (pred,))

    @property
    def texts(self) -> list[str]:
        return [p.text for p in self.preds]


class Parser:
    def __init__(self, text: str, env: Mapping[str, VarDecl] | None = None,
                 allow_primes: bool = True):
        self.toks = tokenize(text)
        self.pos = 0
        self.env: dict[str, VarDecl] | None = dict(env) if env is not None else None
        self.allow_primes = allow_primes

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "id") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id":
            self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.advance()
        return t.text

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    # -- symbols
    def _enum_types(self) -> dict[str, list[tuple]]:
        out: dict[str, list[tuple]] = {}
        for d in (self.env or {}).values():
            if d.kind == ENUM and d.values not in out.get(d.values[0], []):
                for v in d.values:
                    out.setdefault(v, [])
                    if d.values not in out[v]:
                        out[v].append(d.values)
        return out

    def lookup(self, name: str, tok: Token) -> VarDecl | None:
        base = unprime(name)
        if self.env is None:
            return VarDecl(base, INT)
        d = self.env.get(base)
        if d is None and name not in self._enum_types():
            self.error(f"undeclared variable {base!r}", tok)
        return d

    def _var_name(self) -> tuple[str, Token]:
        tok = self.tok
        name = self.ident()
        if self.at("'"):
            if not self.allow_primes:
                self.error(f"primed variable {name}' not allowed here", tok)
            self.advance()
            name = prime(name)
        return name, tok

    # -- terms
    def term(self) -> Term:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        t = self.product()
        if neg:
            t = self._scale(t, -1)
        while self.at("+", "-"):
            op = self.advance().text
            rhs = self.product()
            t = self._add(t, rhs if op == "+" else self._scale(rhs, -1))
        return t

    def product(self) -> Term:
        t = self.factor()
        while self.at("*"):
            tok = self.advance()
            rhs = self.factor()
            if t.is_const:
                t = self._scale(rhs, t.const)
            elif rhs.is_const:
                t = self._scale(t, rhs.const)
            else:
                self.error("non-linear multiplication", tok)
        return t

    def factor(self) -> Term:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return Term({}, int(tok.text))
        if self.at("-"):
            self.advance()
            return self._scale(self.factor(), -1)
        if self.at("("):
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        if tok.kind == "id" and tok.text not in KEYWORDS:
            name, tok = self._var_name()
            d = self.lookup(name, tok)
            if d is None:
                if is_primed(name):
                    self.error(f"enum value {unprime(name)!r} cannot be primed", tok)
                return Term({}, 0, None, name)
            if d.kind == BOOL:
                self.error(f"boolean variable {d.name!r} used in arithmetic", tok)
            return Term({name: 1}, 0, d.values if d.kind == ENUM else None)
        self.error(f"expected a term, found {tok.text or 'end of input'!r}")

    def _resolve(self, t: Term, etype: tuple | None, tok: Token) -> Term:
        if t.lit is None:
            return t
        if etype is None:
            types = self._enum_types().get(t.lit, [])
            if len(types) != 1:
                self.error(f"cannot resolve enum value {t.lit!r}", tok)
            etype = types[0]
        if t.lit not in etype:
            self.error(f"{t.lit!r} is not a value of enum {{{', '.join(etype)}}}", tok)
        return Term({}, etype.index(t.lit), etype)

    def _scale(self, t: Term, k: int) -> Term:
        t = self._resolve(t, None, self.tok)
        return Term({v: c * k for v, c in t.coeffs.items()}, t.const * k, t.etype)

    def _add(self, a: Term, b: Term) -> Term:
        a = self._resolve(a, b.etype, self.tok)
        b = self._resolve(b, a.etype, self.tok)
        coeffs = dict(a.coeffs)
        for v, c in b.coeffs.items():
            coeffs[v] = coeffs.get(v, 0) + c
        return Term(coeffs, a.const + b.const, a.etype or b.etype)

    # -- formulas
    def formula(self) -> Region:
        r = self.conj()
        while self.at("||"):
            self.advance()
            r = region_or(r, self.conj())
        return r

    def conj(self) -> Region:
        r = self.unary()
        while self.at("&&"):
            self.advance()
            r = region_and(r, self.unary())
        return r

    def unary(self) -> Region:
        if self.at("!"):
            self.advance()
            return region_not(self.unary())
        if self.at("("):
            save = self.pos
            try:
                return self.comparison()
            except ParseError:
                self.pos = save
            self.advance()
            r = self.formula()
            self.expect(")")
            return r
        return self.simple()

    def simple(self) -> Region:
        """``true``, ``false``, a boolean literal or a comparison."""
        tok = self.tok
        if self.at("true"):
            self.advance()
            return Region.full()
        if self.at("false"):
            self.advance()
            return Region.empty()
        if tok.kind == "id" and self.env is not None:
            d = self.env.get(tok.text)
            if d is not None and d.kind == BOOL:
                name, _ = self._var_name()
                lit = Region.of(BoolLit(name, True), vars=[name])
                if self.at("=", "==", "!="):
                    op = self.advance().text
                    rhs = self.bool_operand()
                    iff = region_or(region_and(lit, rhs), region_and(region_not(lit), region_not(rhs)))
                    return iff if op != "!=" else region_not(iff)
                return lit
        return self.comparison()

    def bool_operand(self) -> Region:
        if self.at("true"):
            self.advance()
            return Region.full()
        if self.at("false"):
            self.advance()
            return Region.empty()
        tok = self.tok
        name, _ = self._var_name()
        d = self.lookup(name, tok)
        if d is None or d.kind != BOOL:
            self.error("boolean operand expected", tok)
        return Region.of(BoolLit(name, True), vars=[name])

    def comparison(self) -> Region:
        tok = self.tok
        lhs = self.term()
        if not self.at("<=", ">=", "<", ">", "=", "==", "!="):
            if lhs.coeffs and len(lhs.coeffs) == 1 and lhs.const == 0:
                self.error("integer expression where a boolean is expected", tok)
            self.error(f"expected a comparison, found {self.tok.text or 'end of input'!r}")
        op = self.advance().text
        rtok = self.tok
        rhs = self.term()
        if lhs.etype and rhs.etype and lhs.etype != rhs.etype:
            self.error("comparison between different enum types", tok)
        lhs = self._resolve(lhs, rhs.etype, tok)
        rhs = self._resolve(rhs, lhs.etype, rtok)
        d = dict(lhs.coeffs)
        for v, c in rhs.coeffs.items():
            d[v] = d.get(v, 0) - c
        k = lhs.const - rhs.const
        names = [v for v in d]
        if op in ("=", "==") and self.at("(") and self.peek().text == "mod":
            self.advance()
            self.advance()
            m = int(self.expect_int())
            self.expect(")")
            return Region.of(congruence(d, k, m), vars=names)
        if op == "<=":
            return Region.of(linear(d, k), vars=names)
        if op == "<":
            return Region.of(linear(d, k + 1), vars=names)
        if op == ">=":
            return Region.of(linear({v: -c for v, c in d.items()}, -k), vars=names)
        if op == ">":
            return Region.of(linear({v: -c for v, c in d.items()}, -k + 1), vars=names)
        eq = Region.of(linear(d, k, EQ), vars=names)
        if op in ("=", "=="):
            return eq
        return region_not(eq) & self._enum_domain(names)

    def _enum_domain(self, names) -> Region:
        """Keeps enum disequalities inside their declared values."""
        out = Region.full()
        for v in names:
            d = self.env.get(unprime(v)) if self.env is not None else None
            if d is not None and d.kind == ENUM:
                out = out & d.domain(is_primed(v))
        return out

    def expect_int(self) -> str:
        t = self.tok
        if t.kind != "int":
            self.error("expected an integer")
        self.advance()
        return t.text

    def signed_int(self) -> int:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        v = int(self.expect_int())
        return -v if neg else v

    # -- CTL
    def ctl(self) -> C.Ctl:
        f = self.ctl_conj()
        while self.at("||"):
            self.advance()
            f = C.mk(C.OR, f, self.ctl_conj())
        return f

    def ctl_conj(self) -> C.Ctl:
        f = self.ctl_unary()
        while self.at("&&"):
            self.advance()
            f = C.mk(C.AND, f, self.ctl_unary())
        return f

    def ctl_unary(self) -> C.Ctl:
        tok = self.tok
        if self.at("!"):
            self.advance()
            return C.mk(C.NOT, self.ctl_unary())
        if tok.kind == "id" and tok.text in C.UNARY:
            self.advance()
            return C.mk(tok.text, self.ctl_unary())
        if tok.kind == "id" and tok.text in ("E", "A") and self.peek().text == "[":
            self.advance()
            self.advance()
            f1 = self.ctl()
            self.expect("U")
            f2 = self.ctl()
            self.expect("]")
            return C.mk(C.EU if tok.text == "E" else C.AU, f1, f2)
        if self.at("("):
            save = self.pos
            try:
                r = self.comparison()
                return C.atom(r, format_region(r, self.env))
            except ParseError:
                self.pos = save
            self.advance()
            f = self.ctl()
            self.expect(")")
            return f
        r = self.simple()
        return C.atom(r, format_region(r, self.env))

    # -- files
    def model(self) -> Model:
        self.env = {}
        decls: list[VarDecl] = []
        init = Region.full()
        trans: list[tuple[str, Region]] = []
        props: list[str] = []
        names_seen: set[str] = set()
        while self.tok.kind != "eof":
            tok = self.tok
            if self.at("var"):
                self.advance()
                names = [self._decl_name()]
                while self.at(","):
                    self.advance()
                    names.append(self._decl_name())
                self.expect(":")
                kind, values, lo, hi = self.var_type()
                for n in names:
                    if n in self.env:
                        self.error(f"duplicate variable {n!r}", tok)
                    d = VarDecl(n, kind, values, lo, hi)
                    self.env[n] = d
                    decls.append(d)
                self.expect(";")
            elif self.at("init"):
                self.advance()
                self.allow_primes = False
                init = region_and(init, self.formula())
                self.allow_primes = True
                self.expect(";")
            elif self.at("trans"):
                self.advance()
                name = self.ident()
                if name in names_seen:
                    self.error(f"duplicate transition {name!r}", tok)
                names_seen.add(name)
                self.expect(":")
                guard = self.formula()
                self.expect("->")
                if self.at("skip"):
                    self.advance()
                    upd = Region.full()
                else:
                    upd = self.formula()
                    while self.at(","):
                        self.advance()
                        upd = region_and(upd, self.formula())
                self.expect(";")
                trans.append((name, region_and(guard, upd)))
            elif self.at("prop"):
                self.advance()
                self.allow_primes = False
                props.append(self.ctl())
                self.allow_primes = True
                self.expect(";")
            else:
                self.error(f"unexpected {tok.text!r}")
        return make_model(decls, init, trans, [C.fold_atoms(p, self.printer) for p in props])

    def printer(self, r: Region) -> str:
        return format_region(r, self.env)

    def _decl_name(self) -> str:
        tok = self.tok
        name = self.ident()
        if name in KEYWORDS or name in TEMPORAL:
            self.error(f"reserved word {name!r} cannot be a variable", tok)
        return name

    def var_type(self):
        if self.at("int"):
            self.advance()
            return INT, (), None, None
        if self.at("bool"):
            self.advance()
            return BOOL, (), None, None
        if self.at("enum"):
            self.advance()
            self.expect("{")
            vals = [self.ident()]
            while self.at(","):
                self.advance()
                vals.append(self.ident())
            self.expect("}")
            if len(set(vals)) != len(vals):
                self.error("duplicate enum value")
            for v in vals:
                if v in (self.env or {}):
                    self.error(f"enum value {v!r} clashes with a variable")
            return ENUM, tuple(vals), None, None
        lo = self.signed_int()
        self.expect("..")
        hi = self.signed_int()
        if hi < lo:
            self.error("empty range")
        return INT, (), lo, hi


def parse_model(text: str) -> Model:
    return Parser(text).model()


def env_of(model: Model | None) -> dict[str, VarDecl] | None:
    return None if model is None else {d.name: d for d in model.vars}


def parse_formula(text: str, model: Model | None = None, allow_primes: bool = False) -> Region:
    p = Parser(text, env_of(model), allow_primes)
    r = p.formula()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return r


def parse_ctl(text: str, model: Model | None = None) -> C.Ctl:
    p = Parser(text, env_of(model), allow_primes=False)
    f = p.ctl()
    if p.at(";"):
        p.advance()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return C.fold_atoms(f, p.printer)


def parse_predicates(text: str, model: Model | None = None) -> PredicateSet:
    p = Parser(text, env_of(model), allow_primes=False)
    preds: list[Predicate] = []
    while p.tok.kind != "eof":
        p.expect("pred")
        start = p.tok
        r = p.formula()
        for v in sorted(r.vars):
            d = p.env.get(v) if p.env is not None else None
            if d is not None and d.kind != INT:
                p.error(f"predicate mentions non-integer variable {v!r}", start)
        p.expect(";")
        preds.append(Predicate(format_region(r, p.env), r))
    return PredicateSet(tuple(preds))


# ---------------------------------------------------------------------------
# printing


def _sum_text(terms: list[tuple[str, int]], const: int) -> str:
    parts = []
    for v, c in terms:
        parts.append(v if c == 1 else f"{c}*{v}")
    if const or not parts:
        parts.append(str(const))
    return " + ".join(parts)


def _expr(terms: list[tuple[str, int]], const: int) -> str:
    text = ""
    for v, c in terms:
        mag = v if abs(c) == 1 else f"{abs(c)}*{v}"
        if not text:
            text = mag if c > 0 else f"-{mag}"
        else:
            text += f" + {mag}" if c > 0 else f" - {mag}"
    if not text:
        return str(const)
    if const:
        text += f" + {const}" if const > 0 else f" - {-const}"
    return text


def _enum_of(atom, env) -> tuple | None:
    if env is None:
        return None
    types = set()
    for v in atom.vars:
        d = env.get(unprime(v))
        if d is None or d.kind != ENUM:
            return None
        types.add(d.values)
    return types.pop() if len(types) == 1 else None


def format_atom(atom, env: Mapping[str, VarDecl] | None = None) -> str:
    if isinstance(atom, BoolLit):
        return atom.var if atom.polarity else f"!{atom.var}"
    etype = _enum_of(atom, env)
    if isinstance(atom, Linear) and etype and len(atom.coeffs) == 1:
        (v, c), = atom.coeffs
        if abs(c) == 1:
            k = -atom.const * c
            val = etype[k] if 0 <= k < len(etype) else str(k)
            if atom.rel == EQ:
                return f"{v} = {val}"
            return f"{v} {'<=' if c > 0 else '>='} {val}"
    pos = [(v, c) for v, c in atom.coeffs if c > 0]
    neg = [(v, -c) for v, c in atom.coeffs if c < 0]
    k = -atom.const
    if isinstance(atom, Congruence):
        return f"{_sum_text(pos, 0)} = {k % atom.modulus} (mod {atom.modulus})"
    rel = "=" if atom.rel == EQ else "<="
    primed = [(v, c) for v, c in atom.coeffs if is_primed(v)]
    if atom.rel == EQ and len(primed) == 1 and abs(primed[0][1]) == 1:
        v, c = primed[0]
        rest = [(w, -c * d) for w, d in atom.coeffs if w != v]
        return f"{v} = {_expr(rest, -c * atom.const)}"
    if not pos:
        return f"{_sum_text(neg, 0)} >= {-k}"
    if not neg:
        return f"{_sum_text(pos, 0)} {rel} {k}"
    if k >= 0:
        return f"{_sum_text(pos, 0)} {rel} {_sum_text(neg, k)}"
    return f"{_sum_text(pos, -k)} {rel} {_sum_text(neg, 0)}"


def _enum_bound(atom, env) -> bool:
    """``atom`` is one of the two range atoms of an enum variable."""
    if env is None or not isinstance(atom, Linear) or len(atom.coeffs) != 1:
        return False
    v = atom.coeffs[0][0]
    d = env.get(unprime(v))
    return d is not None and d.kind == ENUM and atom in d.domain(is_primed(v)).cubes[0].atoms


def format_cube(cube, env=None) -> str:
    atoms = [a for a in cube.atoms if not _enum_bound(a, env)]
    if not atoms:
        return "true"
    return " && ".join(format_atom(a, env) for a in atoms)


def format_region(r: Region, env: Mapping[str, VarDecl] | None = None) -> str:
    if not r.cubes:
        return "false"
    if len(r.cubes) == 1:
        return format_cube(r.cubes[0], env)
    parts = []
    for c in r.cubes:
        text = format_cube(c, env)
        parts.append(f"({text})" if " && " in text else text)
    return " || ".join(parts)


def _decl_text(group: list[VarDecl]) -> str:
    d = group[0]
    names = ", ".join(g.name for g in group)
    if d.kind == BOOL:
        t = "bool"
    elif d.kind == ENUM:
        t = "enum { " + ", ".join(d.values) + " }"
    elif d.lo is not None:
        t = f"{d.lo}..{d.hi}"
    else:
        t = "int"
    return f"var {names} : {t};"


def _domain_atoms(model: Model) -> set:
    out = set()
    for d in model.vars:
        for primed in (False, True):
            for c in d.domain(primed).cubes:
                out.update(c.atoms)
    return out


def _is_frame(atom, names) -> str | None:
    if isinstance(atom, Linear) and atom.rel == EQ and atom.const == 0 and len(atom.coeffs) == 2:
        (u, cu), (w, cw) = atom.coeffs
        if cu == -cw and abs(cu) == 1:
            for p, q in ((u, w), (w, u)):
                if is_primed(p) and q == unprime(p) and q in names:
                    return p
    return None


def format_transition(t, model: Model) -> str:
    env = env_of(model)
    names = set(model.names)
    dom = _domain_atoms(model)
    cubes = [c.atoms for c in t.relation.cubes]
    if not cubes:
        return f"trans {t.name} : false -> skip;"
    common = set(cubes[0])
    for c in cubes[1:]:
        common &= set(c)
    mention: dict[str, int] = {}
    for c in cubes:
        for a in c:
            if a in dom:
                continue
            for v in a.vars:
                mention[v] = mention.get(v, 0) + 1
    guard, upd = [], []
    for a in cubes[0]:
        if a not in common or a in dom:
            continue
        p = _is_frame(a, names)
        if p is not None and mention.get(p, 0) == len(cubes):
            continue
        (upd if any(is_primed(v) for v in a.vars) else guard).append(format_atom(a, env))
    rest = [tuple(a for a in c if a not in common) for c in cubes]
    if len(cubes) > 1:
        alts = []
        for c in rest:
            text = " && ".join(format_atom(a, env) for a in c) or "true"
            alts.append(f"({text})" if len(c) > 1 else text)
        upd.append("(" + " || ".join(alts) + ")")
    g = " && ".join(guard) or "true"
    u = ", ".join(upd) or "skip"
    return f"trans {t.name} : {g} -> {u};"


def format_model(model: Model) -> str:
    env = env_of(model)
    lines = []
    group: list[VarDecl] = []
    for d in model.vars:
        if group and (d.kind, d.values, d.lo, d.hi) != (group[0].kind, group[0].values,
                                                          group[0].lo, group[0].hi):
            lines.append(_decl_text(group))
            group = []
        group.append(d)
    if group:
        lines.append(_decl_text(group))
    dom = _domain_atoms(model)
    init = Region([tuple(a for a in c.atoms if a not in dom) for c in model.init.cubes])
    lines.append(f"init {format_region(init, env)};")
    for t in model.transitions:
        lines.append(format_transition(t, model))
    for p in model.props:
        lines.append(f"prop {C.to_text(p)};")
    return "\n".join(lines) + "\n"


def format_predicates(preds: PredicateSet) -> str:
    return "".join(f"pred {p.text};\n" for p in preds)
