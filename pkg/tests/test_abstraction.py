import itertools

import pytest

from ppa import ctl as C
from ppa.abstraction import (
    AbstractionContext,
    PreconditionViolated,
    build_abstract_model,
    minimize_dnf,
)
from ppa.frontend import Predicate, PredicateSet, format_model, parse_ctl, parse_formula, parse_model
from ppa.kripke import prime
from ppa.region import entails, equivalent, rename


@pytest.fixture
def ticket(models_dir):
    m = parse_model((models_dir / "ticket2.ppa").read_text())
    preds = PredicateSet(tuple(Predicate(t, parse_formula(t, m)) for t in ("z = 1", "z < 1")))
    return m, preds


def test_only_predicate_variables_are_abstracted(ticket):
    m, preds = ticket
    am, ctx = build_abstract_model(m, preds)
    assert ctx.abstracted == frozenset({"z"})
    assert am.names == ("s", "t", "a1", "a2", "pc1", "pc2", "b1", "b2")
    assert format_model(am).splitlines()[3] == "init !b1 && b2 && pc1 = think && pc2 = think && s = t;"


def test_r_cs1_within_the_abstract_domain(ticket):
    m, preds = ticket
    am, ctx = build_abstract_model(m, preds)
    r = next(t for t in m.transitions if t.name == "r_cs1")
    got = ctx.alpha_relation(r.relation)
    text = ("pc1 = try && s >= a1 && ((b1 && !b2 && !b1' && !b2') || (!b1 && b2 && (b1' || b2'))"
            " || (!b1 && !b2 && !b1' && !b2')) && pc1' = cs"
            " && s' = s && t' = t && a1' = a1 && a2' = a2 && pc2' = pc2")
    expected = parse_formula(text, am, allow_primes=True) & am.domain() & am.domain(True)
    # b1 and b2 exclude each other: restrict to valuations some z can produce
    feasible = ctx.feasible & rename(ctx.feasible, {b: prime(b) for b in ctx.proxies})
    assert equivalent(got, expected & feasible)
    assert entails(got, expected)


def test_consistency_keeps_proxies_of_unchanged_variables(ticket):
    m, preds = ticket
    am, ctx = build_abstract_model(m, preds)
    r = next(t for t in am.transitions if t.name == "r_try1").relation
    for bits in itertools.product((False, True), repeat=4):
        point = dict(zip(("b1", "b2", "b1'", "b2'"), bits))
        full = {"s": 0, "t": 0, "a1": 0, "a2": 0, "pc1": 0, "pc2": 0,
                "s'": 0, "t'": 1, "a1'": 0, "a2'": 0, "pc1'": 1, "pc2'": 0, **point}
        same = point["b1"] == point["b1'"] and point["b2"] == point["b2'"]
        feasible = not (point["b1"] and point["b2"])
        assert r.contains(full) == (same and feasible)


def test_property_abstraction(ticket):
    m, preds = ticket
    ctx = AbstractionContext(m, preds)
    g = ctx.abstract_formula(parse_ctl("AG(z <= 1)", m))
    assert C.to_text(g) == "AG(b1 || b2)"
    assert C.to_text(ctx.concretize_formula(g)) == "AG(z <= 1)"
    # z <= 0 is z < 1 on the integers, so it is expressible
    assert C.to_text(ctx.abstract_formula(parse_ctl("AG(z <= 0)", m))) == "AG(b2)"
    with pytest.raises(PreconditionViolated):
        ctx.abstract_formula(parse_ctl("AG(z <= 2)", m))


def test_non_integer_predicates_are_rejected(ticket):
    m, _ = ticket
    bad = PredicateSet((Predicate("pc1 = cs", parse_formula("pc1 = cs", m)),))
    with pytest.raises(PreconditionViolated):
        AbstractionContext(m, bad)


def test_proxy_names_avoid_model_variables():
    m = parse_model("var b1, x : int; init x = 0; trans t : true -> x' = x + 1;")
    ctx = AbstractionContext(m, PredicateSet((Predicate("x = 0", parse_formula("x = 0", m)),)))
    assert ctx.proxies == ("_b1",)


def test_no_predicates_is_identity(ticket):
    m, _ = ticket
    ctx = AbstractionContext(m, PredicateSet(()))
    assert ctx.alpha(m.init) == m.init
    assert ctx.gamma(m.init) == m.init


def test_minimize_dnf_uses_dont_cares():
    # f = a.!b with (1,1) unreachable  ->  a
    assert minimize_dnf([(1, 0)], [(1, 1)], 2) == [(1, None)]
    assert minimize_dnf([], [(0, 0)], 2) == []
    cover = minimize_dnf([(0, 0), (0, 1), (1, 0)], [], 2)
    assert sorted(cover, key=str) == sorted([(0, None), (None, 0)], key=str)
