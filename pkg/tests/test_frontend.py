import pytest

from ppa import ctl as C
from ppa.frontend import (
    ParseError,
    format_model,
    format_region,
    parse_ctl,
    parse_formula,
    parse_model,
    parse_predicates,
)
from ppa.kripke import BOOL, ENUM, INT
from ppa.region import equivalent


@pytest.fixture
def ticket(models_dir):
    return parse_model((models_dir / "ticket2.ppa").read_text())


def test_ticket_declarations(ticket):
    assert ticket.names == ("s", "t", "a1", "a2", "z", "pc1", "pc2")
    assert ticket.decl("pc1").kind == ENUM
    assert ticket.decl("pc1").values == ("think", "try", "cs")
    assert [t.name for t in ticket.transitions] == ["r_try1", "r_cs1", "r_th1",
                                                    "r_try2", "r_cs2", "r_th2"]
    assert C.to_text(ticket.props[0]) == "AG(z <= 1)"


def test_unmentioned_variables_are_framed(ticket):
    r = next(t for t in ticket.transitions if t.name == "r_cs1").relation
    state = {"s": 5, "t": 9, "a1": 3, "a2": 7, "z": 0, "pc1": 1, "pc2": 2}
    succ = {"s'": 5, "t'": 9, "a1'": 3, "a2'": 7, "z'": 1, "pc1'": 2, "pc2'": 2}
    assert r.contains({**state, **succ})
    assert not r.contains({**state, **succ, "t'": 10})


def test_printed_model_reparses_to_the_same_model(ticket):
    text = format_model(ticket)
    again = parse_model(text)
    assert format_model(again) == text
    assert again.names == ticket.names
    for a, b in zip(again.transitions, ticket.transitions):
        assert a.name == b.name and equivalent(a.relation, b.relation)
    assert equivalent(again.init, ticket.init)


def test_bool_and_range_types():
    m = parse_model("var x : 0..3; var b : bool; init x = 0 && !b; "
                    "trans go : x < 3 -> x' = x + 1, b'; prop AG(x <= 3);")
    assert m.decl("x").kind == INT and (m.decl("x").lo, m.decl("x").hi) == (0, 3)
    assert m.decl("b").kind == BOOL
    assert m.finite


def test_skip_update_frames_everything():
    m = parse_model("var x : int; init x = 0; trans idle : true -> skip;")
    r = m.transitions[0].relation
    assert r.contains({"x": 4, "x'": 4}) and not r.contains({"x": 4, "x'": 5})


def test_formula_operators():
    r = parse_formula("x != 2 && (y >= 1 || x + 2*y = 3)")
    for x in range(-3, 4):
        for y in range(-3, 4):
            assert r.contains({"x": x, "y": y}) == (x != 2 and (y >= 1 or x + 2 * y == 3))


def test_modular_constraint():
    r = parse_formula("x = 1 (mod 3)")
    assert {x for x in range(-5, 6) if r.contains({"x": x})} == {-5, -2, 1, 4}


def test_ctl_grammar(ticket):
    f = parse_ctl("A[z <= 1 U pc1 = cs] && EX(z = 0)", ticket)
    assert f.kind == C.AND
    assert f.args[0].kind == C.AU and f.args[1].kind == C.EX
    assert C.to_text(f) == "A[z <= 1 U pc1 = cs] && EX(z = 0)"


def test_predicates_file(ticket):
    ps = parse_predicates("pred z = 1;\npred z < 1;\n", ticket)
    assert ps.texts == ["z = 1", "z <= 0"]
    assert ps.vars == frozenset({"z"})


def test_predicates_reject_enums_and_primes(ticket):
    with pytest.raises(ParseError):
        parse_predicates("pred pc1 = cs;", ticket)
    with pytest.raises(ParseError):
        parse_predicates("pred z' = 1;", ticket)


def test_parse_error_positions():
    with pytest.raises(ParseError) as e:
        parse_model("var x : int;\ninit x = ;\n")
    assert e.value.line == 2 and e.value.col > 0


def test_unknown_identifier_in_typed_context(ticket):
    with pytest.raises(ParseError):
        parse_formula("w = 1", ticket)


def test_enum_literals_print_by_name(ticket):
    r = parse_formula("pc1 = try && pc2 != cs", ticket)
    assert format_region(r, {d.name: d for d in ticket.vars}) == "pc1 = try && pc2 <= try"


def test_enum_disequality_stays_in_domain(ticket):
    r = parse_formula("pc1 != think", ticket)
    assert {v for v in range(-2, 5) if r.contains({"pc1": v})} == {1, 2}
