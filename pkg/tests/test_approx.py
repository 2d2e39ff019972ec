import random

from hypothesis import given, settings
from hypothesis import strategies as st

from randgen import rand_actl, rand_bounded_model

from ppa import ctl as C
from ppa.approx import (
    INCONCLUSIVE,
    OVER,
    UNDER,
    VERIFIED,
    Engine,
    check_approx,
    compute_iter,
)
from ppa.frontend import parse_ctl, parse_model
from ppa.oracle import explore, sat_set
from ppa.region import entails, region_and

COUNTER = """
var x : int;
init x = 0;
trans up : x < 10 -> x' = x + 1;
trans stay : x = 10 -> skip;
"""


def _sat(g, region):
    return {i for i, s in enumerate(g.states) if region.contains(s)}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([0, 1, 2]), st.sampled_from([1, 2, 3]))
def test_over_and_under_bracket_the_exact_answer(seed, ws, bound):
    rng = random.Random(seed)
    m = rand_bounded_model(rng)
    f = C.to_nnf_negate(rand_actl(rng, m.vars))
    g = explore(m)
    exact = Engine(m, None, None)
    reach = _sat(g, exact.universe)
    truth = sat_set(f, g) & reach
    over = Engine(m, ws, bound, exact.universe).solve(f, OVER)
    under = Engine(m, ws, bound, exact.universe).solve(f, UNDER)
    assert _sat(g, under) <= truth <= _sat(g, over)


def test_iterate_map_records_every_fixpoint_node():
    m = parse_model(COUNTER)
    g = C.to_nnf_negate(parse_ctl("AG(x <= 10)", m))
    sol, iters = compute_iter(g, m, None, None)
    assert g.kind == C.EU
    chain = iters[g.nid]
    assert chain[-1] == sol
    assert all(n.nid in iters for n in C.walk(g))
    for a, b in zip(chain, chain[1:]):
        assert entails(a, b)
    assert sol.is_empty()


def test_ticket_direct_check(models_dir):
    m = parse_model((models_dir / "ticket2.ppa").read_text())
    res = check_approx(m, m.props[0])
    assert res.verdict == VERIFIED
    assert region_and(m.init, res.solution).is_empty()


def test_coarse_widening_is_inconclusive(models_dir):
    m = parse_model((models_dir / "ticket2.ppa").read_text())
    assert check_approx(m, parse_ctl("AG(z <= 0)", m)).verdict == INCONCLUSIVE


def test_unbounded_counter_liveness():
    m = parse_model(COUNTER)
    assert check_approx(m, parse_ctl("AF(x = 10)", m), 1, 20).verdict == VERIFIED
