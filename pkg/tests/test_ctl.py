import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randgen import rand_actl, rand_bounded_model

from ppa import ctl as C
from ppa.frontend import parse_ctl
from ppa.oracle import explore, sat_set


def test_negated_actl_is_ectl_with_preorder_ids():
    g = C.to_nnf_negate(parse_ctl("AG(x <= 1 && AF(y = 0))"))
    assert C.to_text(g) == "E[true U x >= 2 || EG(y >= 1 || y <= -1)]"
    ids = [n.nid for n in C.walk(g)]
    assert ids == list(range(len(ids)))
    assert not any(n.kind in C.UNIVERSAL for n in C.walk(g))


def test_until_negation():
    g = C.to_nnf_negate(parse_ctl("A[x = 0 U y = 0]"))
    assert C.to_text(g) == ("E[y >= 1 || y <= -1 U (x >= 1 || x <= -1) && (y >= 1 || y <= -1)]"
                            " || EG(y >= 1 || y <= -1)")


def test_existential_property_is_rejected():
    with pytest.raises(C.NotACTL):
        C.to_nnf_negate(parse_ctl("EF(x = 1)"))


def test_node_ids_do_not_affect_equality():
    f = parse_ctl("AG(x <= 1)")
    assert C.number(f) == f


def test_atoms_fold_into_one_region():
    f = parse_ctl("AG(x <= 1 || x >= 5)")
    assert f.args[0].kind == C.ATOM


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_nnf_preserves_meaning(seed):
    rng = random.Random(seed)
    m = rand_bounded_model(rng)
    f = rand_actl(rng, m.vars)
    g = explore(m)
    every = set(range(len(g.states)))
    assert sat_set(C.to_nnf(f), g) == sat_set(f, g)
    assert sat_set(C.to_nnf_negate(f), g) == every - sat_set(f, g)
