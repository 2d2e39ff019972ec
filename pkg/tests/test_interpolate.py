import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randgen import rand_region

from ppa.frontend import Predicate, PredicateSet, parse_formula
from ppa.interpolate import (
    Conflict,
    NoNewPredicates,
    fallback_predicates,
    half_space_interpolant,
    refine,
)
from ppa.presburger import linear
from ppa.region import Region, entails, equivalent, region_and


def _conf(d, b):
    return Conflict(parse_formula(d), parse_formula(b))


def _separates(c, p):
    r = Region.of(p)
    return entails(c.deadend, r) and region_and(c.bad, r).is_empty()


def test_single_variable_cut_is_tight():
    c = _conf("x <= 0", "x >= 2")
    [p] = half_space_interpolant(c)
    assert _separates(c, p)
    # the tightest bound over the deadend; x <= 1 would separate as well
    assert str(p) == "x <= 0"


def test_two_variable_separation():
    c = _conf("x = 0 && y = 0", "x = 0 && y = 5")
    [p] = half_space_interpolant(c)
    assert _separates(c, p)
    assert p.vars == ("y",)


def test_non_separable_pair_gives_empty_list():
    c = _conf("x = 0 || x = 4", "x = 2")
    assert half_space_interpolant(c) == []
    # exhaustive check over the same box: no a.x <= k separates
    for a in range(-2, 3):
        for k in range(-64, 65):
            if a == 0:
                continue
            assert not _separates(c, linear({"x": a}, -k))


def _box_search(c, names, coeff_bound=2, const_bound=64):
    for vec in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=len(names)):
        nz = [abs(v) for v in vec if v]
        if not nz or math.gcd(*nz) != 1:
            continue
        coeffs = dict(zip(names, vec))
        for k in range(-const_bound, const_bound + 1):
            if _separates(c, linear(coeffs, -k)):
                return True
    return False


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_interpolant_contract_and_completeness(seed):
    rng = random.Random(seed)
    d, _ = rand_region(rng, ["x"], 2, 2)
    b, _ = rand_region(rng, ["x"], 2, 2)
    c = Conflict(d, b - d)
    if c.deadend.is_empty() or c.bad.is_empty():
        return
    found = half_space_interpolant(c, const_bound=16)
    if found:
        assert _separates(c, found[0])
    else:
        assert not _box_search(c, ["x"], const_bound=16)


def test_fallback_harvests_linear_atoms():
    assert [str(a) for a in fallback_predicates(_conf("x <= 0 && y = 1", "x >= 3"))] == ["x <= 0", "y = 1"]
    dup = _conf("(x <= 0 && y = 1) || (x <= 0 && y = 3)", "x >= 3")
    texts = [str(a) for a in fallback_predicates(dup)]
    assert texts.count("x <= 0") == 1


def _ps(*texts):
    return PredicateSet(tuple(Predicate(t, parse_formula(t)) for t in texts))


def test_refine_extends_in_candidate_order():
    c = _conf("x <= 0", "x >= 2")
    [ext] = refine(c, _ps("z = 1"))
    assert ext.texts == ["z = 1", "x <= 0"]


def test_refine_drops_known_predicates_and_negations():
    c = _conf("x <= 0", "x >= 2")
    with pytest.raises(NoNewPredicates):
        refine(c, _ps("x < 1"))
    with pytest.raises(NoNewPredicates):
        refine(c, _ps("x >= 1"))


def test_refine_never_returns_its_input():
    c = _conf("x = 0 || x = 4", "x = 2")
    base = _ps("x = 0")
    for ext in refine(c, base):
        assert len(ext) == len(base) + 1
        new = ext[len(ext) - 1].region
        assert not any(equivalent(new, p.region) for p in base)
