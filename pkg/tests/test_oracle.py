from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from evkernel import (
    AntecedentImpossible,
    EmptyPolytope,
    FrameTooLarge,
    MassFunction,
    ProbabilityVector,
    SupportFunction,
    Unbounded,
    belief_from_mass,
    build_polytope,
    check_consistency_definition,
    check_general,
    is_envelope,
    is_more_specific,
    make_frame,
    max_prob,
    min_conditional,
    min_prob,
    natural_extension,
    vacuous_rulebase,
)
from evkernel.simplex import linprog_min

from conftest import instances, masses, mp_scenario, mt_scenario, subsets

slow = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


# -- simplex --------------------------------------------------------------------

def test_simplex_small():
    # min x + y s.t. x + 2y >= 2, 3x + y >= 3
    res = linprog_min([1, 1], [[1, 2], [3, 1]], [2, 3])
    assert res.value == pytest.approx(1.4)
    exact = linprog_min([1, 1], [[1, 2], [3, 1]], [2, 3], exact=True)
    assert exact.value == Fraction(7, 5)
    assert list(exact.x) == [Fraction(4, 5), Fraction(3, 5)]


def test_simplex_equality_and_infeasible():
    res = linprog_min([1, -1], A_eq=[[1, 1]], b_eq=[1])
    assert res.value == pytest.approx(-1.0)
    with pytest.raises(EmptyPolytope):
        linprog_min([0, 0], [[1, 1]], [3], [[1, 1]], [1])
    with pytest.raises(Unbounded):
        linprog_min([-1, 0], [[1, -1]], [0])


def test_simplex_degenerate_redundant():
    # duplicated equality rows are dropped after phase one
    res = linprog_min([1, 2, 0], A_eq=[[1, 1, 1], [1, 1, 1], [2, 2, 2]], b_eq=[1, 1, 2],
                      A_ge=[[1, 1, 0]], b_ge=[0.5])
    assert res.value == pytest.approx(0.5)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_simplex_matches_vertex_enumeration(data):
    # min c.p over the simplex with a few random >= rows; compare float and exact
    n = data.draw(st.integers(2, 4))
    rows = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), max_size=3))
    rhs = data.draw(st.lists(st.integers(-2, 2), min_size=len(rows), max_size=len(rows)))
    cost = data.draw(st.lists(st.integers(-5, 5), min_size=n, max_size=n))
    args = (cost, rows or None, [r / 4 for r in rhs] or None, [[1] * n], [1])
    try:
        f = linprog_min(*args)
    except EmptyPolytope:
        with pytest.raises(EmptyPolytope):
            linprog_min(*args, exact=True)
        return
    e = linprog_min(*args, exact=True)
    assert float(e.value) == pytest.approx(f.value, abs=1e-9)
    x = np.array([float(v) for v in e.x])
    assert abs(x.sum() - 1) < 1e-12 and x.min() >= 0
    if rows:
        assert np.all(np.array(rows) @ x >= np.array(rhs) / 4 - 1e-12)


# -- polytope -------------------------------------------------------------------

def test_polytope_construction():
    frame, P, Q, m, c = mp_scenario()
    poly = build_polytope(belief_from_mass(m), c)
    masks = {x for x, _ in poly.bounds}
    assert P.mask in masks
    assert poly.rules == ((Q.mask & P.mask, P.mask, 0.9),)
    vac = build_polytope(SupportFunction.vacuous(frame))
    assert vac.bounds == () and vac.rules == ()
    assert min_prob(vac, Q) == 0.0


def test_empty_polytope():
    f = make_frame(["a", "b"])
    b = SupportFunction.from_bounds(f, {f.subset("a"): 0.6, f.subset("b"): 0.6})
    assert build_polytope(b).is_empty()
    assert not is_envelope(b)
    with pytest.raises(EmptyPolytope):
        min_prob(build_polytope(b), f.subset("a"))


def test_min_prob_examples():
    frame, P, Q, m, c = mp_scenario()
    poly = build_polytope(belief_from_mass(m), c)
    assert min_prob(poly, Q) == pytest.approx(0.72, abs=1e-9)
    assert min_prob(poly, Q, exact=True) == Fraction(18, 25)
    assert max_prob(poly, ~Q) == pytest.approx(0.28, abs=1e-9)
    frame, P, Q, m, c = mt_scenario()
    poly = build_polytope(belief_from_mass(m), c)
    assert min_prob(poly, ~P, exact=True) == Fraction(7, 9)
    assert min_prob(poly, ~P) == pytest.approx(7 / 9, abs=1e-9)


def test_min_conditional_examples():
    f = make_frame(["a", "b", "c"])
    b = belief_from_mass(MassFunction(f, {f.subset(["a", "b"]): 0.6, f.full: 0.4}))
    assert min_conditional(build_polytope(b), f.subset("a"), f.subset(["a", "c"])) == pytest.approx(0.0, abs=1e-12)
    frame, P, Q, m, c = mp_scenario()
    poly = build_polytope(belief_from_mass(m), c)
    assert min_conditional(poly, Q, P) == pytest.approx(0.9, abs=1e-9)
    vac = build_polytope(SupportFunction.vacuous(frame))
    assert min_conditional(vac, Q, P) == pytest.approx(0.0, abs=1e-12)
    certain = build_polytope(belief_from_mass(MassFunction(frame, {~P: 1.0})))
    with pytest.raises(AntecedentImpossible):
        min_conditional(certain, Q, P)


def test_is_envelope_examples():
    f = make_frame(["a", "b", "c"])
    raw = SupportFunction.from_bounds(f, {f.subset("a"): 0.3, f.subset("b"): 0.3,
                                          f.subset(["a", "b"]): 0.4})
    assert not is_envelope(raw)
    assert is_envelope(SupportFunction.vacuous(f))


def test_probability_vector():
    f = make_frame(["a", "b"])
    p = ProbabilityVector(f, (0.25, 0.75))
    assert p.prob(f.subset("b")) == 0.75
    with pytest.raises(ValueError):
        ProbabilityVector(f, (0.5, 0.6))
    frame, P, Q, m, c = mp_scenario()
    poly = build_polytope(belief_from_mass(m), c)
    assert poly.contains(poly.solution())
    assert not poly.contains(ProbabilityVector(frame, (0.0, 0.0, 0.5, 0.5)))


def test_exact_cap():
    f = make_frame([f"a{i}" for i in range(7)])
    poly = build_polytope(SupportFunction.vacuous(f))
    with pytest.raises(FrameTooLarge):
        min_prob(poly, f.subset("a0"), exact=True)
    big = make_frame([f"a{i}" for i in range(13)])
    with pytest.raises(FrameTooLarge):
        build_polytope(SupportFunction.vacuous(big))


def test_consistency_definition_examples():
    frame, P, Q, m, c = mp_scenario()
    b = belief_from_mass(m)
    assert check_consistency_definition(b, vacuous_rulebase(frame)).consistent
    report = check_consistency_definition(b, c)
    assert (Q.mask & P.mask, P.mask) in report.pairs()


def test_natural_extension_examples():
    frame, P, Q, m, c = mp_scenario()
    b = belief_from_mass(m)
    assert natural_extension(b, c)[Q] == pytest.approx(0.72, abs=1e-9)
    assert natural_extension(b).isclose(b)
    frame, P, Q, m, c = mt_scenario()
    assert natural_extension(belief_from_mass(m), c, exact=True)[~P] == pytest.approx(7 / 9, abs=1e-15)


def test_natural_extension_forgets_rules():
    # a lower envelope alone cannot carry a conditional constraint
    frame, P, Q, m, c = mp_scenario()
    nat = natural_extension(belief_from_mass(m), c)
    assert not check_consistency_definition(nat, c).consistent
    got = min_conditional(build_polytope(nat), Q, P, exact=True)
    assert got == Fraction(36, 41) and got < Fraction(9, 10)


@slow
@given(masses())
def test_beliefs_are_envelopes(m):
    assert is_envelope(belief_from_mass(m))


@slow
@given(instances())
def test_natural_extension_properties(inst):
    frame, m, b, c = inst
    nat = natural_extension(b, c)
    assert is_more_specific(nat, b)
    assert is_envelope(nat)
    again = natural_extension(nat, c)
    assert np.allclose(again.values, nat.values, atol=1e-9)


@slow
@given(instances())
def test_exact_and_float_agree(inst):
    frame, m, b, c = inst
    f = natural_extension(b, c).values
    e = natural_extension(b, c, exact=True).values
    assert np.allclose(f, e, atol=1e-9)


@slow
@given(instances())
def test_consistency_definition_agrees_with_general(inst):
    frame, m, b, c = inst
    ref = check_consistency_definition(b, c)
    gen = check_general(b, c)
    assert ref.pairs() == gen.pairs()
    for v, w in zip(sorted(ref.violations, key=lambda v: (v.y.mask, v.x.mask)),
                    sorted(gen.violations, key=lambda v: (v.y.mask, v.x.mask))):
        assert v.achieved == pytest.approx(w.achieved, abs=1e-9)


@slow
@given(st.data())
def test_min_plus_max_of_complement(data):
    m = data.draw(masses())
    poly = build_polytope(belief_from_mass(m))
    x = data.draw(subsets(m.frame))
    assert min_prob(poly, x) + max_prob(poly, ~x) == pytest.approx(1.0, abs=1e-12)
