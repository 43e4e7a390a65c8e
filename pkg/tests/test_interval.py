import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from evkernel import (
    CertainComplement,
    EmptyInterval,
    Inconsistent,
    MassFunction,
    NotABeliefFunction,
    Rule,
    SupportFunction,
    alpha_interval,
    bayes_lower_bound,
    belief_from_mass,
    build_polytope,
    cheap_closure,
    check_bayes,
    check_general,
    check_optimistic,
    dempster_combine,
    general_lower_conditional,
    make_frame,
    make_rulebase,
    mass_from_belief,
    min_conditional,
    natural_extension,
    optimistic_lower_conditional,
    refine_bayes,
    refine_optimistic,
    refine_optimistic_closed,
    simple_support,
    vacuous_rulebase,
)

from conftest import instances, masses, mp_scenario, mt_scenario, subsets

slow = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


# -- Bayes bound ---------------------------------------------------------------

def test_bayes_bound_mp():
    frame, P, Q, m, c = mp_scenario()
    assert bayes_lower_bound(belief_from_mass(m), c, Q, P) == pytest.approx(0.72, abs=1e-12)


def test_bayes_bound_endpoint():
    f = make_frame(["a", "b", "c", "d"])
    x, y = f.subset(["a", "c"]), f.subset(["a", "b"])
    c = make_rulebase(f, [Rule(x, y, 0.2), Rule(x, ~y, 0.6)])
    b = SupportFunction.from_bounds(f, {y: 0.3, ~y: 0.1})
    assert alpha_interval(b, y).lower == 0.3 and alpha_interval(b, y).upper == pytest.approx(0.9)
    assert bayes_lower_bound(b, c, x, y) == pytest.approx(0.24)
    grid = np.linspace(0.3, 0.9, 601)
    assert bayes_lower_bound(b, c, x, y) == pytest.approx((0.2 * grid + 0.6 * (1 - grid)).min())


def test_bayes_bound_constant_when_rules_agree(pq):
    frame, P, Q = pq
    c = make_rulebase(frame, [Rule(Q, P, 0.4), Rule(Q, ~P, 0.4)])
    b = SupportFunction.from_bounds(frame, {P: 0.1, ~P: 0.3})
    assert bayes_lower_bound(b, c, Q, P) == pytest.approx(0.4)


def test_bayes_empty_interval(pq):
    frame, P, Q = pq
    b = SupportFunction.from_bounds(frame, {P: 0.7, ~P: 0.6})
    with pytest.raises(EmptyInterval):
        bayes_lower_bound(b, vacuous_rulebase(frame), Q, P)


def test_check_and_refine_bayes_mp():
    frame, P, Q, m, c = mp_scenario()
    b = belief_from_mass(m)
    assert check_bayes(b, vacuous_rulebase(frame)).consistent
    report = check_bayes(b, c)
    assert not report.consistent
    v = next(v for v in report.violations if v.x == Q and v.y == P)
    assert (v.required, v.achieved) == (pytest.approx(0.72), 0.0)
    out = refine_bayes(b, c)
    assert out[Q] == pytest.approx(0.72, abs=1e-9)
    assert out[P] == pytest.approx(0.8)
    assert check_bayes(out, c).consistent
    assert refine_bayes(b, vacuous_rulebase(frame)) is b


def test_refine_bayes_vacuous_prior(pq):
    frame, P, Q = pq
    c = make_rulebase(frame, [Rule(Q, P, 0.9), Rule(Q, ~P, 0.3)])
    out = refine_bayes(SupportFunction.vacuous(frame), c)
    assert out[Q] == pytest.approx(0.3)


def test_refine_bayes_inconsistent(pq):
    frame, P, Q = pq
    c = make_rulebase(frame, [Rule(Q, P, 0.9), Rule(Q, ~P, 0.9)])
    b = SupportFunction.from_bounds(frame, {~Q: 0.5})
    with pytest.raises(Inconsistent):
        refine_bayes(b, c)


# -- optimistic regime -----------------------------------------------------------

def test_optimistic_examples(pq):
    frame, P, Q = pq
    vac = SupportFunction.vacuous(frame)
    assert optimistic_lower_conditional(vac, Q, P) == 0.0
    f = make_frame(["a", "b", "c"])
    b = belief_from_mass(MassFunction(f, {f.subset(["a", "b"]): 0.6, f.full: 0.4}))
    assert optimistic_lower_conditional(b, f.subset("a"), f.subset(["a", "c"])) == pytest.approx(0.6)
    _, P, Q, m, c = mp_scenario()
    assert optimistic_lower_conditional(belief_from_mass(m), Q, P) == 0.0
    with pytest.raises(CertainComplement):
        optimistic_lower_conditional(belief_from_mass(MassFunction(frame, {~P: 1.0})), Q, P)


def test_check_optimistic_examples():
    frame, P, Q, m, c = mp_scenario()
    assert not check_optimistic(SupportFunction.vacuous(frame), c).consistent
    assert check_optimistic(SupportFunction.vacuous(frame), vacuous_rulebase(frame)).consistent
    refined = MassFunction(frame, {Q & P: 0.72, P: 0.08, Q | ~P: 0.18, frame.full: 0.02})
    assert check_optimistic(belief_from_mass(refined), c).consistent


def test_refine_optimistic_mp():
    frame, P, Q, m, c = mp_scenario()
    b = belief_from_mass(m)
    out = refine_optimistic(b, c)
    assert out[Q | ~P] == pytest.approx(0.9, abs=1e-12)
    assert out[Q] == 0.0
    assert check_optimistic(out, c).consistent
    assert refine_optimistic(out, c) is out
    assert refine_optimistic(b, vacuous_rulebase(frame)) is b


def test_modus_tollens_needs_closure():
    frame, P, Q, m, c = mt_scenario()
    b = belief_from_mass(m)
    assert refine_bayes(b, c)[~P] == 0.0
    assert refine_optimistic(b, c)[~P] == 0.0
    out, rounds = refine_optimistic_closed(b, c, full_output=True)
    assert out[~P] == pytest.approx(7 / 9, abs=1e-6)
    assert rounds <= 200


# -- general regime ---------------------------------------------------------------

def test_general_examples():
    f = make_frame(["a", "b"])
    b = belief_from_mass(MassFunction(f, {f.subset("a"): 0.5, f.full: 0.5}))
    assert general_lower_conditional(b, f.subset("a"), f.full) == pytest.approx(0.5)
    f3 = make_frame(["a", "b", "c"])
    b3 = belief_from_mass(MassFunction(f3, {f3.subset(["a", "b"]): 0.6, f3.full: 0.4}))
    assert general_lower_conditional(b3, f3.subset("a"), f3.subset(["a", "c"])) == 0.0
    vac = SupportFunction.vacuous(f3)
    assert general_lower_conditional(vac, f3.subset("a"), f3.subset(["a", "b"])) == 0.0


def test_general_zero_over_zero():
    # all of b sits inside x & y within y: p(x | y) = 1 whenever p(y) > 0
    f = make_frame(["a", "b", "c"])
    b = belief_from_mass(MassFunction(f, {f.subset(["a", "c"]): 1.0}))
    x, y = f.subset("a"), f.subset(["a", "b"])
    assert general_lower_conditional(b, x, y) == 1.0
    assert min_conditional(build_polytope(b), x, y) == pytest.approx(1.0)


def test_check_general_mp():
    frame, P, Q, m, c = mp_scenario()
    b = belief_from_mass(m)
    assert check_general(b, vacuous_rulebase(frame)).consistent
    report = check_general(b, c)
    assert (Q.mask & P.mask, P.mask) in report.pairs()


# -- closure ----------------------------------------------------------------------

def test_cheap_closure_examples(pq):
    frame, P, Q = pq
    vac = SupportFunction.vacuous(frame)
    assert cheap_closure(vac) is vac
    raw = SupportFunction.from_bounds(frame, {Q | ~P: 0.9, ~Q: 0.8})
    out = cheap_closure(raw)
    assert out[~P] >= 0.7 - 1e-12
    assert out[~P] <= natural_extension(raw)[~P] + 1e-9


@slow
@given(masses())
def test_cheap_closure_fixes_beliefs(m):
    b = belief_from_mass(m)
    out = cheap_closure(b)
    assert np.array_equal(out.values, b.values)


# -- properties ----------------------------------------------------------------------

@slow
@given(instances())
def test_refinements_idempotent_extensive_sound(inst):
    frame, m, b, c = inst
    nat = natural_extension(b, c).values
    for refine in (refine_bayes, refine_optimistic, refine_optimistic_closed):
        out = refine(b, c)
        assert np.all(out.values >= b.values)
        assert np.all(out.values <= nat + 1e-9)
        again = refine(out, c)
        assert np.allclose(again.values, out.values, atol=1e-9)
    assert check_bayes(refine_bayes(b, c), c, 1e-9).consistent
    assert check_optimistic(refine_optimistic(b, c), c, 1e-9).consistent


@slow
@given(instances(), st.data())
def test_refinements_monotone_in_rules(inst, data):
    frame, m, b, c = inst
    if not c.rules:
        return
    fewer = make_rulebase(frame, c.rules[:-1])
    for refine in (refine_bayes, refine_optimistic):
        assert np.all(refine(b, fewer).values <= refine(b, c).values + 1e-9)


@slow
@given(instances())
def test_optimistic_raised_values_are_explained(inst):
    frame, m, b, c = inst
    out = refine_optimistic(b, c).values
    full = frame.full_mask
    for z in np.flatnonzero(out > b.values + 1e-9):
        z = int(z)
        # raised either by a tight update constraint or inherited from a subset
        best = 0.0
        for y in c.antecedents:
            yb = full ^ y
            if yb & ~z == 0 and out[yb] < 1.0:
                cv = c.value(z & y, y)
                best = max(best, out[yb] * (1 - cv) + cv)
        inherited = max(out[z & ~(1 << i)] for i in range(frame.n) if z >> i & 1)
        assert abs(out[z] - max(best, inherited)) <= 1e-9


@slow
@given(st.data())
def test_dominance_exactness_dempster(data):
    m = data.draw(masses())
    frame = m.frame
    b = belief_from_mass(m)
    poly = build_polytope(b)
    x = data.draw(subsets(frame))
    y = data.draw(subsets(frame, nonempty=True))
    if b[~y] >= 1.0:
        return
    opt = optimistic_lower_conditional(b, x, y)
    gen = general_lower_conditional(b, x, y)
    assert opt >= gen - 1e-12
    assert gen == pytest.approx(min_conditional(poly, x, y), abs=1e-9)
    dem = belief_from_mass(dempster_combine(m, simple_support(y, 1.0)))
    assert opt == pytest.approx(dem[x], abs=1e-9)


@slow
@given(instances())
def test_general_consistency_implies_optimistic(inst):
    frame, m, b, c = inst
    if check_general(b, c).consistent:
        assert check_optimistic(b, c).consistent


def test_general_requires_belief(pq):
    frame, P, Q = pq
    raw = SupportFunction.from_bounds(frame, {P: 0.6, Q: 0.6, P | Q: 0.6})
    with pytest.raises(NotABeliefFunction):
        mass_from_belief(raw)
    with pytest.raises(NotABeliefFunction):
        general_lower_conditional(raw, Q, P)
