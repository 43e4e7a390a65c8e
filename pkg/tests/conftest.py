"""Shared fixtures plus random generators for priors and rule bases."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from evkernel import (
    EmptyPolytope,
    InconsistentRule,
    MassFunction,
    Rule,
    belief_from_mass,
    build_polytope,
    make_frame,
    make_rulebase,
)

PQ_ATOMS = ("pq", "p~q", "~pq", "~p~q")

# pass/fail lines appended by the acceptance module
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def pq():
    frame = make_frame(PQ_ATOMS)
    P = frame.subset(["pq", "p~q"])
    Q = frame.subset(["pq", "~pq"])
    return frame, P, Q


def mp_scenario():
    frame = make_frame(PQ_ATOMS)
    P = frame.subset(["pq", "p~q"])
    Q = frame.subset(["pq", "~pq"])
    m = MassFunction(frame, {P: 0.8, frame.full: 0.2})
    c = make_rulebase(frame, [Rule(Q, P, 0.9)])
    return frame, P, Q, m, c


def mt_scenario():
    frame = make_frame(PQ_ATOMS)
    P = frame.subset(["pq", "p~q"])
    Q = frame.subset(["pq", "~pq"])
    m = MassFunction(frame, {~Q: 0.8, frame.full: 0.2})
    c = make_rulebase(frame, [Rule(Q, P, 0.9)])
    return frame, P, Q, m, c


# -- numpy-driven generators (for fixed-count sweeps) ------------------------

def random_mass(rng: np.random.Generator, frame, max_focal: int = 4) -> MassFunction:
    k = int(rng.integers(1, max_focal + 1))
    focal = rng.choice(np.arange(1, frame.size), size=min(k, frame.size - 1), replace=False)
    w = rng.dirichlet(np.ones(len(focal)))
    return MassFunction(frame, {int(f): float(x) for f, x in zip(focal, w)})


def random_rules(rng: np.random.Generator, frame, max_rules: int = 3):
    rules = []
    for _ in range(int(rng.integers(0, max_rules + 1))):
        y = int(rng.integers(1, frame.full_mask))
        subs = [x for x in range(1, y) if x & y == x]
        if not subs:
            continue
        x = int(rng.choice(subs))
        rules.append(Rule(frame.propset(x), frame.propset(y), float(np.round(rng.uniform(0.05, 0.95), 3))))
    return rules


def random_instance(rng: np.random.Generator, n_choices=(2, 3, 4)):
    """A random (belief, rule base) pair whose credal polytope is nonempty."""
    while True:
        n = int(rng.choice(n_choices))
        frame = make_frame([f"a{i}" for i in range(n)])
        m = random_mass(rng, frame)
        try:
            c = make_rulebase(frame, random_rules(rng, frame))
        except InconsistentRule:
            continue
        b = belief_from_mass(m)
        if build_polytope(b, c).is_empty():
            continue
        return frame, m, b, c


# -- hypothesis strategies ----------------------------------------------------

@st.composite
def frames(draw, min_atoms=1, max_atoms=4):
    n = draw(st.integers(min_atoms, max_atoms))
    return make_frame([f"a{i}" for i in range(n)])


@st.composite
def masses(draw, frame=None, max_focal=5):
    if frame is None:
        frame = draw(frames())
    focal = draw(st.lists(st.integers(1, frame.full_mask), min_size=1,
                          max_size=max_focal, unique=True))
    raw = draw(st.lists(st.integers(1, 100), min_size=len(focal), max_size=len(focal)))
    total = sum(raw)
    return MassFunction(frame, {f: r / total for f, r in zip(focal, raw)})


@st.composite
def subsets(draw, frame, nonempty=False):
    lo = 1 if nonempty else 0
    return frame.propset(draw(st.integers(lo, frame.full_mask)))


@st.composite
def rule_lists(draw, frame, max_rules=3):
    rules = []
    for _ in range(draw(st.integers(0, max_rules))):
        y = draw(st.integers(1, frame.full_mask - 1)) if frame.n > 1 else None
        if y is None:
            break
        subs = [x for x in range(1, y) if x & y == x]
        if not subs:
            continue
        x = draw(st.sampled_from(subs))
        v = draw(st.integers(1, 19)) / 20
        rules.append(Rule(frame.propset(x), frame.propset(y), v))
    return rules


@st.composite
def instances(draw, min_atoms=2, max_atoms=4):
    """(frame, mass, belief, rule base) with a nonempty credal polytope."""
    frame = draw(frames(min_atoms, max_atoms))
    m = draw(masses(frame))
    try:
        c = make_rulebase(frame, draw(rule_lists(frame)))
    except InconsistentRule:
        c = make_rulebase(frame, [])
    b = belief_from_mass(m)
    try:
        if build_polytope(b, c).is_empty():
            c = make_rulebase(frame, [])
    except EmptyPolytope:
        c = make_rulebase(frame, [])
    return frame, m, b, c
