import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissontp.core import random_hermitian, random_unit_vector, random_unitary, seeded_rng
from poissontp.errors import (
    ClassicalStateNotSupported,
    DimensionMismatch,
    InvalidSpace,
    NotATransitionProbability,
    SpaceMismatch,
    ZeroVector,
)
from poissontp.states import (
    Observable,
    PureState,
    StateSpace,
    basis_state,
    decompose_sectors,
    dump_bundle,
    expectation,
    load_bundle,
    make_state,
    p_rho,
    projector_distance,
    transition_probability,
)

from conftest import SZ


def test_make_state_projectors():
    assert np.array_equal(make_state([1, 0]).projector, np.diag([1, 0]).astype(complex))
    plus = make_state([1, 1])
    # outer product of (1,1)/sqrt 2
    assert np.max(np.abs(plus.projector - 0.5)) < 1e-15
    theta = 0.73
    twin = make_state([np.exp(1j * theta), np.exp(1j * theta)])
    assert np.max(np.abs(twin.projector - plus.projector)) < 1e-15
    assert twin.same_as(plus)


def test_make_state_errors():
    space = StateSpace.quantum(2)
    with pytest.raises(ZeroVector):
        make_state([0, 0])
    with pytest.raises(DimensionMismatch):
        make_state([1, 0, 0], space=space)


def test_pure_state_invariants(rng):
    s = PureState(0, vector=random_unit_vector(5, rng) * 3.7)
    p = s.projector
    assert abs(np.trace(p) - 1) < 1e-10
    assert np.max(np.abs(p @ p - p)) < 1e-9
    assert np.max(np.abs(p - p.conj().T)) == 0


def test_expectation_examples():
    assert expectation(SZ, make_state([1, 0])) == 1.0
    assert abs(expectation(SZ, make_state([1, 1]))) < 1e-15
    for v in ([1, 2j], [0.3, -1]):
        assert abs(expectation(np.eye(2), make_state(v)) - 1) < 1e-15
    with pytest.raises(ClassicalStateNotSupported):
        expectation(SZ, PureState(0, label="x"))
    with pytest.raises(DimensionMismatch):
        expectation(np.eye(3), make_state([1, 0]))


def test_transition_probability_examples():
    rho = make_state([1, 0])
    assert transition_probability(rho, rho) == 1.0
    assert abs(transition_probability(rho, make_state([1, 1])) - 0.5) < 1e-15
    x, y = PureState(0, label="x"), PureState(0, label="y")
    assert transition_probability(x, y) == 0.0
    assert transition_probability(x, x) == 1.0


def test_transition_probability_cross_sector_and_mismatch():
    a = PureState(0, vector=[1, 0])
    b = PureState(1, vector=[1, 0, 0])
    assert transition_probability(a, b) == 0.0
    with pytest.raises(SpaceMismatch):
        transition_probability(a, PureState(0, vector=[1, 0, 0]))
    with pytest.raises(SpaceMismatch):
        transition_probability(a, PureState(0, label="q"))


def test_equal_iff_one_near_boundary():
    a = make_state([1, 0])
    close = make_state([1, 1e-5])  # projector distance 1e-5, p = 1 - 1e-10
    assert transition_probability(a, close) < 1.0
    tiny = make_state([1, 1e-12])
    assert projector_distance(a, tiny) <= 1e-9
    assert transition_probability(a, tiny) == 1.0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 8))
def test_symmetry_range_basis(seed, dim):
    rng = seeded_rng(seed)
    a = PureState(0, vector=random_unit_vector(dim, rng))
    b = PureState(0, vector=random_unit_vector(dim, rng))
    p = transition_probability(a, b)
    assert p == transition_probability(b, a)
    assert 0.0 <= p <= 1.0 + 1e-12
    u = random_unitary(dim, rng)
    total = sum(transition_probability(a, PureState(0, vector=u[:, j])) for j in range(dim))
    assert abs(total - 1) <= 1e-10


def test_born_rule_matches_overlap(rng):
    for _ in range(20):
        r, s = random_unit_vector(4, rng), random_unit_vector(4, rng)
        assert abs(transition_probability(PureState(0, vector=r), PureState(0, vector=s)) - abs(np.vdot(r, s)) ** 2) < 1e-14


def test_p_rho_examples():
    e1 = make_state([1, 0])
    f = p_rho(e1)
    assert np.array_equal(f.operator(), np.diag([1, 0]).astype(complex))
    assert f(e1) == 1.0
    assert abs(f(make_state([1, 1])) - 0.5) < 1e-15
    with pytest.raises(ClassicalStateNotSupported):
        p_rho(PureState(0, label="a"))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 6), n=st.integers(1, 6))
def test_observable_dual_form(seed, dim, n):
    rng = seeded_rng(seed)
    terms = tuple((rng.standard_normal(), PureState(0, vector=random_unit_vector(dim, rng))) for _ in range(n))
    f = Observable(terms)
    direct = sum(c * s.projector for c, s in terms)
    assert np.max(np.abs(f.operator() - direct)) <= 1e-10
    sigma = PureState(0, vector=random_unit_vector(dim, rng))
    assert abs(f(sigma) - f.via_operator(sigma)) <= 1e-10


def test_observable_from_operator(rng):
    a = random_hermitian(4, rng)
    f = Observable.from_operator(a)
    assert f.is_real
    assert np.max(np.abs(f.operator() - a.matrix)) < 1e-12
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    g = Observable.from_operator(m)
    assert not g.is_real
    assert np.max(np.abs(g.operator() - m)) < 1e-12


def test_decompose_sectors_examples():
    assert decompose_sectors(np.eye(4)) == [[0], [1], [2], [3]]
    block = np.ones((4, 4)) * 0.3
    np.fill_diagonal(block, 1)
    block[:2, 2:] = block[2:, :2] = 0
    assert decompose_sectors(block) == [[0, 1], [2, 3]]
    full = np.full((3, 3), 0.2)
    np.fill_diagonal(full, 1)
    assert decompose_sectors(full) == [[0, 1, 2]]


def test_decompose_sectors_rejects_bad_tables():
    with pytest.raises(NotATransitionProbability):
        decompose_sectors(np.array([[1, 0.2], [0.3, 1]]))
    with pytest.raises(NotATransitionProbability):
        decompose_sectors(np.array([[0.9, 0], [0, 1]]))


def test_decompose_ignores_rounding_edges():
    p = np.eye(2)
    p[0, 1] = p[1, 0] = 1e-13
    assert decompose_sectors(p) == [[0], [1]]


def test_state_space_validation():
    with pytest.raises(InvalidSpace):
        StateSpace.quantum(2, hbar=0.0)
    with pytest.raises(InvalidSpace):
        StateSpace.quantum(0)
    with pytest.raises(InvalidSpace):
        StateSpace(())


def test_bundle_round_trip():
    doc = {
        "sectors": [{"kind": "quantum", "dim": 2, "hbar": 2.0}, {"kind": "classical", "points": ["a", "b"]}],
        "states": [{"sector": 0, "vector": {"re": [1, 0], "im": [0, 1]}}, {"sector": 1, "label": "b"}],
    }
    space, states = load_bundle(doc)
    assert space.hbar(0) == 2.0
    assert states[1].label == "b"
    again, states2 = load_bundle(json.loads(json.dumps(dump_bundle(space, states))))
    assert again == space
    assert states2[0].same_as(states[0])
    with pytest.raises(SpaceMismatch):
        load_bundle({"sectors": doc["sectors"], "states": [{"sector": 1, "label": "zz"}]})


def test_observable_json_round_trip(rng):
    f = p_rho(basis_state(3, 1)) * 2.5 + p_rho(PureState(0, vector=random_unit_vector(3, rng)))
    g = Observable.from_json(json.loads(json.dumps(f.to_json())))
    assert g.distance(f) < 1e-15


def test_observable_operator_matches_projector_sum():
    f = Observable(((1.0, make_state([1, 0])), (1.0, make_state([1, 1]))))
    assert np.allclose(f.operator(), [[1.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_phase_twin_identity_holds_exactly(rng):
    v = random_unit_vector(4, rng)
    a, b = PureState(0, vector=v), PureState(0, vector=np.exp(0.4j) * v)
    assert transition_probability(a, b) == 1.0
