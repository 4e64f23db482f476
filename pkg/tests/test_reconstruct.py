import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissontp.core import max_norm, random_hermitian, seeded_rng
from poissontp.errors import ComplexCoefficients, InvalidSpace, MultiSector
from poissontp.poisson import BracketOracle, bracket_observable
from poissontp.reconstruct import (
    analyze_algebra,
    identify_algebra,
    jordan,
    random_observable,
    spectral_resolve,
    square,
    star_product,
)
from poissontp.states import Observable, PureState, StateSpace, basis_state, make_state, p_rho, transition_probability

from conftest import SZ


def zero_distance(f):
    return f.distance(Observable.zero(f.dims))


def test_spectral_examples():
    e1, e2 = basis_state(2, 0), basis_state(2, 1)
    r = spectral_resolve(p_rho(e1))
    assert np.allclose(r.eigenvalues, [1, 0], atol=1e-15)
    assert r.frame[0].same_as(e1) and r.frame[1].same_as(e2)

    ident = p_rho(e1) + p_rho(e2)
    r = spectral_resolve(ident)
    assert np.allclose(r.eigenvalues, [1, 1], atol=1e-15)
    assert max_norm(r.observable().operator(0) - np.eye(2)) <= 1e-9
    assert len(r.groups) == 1

    f = p_rho(e1) + p_rho(make_state([1, 1]))
    mat = f.operator(0)
    # 2x2 closed form: (tr +- sqrt(tr^2 - 4 det)) / 2
    tr, det = np.trace(mat).real, np.linalg.det(mat).real
    oracle = [(tr + np.sqrt(tr**2 - 4 * det)) / 2, (tr - np.sqrt(tr**2 - 4 * det)) / 2]
    assert np.allclose(mat, [[1.5, 0.5], [0.5, 0.5]], atol=1e-15)
    r = spectral_resolve(f)
    assert np.max(np.abs(r.eigenvalues - oracle)) <= 1e-12
    assert np.max(np.abs(r.eigenvalues - [1 + 1 / np.sqrt(2), 1 - 1 / np.sqrt(2)])) <= 1e-12
    assert r.orthogonality_defect() <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 6))
def test_spectral_invariants(seed, dim):
    rng = seeded_rng(seed)
    f = random_observable(dim, rng)
    r = spectral_resolve(f)
    assert r.orthogonality_defect() <= 1e-9
    assert max_norm(r.observable().operator(0) - f.operator(0)) <= 1e-9
    rho = PureState(0, vector=rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    assert abs(sum(transition_probability(rho, e) for e in r.frame) - 1) <= 1e-9
    for lam, proj in r.eigenprojectors():
        assert max_norm(f.operator(0) @ proj - lam * proj) <= 1e-8


def test_square_examples():
    rho = make_state([1, 2j, 0])
    assert p_rho(rho).distance(square(p_rho(rho))) <= 1e-12
    f = p_rho(basis_state(2, 0)) + p_rho(make_state([1, 1]))
    lam = spectral_resolve(square(f)).eigenvalues
    assert np.max(np.abs(lam - [2.9142135623730949, 0.0857864376269049])) <= 1e-12
    assert max_norm(square(f).operator(0) - f.operator(0) @ f.operator(0)) <= 1e-12
    z = Observable.zero({0: 3})
    assert zero_distance(square(z)) == 0.0


def test_jordan_examples():
    e1, e2 = basis_state(2, 0), basis_state(2, 1)
    assert zero_distance(jordan(p_rho(e1), p_rho(e2))) <= 1e-12
    a, b = e1.projector, make_state([1, 1]).projector
    oracle = (a @ b + b @ a) / 2
    assert np.allclose(oracle, [[0.5, 0.25], [0.25, 0]], atol=1e-15)
    assert max_norm(jordan(p_rho(e1), p_rho(make_state([1, 1]))).operator(0) - oracle) <= 1e-12
    f = random_observable(3, seeded_rng(1))
    assert jordan(f, f).distance(square(f)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 6))
def test_jordan_properties(seed, dim):
    rng = seeded_rng(seed)
    f, g, h = (random_observable(dim, rng) for _ in range(3))
    a, b = rng.standard_normal(2)
    assert jordan(f, g).distance(jordan(g, f)) <= 1e-9
    assert jordan(a * f + b * h, g).distance(a * jordan(f, g) + b * jordan(h, g)) <= 1e-9
    fa, ga = f.operator(0), g.operator(0)
    assert max_norm(jordan(f, g).operator(0) - (fa @ ga + ga @ fa) / 2) <= 1e-9
    ff = jordan(f, f)
    assert jordan(jordan(f, g), ff).distance(jordan(f, jordan(g, ff))) <= 1e-8


def test_star_examples():
    rho = make_state([1, 1j, 2])
    assert star_product(p_rho(rho), p_rho(rho)).distance(p_rho(rho)) <= 1e-12
    assert zero_distance(star_product(p_rho(basis_state(3, 0)), p_rho(basis_state(3, 2)))) <= 1e-12


@pytest.mark.parametrize("hbar", [1.0, 0.25, 3.0])
@pytest.mark.parametrize("dim", [2, 4, 6])
def test_star_oracle_and_associativity(dim, hbar):
    rng = seeded_rng(dim * 7)
    o = BracketOracle(hbar=hbar)
    for _ in range(5):
        f, g, h = (random_observable(dim, rng) for _ in range(3))
        fg = star_product(f, g, o)
        assert max_norm(fg.operator(0) - f.operator(0) @ g.operator(0)) <= 1e-9
        left = star_product(fg, h, o)
        right = star_product(f, star_product(g, h, o), o)
        assert left.distance(right) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 5))
def test_star_split(seed, dim):
    rng = seeded_rng(seed)
    f, g = random_observable(dim, rng), random_observable(dim, rng)
    fg, gf = star_product(f, g), star_product(g, f)
    assert (0.5 * (fg + gf)).distance(jordan(f, g)) <= 1e-9
    assert (fg - gf).distance(-1j * bracket_observable(f, g)) <= 1e-9


def test_star_uses_sector_hbar():
    space = StateSpace.quantum(2, 3, hbar=(1.0, 2.0))
    rng = seeded_rng(3)
    for k, n in ((0, 2), (1, 3)):
        f, g = random_observable(n, rng, k, space), random_observable(n, rng, k, space)
        assert max_norm(star_product(f, g).operator(k) - f.operator(k) @ g.operator(k)) <= 1e-9


def test_blockwise_products_and_cross_sector_zero():
    space = StateSpace.quantum(2, 3)
    rng = seeded_rng(4)
    f = random_observable(2, rng, 0, space) + random_observable(3, rng, 1, space)
    g = random_observable(2, rng, 0, space) + random_observable(3, rng, 1, space)
    fg = star_product(f, g)
    for k in (0, 1):
        assert max_norm(fg.operator(k) - f.operator(k) @ g.operator(k)) <= 1e-9
    cross = star_product(random_observable(2, rng, 0, space), random_observable(3, rng, 1, space))
    assert zero_distance(cross) <= 1e-12


def test_errors():
    f = p_rho(basis_state(2, 0))
    with pytest.raises(ComplexCoefficients):
        spectral_resolve(1j * f)
    with pytest.raises(ComplexCoefficients):
        square(1j * f)
    space = StateSpace.quantum(2, 2)
    two = p_rho(basis_state(2, 0, 0), space) + p_rho(basis_state(2, 0, 1), space)
    with pytest.raises(MultiSector):
        spectral_resolve(two)
    with pytest.raises(InvalidSpace):
        identify_algebra(StateSpace.classical("ab"), seeded_rng(0))


def test_identify_algebra_examples():
    rng = seeded_rng(0)
    st2 = analyze_algebra(StateSpace.quantum(2), rng)
    assert st2.blocks == [2] and st2.span_dims == [4]
    st23 = analyze_algebra(StateSpace.quantum(2, 3), rng)
    assert st23.blocks == [2, 3] and st23.span_dims == [4, 9]
    assert st23.cross_sector_residual <= 1e-12
    assert st23.membership_residual <= 1e-9
    assert identify_algebra(StateSpace.quantum(1), rng) == [1]
    assert identify_algebra(StateSpace.quantum(2, 3), rng) == [2, 3]


def test_dim1_algebra_is_constants():
    f = random_observable(1, seeded_rng(0))
    assert f.operator(0).shape == (1, 1)
    assert zero_distance(bracket_observable(f, f)) == 0.0
    assert star_product(f, f).distance(square(f)) <= 1e-12


def test_from_operator_round_trip(rng):
    a = random_hermitian(4, rng).matrix
    f = Observable.from_operator(a)
    assert max_norm(f.operator(0) - a) <= 1e-12
    assert max_norm(square(f).operator(0) - a @ a) <= 1e-9
    assert max_norm(star_product(f, observable_of_sz()).operator(0) - a @ np.kron(SZ, np.eye(2))) <= 1e-9


def observable_of_sz():
    return Observable.from_operator(np.kron(SZ, np.eye(2)))
