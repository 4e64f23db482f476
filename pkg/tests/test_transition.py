import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissontp.core import random_unit_vector, seeded_rng
from poissontp.errors import DegeneratePair, SectorMismatch
from poissontp.states import PureState, StateSpace, basis_state, make_state, transition_probability
from poissontp.transition import (
    Subspace,
    check_qm2,
    gram_schmidt,
    orthoclosure,
    orthoplement,
    set_orthoplement,
    superpositions,
)


def span_projector_oracle(vectors):
    """Projector onto the column space via SVD (independent of Gram-Schmidt)."""
    m = np.column_stack(vectors)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    u = u[:, s > 1e-10 * s[0]]
    return u @ u.conj().T


def test_orthoplement_examples():
    e = [basis_state(3, k) for k in range(3)]
    q = orthoplement([e[0]])
    assert q.rank == 2
    assert np.allclose(q.projector, np.diag([0, 1, 1]), atol=1e-14)
    assert orthoplement(e).rank == 0
    r = orthoplement([e[0], make_state([1, 1, 0])])
    assert r.rank == 1
    assert np.allclose(r.projector, np.diag([0, 0, 1]), atol=1e-14)


def test_orthoplement_characterizes_zero_probability(rng):
    q = [PureState(0, vector=random_unit_vector(4, rng)) for _ in range(2)]
    perp = orthoplement(q)
    inside = perp.random_state(rng)
    assert all(transition_probability(r, inside) < 1e-15 for r in q)
    assert abs(perp.weight(inside) - 1) < 1e-9
    outside = PureState(0, vector=random_unit_vector(4, rng))
    assert perp.weight(outside) < 1 - 1e-3


def test_orthoclosure_examples():
    rho = make_state([1, 0, 0])
    c = orthoclosure(rho)
    assert c.rank == 1 and np.allclose(c.projector, rho.projector, atol=1e-15)
    c2 = orthoclosure([rho, make_state([1, 1, 0])])
    assert c2.rank == 2
    assert np.allclose(c2.projector, np.diag([1, 1, 0]), atol=1e-14)
    assert orthoclosure([make_state([1, 0]), make_state([0, 1])]).rank == 2


def test_orthoclosure_matches_svd_oracle(rng):
    for dim, k in [(3, 2), (5, 3), (6, 6), (6, 8)]:
        vecs = [random_unit_vector(dim, rng) for _ in range(k)]
        sub = orthoclosure([PureState(0, vector=v) for v in vecs])
        assert np.max(np.abs(sub.projector - span_projector_oracle(vecs))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 7), k=st.integers(1, 5))
def test_closure_laws(seed, dim, k):
    rng = seeded_rng(seed)
    q = [PureState(0, vector=random_unit_vector(dim, rng)) for _ in range(k)]
    perp = orthoplement(q)
    closure = orthoclosure(q)
    for r in q:
        assert abs(closure.weight(r) - 1) <= 1e-9
    assert orthoplement(closure).distance(perp) <= 1e-9
    assert orthoplement(perp).distance(closure) <= 1e-9
    assert perp.rank + closure.rank == dim
    assert orthoclosure(closure) is closure


def test_double_complement_is_exact(rng):
    v = Subspace.span([random_unit_vector(5, rng) for _ in range(2)], 5)
    assert v.complement().complement() is v
    assert np.array_equal(v.complement().complement().projector, v.projector)


def test_sector_mismatch():
    with pytest.raises(SectorMismatch):
        orthoplement([PureState(0, vector=[1, 0]), PureState(1, vector=[1, 0])])
    with pytest.raises(SectorMismatch):
        orthoplement([PureState(0, vector=[1, 0])], sector=1)


def test_gram_schmidt_drops_dependent_vectors():
    f = gram_schmidt([np.array([1, 0, 0]), np.array([2, 0, 0]), np.array([1, 1e-12, 0])], 3)
    assert f.shape == (3, 1)


def test_superpositions():
    a, b = make_state([1, 0, 0]), make_state([1, 1, 0])
    sub = superpositions(a, b)
    assert isinstance(sub, Subspace) and sub.rank == 2
    c = PureState(1, vector=[1, 0])
    assert superpositions(a, c) == (a, c)
    with pytest.raises(DegeneratePair):
        superpositions(a, make_state([2, 0, 0]))


def test_classical_pair_closure_is_pair():
    space = StateSpace.classical("abcd")
    pts = space.points()
    pair = [pts[0], pts[2]]
    closure = set_orthoplement(pts, set_orthoplement(pts, pair))
    assert closure == pair


def brute_force_qm2(rho, sigma, rng, trials):
    """Independent route: pick an orthonormal 2-frame by QR and compare
    Born probabilities of subspace states against their C^2 coordinates."""
    q, _ = np.linalg.qr(np.column_stack([rho.vector, sigma.vector]))
    worst = 0.0
    for _ in range(trials):
        z, w = random_unit_vector(2, rng), random_unit_vector(2, rng)
        x, y = q @ z, q @ w
        worst = max(worst, abs(abs(np.vdot(x, y)) ** 2 - abs(np.vdot(z, w)) ** 2))
    return worst


@pytest.mark.parametrize("dim", [2, 3, 8, 16])
def test_qm2_random_pairs(dim):
    rng = seeded_rng(dim)
    rho, sigma = PureState(0, vector=random_unit_vector(dim, rng)), PureState(0, vector=random_unit_vector(dim, rng))
    rep = check_qm2(rho, sigma, rng, 200)
    assert rep.max_deviation <= 1e-9
    assert brute_force_qm2(rho, sigma, rng, 200) <= 1e-9
    assert rep.to_json()["pass"] is True


def test_qm2_orthogonal_pair():
    rep = check_qm2(basis_state(4, 0), basis_state(4, 3), seeded_rng(0), 50)
    assert rep.max_deviation <= 1e-10
    assert np.allclose(np.abs(rep.frame[[0, 3]]), np.eye(2))


def test_qm2_errors():
    with pytest.raises(SectorMismatch):
        check_qm2(PureState(0, vector=[1, 0]), PureState(1, vector=[1, 0]), seeded_rng(0))
    with pytest.raises(DegeneratePair):
        check_qm2(make_state([1, 1]), make_state([2, 2]), seeded_rng(0))
