"""The lattice of orthoclosed subspaces of a quantum sector."""

from __future__ import annotations

import numpy as np

from .core import random_unit_vector
from .errors import AtomInside, NotComparable, SectorMismatch
from .states import PureState
from .transition import Subspace, orthoclosure

MEET_SV_TOL = 1e-8
LAW_TOL = 1e-9


def _same_sector(v: Subspace, w: Subspace):
    if v.sector != w.sector or v.dim != w.dim:
        raise SectorMismatch("lattice operations need elements of one sector")


def complement(v: Subspace) -> Subspace:
    return v.complement()


def join(v: Subspace, w: Subspace) -> Subspace:
    """Closed span of the union."""
    _same_sector(v, w)
    return Subspace.span(list(v.frame.T) + list(w.frame.T), v.dim, v.sector)


def meet(v: Subspace, w: Subspace) -> Subspace:
    """Intersection: null space of the stacked complement projectors."""
    _same_sector(v, w)
    n = v.dim
    stacked = np.vstack([np.eye(n) - v.projector, np.eye(n) - w.projector])
    _, s, vh = np.linalg.svd(stacked)
    null = vh[s < MEET_SV_TOL]
    return Subspace(v.sector, null.conj().T)


def atom(rho: PureState) -> Subspace:
    return orthoclosure(rho)


def contains(w: Subspace, v: Subspace, tol: float = LAW_TOL) -> bool:
    """Whether V is contained in W."""
    _same_sector(v, w)
    return float(np.max(np.abs((np.eye(v.dim) - w.projector) @ v.frame), initial=0.0)) <= tol


def check_orthomodular(v: Subspace, w: Subspace, tol: float = LAW_TOL) -> bool:
    """For V <= W, check W = V v (W ^ V-perp)."""
    if not contains(w, v, tol):
        raise NotComparable("orthomodular law is stated for nested pairs V <= W")
    rebuilt = join(v, meet(w, v.complement()))
    return rebuilt.rank == w.rank and rebuilt.distance(w) <= tol


def check_covering(a: PureState, v: Subspace, tol: float = LAW_TOL) -> bool:
    """For an atom a outside V, check that V v a covers V (rank grows by one)."""
    if a.sector != v.sector:
        raise SectorMismatch("atom and subspace must share a sector")
    if v.weight(a) >= 1.0 - tol:
        raise AtomInside("the atom already lies in V")
    j = join(v, atom(a))
    return j.rank == v.rank + 1 and contains(j, v, tol) and j.contains(a, tol)


def check_atomic(v: Subspace, rng: np.random.Generator, tol: float = LAW_TOL) -> bool:
    """Rebuild V as the join of rank(V) random atoms inside it."""
    acc = Subspace.zero(v.dim, v.sector)
    for _ in range(v.rank):
        acc = join(acc, atom(v.random_state(rng)))
    return acc.rank == v.rank and acc.distance(v) <= tol


def random_subspace(dim: int, rank: int, rng: np.random.Generator, sector: int = 0) -> Subspace:
    return Subspace.span([random_unit_vector(dim, rng) for _ in range(rank)], dim, sector)


def random_nested_pair(dim: int, rng: np.random.Generator, sector: int = 0) -> tuple[Subspace, Subspace]:
    """(V, W) with V <= W, ranks drawn uniformly."""
    rw = int(rng.integers(0, dim + 1))
    rv = int(rng.integers(0, rw + 1))
    w = random_subspace(dim, rw, rng, sector)
    if rv == 0:
        return Subspace.zero(dim, sector), w
    return Subspace.span([w.random_state(rng).vector for _ in range(rv)], dim, sector), w
