"""Orthogonality structure of a transition-probability space.

Within a quantum sector the orthoplement of a set of states is the set of
states orthogonal to all of them; it is represented by the projector onto
the orthogonal complement of their span.  Across sectors (and for classical
point sets) orthoplements are computed set-theoretically by
:func:`set_orthoplement`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .core import max_norm, random_unit_vector
from .errors import DegeneratePair, SectorMismatch, ClassicalStateNotSupported
from .states import PureState, transition_probability

RANK_TOL = 1e-10
IDEMPOTENT_TOL = 1e-9


def gram_schmidt(vectors: Iterable[np.ndarray], dim: int, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal frame (as columns) for the span of ``vectors``.

    Classical Gram-Schmidt with one re-orthogonalization pass; a vector whose
    residual norm (relative to its own norm) drops below ``tol`` is treated as
    dependent and skipped.
    """
    basis: list[np.ndarray] = []
    for v in vectors:
        v = np.asarray(v, dtype=complex).reshape(-1)
        n0 = np.linalg.norm(v)
        if n0 == 0:
            continue
        w = v / n0
        for _ in range(2):
            for b in basis:
                w = w - np.vdot(b, w) * b
        r = np.linalg.norm(w)
        if r < tol:
            continue
        basis.append(w / r)
        if len(basis) == dim:
            break
    if not basis:
        return np.zeros((dim, 0), dtype=complex)
    return np.column_stack(basis)


def complement_frame(frame: np.ndarray) -> np.ndarray:
    """Orthonormal frame for the orthogonal complement of an orthonormal frame."""
    n, k = frame.shape
    if k == 0:
        return np.eye(n, dtype=complex)
    if k == n:
        return np.zeros((n, 0), dtype=complex)
    _, _, vh = np.linalg.svd(frame.conj().T, full_matrices=True)
    return vh[k:].conj().T


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthoclosed subset of a quantum sector, held as a frame and a projector."""

    sector: int
    frame: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=complex)
        if f.ndim != 2:
            raise ValueError("frame must be a 2-d array of column vectors")
        f.flags.writeable = False
        object.__setattr__(self, "frame", f)

    @classmethod
    def from_projector(cls, projector, sector: int = 0) -> "Subspace":
        p = np.asarray(projector, dtype=complex)
        if max_norm(p @ p - p) > IDEMPOTENT_TOL:
            raise ValueError("projector is not idempotent")
        w, v = np.linalg.eigh(0.5 * (p + p.conj().T))
        sub = cls(sector, v[:, w > 0.5])
        sub.__dict__["projector"] = p
        return sub

    @classmethod
    def span(cls, vectors: Iterable[np.ndarray], dim: int, sector: int = 0) -> "Subspace":
        return cls(sector, gram_schmidt(vectors, dim))

    @classmethod
    def full(cls, dim: int, sector: int = 0) -> "Subspace":
        return cls(sector, np.eye(dim, dtype=complex))

    @classmethod
    def zero(cls, dim: int, sector: int = 0) -> "Subspace":
        return cls(sector, np.zeros((dim, 0), dtype=complex))

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @property
    def rank(self) -> int:
        return self.frame.shape[1]

    @cached_property
    def projector(self) -> np.ndarray:
        f = self.frame
        p = f @ f.conj().T
        p.flags.writeable = False
        return p

    def complement(self) -> "Subspace":
        """I - P.  Complementing twice returns the original object."""
        cached = self.__dict__.get("_complement")
        if cached is not None:
            return cached
        out = Subspace(self.sector, complement_frame(self.frame))
        out.__dict__["projector"] = np.eye(self.dim) - self.projector
        out.__dict__["_complement"] = self
        self.__dict__["_complement"] = out
        return out

    def contains(self, rho: PureState, tol: float = IDEMPOTENT_TOL) -> bool:
        return rho.sector == self.sector and self.weight(rho) >= 1.0 - tol

    def weight(self, rho: PureState) -> float:
        """Tr(rho P): probability that rho lies in this subspace."""
        c = self.frame.conj().T @ rho.vector
        return float(np.real(np.vdot(c, c)))

    def distance(self, other: "Subspace") -> float:
        return max_norm(self.projector - other.projector)

    def random_state(self, rng: np.random.Generator) -> PureState:
        """Uniform sample from the projective space of this subspace."""
        if self.rank == 0:
            raise ValueError("the zero subspace contains no states")
        z = random_unit_vector(self.rank, rng)
        return PureState(self.sector, vector=self.frame @ z)

    def __repr__(self):
        return f"Subspace(sector={self.sector}, dim={self.dim}, rank={self.rank})"


Generators = Union[Subspace, PureState, Sequence[Union[PureState, Subspace]]]


def _collect(q: Generators, sector: int | None) -> tuple[int, int, list[np.ndarray]]:
    items = [q] if isinstance(q, (Subspace, PureState)) else list(q)
    vecs: list[np.ndarray] = []
    dim = None
    for it in items:
        if isinstance(it, PureState) and not it.is_quantum:
            raise ClassicalStateNotSupported("use set_orthoplement for classical points")
        s = it.sector
        if sector is None:
            sector = s
        elif s != sector:
            raise SectorMismatch(f"element of sector {s} given for sector {sector}")
        d = it.dim
        if dim is None:
            dim = d
        elif d != dim:
            raise SectorMismatch("elements have different Hilbert dimensions")
        if isinstance(it, Subspace):
            vecs.extend(it.frame.T)
        else:
            vecs.append(it.vector)
    if dim is None:
        raise ValueError("cannot infer the sector dimension from an empty set")
    return sector, dim, vecs


def orthoclosure(q: Generators, sector: int | None = None) -> Subspace:
    """Q-perp-perp: the closed span of Q."""
    if isinstance(q, Subspace):
        if sector is not None and q.sector != sector:
            raise SectorMismatch(f"subspace of sector {q.sector} given for sector {sector}")
        return q
    sector, dim, vecs = _collect(q, sector)
    return Subspace.span(vecs, dim, sector)


def orthoplement(q: Generators, sector: int | None = None) -> Subspace:
    """Q-perp: states with zero transition probability to every member of Q."""
    return orthoclosure(q, sector).complement()


def superpositions(rho: PureState, sigma: PureState):
    """Possible superpositions of two distinct states.

    Same sector: the rank-2 subspace they span.  Different sectors: the pair
    itself, as a tuple.
    """
    if rho.same_as(sigma):
        raise DegeneratePair("superpositions need two distinct states")
    if rho.sector != sigma.sector or not rho.is_quantum:
        return (rho, sigma)
    return orthoclosure([rho, sigma])


def set_orthoplement(universe: Sequence[PureState], q: Sequence[PureState]) -> list[PureState]:
    """Orthoplement of ``q`` inside a finite set of states."""
    return [s for s in universe if all(transition_probability(r, s) == 0.0 for r in q)]


@dataclass
class QM2Report:
    max_deviation: float
    trials: int
    frame: np.ndarray

    def to_json(self, tol: float = 1e-9) -> dict:
        return {
            "check": "QM2",
            "pairs": self.trials,
            "max_deviation": self.max_deviation,
            "pass": bool(self.max_deviation <= tol),
        }


def check_qm2(rho: PureState, sigma: PureState, rng: np.random.Generator, trials: int = 200) -> QM2Report:
    """Compare the span of two states against P(C^2).

    The frame ``(b1, b2)`` identifies a state with coordinates ``(z1, z2)``
    with the ray of ``(z1, z2)`` in C^2.  The deviation is the largest
    difference in transition probability over random pairs, together with
    the membership defect of the sampled states and of rho, sigma themselves.
    """
    if not (rho.is_quantum and sigma.is_quantum) or rho.sector != sigma.sector:
        raise SectorMismatch("QM2 applies to two states of the same quantum sector")
    if rho.same_as(sigma):
        raise DegeneratePair("QM2 needs two distinct states")
    sub = orthoclosure([rho, sigma])
    if sub.rank != 2:
        raise DegeneratePair("states span less than two dimensions")
    frame = sub.frame
    sec = rho.sector

    def coords(state: PureState) -> PureState:
        return PureState(0, vector=frame.conj().T @ state.vector)

    worst = abs(transition_probability(rho, sigma) - transition_probability(coords(rho), coords(sigma)))
    worst = max(worst, 1.0 - sub.weight(rho), 1.0 - sub.weight(sigma))
    for _ in range(trials):
        z = random_unit_vector(2, rng)
        w = random_unit_vector(2, rng)
        x = PureState(sec, vector=frame @ z)
        y = PureState(sec, vector=frame @ w)
        dev = abs(
            transition_probability(x, y)
            - transition_probability(PureState(0, vector=z), PureState(0, vector=w))
        )
        worst = max(worst, dev, abs(1.0 - sub.weight(x)))
    return QM2Report(float(worst), int(trials), frame)
