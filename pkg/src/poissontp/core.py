"""Numerical substrate: Hermitian operators, eigendecomposition, unitary
exponentials, seeded random sampling and the JSON matrix format."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, NotHermitian

# Global default tolerance for algebraic identities.
DEFAULT_TOL = 1e-9
HERMITICITY_TOL = 1e-12
DEGENERACY_GAP = 1e-8


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A dim x dim self-adjoint complex matrix.

    The input is checked against its adjoint (max-norm, scaled by the entry
    magnitude) and then symmetrized, so ``matrix`` is exactly Hermitian.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"operator must be square, got {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if m.size and np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL * scale:
            raise NotHermitian("matrix is not self-adjoint")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        other = other.matrix if isinstance(other, HermitianOperator) else other
        return self.matrix @ other

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def _mat(a) -> np.ndarray:
    return a.matrix if isinstance(a, HermitianOperator) else as_matrix(a)


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian operator.

    Returns:
        ``(eigenvalues, frame)`` with eigenvalues in descending order and the
        eigenvectors as the orthonormal columns of ``frame``.
    """
    m = _mat(a)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
        raise ConvergenceFailure("eigensolver returned non-finite values")
    return w[::-1].copy(), v[:, ::-1].copy()


def degeneracy_groups(eigenvalues, gap: float = DEGENERACY_GAP) -> list[list[int]]:
    """Partition sorted eigenvalue indices into runs separated by more than ``gap``."""
    groups: list[list[int]] = []
    for i, lam in enumerate(eigenvalues):
        if groups and abs(eigenvalues[groups[-1][-1]] - lam) < gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def expm_skew(a, s: float) -> np.ndarray:
    """Return the unitary exp(i s A) for Hermitian A."""
    if not np.isfinite(s):
        raise ValueError("s must be finite")
    w, v = eig_hermitian(a)
    return (v * np.exp(1j * s * w)) @ v.conj().T


def commutator(a, b) -> np.ndarray:
    a, b = _mat(a), _mat(b)
    return a @ b - b @ a


def max_norm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def seeded_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator determined entirely by ``(seed, stream...)``.

    Distinct stream tuples give statistically independent generators, so each
    trial of a parallel check can own its own draw sequence.
    """
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(s) for s in stream))
    return np.random.default_rng(ss)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    # unit-variance complex normal: E|z|^2 = 1
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    """GUE-style sample (G + G^dagger)/2."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    g = _complex_gaussian(rng, (dim, dim))
    return HermitianOperator(0.5 * (g + g.conj().T))


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in C^dim."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    while True:
        z = _complex_gaussian(rng, dim)
        n = np.linalg.norm(z)
        if n > 0:
            return z / n


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = _complex_gaussian(rng, (dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# JSON matrix format: {"rows": n, "cols": m, "re": [[...]], "im": [[...]]}

def matrix_to_json(a) -> dict:
    m = _mat(a)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros((rows, cols))), dtype=float)
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise DimensionMismatch(
            f"matrix payload shape {re.shape}/{im.shape} does not match {rows}x{cols}"
        )
    return as_matrix(re + 1j * im)


def vector_to_json(v: Sequence[complex]) -> dict:
    v = np.asarray(v, dtype=complex)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def vector_from_json(obj) -> np.ndarray:
    """Accept ``{"re": [...], "im": [...]}`` or a plain list of reals."""
    if isinstance(obj, dict):
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape or re.ndim != 1:
            raise DimensionMismatch("vector re/im parts must be equal-length 1-d arrays")
        return re + 1j * im
    v = np.asarray(obj, dtype=complex)
    if v.ndim != 1:
        raise DimensionMismatch("vector must be 1-d")
    return v
