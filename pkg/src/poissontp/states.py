"""Pure-state spaces, expectation functions and transition probabilities.

Quantum pure states are stored as rank-1 projectors (with a phase-fixed
unit vector alongside), so that two vectors differing by a phase give the
same point of projective space by construction.  Classical points are plain
labels; their transition probability is the Kronecker delta.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .core import (
    HermitianOperator,
    eig_hermitian,
    max_norm,
    vector_from_json,
    vector_to_json,
)
from .errors import (
    ClassicalStateNotSupported,
    ComplexCoefficients,
    DimensionMismatch,
    InvalidSpace,
    MultiSector,
    NotATransitionProbability,
    SpaceMismatch,
    ZeroVector,
)

STATE_EQ_TOL = 1e-9
SECTOR_EDGE_EPS = 1e-12


@dataclass(frozen=True)
class QuantumSector:
    dim: int
    hbar: float = 1.0

    def __post_init__(self):
        if int(self.dim) < 1:
            raise InvalidSpace("quantum sector dimension must be >= 1")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise InvalidSpace("hbar must be a positive finite number")

    kind = "quantum"


@dataclass(frozen=True)
class ClassicalDiscrete:
    points: tuple[str, ...]

    def __post_init__(self):
        pts = tuple(str(p) for p in self.points)
        if not pts:
            raise InvalidSpace("classical sector needs at least one point")
        if len(set(pts)) != len(pts):
            raise InvalidSpace("classical point labels must be unique")
        object.__setattr__(self, "points", pts)

    kind = "classical"


Sector = Union[QuantumSector, ClassicalDiscrete]


@dataclass(frozen=True, eq=False)
class PureState:
    """A point of a pure-state space.

    Exactly one of ``vector`` (quantum; unit norm, phase fixed so that the
    largest component is real and positive) or ``label`` (classical) is set.
    """

    sector: int
    vector: np.ndarray | None = None
    label: str | None = None

    def __post_init__(self):
        if (self.vector is None) == (self.label is None):
            raise ValueError("a state is either quantum (vector) or classical (label)")
        if self.vector is not None:
            v = _normalize(self.vector)
            v.flags.writeable = False
            object.__setattr__(self, "vector", v)

    @property
    def is_quantum(self) -> bool:
        return self.vector is not None

    @property
    def dim(self) -> int:
        if self.vector is None:
            raise ClassicalStateNotSupported("classical points have no Hilbert dimension")
        return self.vector.shape[0]

    @cached_property
    def projector(self) -> np.ndarray:
        if self.vector is None:
            raise ClassicalStateNotSupported("classical points have no projector")
        p = np.outer(self.vector, self.vector.conj())
        p = 0.5 * (p + p.conj().T)
        p.flags.writeable = False
        return p

    def same_as(self, other: "PureState", tol: float = STATE_EQ_TOL) -> bool:
        if self.sector != other.sector or self.is_quantum != other.is_quantum:
            return False
        if not self.is_quantum:
            return self.label == other.label
        if self.dim != other.dim:
            return False
        return projector_distance(self, other) <= tol

    def to_json(self) -> dict:
        if self.is_quantum:
            return {"sector": self.sector, "vector": vector_to_json(self.vector)}
        return {"sector": self.sector, "label": self.label}

    def __repr__(self):
        if self.is_quantum:
            return f"PureState(sector={self.sector}, vector={np.round(self.vector, 6).tolist()})"
        return f"PureState(sector={self.sector}, label={self.label!r})"


def _normalize(vector) -> np.ndarray:
    v = np.asarray(vector, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError("state vector has non-finite entries")
    n = np.linalg.norm(v)
    if n == 0:
        raise ZeroVector("cannot build a state from the zero vector")
    v = v / n
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


@dataclass(frozen=True)
class StateSpace:
    """Ordered union of sectors; sector ids are list positions."""

    sectors: tuple[Sector, ...]

    def __post_init__(self):
        secs = tuple(self.sectors)
        if not secs:
            raise InvalidSpace("a state space needs at least one sector")
        for s in secs:
            if not isinstance(s, (QuantumSector, ClassicalDiscrete)):
                raise InvalidSpace(f"unknown sector type {type(s).__name__}")
        object.__setattr__(self, "sectors", secs)

    @classmethod
    def quantum(cls, *dims: int, hbar: float | Sequence[float] = 1.0) -> "StateSpace":
        hbars = [hbar] * len(dims) if np.isscalar(hbar) else list(hbar)
        if len(hbars) != len(dims):
            raise InvalidSpace("one hbar per sector required")
        return cls(tuple(QuantumSector(int(d), float(h)) for d, h in zip(dims, hbars)))

    @classmethod
    def classical(cls, points: Iterable[str]) -> "StateSpace":
        """Each point forms its own sector."""
        return cls(tuple(ClassicalDiscrete((str(p),)) for p in points))

    def sector(self, i: int) -> Sector:
        if not 0 <= i < len(self.sectors):
            raise SpaceMismatch(f"no sector {i} in a space with {len(self.sectors)} sectors")
        return self.sectors[i]

    @property
    def is_quantum(self) -> bool:
        return all(isinstance(s, QuantumSector) for s in self.sectors)

    @property
    def is_classical(self) -> bool:
        return all(isinstance(s, ClassicalDiscrete) for s in self.sectors)

    def dims(self) -> dict[int, int]:
        return {i: s.dim for i, s in enumerate(self.sectors) if isinstance(s, QuantumSector)}

    def hbar(self, i: int) -> float:
        s = self.sector(i)
        if not isinstance(s, QuantumSector):
            raise ClassicalStateNotSupported(f"sector {i} is classical")
        return s.hbar

    def state(self, sector: int, vector) -> PureState:
        return make_state(vector, sector=sector, space=self)

    def point(self, sector: int, label: str) -> PureState:
        s = self.sector(sector)
        if not isinstance(s, ClassicalDiscrete):
            raise SpaceMismatch(f"sector {sector} is not classical")
        if str(label) not in s.points:
            raise SpaceMismatch(f"unknown point {label!r} in sector {sector}")
        return PureState(sector, label=str(label))

    def points(self) -> list[PureState]:
        """All classical points, in sector order."""
        out = []
        for i, s in enumerate(self.sectors):
            if isinstance(s, ClassicalDiscrete):
                out.extend(PureState(i, label=p) for p in s.points)
        return out

    def to_json(self) -> dict:
        out = []
        for s in self.sectors:
            if isinstance(s, QuantumSector):
                out.append({"kind": "quantum", "dim": s.dim, "hbar": s.hbar})
            else:
                out.append({"kind": "classical", "points": list(s.points)})
        return {"sectors": out}

    @classmethod
    def from_json(cls, obj: Mapping) -> "StateSpace":
        try:
            raw = obj["sectors"]
            secs = []
            for s in raw:
                kind = s.get("kind", "quantum")
                if kind == "quantum":
                    secs.append(QuantumSector(int(s["dim"]), float(s.get("hbar", 1.0))))
                elif kind == "classical":
                    secs.append(ClassicalDiscrete(tuple(s["points"])))
                else:
                    raise InvalidSpace(f"unknown sector kind {kind!r}")
        except (KeyError, TypeError) as exc:
            raise InvalidSpace(f"malformed state space: {exc}") from exc
        return cls(tuple(secs))


def make_state(vector, sector: int = 0, space: StateSpace | None = None) -> PureState:
    """Ray through ``vector`` in the given quantum sector."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    if space is not None:
        s = space.sector(sector)
        if not isinstance(s, QuantumSector):
            raise SpaceMismatch(f"sector {sector} is classical")
        if v.shape[0] != s.dim:
            raise DimensionMismatch(f"vector length {v.shape[0]} != sector dim {s.dim}")
    return PureState(int(sector), vector=v)


def basis_state(dim: int, k: int, sector: int = 0) -> PureState:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return PureState(sector, vector=v)


def state_from_json(obj: Mapping, space: StateSpace | None = None) -> PureState:
    sector = int(obj.get("sector", 0))
    if "vector" in obj:
        return make_state(vector_from_json(obj["vector"]), sector=sector, space=space)
    if "label" in obj:
        if space is not None:
            return space.point(sector, obj["label"])
        return PureState(sector, label=str(obj["label"]))
    raise ValueError("state needs a 'vector' or a 'label'")


def load_bundle(obj: Mapping) -> tuple[StateSpace, list[PureState]]:
    """Parse a state bundle ``{"sectors": [...], "states": [...]}``."""
    space = StateSpace.from_json(obj)
    states = [state_from_json(s, space) for s in obj.get("states", [])]
    return space, states


def dump_bundle(space: StateSpace, states: Sequence[PureState] = ()) -> dict:
    out = space.to_json()
    out["states"] = [s.to_json() for s in states]
    return out


def projector_distance(rho: PureState, sigma: PureState) -> float:
    """Max-norm distance between the projectors of two quantum states."""
    return max_norm(rho.projector - sigma.projector)


def _overlap_sq(r: np.ndarray, s: np.ndarray) -> float:
    # |<r|s>|^2 spelled out so that swapping r and s is bitwise symmetric
    re = np.sum(r.real * s.real + r.imag * s.imag)
    im = np.sum(r.real * s.imag - r.imag * s.real)
    return float(re * re + im * im)


def transition_probability(rho: PureState, sigma: PureState) -> float:
    """Born rule within a quantum sector, Kronecker delta within a classical
    one, and zero across sectors.  Returns exactly 1.0 iff the two states
    coincide (projector distance <= 1e-9)."""
    if rho.sector != sigma.sector:
        return 0.0
    if rho.is_quantum != sigma.is_quantum:
        raise SpaceMismatch("quantum and classical states share a sector id")
    if not rho.is_quantum:
        return 1.0 if rho.label == sigma.label else 0.0
    if rho.dim != sigma.dim:
        raise SpaceMismatch(f"sector {rho.sector} seen with dims {rho.dim} and {sigma.dim}")
    p = _overlap_sq(rho.vector, sigma.vector)
    if p > 1.0 - 1e-6:
        if projector_distance(rho, sigma) <= STATE_EQ_TOL:
            return 1.0
        return min(p, float(np.nextafter(1.0, 0.0)))
    return max(p, 0.0)


def expectation(a, rho: PureState) -> float:
    """f_A(rho) = <psi|A|psi> for a unit representative psi."""
    if not rho.is_quantum:
        raise ClassicalStateNotSupported("expectation values need a quantum state")
    m = a.matrix if isinstance(a, HermitianOperator) else np.asarray(a, dtype=complex)
    if m.shape != (rho.dim, rho.dim):
        raise DimensionMismatch(f"operator shape {m.shape} vs state dim {rho.dim}")
    return float(np.real(np.vdot(rho.vector, m @ rho.vector)))


def decompose_sectors(p_matrix) -> list[list[int]]:
    """Connected components of the graph with an edge wherever p(i, j) > 0."""
    p = np.asarray(p_matrix, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise NotATransitionProbability("transition table must be square")
    if np.any(np.abs(np.diag(p) - 1.0) > 1e-12):
        raise NotATransitionProbability("diagonal entries must equal 1")
    if np.any(np.abs(p - p.T) > 1e-12):
        raise NotATransitionProbability("transition table must be symmetric")
    if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
        raise NotATransitionProbability("entries must lie in [0, 1]")
    n = p.shape[0]
    adj = p > SECTOR_EDGE_EPS
    seen = np.zeros(n, dtype=bool)
    parts = []
    for start in range(n):
        if seen[start]:
            continue
        comp, queue = [], deque([start])
        seen[start] = True
        while queue:
            i = queue.popleft()
            comp.append(i)
            for j in np.flatnonzero(adj[i] & ~seen):
                seen[j] = True
                queue.append(int(j))
        parts.append(sorted(comp))
    return parts


def transition_table(states: Sequence[PureState]) -> np.ndarray:
    n = len(states)
    out = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = transition_probability(states[i], states[j])
    return out


# --------------------------------------------------------------------------
# Observables: finite combinations of the functions p_rho


Term = tuple[complex, PureState]


@dataclass(frozen=True, eq=False)
class Observable:
    """Finite combination sum_i mu_i p_{rho_i} of transition-probability
    functions, with its operator form sum_i mu_i [rho_i] per sector.

    ``dims`` records the Hilbert dimension of every sector the observable
    lives on, so that zero observables still know their shape.  ``space``
    is optional and only consulted for per-sector hbar.
    """

    terms: tuple[Term, ...]
    dims: Mapping[int, int] = field(default_factory=dict)
    space: StateSpace | None = None

    def __post_init__(self):
        terms = tuple((complex(c), s) for c, s in self.terms)
        dims = dict(self.dims)
        for _, s in terms:
            if not s.is_quantum:
                raise ClassicalStateNotSupported("observables are built from quantum states")
            if dims.setdefault(s.sector, s.dim) != s.dim:
                raise SpaceMismatch(f"sector {s.sector} seen with two dimensions")
        if self.space is not None:
            for k, d in dims.items():
                if self.space.dims().get(k) != d:
                    raise SpaceMismatch(f"sector {k} dim {d} not in the attached space")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "dims", dict(sorted(dims.items())))
        object.__setattr__(self, "_ops", {})

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, dims: Mapping[int, int], space: StateSpace | None = None) -> "Observable":
        return cls((), dims, space)

    @classmethod
    def from_operator(cls, matrix, sector: int = 0, space: StateSpace | None = None) -> "Observable":
        """Spectral terms of an operator: sum_j lambda_j p_{e_j}.

        A non-Hermitian matrix is split as H1 + i H2 and both parts resolved,
        which gives complex coefficients.
        """
        m = matrix.matrix if isinstance(matrix, HermitianOperator) else np.asarray(matrix, dtype=complex)
        dim = m.shape[0]
        h1 = 0.5 * (m + m.conj().T)
        h2 = -0.5j * (m - m.conj().T)
        terms: list[Term] = []
        for scale, h in ((1.0, h1), (1j, h2)):
            if scale == 1j and max_norm(h) == 0.0:
                continue
            w, v = eig_hermitian(h)
            terms.extend((scale * lam, PureState(sector, vector=v[:, j])) for j, lam in enumerate(w))
        return cls(tuple(terms), {sector: dim}, space)

    def _with_terms(self, terms, other: "Observable | None" = None) -> "Observable":
        dims = dict(self.dims)
        space = self.space
        if other is not None:
            for k, d in other.dims.items():
                if dims.setdefault(k, d) != d:
                    raise SpaceMismatch(f"sector {k} has different dims in the two operands")
            space = space or other.space
        return Observable(tuple(terms), dims, space)

    # structure ------------------------------------------------------------

    @property
    def sectors(self) -> list[int]:
        return list(self.dims)

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0.0 for c, _ in self.terms)

    def single_sector(self) -> int:
        if len(self.dims) != 1:
            raise MultiSector(f"observable spans sectors {self.sectors}; resolve per sector")
        return next(iter(self.dims))

    def operator(self, sector: int | None = None) -> np.ndarray:
        """Operator form sum_i mu_i [rho_i] restricted to one sector."""
        if sector is None:
            sector = self.single_sector()
        if sector not in self._ops:
            dim = self.dims.get(sector)
            if dim is None:
                raise SpaceMismatch(f"observable does not live on sector {sector}")
            sel = [(c, s.vector) for c, s in self.terms if s.sector == sector]
            if sel:
                coef = np.array([c for c, _ in sel])
                vecs = np.array([v for _, v in sel])
                op = (vecs.T * coef) @ vecs.conj()
            else:
                op = np.zeros((dim, dim), dtype=complex)
            op.flags.writeable = False
            self._ops[sector] = op
        return self._ops[sector]

    def hermitian(self, sector: int | None = None) -> HermitianOperator:
        if not self.is_real:
            raise ComplexCoefficients("operator form is Hermitian only for real coefficients")
        return HermitianOperator(self.operator(sector))

    def restrict(self, sector: int) -> "Observable":
        return Observable(
            tuple((c, s) for c, s in self.terms if s.sector == sector),
            {sector: self.dims[sector]},
            self.space,
        )

    def real_part(self) -> "Observable":
        return self._with_terms([(c.real, s) for c, s in self.terms if c.real != 0.0])

    def imag_part(self) -> "Observable":
        return self._with_terms([(c.imag, s) for c, s in self.terms if c.imag != 0.0])

    # evaluation -----------------------------------------------------------

    def __call__(self, sigma: PureState) -> complex | float:
        """Term form: sum_i mu_i p(rho_i, sigma)."""
        val = sum((c * transition_probability(s, sigma) for c, s in self.terms), 0j)
        return val.real if self.is_real else val

    def via_operator(self, sigma: PureState) -> complex | float:
        """Operator form: Tr(sigma A)."""
        if sigma.sector not in self.dims:
            return 0.0
        v = sigma.vector
        val = complex(np.vdot(v, self.operator(sigma.sector) @ v))
        return val.real if self.is_real else val

    # linear structure -----------------------------------------------------

    def __add__(self, other: "Observable") -> "Observable":
        return self._with_terms(self.terms + other.terms, other)

    def __neg__(self) -> "Observable":
        return self._with_terms([(-c, s) for c, s in self.terms])

    def __sub__(self, other: "Observable") -> "Observable":
        return self + (-other)

    def __mul__(self, k) -> "Observable":
        k = complex(k)
        if k == 0:
            return self._with_terms([])
        return self._with_terms([(k * c, s) for c, s in self.terms])

    __rmul__ = __mul__

    def distance(self, other: "Observable") -> float:
        """Max-norm distance between operator forms over all sectors."""
        secs = set(self.dims) | set(other.dims)
        out = 0.0
        for k in secs:
            a = self.operator(k) if k in self.dims else 0.0
            b = other.operator(k) if k in other.dims else 0.0
            out = max(out, max_norm(np.asarray(a - b)))
        return out

    def __repr__(self):
        return f"Observable(sectors={self.sectors}, terms={len(self.terms)})"

    def to_json(self, with_operator: bool = True) -> dict:
        from .core import matrix_to_json

        out: dict = {
            "sectors": self.sectors,
            "terms": [
                {"re": c.real, "im": c.imag, "state": s.to_json()} for c, s in self.terms
            ],
        }
        if len(self.dims) == 1:
            out["sector"] = self.sectors[0]
        if with_operator:
            out["operator"] = {str(k): matrix_to_json(self.operator(k)) for k in self.dims}
        return out

    @classmethod
    def from_json(cls, obj: Mapping, space: StateSpace | None = None) -> "Observable":
        terms = [
            (complex(t["re"], t.get("im", 0.0)), state_from_json(t["state"], space))
            for t in obj["terms"]
        ]
        dims = {}
        for k, m in obj.get("operator", {}).items():
            dims[int(k)] = int(m["rows"])
        if "sector" in obj and space is not None and not dims:
            dims[int(obj["sector"])] = space.dims()[int(obj["sector"])]
        return cls(tuple(terms), dims, space)


def p_rho(rho: PureState, space: StateSpace | None = None) -> Observable:
    """The function sigma -> p(rho, sigma) as an observable."""
    if not rho.is_quantum:
        raise ClassicalStateNotSupported("p_rho as an observable needs a quantum state")
    return Observable(((1.0, rho),), {rho.sector: rho.dim}, space)


def observable_of(a, sector: int = 0, space: StateSpace | None = None) -> Observable:
    """f_A written as an element of A(P) via the spectral decomposition of A."""
    return Observable.from_operator(a, sector, space)
