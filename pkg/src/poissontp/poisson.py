"""Poisson brackets and Hamiltonian flows on quantum sectors.

Sign convention: the flow of f_H is rho(t) = U rho U^dagger with
U = exp(-i H t / hbar).  With the bracket {f_A, f_B} = (i/hbar) f_[A,B] this
makes d/dt f_B(rho(t)) at t = 0 equal to {f_H, f_B}(rho), i.e. X_H(g) = {H, g}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import HermitianOperator, commutator, eig_hermitian
from .errors import (
    ClassicalStateNotSupported,
    ComplexCoefficients,
    InconsistentBracket,
    InsufficientSignal,
    SectorMismatch,
)
from .states import (
    Observable,
    PureState,
    expectation,
    p_rho,
    projector_distance,
    transition_probability,
)
from .transition import complement_frame

OPERATOR = "operator"
FINITE_DIFFERENCE = "finite-difference"
EXACT = "exact"
INTEGRATED = "rk4"

SIGNAL_FLOOR = 1e-8
HBAR_REL_TOL = 1e-6
LEAF_SV_TOL = 1e-8


@dataclass(frozen=True)
class BracketOracle:
    """How brackets are evaluated, and with which value of hbar."""

    mode: str = OPERATOR
    hbar: float = 1.0

    def __post_init__(self):
        if self.mode not in (OPERATOR, FINITE_DIFFERENCE):
            raise ValueError(f"unknown bracket mode {self.mode!r}")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError("hbar must be positive")


@dataclass
class FlowResult:
    trajectory: list[tuple[float, PureState]]
    method: str
    hbar: float = 1.0

    @property
    def final(self) -> PureState:
        return self.trajectory[-1][1]

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.trajectory]

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "hbar": self.hbar,
            "trajectory": [{"t": t, "state": s.to_json()} for t, s in self.trajectory],
        }


def _operator_of(f, sector: int) -> np.ndarray:
    if isinstance(f, Observable):
        if sector not in f.dims:
            raise SectorMismatch(f"observable does not live on sector {sector}")
        if not f.is_real:
            raise ComplexCoefficients("brackets are evaluated on real observables")
        return f.operator(sector)
    if isinstance(f, HermitianOperator):
        return f.matrix
    return np.asarray(f, dtype=complex)


def _hbar_for(f, sector: int, oracle: BracketOracle | None) -> float:
    if oracle is not None:
        return oracle.hbar
    space = getattr(f, "space", None)
    if space is not None:
        return space.hbar(sector)
    return 1.0


def _check_state(rho: PureState, a: np.ndarray):
    if not rho.is_quantum:
        raise ClassicalStateNotSupported("use canonical_bracket for classical brackets")
    if a.shape != (rho.dim, rho.dim):
        raise SectorMismatch(f"operator shape {a.shape} does not match state dim {rho.dim}")


def bracket(f, g, rho: PureState, oracle: BracketOracle | None = None) -> float:
    """{f, g}(rho).

    Operator mode evaluates (i/hbar) Tr(rho [A, B]) as -2 Im<A psi|B psi>/hbar,
    which is exactly antisymmetric.  Finite-difference mode differentiates
    g along the exact flow of f with a five-point central stencil.
    """
    a = _operator_of(f, rho.sector)
    b = _operator_of(g, rho.sector)
    _check_state(rho, a)
    _check_state(rho, b)
    hbar = _hbar_for(f, rho.sector, oracle)
    mode = oracle.mode if oracle is not None else OPERATOR
    psi = rho.vector
    if mode == OPERATOR:
        return float(-2.0 * np.imag(np.vdot(a @ psi, b @ psi)) / hbar)

    w, v = eig_hermitian(a)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    h = 1e-3 * hbar / scale
    c = v.conj().T @ psi

    def g_at(t):
        phi = v @ (np.exp(-1j * w * t / hbar) * c)
        return float(np.real(np.vdot(phi, b @ phi)))

    return (-g_at(2 * h) + 8 * g_at(h) - 8 * g_at(-h) + g_at(-2 * h)) / (12 * h)


def bracket_observable(f: Observable, g: Observable, oracle: BracketOracle | None = None) -> Observable:
    """Materialize {f, g} as an observable via (i/hbar)[A, B], sector by sector.

    Complex coefficients are allowed (the bracket is extended bilinearly).
    Sectors on which only one argument lives contribute zero.
    """
    dims = dict(f.dims)
    for k, d in g.dims.items():
        if dims.setdefault(k, d) != d:
            raise SectorMismatch(f"sector {k} has different dims in the two operands")
    space = f.space or g.space
    out = Observable.zero(dims, space)
    for k in dims:
        if k not in f.dims or k not in g.dims:
            continue
        hbar = _hbar_for(f if f.space else g, k, oracle)
        c = (1j / hbar) * commutator(f.operator(k), g.operator(k))
        if f.is_real and g.is_real:
            c = 0.5 * (c + c.conj().T)
        out = out + Observable.from_operator(c, k, space)
    return out


# --------------------------------------------------------------------------
# flows


def _time_grid(t) -> list[float]:
    if np.isscalar(t):
        return [float(t)]
    return [float(x) for x in t]


def _rk4_segment(h: np.ndarray, psi: np.ndarray, dt_total: float, n: int, hbar: float) -> np.ndarray:
    gen = (-1j / hbar) * h
    dt = dt_total / n
    for _ in range(n):
        k1 = gen @ psi
        k2 = gen @ (psi + 0.5 * dt * k1)
        k3 = gen @ (psi + 0.5 * dt * k2)
        k4 = gen @ (psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        psi = psi / np.linalg.norm(psi)
    return psi


def hamiltonian_flow(
    hamiltonian,
    rho: PureState,
    t,
    oracle: BracketOracle | None = None,
    method: str = EXACT,
    steps: int = 1000,
) -> FlowResult:
    """Flow rho along the Hamiltonian vector field of f_H.

    Args:
        hamiltonian: real observable (or Hermitian operator) on rho's sector.
        rho: initial state.
        t: a single time or a sequence of output times.
        oracle: supplies hbar; defaults to the sector's hbar, else 1.
        method: ``"exact"`` (projected unitary) or ``"rk4"`` (fixed-step
            Runge-Kutta on the state vector, renormalized after each step).
        steps: RK4 steps spanning the largest |t| in the grid.

    Returns:
        The trajectory at the requested times.
    """
    h = _operator_of(hamiltonian, rho.sector)
    _check_state(rho, h)
    hbar = _hbar_for(hamiltonian, rho.sector, oracle)
    times = _time_grid(t)
    traj: list[tuple[float, PureState]] = []
    if method == EXACT:
        w, v = eig_hermitian(h)
        c = v.conj().T @ rho.vector
        for s in times:
            if s == 0.0:
                traj.append((s, rho))
                continue
            psi = v @ (np.exp(-1j * w * s / hbar) * c)
            traj.append((s, PureState(rho.sector, vector=psi)))
    elif method in (INTEGRATED, "integrated"):
        method = INTEGRATED
        span = max((abs(s) for s in times), default=0.0)
        psi, now = rho.vector.copy(), 0.0
        for s in times:
            if s != now:
                n = max(1, int(round(steps * abs(s - now) / span)))
                psi = _rk4_segment(h, psi, s - now, n, hbar)
                now = s
            traj.append((s, rho if s == 0.0 and now == 0.0 else PureState(rho.sector, vector=psi)))
    else:
        raise ValueError(f"unknown flow method {method!r}")
    return FlowResult(traj, method, hbar)


def compare_flows(a: FlowResult, b: FlowResult) -> float:
    """Largest projector distance between two trajectories on the same grid."""
    if a.times != b.times:
        raise ValueError("trajectories are on different time grids")
    return max((projector_distance(x, y) for (_, x), (_, y) in zip(a.trajectory, b.trajectory)), default=0.0)


@dataclass
class UnitarityReport:
    max_drift: float
    method: str
    times: list[float] = field(default_factory=list)


def flow_invariance(
    hamiltonian,
    sigma1: PureState,
    sigma2: PureState,
    times: Sequence[float],
    oracle: BracketOracle | None = None,
    method: str = EXACT,
    steps: int = 1000,
) -> UnitarityReport:
    """Largest change of p(sigma1(t), sigma2(t)) along the flow of ``hamiltonian``."""
    if sigma1.sector != sigma2.sector:
        raise SectorMismatch("both flowed states must share a sector")
    p0 = transition_probability(sigma1, sigma2)
    f1 = hamiltonian_flow(hamiltonian, sigma1, times, oracle, method, steps)
    f2 = hamiltonian_flow(hamiltonian, sigma2, times, oracle, method, steps)
    drift = max(
        (abs(transition_probability(x, y) - p0) for (_, x), (_, y) in zip(f1.trajectory, f2.trajectory)),
        default=0.0,
    )
    return UnitarityReport(float(drift), f1.method, list(times))


def check_unitarity(
    rho: PureState,
    sigma1: PureState,
    sigma2: PureState,
    times: Sequence[float],
    oracle: BracketOracle | None = None,
    method: str = EXACT,
    steps: int = 1000,
) -> UnitarityReport:
    """Invariance of transition probabilities under the flow generated by p_rho."""
    if not (rho.sector == sigma1.sector == sigma2.sector):
        raise SectorMismatch("unitarity check needs all states in one sector")
    return flow_invariance(p_rho(rho), sigma1, sigma2, times, oracle, method, steps)


# --------------------------------------------------------------------------
# leaves and hbar


def hermitian_basis(dim: int) -> list[HermitianOperator]:
    """Orthonormal (Hilbert-Schmidt) basis of the dim^2 Hermitian matrices."""
    out = []
    for j in range(dim):
        for k in range(j, dim):
            m = np.zeros((dim, dim), dtype=complex)
            if j == k:
                m[j, j] = 1.0
                out.append(HermitianOperator(m))
                continue
            m[j, k] = m[k, j] = 1 / np.sqrt(2)
            out.append(HermitianOperator(m.copy()))
            m[j, k], m[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            out.append(HermitianOperator(m))
    return out


def tangent_vectors(rho: PureState, probes: Iterable, hbar: float = 1.0) -> np.ndarray:
    """Realified Hamiltonian vector fields at rho, one row per probe."""
    psi = rho.vector
    comp = complement_frame(psi.reshape(-1, 1))
    rows = []
    for a in probes:
        m = a.matrix if isinstance(a, HermitianOperator) else np.asarray(a, dtype=complex)
        fa = float(np.real(np.vdot(psi, m @ psi)))
        v = (-1j / hbar) * (m @ psi - fa * psi)
        v = v - psi * np.vdot(psi, v)
        c = comp.conj().T @ v
        rows.append(np.concatenate([c.real, c.imag]))
    return np.array(rows).reshape(len(rows), 2 * comp.shape[1])


def symplectic_leaf_rank(rho: PureState, probes=None, hbar: float = 1.0, tol: float = LEAF_SV_TOL) -> int:
    """Numerical rank of the span of Hamiltonian vector fields at rho."""
    if not rho.is_quantum:
        raise ClassicalStateNotSupported("leaf rank is defined on quantum sectors")
    if probes is None:
        probes = hermitian_basis(rho.dim)
    for a in probes:
        m = a.matrix if isinstance(a, HermitianOperator) else np.asarray(a)
        if m.shape != (rho.dim, rho.dim):
            raise SectorMismatch(f"probe shape {m.shape} does not match state dim {rho.dim}")
    t = tangent_vectors(rho, probes, hbar)
    if t.size == 0:
        return 0
    s = np.linalg.svd(t, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def bracket_samples(a, b, states: Sequence[PureState], oracle: BracketOracle | None = None) -> list[tuple[float, float]]:
    """Pairs ({f_A, f_B}(rho), i Tr(rho [A, B])) for hbar inference."""
    a = _operator_of(a, states[0].sector)
    b = _operator_of(b, states[0].sector)
    comm = commutator(a, b)
    out = []
    for rho in states:
        c = float(np.real(1j * np.vdot(rho.vector, comm @ rho.vector)))
        out.append((bracket(a, b, rho, oracle), c))
    return out


def infer_hbar(samples: Iterable[tuple[float, float]], floor: float = SIGNAL_FLOOR, rel_tol: float = HBAR_REL_TOL) -> float:
    """Recover hbar from bracket values and commutator expectations.

    Each admissible sample (|bracket| > floor) yields the ratio
    commutator/bracket; all ratios must agree to ``rel_tol``.
    """
    ratios = [c / b for b, c in samples if abs(b) > floor]
    if not ratios:
        raise InsufficientSignal("no sample has a bracket value above the noise floor")
    r = np.asarray(ratios)
    est = float(np.mean(r))
    spread = float(np.max(np.abs(r - est)))
    if spread > rel_tol * abs(est):
        raise InconsistentBracket(
            f"bracket/commutator ratios disagree (spread {spread:.3g} around {est:.6g})"
        )
    return est


# --------------------------------------------------------------------------
# classical side


def canonical_bracket(
    f: Callable[[np.ndarray], float],
    g: Callable[[np.ndarray], float],
    point,
    step: float = 1e-5,
) -> float:
    """sum_k (df/dq_k dg/dp_k - df/dp_k dg/dq_k) at a point of R^{2d}.

    The point is laid out as ``(q_1..q_d, p_1..p_d)``.
    """
    x = np.asarray(point, dtype=float)
    if x.ndim != 1 or x.shape[0] % 2:
        raise ValueError("point must be a flat array of even length (q..., p...)")
    d = x.shape[0] // 2

    def grad(fn):
        out = np.empty_like(x)
        for i in range(x.shape[0]):
            e = np.zeros_like(x)
            e[i] = step
            out[i] = (fn(x + e) - fn(x - e)) / (2 * step)
        return out

    df, dg = grad(f), grad(g)
    return float(np.dot(df[:d], dg[d:]) - np.dot(df[d:], dg[:d]))


def energy_drift(hamiltonian, rho: PureState, flow: FlowResult) -> float:
    """max_t |f_H(rho(t)) - f_H(rho)| along a trajectory."""
    h = _operator_of(hamiltonian, rho.sector)
    e0 = expectation(h, rho)
    return max((abs(expectation(h, s) - e0) for _, s in flow.trajectory), default=0.0)
