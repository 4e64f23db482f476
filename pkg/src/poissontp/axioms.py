"""Axiom suites over a state space.

Each check draws its randomness from ``(seed, check, sector, trial)`` so
that adding trials only appends new draws, and so that the report does not
depend on execution order or on the number of worker threads.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    max_norm,
    random_hermitian,
    random_unit_vector,
    random_unitary,
    seeded_rng,
)
from .errors import InsufficientSignal, InvalidSpace
from .schemas import SCHEMA_VERSION
from .lattice import check_atomic, check_covering, check_orthomodular, random_nested_pair, random_subspace
from .poisson import (
    FINITE_DIFFERENCE,
    BracketOracle,
    bracket,
    bracket_observable,
    bracket_samples,
    canonical_bracket,
    check_unitarity,
    compare_flows,
    energy_drift,
    flow_invariance,
    hamiltonian_flow,
    infer_hbar,
    symplectic_leaf_rank,
)
from .reconstruct import analyze_algebra, jordan, random_observable, spectral_resolve, square, star_product
from .states import (
    Observable,
    PureState,
    StateSpace,
    decompose_sectors,
    projector_distance,
    transition_probability,
    transition_table,
)
from .transition import check_qm2, set_orthoplement, superpositions


DEFAULT_TOLERANCES = {
    "tp_symmetry": 0.0,
    "tp_range": 1e-12,
    "tp_identity": 0.0,
    "tp_basis_sum": 1e-10,
    "unitarity_exact": 1e-10,
    "unitarity_rk4": 1e-6,
    "flow_exact_vs_rk4": 1e-6,
    "flow_invariance_any_observable": 1e-10,
    "energy_conservation": 1e-9,
    "qm2": 1e-9,
    "qm2_cross_sector": 0.0,
    "qm3_leaf_rank": 0.0,
    "qm3_cross_sector_zero": 0.0,
    "hbar_nonzero": 0.0,
    "cm2_delta": 0.0,
    "cm_pair_closure": 0.0,
    "cm_sectors": 0.0,
    "canonical_bracket_qp": 1e-6,
    "spectral_completeness": 1e-9,
    "square_oracle": 1e-9,
    "jordan_commutativity": 1e-9,
    "jordan_bilinearity": 1e-9,
    "jordan_oracle": 1e-9,
    "jordan_identity": 1e-8,
    "star_oracle": 1e-9,
    "star_associativity": 1e-9,
    "star_split": 1e-9,
    "bracket_antisymmetry": 1e-10,
    "bracket_bilinearity": 1e-9,
    "bracket_jacobi": 1e-8,
    "bracket_leibniz": 1e-8,
    "bracket_fd_agreement": 1e-6,
    "hbar_roundtrip": 1e-9,
    "hbar_commuting": 0.0,
    "hbar_flow_invariance": 1e-9,
    "algebra_blocks": 0.0,
    "algebra_membership": 1e-9,
    "algebra_cross_sector": 1e-9,
    "hbar_sector_consistency": 0.0,
    "lattice_orthomodular": 0.0,
    "lattice_covering": 0.0,
    "lattice_atomic": 0.0,
}


@dataclass
class SuiteConfig:
    seed: int = 0
    trials: int = 50
    tolerances: dict = field(default_factory=dict)
    times: list = field(default_factory=lambda: [float(t) for t in np.linspace(0.0, 10.0, 11)])
    rk4_steps: int = 1000
    rk4_trials: int = 3
    qm2_samples: int = 20
    max_dim: int = 8
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1 or self.rk4_trials < 1 or self.qm2_samples < 1:
            raise ValueError("trial counts must be >= 1")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ValueError(f"tolerance override {k}={v} must be positive")

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def to_json(self) -> dict:
        # jobs only changes wall time, so it stays out of the echo
        out = asdict(self)
        out.pop("jobs")
        return out


@dataclass
class CheckRecord:
    name: str
    sector: Optional[int]
    trials: int
    worst: Optional[float]
    tol: float
    passed: bool
    note: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "sector": self.sector,
            "trials": self.trials,
            "worst": self.worst,
            "tol": self.tol,
            "pass": self.passed,
            "note": self.note,
        }


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckRecord]
    config: SuiteConfig

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str, sector: Optional[int] = None) -> CheckRecord:
        for c in self.checks:
            if c.name == name and c.sector == sector:
                return c
        raise KeyError((name, sector))

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "schema_version": SCHEMA_VERSION,
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "config": self.config.to_json(),
        }


class _Ctx:
    """Per-check view: sector data plus a trial-indexed RNG factory."""

    def __init__(self, space: StateSpace, cfg: SuiteConfig, name: str, sector: Optional[int]):
        self.space, self.cfg, self.name, self.sector = space, cfg, name, sector
        self._key = zlib.crc32(name.encode())

    def rng(self, trial: int) -> np.random.Generator:
        sec = -1 if self.sector is None else self.sector
        return seeded_rng(self.cfg.seed, self._key, sec + 1, trial)

    @property
    def dim(self) -> int:
        return self.space.sectors[self.sector].dim

    @property
    def hbar(self) -> float:
        return self.space.sectors[self.sector].hbar

    def state(self, rng) -> PureState:
        return PureState(self.sector, vector=random_unit_vector(self.dim, rng))


class Skip(Exception):
    pass


# A check returns (trials, worst, note) or raises Skip(reason).
CheckFn = Callable[[_Ctx], tuple]


def _run_check(space, cfg, name, sector, fn: CheckFn) -> CheckRecord:
    ctx = _Ctx(space, cfg, name, sector)
    tol = cfg.tol(name)
    try:
        trials, worst, note = fn(ctx)
    except Skip as s:
        return CheckRecord(name, sector, 0, None, tol, True, f"skipped: {s}")
    worst = float(worst)
    return CheckRecord(name, sector, int(trials), worst, tol, bool(worst <= tol), note)


def _run(space, cfg, suite: str, jobs: list[tuple[str, Optional[int], CheckFn]]) -> SuiteReport:
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(lambda j: _run_check(space, cfg, *j), jobs))
    else:
        records = [_run_check(space, cfg, *j) for j in jobs]
    records.sort(key=lambda r: (-1 if r.sector is None else r.sector, r.name))
    return SuiteReport(suite, records, cfg)


# --------------------------------------------------------------------------
# quantum axioms


def _tp_symmetry(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        a, b = c.state(r), c.state(r)
        worst = max(worst, abs(transition_probability(a, b) - transition_probability(b, a)))
    return c.cfg.trials, worst, "p(a,b) == p(b,a) bitwise"


def _tp_range(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        p = transition_probability(c.state(r), c.state(r))
        worst = max(worst, -p, p - 1.0)
    return c.cfg.trials, max(worst, 0.0), "0 <= p <= 1"


def _tp_identity(c: _Ctx):
    bad = 0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        a, b = c.state(r), c.state(r)
        phase = np.exp(2j * np.pi * r.random())
        twin = PureState(c.sector, vector=phase * a.vector)
        bad += transition_probability(a, a) != 1.0
        bad += transition_probability(a, twin) != 1.0
        if c.dim > 1:
            distinct = projector_distance(a, b) > 1e-9
            bad += (transition_probability(a, b) == 1.0) == distinct
    return c.cfg.trials, bad, "p = 1 iff projector distance <= 1e-9 (violation count)"


def _tp_basis_sum(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        u = random_unitary(c.dim, r)
        rho = c.state(r)
        s = sum(transition_probability(rho, PureState(c.sector, vector=u[:, j])) for j in range(c.dim))
        worst = max(worst, abs(s - 1.0))
    return c.cfg.trials, worst, "maximal orthogonal sets are bases"


def _unitarity_exact(c: _Ctx):
    worst = 0.0
    oracle = BracketOracle(hbar=c.hbar)
    for i in range(c.cfg.trials):
        r = c.rng(i)
        rep = check_unitarity(c.state(r), c.state(r), c.state(r), c.cfg.times, oracle)
        worst = max(worst, rep.max_drift)
    return c.cfg.trials, worst, "model-verified: flows of p_rho preserve p"


def _unitarity_rk4(c: _Ctx):
    worst = 0.0
    oracle = BracketOracle(hbar=c.hbar)
    for i in range(c.cfg.rk4_trials):
        r = c.rng(i)
        rep = check_unitarity(c.state(r), c.state(r), c.state(r), c.cfg.times, oracle, "rk4", c.cfg.rk4_steps)
        worst = max(worst, rep.max_drift)
    return c.cfg.rk4_trials, worst, f"RK4 with {c.cfg.rk4_steps} steps"


def _flow_exact_vs_rk4(c: _Ctx):
    worst = 0.0
    oracle = BracketOracle(hbar=c.hbar)
    for i in range(c.cfg.rk4_trials):
        r = c.rng(i)
        h = Observable(((1.0, c.state(r)),), {c.sector: c.dim})
        rho = c.state(r)
        a = hamiltonian_flow(h, rho, c.cfg.times, oracle, "exact")
        b = hamiltonian_flow(h, rho, c.cfg.times, oracle, "rk4", c.cfg.rk4_steps)
        worst = max(worst, compare_flows(a, b))
    return c.cfg.rk4_trials, worst, "projector distance, Hamiltonian p_rho"


def _flow_any_observable(c: _Ctx):
    worst = 0.0
    oracle = BracketOracle(hbar=c.hbar)
    for i in range(c.cfg.trials):
        r = c.rng(i)
        h = random_hermitian(c.dim, r)
        rep = flow_invariance(h, c.state(r), c.state(r), c.cfg.times, oracle)
        worst = max(worst, rep.max_drift)
    return c.cfg.trials, worst, "model property (not an axiom): flows of any f_A preserve p"


def _energy(c: _Ctx):
    worst = 0.0
    oracle = BracketOracle(hbar=c.hbar)
    for i in range(c.cfg.trials):
        r = c.rng(i)
        h = random_hermitian(c.dim, r)
        rho = c.state(r)
        worst = max(worst, energy_drift(h, rho, hamiltonian_flow(h, rho, c.cfg.times, oracle)))
    return c.cfg.trials, worst, "f_H constant along its own exact flow"


def _qm2(c: _Ctx):
    if c.dim < 2:
        raise Skip("dim 1 sector has no distinct pairs")
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        if i == 0:
            e = np.eye(c.dim)
            rho, sigma = PureState(c.sector, vector=e[0]), PureState(c.sector, vector=e[1])
        else:
            rho, sigma = c.state(r), c.state(r)
        worst = max(worst, check_qm2(rho, sigma, r, c.cfg.qm2_samples).max_deviation)
    return c.cfg.trials, worst, f"span of a pair vs P(C^2), {c.cfg.qm2_samples} samples per pair"


def _leaf_rank(c: _Ctx):
    worst = 0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        worst = max(worst, abs(symplectic_leaf_rank(c.state(r), hbar=c.hbar) - 2 * (c.dim - 1)))
    return c.cfg.trials, worst, f"leaf rank {2 * (c.dim - 1)} = real dim of the sector"


def _hbar_nonzero(c: _Ctx):
    bad = sum(1 for s in c.space.sectors if not s.hbar > 0)
    return len(c.space.sectors), bad, "model-verified: hbar > 0 in every sector"


def _random_states_by_sector(c: _Ctx, r, per: int) -> list[PureState]:
    out = []
    for k, s in enumerate(c.space.sectors):
        out.extend(PureState(k, vector=random_unit_vector(s.dim, r)) for _ in range(per))
    return out


def _qm2_cross(c: _Ctx):
    if len(c.space.sectors) < 2:
        raise Skip("single sector")
    bad = 0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        j, k = r.choice(len(c.space.sectors), size=2, replace=False)
        a = PureState(int(j), vector=random_unit_vector(c.space.sectors[j].dim, r))
        b = PureState(int(k), vector=random_unit_vector(c.space.sectors[k].dim, r))
        sup = superpositions(a, b)
        bad += not (isinstance(sup, tuple) and sup[0] is a and sup[1] is b)
    return c.cfg.trials, bad, "cross-sector superpositions are the literal pair"


def _qm3_cross(c: _Ctx):
    bad = 0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        states = _random_states_by_sector(c, r, 2)
        for a in states:
            for b in states:
                if a.sector != b.sector:
                    bad += transition_probability(a, b) != 0.0
        parts = decompose_sectors(transition_table(states))
        expected = [[2 * k, 2 * k + 1] for k in range(len(c.space.sectors))]
        bad += parts != expected
    return c.cfg.trials, bad, "p = 0 across sectors; transition graph recovers the sectors"


def run_qm_suite(space: StateSpace, cfg: SuiteConfig | None = None) -> SuiteReport:
    """Transition-probability axioms, unitarity, QM2 and QM3 on every sector."""
    cfg = cfg or SuiteConfig()
    if not space.is_quantum:
        raise InvalidSpace("the quantum suite needs an all-quantum space")
    per_sector = [
        ("tp_symmetry", _tp_symmetry),
        ("tp_range", _tp_range),
        ("tp_identity", _tp_identity),
        ("tp_basis_sum", _tp_basis_sum),
        ("unitarity_exact", _unitarity_exact),
        ("unitarity_rk4", _unitarity_rk4),
        ("flow_exact_vs_rk4", _flow_exact_vs_rk4),
        ("flow_invariance_any_observable", _flow_any_observable),
        ("energy_conservation", _energy),
        ("qm2", _qm2),
        ("qm3_leaf_rank", _leaf_rank),
    ]
    jobs = [(n, k, fn) for k in range(len(space.sectors)) for n, fn in per_sector]
    jobs += [
        ("qm2_cross_sector", None, _qm2_cross),
        ("qm3_cross_sector_zero", None, _qm3_cross),
        ("hbar_nonzero", None, _hbar_nonzero),
    ]
    return _run(space, cfg, "qm", jobs)


# --------------------------------------------------------------------------
# classical axioms


def _cm_delta(c: _Ctx):
    pts = c.space.points()
    worst = 0.0
    for a in pts:
        for b in pts:
            expect = 1.0 if (a.sector, a.label) == (b.sector, b.label) else 0.0
            worst = max(worst, abs(transition_probability(a, b) - expect))
    return len(pts) ** 2, worst, "p is the Kronecker delta"


def _cm_pair_closure(c: _Ctx):
    pts = c.space.points()
    if len(pts) < 2:
        raise Skip("one point, no distinct pairs")
    bad, n = 0, 0
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            closure = set_orthoplement(pts, set_orthoplement(pts, [a, b]))
            bad += not (len(closure) == 2 and closure[0] is a and closure[1] is b)
            n += 1
    return n, bad, "pair orthoclosure is the pair itself"


def _cm_sectors(c: _Ctx):
    pts = c.space.points()
    parts = decompose_sectors(transition_table(pts))
    return 1, abs(len(parts) - len(pts)), f"{len(parts)} sectors for {len(pts)} points"


def _cm_canonical(c: _Ctx):
    q = lambda x: x[0]  # noqa: E731
    p = lambda x: x[1]  # noqa: E731
    worst = 0.0
    for i in range(c.cfg.trials):
        pt = c.rng(i).uniform(-10, 10, size=2)
        worst = max(worst, abs(canonical_bracket(q, p, pt) - 1.0))
    return c.cfg.trials, worst, "informational: {q,p} = 1 on R^2 (not an axiom)"


def run_cm_suite(space: StateSpace, cfg: SuiteConfig | None = None) -> SuiteReport:
    """Delta transition probability, trivial superpositions, one sector per point."""
    cfg = cfg or SuiteConfig()
    if not space.is_classical:
        raise InvalidSpace("the classical suite needs an all-classical space")
    jobs = [
        ("cm2_delta", None, _cm_delta),
        ("cm_pair_closure", None, _cm_pair_closure),
        ("cm_sectors", None, _cm_sectors),
        ("canonical_bracket_qp", None, _cm_canonical),
    ]
    return _run(space, cfg, "cm", jobs)


# --------------------------------------------------------------------------
# reconstruction


def _obs(c: _Ctx, r) -> Observable:
    return random_observable(c.dim, r, c.sector, c.space)


def _spectral_completeness(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f = _obs(c, r)
        res = spectral_resolve(f)
        rho = c.state(r)
        worst = max(
            worst,
            abs(sum(transition_probability(rho, e) for e in res.frame) - 1.0),
            res.orthogonality_defect(),
            res.observable().distance(f),
        )
    return c.cfg.trials, worst, "frame is orthogonal, complete and reproduces f"


def _square_oracle(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        f = _obs(c, c.rng(i))
        a = f.operator()
        worst = max(worst, max_norm(square(f).operator() - a @ a))
    return c.cfg.trials, worst, "f^2 vs A^2"


def _jordan_comm(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g = _obs(c, r), _obs(c, r)
        worst = max(worst, jordan(f, g).distance(jordan(g, f)))
    return c.cfg.trials, worst, "f o g = g o f"


def _jordan_bilinear(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g, h = _obs(c, r), _obs(c, r), _obs(c, r)
        a, b = r.standard_normal(2)
        lhs = jordan(a * f + b * h, g)
        rhs = a * jordan(f, g) + b * jordan(h, g)
        worst = max(worst, lhs.distance(rhs))
    return c.cfg.trials, worst, "linear in the first slot (commutativity gives the second)"


def _jordan_oracle(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g = _obs(c, r), _obs(c, r)
        a, b = f.operator(), g.operator()
        worst = max(worst, max_norm(jordan(f, g).operator() - 0.5 * (a @ b + b @ a)))
    return c.cfg.trials, worst, "f o g vs (AB + BA)/2"


def _jordan_identity(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g = _obs(c, r), _obs(c, r)
        ff = jordan(f, f)
        worst = max(worst, jordan(jordan(f, g), ff).distance(jordan(f, jordan(g, ff))))
    return c.cfg.trials, worst, "(f o g) o f^2 = f o (g o f^2)"


def _star_oracle(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g = _obs(c, r), _obs(c, r)
        worst = max(worst, max_norm(star_product(f, g).operator() - f.operator() @ g.operator()))
    return c.cfg.trials, worst, "f . g vs AB"


def _star_assoc(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g, h = _obs(c, r), _obs(c, r), _obs(c, r)
        worst = max(worst, star_product(star_product(f, g), h).distance(star_product(f, star_product(g, h))))
    return c.cfg.trials, worst, "(f . g) . h = f . (g . h)"


def _star_split(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g = _obs(c, r), _obs(c, r)
        fg, gf = star_product(f, g), star_product(g, f)
        worst = max(
            worst,
            (0.5 * (fg + gf)).distance(jordan(f, g)),
            (fg - gf).distance(-1j * c.hbar * bracket_observable(f, g)),
        )
    return c.cfg.trials, worst, "symmetric part is o, antisymmetric part is -i hbar {,}"


def _bracket_antisym(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g, rho = _obs(c, r), _obs(c, r), c.state(r)
        worst = max(worst, abs(bracket(f, g, rho) + bracket(g, f, rho)), abs(bracket(f, f, rho)))
    return c.cfg.trials, worst, "{f,g} = -{g,f}"


def _bracket_bilinear(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g, h, rho = _obs(c, r), _obs(c, r), _obs(c, r), c.state(r)
        a, b = r.standard_normal(2)
        lhs = bracket(a * f + b * h, g, rho)
        rhs = a * bracket(f, g, rho) + b * bracket(h, g, rho)
        lhs2 = bracket(g, a * f + b * h, rho)
        rhs2 = a * bracket(g, f, rho) + b * bracket(g, h, rho)
        worst = max(worst, abs(lhs - rhs), abs(lhs2 - rhs2))
    return c.cfg.trials, worst, "bilinear over real coefficients"


def _bracket_jacobi(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g, h = _obs(c, r), _obs(c, r), _obs(c, r)
        b = bracket_observable
        total = b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g))
        worst = max(worst, total.distance(Observable.zero(total.dims)))
    return c.cfg.trials, worst, "{f,{g,h}} + cyclic = 0"


def _bracket_leibniz(c: _Ctx):
    worst = 0.0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g, h = _obs(c, r), _obs(c, r), _obs(c, r)
        b = bracket_observable
        lhs = b(f, jordan(g, h))
        rhs = jordan(b(f, g), h) + jordan(g, b(f, h))
        worst = max(worst, lhs.distance(rhs))
    return c.cfg.trials, worst, "{f, g o h} = {f,g} o h + g o {f,h}"


def _bracket_fd(c: _Ctx):
    worst = 0.0
    fd = BracketOracle(FINITE_DIFFERENCE, c.hbar)
    for i in range(c.cfg.trials):
        r = c.rng(i)
        f, g, rho = _obs(c, r), _obs(c, r), c.state(r)
        worst = max(worst, abs(bracket(f, g, rho) - bracket(f, g, rho, fd)))
    return c.cfg.trials, worst, "operator bracket vs derivative along the flow"


def _hbar_roundtrip(c: _Ctx):
    worst = 0.0
    oracle = BracketOracle(hbar=c.hbar)
    for i in range(c.cfg.trials):
        r = c.rng(i)
        if c.dim < 2:
            raise Skip("dim 1: every bracket vanishes")
        a, b = random_hermitian(c.dim, r), random_hermitian(c.dim, r)
        states = [c.state(r) for _ in range(5)]
        est = infer_hbar(bracket_samples(a, b, states, oracle))
        worst = max(worst, abs(est - c.hbar) / c.hbar)
    return c.cfg.trials, worst, f"relative error, true hbar {c.hbar:g}"


def _hbar_commuting(c: _Ctx):
    bad = 0
    for i in range(c.cfg.trials):
        r = c.rng(i)
        u = random_unitary(c.dim, r)
        a = u @ np.diag(r.standard_normal(c.dim)) @ u.conj().T
        b = u @ np.diag(r.standard_normal(c.dim)) @ u.conj().T
        try:
            infer_hbar(bracket_samples(a, b, [c.state(r) for _ in range(5)], BracketOracle(hbar=c.hbar)))
            bad += 1
        except InsufficientSignal:
            pass
    return c.cfg.trials, bad, "commuting inputs carry no hbar signal"


def _hbar_flow_inv(c: _Ctx):
    if c.dim < 2:
        raise Skip("dim 1: every bracket vanishes")
    worst = 0.0
    oracle = BracketOracle(hbar=c.hbar)
    for i in range(c.cfg.trials):
        r = c.rng(i)
        a, b = random_hermitian(c.dim, r).matrix, random_hermitian(c.dim, r).matrix
        states = [c.state(r) for _ in range(5)]
        u = random_unitary(c.dim, r)
        est = infer_hbar(bracket_samples(a, b, states, oracle))
        moved = [PureState(c.sector, vector=u @ s.vector) for s in states]
        est2 = infer_hbar(bracket_samples(u @ a @ u.conj().T, u @ b @ u.conj().T, moved, oracle))
        worst = max(worst, abs(est - est2) / abs(est))
    return c.cfg.trials, worst, "hbar unchanged by a common unitary conjugation"


def _algebra(c: _Ctx):
    st = analyze_algebra(c.space, c.rng(0))
    dims = [s.dim for s in c.space.sectors]
    worst = max(
        max(abs(b - d) for b, d in zip(st.blocks, dims)),
        max(abs(s - d * d) for s, d in zip(st.span_dims, dims)),
    )
    return len(dims), worst, f"blocks {st.blocks}, span dims {st.span_dims}"


def _algebra_membership(c: _Ctx):
    st = analyze_algebra(c.space, c.rng(0))
    return len(st.blocks), st.membership_residual, "random f_A lies in span{p_rho}"


def _algebra_cross(c: _Ctx):
    if len(c.space.sectors) < 2:
        raise Skip("single sector")
    st = analyze_algebra(c.space, c.rng(0))
    return len(st.blocks), st.cross_sector_residual, "products across sectors vanish"


def _hbar_consistency(c: _Ctx):
    hbars = [s.hbar for s in c.space.sectors]
    if len(set(hbars)) > 1:
        note = f"informational: hbar differs across sectors {hbars}; removable by rescaling"
    else:
        note = f"hbar equal across sectors ({hbars[0]:g})"
    return len(hbars), 0.0, note


def run_reconstruction_suite(space: StateSpace, cfg: SuiteConfig | None = None) -> SuiteReport:
    """Algebra reconstruction checks and hbar round trips on every sector."""
    cfg = cfg or SuiteConfig()
    if not space.is_quantum:
        raise InvalidSpace("the reconstruction suite needs an all-quantum space")
    too_big = [s.dim for s in space.sectors if s.dim > cfg.max_dim]
    if too_big:
        raise InvalidSpace(f"sector dims {too_big} exceed max_dim {cfg.max_dim}")
    per_sector = [
        ("spectral_completeness", _spectral_completeness),
        ("square_oracle", _square_oracle),
        ("jordan_commutativity", _jordan_comm),
        ("jordan_bilinearity", _jordan_bilinear),
        ("jordan_oracle", _jordan_oracle),
        ("jordan_identity", _jordan_identity),
        ("star_oracle", _star_oracle),
        ("star_associativity", _star_assoc),
        ("star_split", _star_split),
        ("bracket_antisymmetry", _bracket_antisym),
        ("bracket_bilinearity", _bracket_bilinear),
        ("bracket_jacobi", _bracket_jacobi),
        ("bracket_leibniz", _bracket_leibniz),
        ("bracket_fd_agreement", _bracket_fd),
        ("hbar_roundtrip", _hbar_roundtrip),
        ("hbar_commuting", _hbar_commuting),
        ("hbar_flow_invariance", _hbar_flow_inv),
    ]
    jobs = [(n, k, fn) for k in range(len(space.sectors)) for n, fn in per_sector]
    jobs += [
        ("algebra_blocks", None, _algebra),
        ("algebra_membership", None, _algebra_membership),
        ("algebra_cross_sector", None, _algebra_cross),
        ("hbar_sector_consistency", None, _hbar_consistency),
    ]
    return _run(space, cfg, "reconstruction", jobs)


# --------------------------------------------------------------------------
# lattice laws (used by the CLI's lattice command)


def run_lattice_suite(dim: int, pairs: int, cfg: SuiteConfig | None = None, atoms: int | None = None) -> SuiteReport:
    """Orthomodularity, covering and atomicity on random subspaces of C^dim."""
    cfg = cfg or SuiteConfig()
    space = StateSpace.quantum(dim)
    atoms = pairs if atoms is None else atoms

    def ortho(c: _Ctx):
        bad = 0
        for i in range(pairs):
            v, w = random_nested_pair(dim, c.rng(i))
            bad += not check_orthomodular(v, w)
        return pairs, bad, "W = V v (W ^ V-perp) for V <= W (violation count)"

    def cover(c: _Ctx):
        if dim < 2:
            raise Skip("dim 1 has no proper nonzero subspace")
        bad = 0
        for i in range(atoms):
            r = c.rng(i)
            v = random_subspace(dim, int(r.integers(0, dim)), r)
            a = v.complement().random_state(r) if r.random() < 0.2 else PureState(0, vector=random_unit_vector(dim, r))
            bad += not check_covering(a, v)
        return atoms, bad, "V v a covers V for atoms a outside V (violation count)"

    def atomic(c: _Ctx):
        bad = 0
        for i in range(cfg.trials):
            r = c.rng(i)
            v = random_subspace(dim, int(r.integers(1, dim + 1)), r)
            bad += not check_atomic(v, r)
        return cfg.trials, bad, "every element is a join of atoms (violation count)"

    jobs = [
        ("lattice_orthomodular", 0, ortho),
        ("lattice_covering", 0, cover),
        ("lattice_atomic", 0, atomic),
    ]
    return _run(space, cfg, "lattice", jobs)


SUITES = {
    "qm": run_qm_suite,
    "cm": run_cm_suite,
    "reconstruction": run_reconstruction_suite,
}
