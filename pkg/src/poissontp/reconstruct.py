"""Observable algebra rebuilt from transition probabilities.

Every real observable f = sum_i mu_i p_{rho_i} is resolved as
sum_j lambda_j p_{e_j} over mutually orthogonal states e_j.  Squaring acts on
the lambda_j, the Jordan product comes from squares by polarization, and
the associative product adds the Poisson bracket with weight -i hbar / 2.
The operator forms (A B + B A)/2 and A B are never used to build these
products; they serve as independent checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import degeneracy_groups, eig_hermitian, max_norm, random_hermitian, random_unit_vector
from .errors import ComplexCoefficients, InvalidSpace, RankDeficient
from .poisson import BracketOracle, bracket_observable
from .states import Observable, PureState, StateSpace, p_rho, transition_probability

SPAN_SV_TOL = 1e-10


@dataclass
class SpectralResolution:
    """f = sum_j eigenvalues[j] p_{frame[j]} with p(e_j, e_k) = delta_jk."""

    sector: int
    eigenvalues: np.ndarray
    frame: list[PureState]
    groups: list[list[int]]
    space: StateSpace | None = None

    def observable(self, fn=None) -> Observable:
        """sum_j fn(lambda_j) p_{e_j}; the identity function by default."""
        lam = self.eigenvalues if fn is None else np.array([fn(x) for x in self.eigenvalues])
        dim = len(self.frame)
        return Observable(
            tuple((float(l), e) for l, e in zip(lam, self.frame)), {self.sector: dim}, self.space
        )

    def eigenprojectors(self) -> list[tuple[float, np.ndarray]]:
        """(mean eigenvalue, projector) per degeneracy group."""
        out = []
        for g in self.groups:
            p = sum(self.frame[j].projector for j in g)
            out.append((float(np.mean(self.eigenvalues[g])), p))
        return out

    def orthogonality_defect(self) -> float:
        n = len(self.frame)
        worst = 0.0
        for j in range(n):
            for k in range(j + 1, n):
                worst = max(worst, transition_probability(self.frame[j], self.frame[k]))
        return worst


def spectral_resolve(f: Observable) -> SpectralResolution:
    """Spectral theorem in A(P): rewrite f over an orthogonal frame.

    Zero eigenvalues are kept, so the frame is always a complete basis.
    """
    if not f.is_real:
        raise ComplexCoefficients("spectral resolution needs real coefficients")
    k = f.single_sector()
    w, v = eig_hermitian(f.operator(k))
    frame = [PureState(k, vector=v[:, j]) for j in range(v.shape[1])]
    return SpectralResolution(k, w, frame, degeneracy_groups(w), f.space)


def _blockwise(f: Observable, fn) -> Observable:
    out = Observable.zero(f.dims, f.space)
    for k in f.sectors:
        out = out + spectral_resolve(f.restrict(k)).observable(fn)
    return out


def square(f: Observable) -> Observable:
    """f^2 := sum_j lambda_j^2 p_{e_j}, sector by sector."""
    if not f.is_real:
        raise ComplexCoefficients("squaring is defined on real observables")
    return _blockwise(f, lambda x: x * x)


def jordan(f: Observable, g: Observable) -> Observable:
    """f o g = ((f + g)^2 - (f - g)^2) / 4."""
    return 0.25 * (square(f + g) - square(f - g))


def _sector_hbar(f: Observable, g: Observable, k: int, oracle: BracketOracle | None) -> float:
    if oracle is not None:
        return oracle.hbar
    space = f.space or g.space
    return space.hbar(k) if space is not None else 1.0


def _star_real(f: Observable, g: Observable, oracle: BracketOracle | None) -> Observable:
    br = bracket_observable(f, g, oracle)
    scaled = tuple(
        (c * (-0.5j * _sector_hbar(f, g, s.sector, oracle)), s) for c, s in br.terms
    )
    return jordan(f, g) + Observable(scaled, br.dims, br.space)


def star_product(f: Observable, g: Observable, oracle: BracketOracle | None = None) -> Observable:
    """f . g = f o g - (i hbar / 2) {f, g}, extended complex-bilinearly.

    hbar is taken per sector (from the oracle if given, else from the
    attached space, else 1).
    """
    fr, fi = f.real_part(), f.imag_part()
    gr, gi = g.real_part(), g.imag_part()
    out = _star_real(fr, gr, oracle)
    if fi.terms and gi.terms:
        out = out - _star_real(fi, gi, oracle)
    if fi.terms:
        out = out + 1j * _star_real(fi, gr, oracle)
    if gi.terms:
        out = out + 1j * _star_real(fr, gi, oracle)
    return out


# --------------------------------------------------------------------------
# identification as a direct sum of matrix algebras


def _realify(p: np.ndarray) -> np.ndarray:
    return np.concatenate([p.real.ravel(), p.imag.ravel()])


@dataclass
class AlgebraStructure:
    blocks: list[int]
    span_dims: list[int]
    membership_residual: float
    cross_sector_residual: float
    states: dict[int, list[PureState]] = field(default_factory=dict)


def analyze_algebra(
    space: StateSpace,
    rng: np.random.Generator,
    extra: int = 4,
    attempts: int = 3,
    probes: int = 3,
) -> AlgebraStructure:
    """Span dimension of {p_rho} per sector and membership of random f_A.

    Raises:
        RankDeficient: the sampled projectors never reached n^2 dimensions.
    """
    if not space.is_quantum:
        raise InvalidSpace("algebra identification needs an all-quantum space")
    blocks, span_dims, sampled = [], [], {}
    member_res = 0.0
    for k, sec in enumerate(space.sectors):
        n = sec.dim
        for _ in range(attempts):
            states = [PureState(k, vector=random_unit_vector(n, rng)) for _ in range(n * n + extra)]
            m = np.column_stack([_realify(s.projector) for s in states])
            sv = np.linalg.svd(m, compute_uv=False)
            rank = int(np.sum(sv > SPAN_SV_TOL * sv[0]))
            if rank == n * n:
                break
        else:
            raise RankDeficient(f"sector {k}: sampled span has dimension {rank} < {n * n}")
        for _ in range(probes):
            a = random_hermitian(n, rng).matrix
            mu, *_ = np.linalg.lstsq(m, _realify(a), rcond=None)
            f = Observable(tuple((float(c), s) for c, s in zip(mu, states)), {k: n}, space)
            member_res = max(member_res, max_norm(f.operator(k) - a) / max(1.0, max_norm(a)))
        blocks.append(n)
        span_dims.append(rank)
        sampled[k] = states

    cross = 0.0
    for i in sampled:
        for j in sampled:
            if i == j:
                continue
            prod = star_product(p_rho(sampled[i][0], space), p_rho(sampled[j][0], space))
            cross = max(cross, prod.distance(Observable.zero(prod.dims)))
    return AlgebraStructure(blocks, span_dims, member_res, cross, sampled)


def identify_algebra(space: StateSpace, rng: np.random.Generator, tol: float = 1e-9) -> list[int]:
    """Block dimensions (n_1, n_2, ...) of the algebra generated by p.

    Raises RankDeficient if sampling fails, and ArithmeticError if a random
    f_A falls outside the span or cross-sector products do not vanish.
    """
    st = analyze_algebra(space, rng)
    if st.membership_residual > tol:
        raise ArithmeticError(f"f_A outside the span of p_rho (residual {st.membership_residual:.3g})")
    if st.cross_sector_residual > tol:
        raise ArithmeticError("products across sectors do not vanish")
    return st.blocks


def random_observable(dim: int, rng: np.random.Generator, sector: int = 0, space: StateSpace | None = None, terms: int | None = None) -> Observable:
    """Random real combination of p_rho over ``terms`` random states."""
    terms = dim + 1 if terms is None else terms
    return Observable(
        tuple(
            (float(rng.standard_normal()), PureState(sector, vector=random_unit_vector(dim, rng)))
            for _ in range(terms)
        ),
        {sector: dim},
        space,
    )
