"""Correlation-matrix geometry of Schur channels.

A correlation matrix (PSD, unit diagonal) of rank r factors as X X† with
X of shape d x r; the rows of X (conjugated) are unit vectors whose rank-1
projections live on the generalised Bloch sphere in R^{r^2 - 1}.  Extremality
of the associated Schur channel among bistochastic channels can be read off
either from the real span of those projections inside the Hermitian r x r
matrices or from the affine span of the Bloch vectors; rank-2 channels that
fail the test decompose into a mixture of two diagonal unitary conjugations.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._linalg import dagger, spectral_norm
from .errors import (
    EmptyInput,
    NumericalFailure,
    RankNotTwo,
    RepresentationDimensionOne,
    ValidationError,
)
from .reps import PositiveDefiniteFunction, UnitaryRep, correlation_factor, pdf_from_rep

RANK_RTOL = 1e-9
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass
class CorrelationMatrix:
    """PSD matrix with unit diagonal together with its canonical factor."""

    matrix: np.ndarray
    rank: int
    factor: np.ndarray  # d x rank, matrix = factor @ factor†

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def column_vectors(self) -> np.ndarray:
        """Unit vectors xi_j (columns of factor†) whose gram is the matrix."""
        return dagger(self.factor)

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix.imag)) <= tol)


def correlation_matrix(pdf: PositiveDefiniteFunction) -> CorrelationMatrix:
    """Correlation matrix with (s, t) entry pdf(s t^{-1})."""
    x = correlation_factor(pdf)
    return CorrelationMatrix(matrix=pdf.gram(), rank=x.shape[1], factor=x)


def correlation_from_matrix(matrix, rtol: float = RANK_RTOL) -> CorrelationMatrix:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError("correlation matrix must be square")
    if np.max(np.abs(np.diag(matrix) - 1.0)) > 1e-12:
        raise ValidationError("correlation matrix needs unit diagonal")
    if spectral_norm(matrix - dagger(matrix)) > 1e-10:
        raise ValidationError("correlation matrix must be Hermitian")
    w, v = np.linalg.eigh(matrix)
    if w[0] < -1e-10:
        raise ValidationError("correlation matrix must be PSD")
    w = np.clip(w[::-1], 0.0, None)
    v = v[:, ::-1]
    rank = int(np.sum(w > rtol * w[0]))
    factor = v[:, :rank] * np.sqrt(w[:rank])
    return CorrelationMatrix(matrix=matrix, rank=rank, factor=factor)


def gell_mann_basis(r: int) -> np.ndarray:
    """Traceless Hermitian generators normalised to tr(s_a s_b) = 2 delta_ab.

    Ordered symmetric pair matrices first, then antisymmetric, then diagonal;
    for r = 2 this is exactly (X, Y, Z).
    """
    mats = []
    for a in range(r):
        for b in range(a + 1, r):
            m = np.zeros((r, r), dtype=complex)
            m[a, b] = m[b, a] = 1.0
            mats.append(m)
    for a in range(r):
        for b in range(a + 1, r):
            m = np.zeros((r, r), dtype=complex)
            m[a, b] = -1j
            m[b, a] = 1j
            mats.append(m)
    for l in range(1, r):
        diag = np.zeros(r, dtype=complex)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag) * math.sqrt(2.0 / (l * (l + 1))))
    return np.stack(mats) if mats else np.zeros((0, r, r), dtype=complex)


@dataclass
class ExtremalityReport:
    extreme: bool
    span_dim: int
    hermitian_dim: int
    rank: int


def is_extreme_correlation(corr: CorrelationMatrix,
                           rtol: float = RANK_RTOL) -> ExtremalityReport:
    """Extremality of the Schur channel among bistochastic channels: the d
    rank-1 projections onto the factor columns must span all Hermitian r x r
    matrices over the reals."""
    xis = corr.column_vectors()  # r x d, column j is xi_j
    r, d = xis.shape
    projections = np.einsum("rj,sj->jrs", xis, xis.conj())  # d of them
    flat = projections.reshape(d, r * r)
    real_rows = np.concatenate([flat.real, flat.imag], axis=1)
    svals = np.linalg.svd(real_rows, compute_uv=False)
    span_dim = int(np.sum(svals > rtol * svals[0])) if svals.size and svals[0] > 0 else 0
    return ExtremalityReport(extreme=span_dim == r * r, span_dim=span_dim,
                             hermitian_dim=r * r, rank=r)


@dataclass
class BlochOrbit:
    rank: int
    vectors: np.ndarray  # d x (rank^2 - 1), real
    generator_basis: np.ndarray
    labels: list[str] = field(default_factory=list)
    group_name: str = ""


def bloch_vectors(corr: CorrelationMatrix, labels=None,
                  group_name: str = "") -> BlochOrbit:
    """Bloch coordinates v_j[k] = tr(x_{xi_j, xi_j} s_k) of the factor-column
    projections; each state reconstructs as I/r + (1/2) v . s."""
    xis = corr.column_vectors()
    r, d = xis.shape
    sigma = gell_mann_basis(r)
    vectors = np.einsum("rj,ars,sj->ja", xis.conj(), sigma, xis).real
    return BlochOrbit(rank=r, vectors=vectors, generator_basis=sigma,
                      labels=list(labels) if labels else [f"g{k}" for k in range(d)],
                      group_name=group_name)


def affine_span_dim(vectors, rtol: float = RANK_RTOL) -> int:
    """Dimension of the affine span: rank of the centred difference matrix."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.shape[0] == 0:
        raise EmptyInput("need at least one vector")
    if vectors.shape[1] == 0:
        return 0
    centred = vectors - vectors.mean(axis=0)
    svals = np.linalg.svd(centred, compute_uv=False)
    if svals.size == 0 or svals[0] <= 0:
        return 0
    scale = max(svals[0], float(np.max(np.abs(vectors))), 1e-300)
    return int(np.sum(svals > rtol * scale))


@dataclass
class ExtremityCertificate:
    extreme: bool
    rank: int
    span_dim: int
    hermitian_dim: int
    multi_dimensional: bool
    real_valued: bool
    aqbc_violation: bool


def is_maximally_extreme(pdf: PositiveDefiniteFunction) -> ExtremityCertificate:
    """Extremality certificate for the Schur channel of pdf.

    A certified violation of the asymptotic quantum Birkhoff property requires
    extremality together with rank at least 2; real-valued correlation
    matrices yield factorisable channels and are never certified.
    """
    corr = correlation_matrix(pdf)
    report = is_extreme_correlation(corr)
    real_valued = corr.is_real()
    multi = corr.rank >= 2
    return ExtremityCertificate(
        extreme=report.extreme,
        rank=corr.rank,
        span_dim=report.span_dim,
        hermitian_dim=report.hermitian_dim,
        multi_dimensional=multi,
        real_valued=real_valued,
        aqbc_violation=report.extreme and multi and not real_valued,
    )


@dataclass
class RandomUnitaryDecomposition:
    weights: np.ndarray  # (2,)
    unitaries: np.ndarray  # (2, d, d), diagonal
    residual: float


@dataclass
class DichotomyResult:
    kind: str  # "extreme" | "random_unitary"
    decomposition: RandomUnitaryDecomposition | None = None


def _plane_normal(vectors: np.ndarray) -> np.ndarray:
    centred = vectors - vectors.mean(axis=0)
    _, svals, vh = np.linalg.svd(centred)
    normal = vh[-1]
    # coplanar input guaranteed by the caller; sign fixed for determinism
    for x in normal:
        if abs(x) > 1e-12:
            if x < 0:
                normal = -normal
            break
    return normal / np.linalg.norm(normal)


def dichotomy_decompose(corr: CorrelationMatrix,
                        atol: float = 1e-10) -> DichotomyResult:
    """Rank-2 dichotomy: extreme, or a 2-term mixture of diagonal unitaries.

    In the coplanar case the construction rotates the first factor column onto
    each of the others about the plane normal; the rotation phases and the
    alignment phases assemble two diagonal unitaries reproducing the Schur
    action exactly.
    """
    if corr.rank != 2:
        raise RankNotTwo(f"dichotomy needs rank 2, got {corr.rank}")
    orbit = bloch_vectors(corr)
    v = orbit.vectors
    if affine_span_dim(v) == 3:
        return DichotomyResult(kind="extreme")
    xis = corr.column_vectors()  # 2 x d
    d = xis.shape[1]
    centred = v - v.mean(axis=0)
    if np.max(np.abs(centred)) <= 1e-12:
        # all projections equal: a single unitary conjugation, split trivially
        normal = np.array([0.0, 0.0, 1.0])
        thetas = np.zeros(d)
    else:
        normal = _plane_normal(v)
        axis_part = v[0] - (v[0] @ normal) * normal
        if np.linalg.norm(axis_part) <= 1e-12:
            raise NumericalFailure("orbit collapsed onto the rotation axis")
        u1 = axis_part / np.linalg.norm(axis_part)
        u2 = np.cross(normal, u1)
        thetas = np.arctan2(v @ u2, v @ u1)
    n_sigma = normal[0] * PAULI_X + normal[1] * PAULI_Y + normal[2] * PAULI_Z
    xi1 = xis[:, 0]
    alphas = np.empty(d, dtype=complex)
    for j in range(d):
        rot = math.cos(thetas[j] / 2) * np.eye(2) - 1j * math.sin(thetas[j] / 2) * n_sigma
        moved = rot @ xi1
        k = int(np.argmax(np.abs(xis[:, j])))
        if abs(xis[k, j]) < 1e-9:
            raise NumericalFailure("degenerate factor column")
        alpha = moved[k] / xis[k, j]
        if abs(alpha) < 1e-9:
            raise NumericalFailure("rotation does not align the factor columns")
        alphas[j] = alpha / abs(alpha)
    evals, evecs = np.linalg.eigh(n_sigma)
    e_plus = evecs[:, int(np.argmax(evals))]
    e_minus = evecs[:, int(np.argmin(evals))]
    half = thetas / 2.0
    m1 = alphas * np.exp(1j * half)   # conj of the e_plus rotation eigenvalue
    m2 = alphas * np.exp(-1j * half)
    w1 = abs(np.vdot(e_plus, xi1)) ** 2
    w2 = abs(np.vdot(e_minus, xi1)) ** 2
    rebuilt = w1 * np.outer(m1, m1.conj()) + w2 * np.outer(m2, m2.conj())
    residual = float(np.max(np.abs(rebuilt - corr.matrix)))
    if residual > atol:
        raise NumericalFailure(
            f"random-unitary reconstruction residual {residual:.3e}")
    unitaries = np.stack([np.diag(m1), np.diag(m2)])
    return DichotomyResult(kind="random_unitary",
                           decomposition=RandomUnitaryDecomposition(
                               weights=np.array([w1, w2]),
                               unitaries=unitaries,
                               residual=residual))


@dataclass
class SearchHit:
    index: int
    xi: np.ndarray
    certificate: ExtremityCertificate
    refined: bool = False


@dataclass
class SearchResult:
    hits: list[SearchHit]
    rejected: list[tuple[int, str]]
    n_samples: int
    seed: int

    def hit_fraction(self) -> float:
        return len(self.hits) / self.n_samples if self.n_samples else 0.0


def _classify(rep: UnitaryRep, xi: np.ndarray):
    cert = is_maximally_extreme(pdf_from_rep(rep, xi))
    if cert.aqbc_violation:
        return cert, None
    if cert.real_valued:
        return cert, "real correlation matrix"
    if cert.rank < 2:
        return cert, "rank one"
    return cert, "not extreme"


def _refine(rep: UnitaryRep, xi: np.ndarray) -> np.ndarray:
    """Push a near-miss towards extremality by maximising the smallest needed
    singular value of the centred Bloch matrix."""
    from scipy.optimize import minimize

    target = rep.dim ** 2 - 1

    def objective(params):
        z = params[:rep.dim] + 1j * params[rep.dim:]
        norm = np.linalg.norm(z)
        if norm < 1e-9:
            return 0.0
        pdf = pdf_from_rep(rep, z / norm)
        corr = correlation_matrix(pdf)
        if corr.rank != rep.dim:
            return 0.0
        vec = bloch_vectors(corr).vectors
        centred = vec - vec.mean(axis=0)
        svals = np.linalg.svd(centred, compute_uv=False)
        return -float(svals[target - 1]) if svals.size >= target else 0.0

    x0 = np.concatenate([xi.real, xi.imag])
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"maxiter": 400, "xatol": 1e-10, "fatol": 1e-12})
    z = res.x[:rep.dim] + 1j * res.x[rep.dim:]
    return z / np.linalg.norm(z)


def aqbc_search(rep: UnitaryRep, n_samples: int, seed: int, *,
                optimize: bool = False, threads: int = 1) -> SearchResult:
    """Sample unit vectors on the representation sphere and certify the
    extremal ones; deterministic for a fixed seed, independent of threading.
    """
    if rep.dim < 2:
        raise RepresentationDimensionOne(
            "search needs a representation of dimension at least 2")
    if n_samples < 1:
        raise EmptyInput("need at least one sample")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n_samples, rep.dim)) \
        + 1j * rng.standard_normal((n_samples, rep.dim))
    xis = raw / np.linalg.norm(raw, axis=1, keepdims=True)

    def work(idx: int):
        return idx, _classify(rep, xis[idx])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(work, range(n_samples)))
    else:
        outcomes = [work(k) for k in range(n_samples)]
    outcomes.sort(key=lambda item: item[0])
    hits: list[SearchHit] = []
    rejected: list[tuple[int, str]] = []
    for idx, (cert, reason) in outcomes:
        if reason is None:
            hits.append(SearchHit(index=idx, xi=xis[idx], certificate=cert))
            continue
        if optimize and reason == "not extreme":
            refined_xi = _refine(rep, xis[idx])
            cert2, reason2 = _classify(rep, refined_xi)
            if reason2 is None:
                hits.append(SearchHit(index=idx, xi=refined_xi,
                                      certificate=cert2, refined=True))
                continue
        rejected.append((idx, reason))
    return SearchResult(hits=hits, rejected=rejected,
                        n_samples=n_samples, seed=seed)


def orbit_hull_volume(orbit: BlochOrbit) -> float | None:
    """Convex hull volume of a rank-2 orbit; None when degenerate.

    Exploratory metadata only; no structural claim is attached to it.
    """
    if orbit.rank != 2:
        return None
    try:
        from scipy.spatial import ConvexHull

        return float(ConvexHull(orbit.vectors).volume)
    except Exception:
        return None


def export_bloch_orbit(orbit: BlochOrbit, fmt: str = "csv",
                       include_hull: bool = False) -> str:
    """Serialise an orbit: one row per group element, label then coordinates.

    CSV carries the metadata (group, rank, affine span dimension) as leading
    comment lines; JSON mirrors the rows plus the same metadata.
    """
    from .serialize import dumps, format_float

    span = affine_span_dim(orbit.vectors)
    meta = {"group": orbit.group_name, "rank": orbit.rank,
            "affine_span_dim": span}
    if include_hull:
        meta["hull_volume"] = orbit_hull_volume(orbit)
    k = orbit.vectors.shape[1]
    if fmt == "json":
        rows = [{"label": orbit.labels[j], "v": list(orbit.vectors[j])}
                for j in range(orbit.vectors.shape[0])]
        return dumps({"metadata": meta, "rows": rows})
    if fmt != "csv":
        raise ValidationError(f"unknown export format {fmt!r}")
    lines = [f"# {key}={value}" for key, value in meta.items()]
    lines.append("label," + ",".join(f"v{i + 1}" for i in range(k)))
    for j in range(orbit.vectors.shape[0]):
        coords = ",".join(format_float(x) for x in orbit.vectors[j])
        lines.append(f"{orbit.labels[j]},{coords}")
    return "\n".join(lines) + "\n"
