"""Entropies, coherent information, Schur-channel capacity, minimum output
entropy, and entanglement-breaking tests.

All logarithms are base 2; entropies and capacities are reported in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import dagger, spectral_norm
from .errors import DimensionMismatch, NotAState, ValidationError
from .channels import ChoiMatrix, QuantumChannel, choi, complement
from .groups import ProbabilityMeasure, haar
from .reps import PositiveDefiniteFunction, gns

EIG_CLIP = 1e-10       # eigenvalues in [-EIG_CLIP, 0) are treated as noise
ENTROPY_FLOOR = 1e-15  # below this an eigenvalue contributes 0 log 0 = 0


def _clipped_spectrum(rho: np.ndarray, atol: float) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotAState("state must be a square matrix")
    if spectral_norm(rho - dagger(rho)) > atol:
        raise NotAState("state must be Hermitian")
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < -EIG_CLIP:
        raise NotAState(f"state has eigenvalue {evals[0]:.3e} below tolerance")
    if abs(evals.sum() - 1.0) > atol:
        raise NotAState(f"state has trace {evals.sum():.12f}, not 1")
    return np.clip(evals, 0.0, None)


def entropy_of_spectrum(evals: np.ndarray) -> float:
    evals = np.asarray(evals, dtype=float)
    kept = evals[evals >= ENTROPY_FLOOR]
    return max(float(-np.sum(kept * np.log2(kept))), 0.0)


def von_neumann_entropy(rho, atol: float = 1e-10) -> float:
    """Entropy -tr(rho log2 rho) in bits of a density matrix."""
    return entropy_of_spectrum(_clipped_spectrum(np.asarray(rho), atol))


def shannon_entropy(mu: ProbabilityMeasure | np.ndarray) -> float:
    weights = mu.weights if isinstance(mu, ProbabilityMeasure) else np.asarray(mu, float)
    return entropy_of_spectrum(weights)


def coherent_information(phi: QuantumChannel, rho) -> float:
    """S(phi(rho)) - S(phi_complement(rho)) in bits."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (phi.dim_in, phi.dim_in):
        raise DimensionMismatch("state dimension does not match the channel")
    out = von_neumann_entropy(phi.apply(rho))
    env = von_neumann_entropy(complement(phi).apply(rho))
    return out - env


def _log2_on_support(rho: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(rho)
    logs = np.where(evals > ENTROPY_FLOOR, np.log2(np.clip(evals, ENTROPY_FLOOR, None)), 0.0)
    return (evecs * logs) @ dagger(evecs)


@dataclass
class CapacityResult:
    value: float
    argmax_measure: ProbabilityMeasure
    iterations: int
    optimality_gap: float


def _capacity_objective(mu: np.ndarray, projections: np.ndarray) -> float:
    rho = np.tensordot(mu, projections, axes=1)
    return shannon_entropy(mu) - entropy_of_spectrum(
        np.clip(np.linalg.eigvalsh(rho), 0.0, None))


def _capacity_trace_terms(mu: np.ndarray, projections: np.ndarray) -> np.ndarray:
    rho = np.tensordot(mu, projections, axes=1)
    log_rho = _log2_on_support(rho)
    return np.einsum("sij,ji->s", projections, log_rho).real


def schur_capacity(pdf: PositiveDefiniteFunction, *, seed: int = 0,
                   restarts: int = 32, tol: float = 1e-9,
                   max_iter: int = 100_000) -> CapacityResult:
    """Quantum capacity of the Schur channel of pdf.

    Maximises H(mu) - S(sum_s mu(s) x_{pi(s) xi, pi(s) xi}) over the
    probability simplex by exponentiated-gradient ascent with backtracking,
    restarted from the uniform measure, smoothed point masses, and seeded
    random starts; the objective is concave so the gap certificate is global.
    """
    group = pdf.group
    n = group.order
    result = gns(pdf)
    orbit = np.einsum("sij,j->si", result.rep.matrices, result.vector)
    projections = np.einsum("si,sj->sij", orbit, orbit.conj())
    rng = np.random.default_rng(seed)

    starts = [np.full(n, 1.0 / n)]
    for s in range(n):
        w = np.full(n, 1e-12)
        w[s] = 1.0
        starts.append(w / w.sum())
    for _ in range(restarts):
        starts.append(rng.dirichlet(np.ones(n)))

    best_value = -np.inf
    best_mu = starts[0]
    best_iters = 0
    best_gap = np.inf
    for start in starts:
        mu = np.clip(np.asarray(start, float), 1e-300, None)
        mu = mu / mu.sum()
        value = _capacity_objective(mu, projections)
        iters = 0
        gap = np.inf
        while iters < max_iter:
            trace_terms = _capacity_trace_terms(mu, projections)
            grad = -np.log2(np.clip(mu, 1e-300, None)) + trace_terms
            gap = float(np.max(grad) - np.dot(mu, grad))
            if gap < tol:
                break
            iters += 1
            # unit-step multiplicative update solves the stationarity
            # condition directly; fall back to damped steps if it overshoots
            candidate = np.exp2(trace_terms - np.max(trace_terms))
            candidate /= candidate.sum()
            cand_value = _capacity_objective(candidate, projections)
            if cand_value >= value:
                mu, value = candidate, cand_value
                continue
            step = 0.5
            improved = False
            for _ in range(50):
                damped = mu * np.exp2(step * (grad - np.max(grad)))
                damped /= damped.sum()
                damped_value = _capacity_objective(damped, projections)
                if damped_value > value:
                    mu, value = damped, damped_value
                    improved = True
                    break
                step /= 2.0
            if not improved:
                break
        if value > best_value + 1e-15:
            best_value, best_mu, best_iters, best_gap = value, mu, iters, gap
    best_value = max(best_value, 0.0)
    return CapacityResult(value=float(best_value),
                          argmax_measure=ProbabilityMeasure(group, best_mu),
                          iterations=best_iters,
                          optimality_gap=float(best_gap))


@dataclass
class MoeEstimate:
    value: float
    witness: np.ndarray
    restarts: int


def _canonical_starts(dim: int) -> list[np.ndarray]:
    starts = [np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)]
    for k in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[k] = 1.0
        starts.append(e)
    return starts


def min_output_entropy(phi: QuantumChannel, *, restarts: int = 64,
                       seed: int = 0, iters: int = 300) -> MoeEstimate:
    """Upper bound on the minimum output entropy over pure input states.

    Multi-start projected gradient descent; the uniform vector and every
    basis vector are always included as starts, so the exact fixed pure
    states of the translation and Schur families are found at once.
    """
    rng = np.random.default_rng(seed)
    dim = phi.dim_in
    starts = _canonical_starts(dim)
    while len(starts) < restarts + dim + 1:
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        starts.append(z / np.linalg.norm(z))

    def output_entropy(z: np.ndarray) -> float:
        sigma = phi.apply(np.outer(z, z.conj()))
        return entropy_of_spectrum(np.clip(np.linalg.eigvalsh(sigma), 0.0, None))

    best_value = np.inf
    best_witness = starts[0]
    for start in starts:
        z = start.copy()
        value = output_entropy(z)
        step = 0.5
        for _ in range(iters):
            sigma = phi.apply(np.outer(z, z.conj()))
            log_sigma = _log2_on_support(sigma)
            pulled = phi.heisenberg(log_sigma)
            trace_term = float(np.einsum("ij,ji->", sigma, log_sigma).real)
            grad = -pulled @ z + trace_term * z
            if np.linalg.norm(grad) < 1e-13:
                break
            moved = False
            for _ in range(30):
                cand = z - step * grad
                norm = np.linalg.norm(cand)
                if norm > 1e-12:
                    cand = cand / norm
                    cand_value = output_entropy(cand)
                    if cand_value < value - 1e-14:
                        z, value = cand, cand_value
                        step *= 1.5
                        moved = True
                        break
                step /= 2.0
            if not moved:
                break
        if value < best_value:
            best_value, best_witness = value, z
    return MoeEstimate(value=float(best_value), witness=best_witness,
                       restarts=len(starts))


def moe_theta_restricted(mu: ProbabilityMeasure) -> float:
    """Minimum output entropy of the translation channel restricted to the
    diagonal subalgebra: exactly the Shannon entropy of mu."""
    return shannon_entropy(mu)


def moe_theta_hat_restricted(pdf: PositiveDefiniteFunction) -> float:
    """Minimum output entropy of the Schur channel restricted to the span of
    left translations: the entropy of the normalised correlation matrix."""
    return von_neumann_entropy(pdf.gram() / pdf.group.order)


@dataclass
class PptReport:
    verdict: bool
    min_pt_eigenvalue: float


def partial_transpose_choi(j: ChoiMatrix) -> np.ndarray:
    """Transpose the output factor of the Choi operator."""
    din, dout = j.dim_in, j.dim_out
    blocks = j.matrix.reshape(din, dout, din, dout)
    return blocks.transpose(0, 3, 2, 1).reshape(din * dout, din * dout)


def choi_ppt(phi: QuantumChannel, atol: float = 1e-10) -> PptReport:
    """PPT test on the Choi state (scaled to match the maximally entangled
    input convention, so eigenvalues are state-sized)."""
    if phi.dim_in != phi.dim_out:
        raise DimensionMismatch("PPT test needs a square channel")
    pt = partial_transpose_choi(choi(phi)) / phi.dim_in
    min_eig = float(np.linalg.eigvalsh(pt)[0])
    return PptReport(verdict=min_eig >= -atol, min_pt_eigenvalue=min_eig)


@dataclass
class EbReport:
    verdict: str  # "EB" | "NotEB"
    reason: str
    min_pt_eigenvalue: float | None = None

    @property
    def entanglement_breaking(self) -> bool:
        return self.verdict == "EB"


def eb_test(obj, atol: float = 1e-12) -> EbReport:
    """Entanglement-breaking verdict for a Schur channel (positive definite
    function input) or a translation channel (probability measure input).

    The Schur channel breaks entanglement exactly when the function is the
    identity indicator; the translation channel exactly when the group is
    abelian and the measure is uniform.  NotEB verdicts attach the minimum
    partial-transpose eigenvalue of the Choi state when it is negative.
    """
    if isinstance(obj, PositiveDefiniteFunction):
        off_identity = float(np.max(np.abs(obj.values[1:]))) if obj.group.order > 1 else 0.0
        if off_identity <= atol:
            return EbReport(verdict="EB", reason="function is the identity indicator")
        from .channels import theta_hat

        ppt = choi_ppt(theta_hat(obj))
        return EbReport(verdict="NotEB",
                        reason="function is nonzero away from the identity",
                        min_pt_eigenvalue=None if ppt.verdict else ppt.min_pt_eigenvalue)
    if isinstance(obj, ProbabilityMeasure):
        group = obj.group
        if not group.is_abelian:
            from .channels import theta

            ppt = choi_ppt(theta(obj))
            return EbReport(verdict="NotEB", reason="nonabelian group",
                            min_pt_eigenvalue=None if ppt.verdict else ppt.min_pt_eigenvalue)
        uniform = haar(group)
        if float(np.max(np.abs(obj.weights - uniform.weights))) <= atol:
            return EbReport(verdict="EB", reason="uniform measure on an abelian group")
        from .channels import theta

        ppt = choi_ppt(theta(obj))
        return EbReport(verdict="NotEB", reason="measure differs from uniform",
                        min_pt_eigenvalue=None if ppt.verdict else ppt.min_pt_eigenvalue)
    raise ValidationError(
        "eb_test expects a PositiveDefiniteFunction or a ProbabilityMeasure")
