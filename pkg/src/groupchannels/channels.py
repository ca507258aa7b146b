"""Quantum channels as Kraus families, with the two group constructions.

A channel stores Kraus operators (a_i) and acts on matrices as
x -> sum_i a_i x a_i†; ``heisenberg`` applies the adjoint family instead.
For the bistochastic families built here the adjoint action equals the
primary action with a reflected parameter (measure pushed through inversion,
function conjugated), so both pictures are available without ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import dagger, polar_unitary, spectral_norm
from .errors import (
    DimensionMismatch,
    NonAbelianGroup,
    UnsupportedDescriptor,
    ValidationError,
)
from .groups import FiniteGroup, ProbabilityMeasure, characters, haar
from .reps import (
    PositiveDefiniteFunction,
    correlation_factor,
    delta_pdf,
    fourier_matrix,
    fourier_of_measure,
    right_regular,
)

KRAUS_DROP = 1e-14
CHANNEL_ATOL = 1e-10


class QuantumChannel:
    """Completely positive trace-preserving map given by Kraus operators."""

    def __init__(self, kraus, *, meta=None, validate=True):
        arr = np.asarray(kraus, dtype=complex)
        if arr.ndim != 3:
            raise ValidationError("kraus must be a list of equal-shape matrices")
        dim_out, dim_in = arr.shape[1], arr.shape[2]
        # drop negligible operators so Choi/complement ranks stay honest
        weights = np.einsum("ijk,ijk->i", arr.conj(), arr).real / dim_in
        arr = arr[weights > KRAUS_DROP]
        if arr.shape[0] == 0:
            raise ValidationError("channel needs at least one Kraus operator")
        if validate:
            gram = np.einsum("ikj,ikl->jl", arr.conj(), arr)
            tp_residual = spectral_norm(gram - np.eye(dim_in))
            if tp_residual > CHANNEL_ATOL:
                raise ValidationError(
                    f"Kraus family is not trace preserving (residual {tp_residual:.3e})")
        arr.setflags(write=False)
        self.kraus = arr
        self.dim_in = dim_in
        self.dim_out = dim_out
        self.meta = dict(meta) if meta else {}

    @property
    def n_kraus(self) -> int:
        return int(self.kraus.shape[0])

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim_in, self.dim_in):
            raise DimensionMismatch("input matrix has the wrong shape")
        return np.einsum("iab,bc,idc->ad", self.kraus, x, self.kraus.conj())

    def heisenberg(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim_out, self.dim_out):
            raise DimensionMismatch("input matrix has the wrong shape")
        return np.einsum("iba,bc,icd->ad", self.kraus.conj(), x, self.kraus)

    def superoperator(self) -> np.ndarray:
        """Matrix of apply() on row-major vectorised matrices."""
        return sum(np.kron(a, a.conj()) for a in self.kraus)

    def heisenberg_superoperator(self) -> np.ndarray:
        return sum(np.kron(dagger(a), a.T) for a in self.kraus)

    def __repr__(self) -> str:
        return (f"<QuantumChannel {self.dim_in}->{self.dim_out} "
                f"kraus={self.n_kraus}>")


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel([np.eye(dim, dtype=complex)], meta={"kind": "identity"})


def theta(mu: ProbabilityMeasure) -> QuantumChannel:
    """Average of conjugations by right translations, weighted by mu."""
    group = mu.group
    reg = right_regular(group).matrices
    kraus = [np.sqrt(mu[s]) * reg[s] for s in group.elements() if mu[s] > KRAUS_DROP]
    return QuantumChannel(kraus, meta={"kind": "theta", "group": group, "measure": mu})


def theta_hat(pdf: PositiveDefiniteFunction) -> QuantumChannel:
    """Schur multiplication by the correlation matrix [pdf(s t^{-1})].

    The Kraus operators are the diagonals of the columns of the canonical
    gram factor; there are rank-many of them and they commute.
    """
    group = pdf.group
    x = correlation_factor(pdf)
    kraus = [np.diag(x[:, i]) for i in range(x.shape[1])]
    return QuantumChannel(kraus, meta={"kind": "theta_hat", "group": group,
                                       "pdf": pdf, "rank": x.shape[1]})


def conditional_expectation(group: FiniteGroup, target: str) -> QuantumChannel:
    """Trace-preserving conditional expectation onto the diagonal masa
    (``"diagonal"``) or onto the span of left translations (``"group_algebra"``)."""
    key = target.lower().replace("-", "_")
    if key == "diagonal":
        ch = theta_hat(delta_pdf(group))
    elif key == "group_algebra":
        ch = theta(haar(group))
    else:
        raise UnsupportedDescriptor(f"unknown conditional expectation target {target!r}")
    ch.meta["kind"] = "conditional_expectation"
    ch.meta["target"] = key
    return ch


def compose(phi: QuantumChannel, psi: QuantumChannel) -> QuantumChannel:
    """Composition phi after psi, Kraus family {a_i b_j}."""
    if psi.dim_out != phi.dim_in:
        raise DimensionMismatch("inner dimensions do not match")
    kraus = [a @ b for a in phi.kraus for b in psi.kraus]
    return QuantumChannel(kraus, meta={"kind": "compose"})


def tensor(phi: QuantumChannel, psi: QuantumChannel) -> QuantumChannel:
    kraus = [np.kron(a, b) for a in phi.kraus for b in psi.kraus]
    return QuantumChannel(kraus, meta={"kind": "tensor"})


def complement(phi: QuantumChannel) -> QuantumChannel:
    """Complementary channel: [b_j]_{ik} = [a_i]_{jk}, mapping states to the
    environment of the Stinespring dilation."""
    kraus = phi.kraus.transpose(1, 0, 2)
    return QuantumChannel(kraus, meta={"kind": "complement"})


@dataclass
class ChoiMatrix:
    """Choi operator J = sum_{s,t} E_st (x) Phi(E_st), input factor first.

    Unnormalised convention: the partial trace over the output factor is the
    identity on the input space.
    """
    matrix: np.ndarray
    dim_in: int
    dim_out: int

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def rank(self, rtol: float = 1e-9) -> int:
        ev = self.eigenvalues()
        return int(np.sum(ev > rtol * max(ev[0], 1e-300)))


def choi(phi: QuantumChannel) -> ChoiMatrix:
    vecs = phi.kraus.transpose(0, 2, 1).reshape(phi.n_kraus, -1)
    matrix = np.einsum("ia,ib->ab", vecs, vecs.conj())
    return ChoiMatrix(matrix=matrix, dim_in=phi.dim_in, dim_out=phi.dim_out)


@dataclass
class BistochasticReport:
    unital_residual: float
    tp_residual: float
    verdict: bool


def is_bistochastic(phi: QuantumChannel, atol: float = CHANNEL_ATOL) -> BistochasticReport:
    """Checks both Kraus sums against the identity."""
    if phi.dim_in != phi.dim_out:
        return BistochasticReport(np.inf, np.inf, False)
    eye = np.eye(phi.dim_in)
    unital = np.einsum("iab,icb->ac", phi.kraus, phi.kraus.conj())
    tp = np.einsum("iba,ibc->ac", phi.kraus.conj(), phi.kraus)
    ur = spectral_norm(unital - eye)
    tr = spectral_norm(tp - eye)
    return BistochasticReport(ur, tr, max(ur, tr) <= atol)


def is_unitary_conjugation(phi: QuantumChannel, atol: float = CHANNEL_ATOL):
    """The implementing unitary when the Choi rank is 1, else None."""
    if phi.dim_in != phi.dim_out:
        return None
    j = choi(phi)
    evals, evecs = np.linalg.eigh(j.matrix)
    if evals[-1] <= 0 or (evals.size > 1 and evals[-2] > 1e-9 * evals[-1]):
        return None
    top = evecs[:, -1] * np.sqrt(evals[-1])
    candidate = top.reshape(phi.dim_in, phi.dim_out).T
    unitary = polar_unitary(candidate)
    d = phi.dim_in
    for a in range(d):
        for b in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[a, b] = 1.0
            if spectral_norm(unitary @ unit @ dagger(unitary) - phi.apply(unit)) > atol:
                return None
    return unitary


def weyl_covariant(q: ProbabilityMeasure) -> QuantumChannel:
    """Channel with Kraus sqrt(q(s,t)) r_s M_{chi^t} on a cyclic group.

    ``q`` must live on the direct product of two copies of the same cyclic
    group; the first coordinate drives the translation, the second the
    character multiplier.
    """
    group = q.group
    factors = group._cyclic_factors
    if not factors or len(factors) != 2 or factors[0] != factors[1]:
        raise UnsupportedDescriptor(
            "weyl_covariant needs a measure on Z_d x Z_d")
    d = factors[0]
    from .groups import cyclic

    zd = cyclic(d)
    reg = right_regular(zd).matrices
    chars = characters(zd)
    kraus = []
    for s in range(d):
        for t in range(d):
            w = q[s * d + t]
            if w > KRAUS_DROP:
                kraus.append(np.sqrt(w) * reg[s] @ np.diag(chars[t].values))
    return QuantumChannel(kraus, meta={"kind": "weyl", "dim": d, "measure": q})


def duality_check(mu: ProbabilityMeasure, atol: float = CHANNEL_ATOL) -> float:
    """Residual of the Fourier unitary equivalence between the translation
    channel of mu and the Schur channel of its transform.

    The translation channel enters through its state-picture (adjoint)
    action, which is the primary action of the inversion-reflected measure;
    with the conjugated transform convention this is the orientation that
    makes the equivalence exact.
    """
    group = mu.group
    if not group.is_abelian:
        raise NonAbelianGroup("duality needs an abelian group")
    f = fourier_matrix(group)
    fh = dagger(f)
    lhs = theta(mu.reflect())
    rhs = theta_hat(fourier_of_measure(mu))
    n = group.order
    worst = 0.0
    for a in range(n):
        for b in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[a, b] = 1.0
            left = f @ lhs.apply(fh @ unit @ f) @ fh
            worst = max(worst, spectral_norm(left - rhs.apply(unit)))
    return worst
