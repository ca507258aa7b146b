"""Unitary representations, positive definite functions, and Fourier duality.

The regular representations use the finite-group conventions
l_s delta_t = delta_{st} and r_s delta_t = delta_{t s^{-1}}; both maps
s -> l_s and s -> r_s are then homomorphisms and commute entrywise.  (On a
non-unimodular group the right regular representation would carry a modular
correction factor; at finite scale that factor is identically 1 and is
dropped here.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import dagger, phase_fix, polar_unitary, spectral_norm
from .errors import (
    InvalidRep,
    NonAbelianGroup,
    NonUnitVector,
    NotNormalizedAtIdentity,
    NotPositiveDefinite,
    NumericalFailure,
    UnsupportedGroup,
)
from .groups import (
    Character,
    FiniteGroup,
    ProbabilityMeasure,
    characters,
    dual_group,
)

UNITARY_ATOL = 1e-10
PSD_ATOL = 1e-10
RANK_RTOL = 1e-9
OMEGA3 = np.exp(2j * np.pi / 3)


class UnitaryRep:
    """A homomorphism of a finite group into d x d unitary matrices."""

    def __init__(self, group: FiniteGroup, matrices, name=None, validate=True):
        matrices = np.asarray(matrices, dtype=complex)
        if matrices.ndim != 3 or matrices.shape[0] != group.order \
                or matrices.shape[1] != matrices.shape[2]:
            raise InvalidRep("need one square matrix per group element")
        d = matrices.shape[1]
        if validate:
            eye = np.eye(d)
            if spectral_norm(matrices[0] - eye) > UNITARY_ATOL:
                raise InvalidRep("identity element must map to the identity matrix")
            for s in group.elements():
                if spectral_norm(matrices[s] @ dagger(matrices[s]) - eye) > UNITARY_ATOL:
                    raise InvalidRep(f"matrix for element {s} is not unitary")
            for s in group.elements():
                prod = matrices[s] @ matrices
                expected = matrices[group.table[s]]
                if np.max(np.abs(prod - expected)) > UNITARY_ATOL:
                    raise InvalidRep("matrices do not respect the group product")
        matrices.setflags(write=False)
        self.group = group
        self.matrices = matrices
        self.dim = d
        self.name = name or f"rep{d}d"

    def matrix(self, s: int) -> np.ndarray:
        return self.matrices[s]

    def character_values(self) -> np.ndarray:
        return np.einsum("skk->s", self.matrices)

    def __repr__(self) -> str:
        return f"<UnitaryRep {self.name} dim={self.dim} on {self.group.name}>"


def left_regular(group: FiniteGroup) -> UnitaryRep:
    n = group.order
    mats = np.zeros((n, n, n), dtype=complex)
    for s in group.elements():
        mats[s, group.table[s], np.arange(n)] = 1.0
    return UnitaryRep(group, mats, name="left-regular", validate=False)


def right_regular(group: FiniteGroup) -> UnitaryRep:
    n = group.order
    mats = np.zeros((n, n, n), dtype=complex)
    for s in group.elements():
        mats[s, group.table[np.arange(n), group.inv(s)], np.arange(n)] = 1.0
    return UnitaryRep(group, mats, name="right-regular", validate=False)


def regular_reps(group: FiniteGroup) -> tuple[UnitaryRep, UnitaryRep]:
    return left_regular(group), right_regular(group)


def trivial_rep(group: FiniteGroup) -> UnitaryRep:
    return UnitaryRep(group, np.ones((group.order, 1, 1), dtype=complex),
                      name="trivial", validate=False)


def _char_rep(char: Character, name: str) -> UnitaryRep:
    return UnitaryRep(char.group, char.values.reshape(-1, 1, 1),
                      name=name, validate=False)


def _s3_two_dim_matrix(perm: tuple[int, int, int]) -> np.ndarray:
    """Standard 2-dim irreducible matrix of a permutation of three letters."""
    cycle = (1, 2, 0)
    flip = (1, 0, 2)
    rotations = {(0, 1, 2): 0, cycle: 1, (2, 0, 1): 2}
    if perm in rotations:
        eps, a = 0, rotations[perm]
    else:
        composed = tuple(flip[perm[k]] for k in range(3))
        eps, a = 1, rotations[composed]
    diag = np.diag([OMEGA3 ** a, OMEGA3 ** (-a)])
    if eps:
        return np.array([[0, 1], [1, 0]], dtype=complex) @ diag
    return diag


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        node = start
        while not seen[node]:
            seen[node] = True
            node = perm[node]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _symmetric_irreps(group: FiniteGroup, n: int) -> list[UnitaryRep]:
    perms = group._perms
    order = group.order
    trivial = trivial_rep(group)
    signs = np.array([_perm_sign(p) for p in perms], dtype=complex)
    sign_rep = UnitaryRep(group, signs.reshape(-1, 1, 1), name="sign", validate=False)
    if n == 3:
        two = np.stack([_s3_two_dim_matrix(p) for p in perms])
        return [trivial, sign_rep,
                UnitaryRep(group, two, name="standard-2d", validate=False)]
    # n == 4
    basis = np.array([
        [1, -1, 0, 0],
        [1, 1, -2, 0],
        [1, 1, 1, -3],
    ], dtype=float)
    basis = (basis / np.linalg.norm(basis, axis=1, keepdims=True)).T  # 4 x 3
    std = np.zeros((order, 3, 3), dtype=complex)
    for k, p in enumerate(perms):
        pm = np.zeros((4, 4))
        for j in range(4):
            pm[p[j], j] = 1.0
        std[k] = basis.T @ pm @ basis
    standard = UnitaryRep(group, std, name="standard-3d", validate=False)
    std_sign = UnitaryRep(group, signs[:, None, None] * std,
                          name="standard-3d-sign", validate=False)
    # 2-dim factor through the action on the three pairings of {1,2,3,4}
    pairings = [frozenset({frozenset({0, 1}), frozenset({2, 3})}),
                frozenset({frozenset({0, 2}), frozenset({1, 3})}),
                frozenset({frozenset({0, 3}), frozenset({1, 2})})]
    two = np.zeros((order, 2, 2), dtype=complex)
    for k, p in enumerate(perms):
        images = []
        for pairing in pairings:
            moved = frozenset(frozenset(p[x] for x in pair) for pair in pairing)
            images.append(pairings.index(moved))
        two[k] = _s3_two_dim_matrix(tuple(images))
    quotient_two = UnitaryRep(group, two, name="pairing-2d", validate=False)
    return [trivial, sign_rep, quotient_two, standard, std_sign]


def _dihedral_irreps(group: FiniteGroup, n: int) -> list[UnitaryRep]:
    order = group.order
    eps = np.arange(order) // n
    rot = np.arange(order) % n
    reps = []
    one_dim_pairs = [(1, 1), (1, -1)] if n % 2 else [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    for lam, nu in one_dim_pairs:
        vals = (np.asarray(lam, dtype=complex) ** rot) * (np.asarray(nu, dtype=complex) ** eps)
        reps.append(UnitaryRep(group, vals.reshape(-1, 1, 1),
                               name=f"chi({lam},{nu})", validate=False))
    omega = np.exp(2j * np.pi / n)
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    for h in range(1, (n + 1) // 2 if n % 2 else n // 2):
        mats = np.zeros((order, 2, 2), dtype=complex)
        for k in range(order):
            diag = np.diag([omega ** (h * rot[k]), omega ** (-h * rot[k])])
            mats[k] = flip @ diag if eps[k] else diag
        reps.append(UnitaryRep(group, mats, name=f"planar-{h}", validate=False))
    return reps


def _verify_catalog(group: FiniteGroup, reps: list[UnitaryRep]) -> list[UnitaryRep]:
    total = sum(r.dim ** 2 for r in reps)
    if total != group.order:
        raise InvalidRep(
            f"squared dimensions sum to {total}, expected {group.order}")
    chars = [r.character_values() for r in reps]
    n = group.order
    for i, ci in enumerate(chars):
        for j, cj in enumerate(chars):
            inner = np.vdot(cj, ci) / n
            if abs(inner - (1.0 if i == j else 0.0)) > 1e-8:
                raise InvalidRep(
                    "characters are not orthonormal; representations are not "
                    "a complete inequivalent irreducible family")
    return reps


def irrep_catalog(group: FiniteGroup, user_reps=None) -> list[UnitaryRep]:
    """Complete list of pairwise-inequivalent irreducible representations.

    Built in for abelian groups, dihedral groups up to D6, S3 and S4.  For
    anything else, pass ``user_reps``; they are verified (unitarity,
    homomorphism, character orthonormality, dimension count) but not derived.
    """
    if user_reps is not None:
        validated = [r if isinstance(r, UnitaryRep) else
                     UnitaryRep(group, r, validate=True) for r in user_reps]
        for r in validated:
            UnitaryRep(group, r.matrices, validate=True)
        return _verify_catalog(group, validated)
    if group.is_abelian:
        reps = [_char_rep(chi, name=f"chi{k}")
                for k, chi in enumerate(characters(group))]
        return _verify_catalog(group, reps)
    kind = group.kind or ()
    if kind[:1] == ("symmetric",) and kind[1] in (3, 4):
        return _verify_catalog(group, _symmetric_irreps(group, kind[1]))
    if kind[:1] == ("dihedral",) and kind[1] <= 6:
        return _verify_catalog(group, _dihedral_irreps(group, kind[1]))
    raise UnsupportedGroup(
        f"no built-in irreducible representations for {group.name}; "
        "supply them explicitly")


class PositiveDefiniteFunction:
    """Normalised positive definite function on a finite group."""

    def __init__(self, group: FiniteGroup, values, validate=True):
        values = np.asarray(values, dtype=complex)
        if values.shape != (group.order,):
            raise NotPositiveDefinite("values length must equal the group order")
        if validate:
            if abs(values[0] - 1.0) > 1e-9:
                raise NotNormalizedAtIdentity("value at the identity must be 1")
            report = check_positive_definite(values, group)
            if not report.ok:
                raise NotPositiveDefinite(
                    f"minimum eigenvalue {report.min_eigenvalue:.3e} below tolerance")
        values.setflags(write=False)
        self.group = group
        self.values = values

    def __getitem__(self, s: int) -> complex:
        return complex(self.values[s])

    def gram(self) -> np.ndarray:
        """Matrix with (s, t) entry values[s t^{-1}]."""
        g = self.group
        return self.values[g.table[:, g.inverse]]

    def one_set(self, tol: float = 1e-9) -> list[int]:
        """Elements where the function equals 1; always a subgroup."""
        return [int(s) for s in np.flatnonzero(np.abs(self.values - 1.0) <= tol)]

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.values.imag)) <= tol)

    def conjugate(self) -> "PositiveDefiniteFunction":
        return PositiveDefiniteFunction(self.group, self.values.conj(), validate=False)

    def __mul__(self, other: "PositiveDefiniteFunction") -> "PositiveDefiniteFunction":
        # pointwise products of positive definite functions stay positive definite
        return PositiveDefiniteFunction(self.group, self.values * other.values,
                                        validate=False)

    def __repr__(self) -> str:
        return f"<PositiveDefiniteFunction on {self.group.name}>"


def delta_pdf(group: FiniteGroup) -> PositiveDefiniteFunction:
    """Indicator of the identity element."""
    values = np.zeros(group.order, dtype=complex)
    values[0] = 1.0
    return PositiveDefiniteFunction(group, values, validate=False)


def constant_pdf(group: FiniteGroup) -> PositiveDefiniteFunction:
    return PositiveDefiniteFunction(group, np.ones(group.order, dtype=complex),
                                    validate=False)


def indicator_pdf(group: FiniteGroup, subgroup) -> PositiveDefiniteFunction:
    """Indicator of a subgroup (positive definite exactly for subgroups)."""
    values = np.zeros(group.order, dtype=complex)
    values[sorted({int(s) for s in subgroup})] = 1.0
    return PositiveDefiniteFunction(group, values, validate=True)


@dataclass
class PositiveDefiniteReport:
    ok: bool
    min_eigenvalue: float
    hermitian: bool


def check_positive_definite(values, group: FiniteGroup,
                            atol: float = PSD_ATOL) -> PositiveDefiniteReport:
    """Test whether [values(s t^{-1})] is PSD; reports the minimum eigenvalue.

    The minimum eigenvalue refers to the Hermitian part of the matrix, so a
    conjugate-symmetry failure also yields a definitive verdict.
    """
    values = np.asarray(values, dtype=complex)
    if abs(values[0] - 1.0) > 1e-9:
        raise NotNormalizedAtIdentity("value at the identity must be 1")
    gram = values[group.table[:, group.inverse]]
    herm_defect = float(np.max(np.abs(gram - dagger(gram))))
    hermitian = herm_defect <= atol
    min_eig = float(np.linalg.eigvalsh((gram + dagger(gram)) / 2.0)[0])
    return PositiveDefiniteReport(ok=hermitian and min_eig >= -atol,
                                  min_eigenvalue=min_eig, hermitian=hermitian)


def pdf_from_rep(rep: UnitaryRep, xi) -> PositiveDefiniteFunction:
    """Diagonal matrix coefficient s -> <pi(s) xi, xi> of a unit vector."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    if xi.shape != (rep.dim,):
        raise NonUnitVector("vector length must match the representation dimension")
    if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
        raise NonUnitVector("vector must be normalised to 1")
    values = np.einsum("i,sij,j->s", xi.conj(), rep.matrices, xi)
    return PositiveDefiniteFunction(rep.group, values, validate=False)


def correlation_factor(pdf: PositiveDefiniteFunction,
                       rtol: float = RANK_RTOL) -> np.ndarray:
    """Canonical d x r factor X with gram = X X†, columns by descending weight.

    Column j of X† is the j-th orbit vector pi(j)* xi of the cyclic
    representation recovered by ``gns``.
    """
    gram = pdf.gram()
    w, v = np.linalg.eigh((gram + dagger(gram)) / 2.0)
    w = w[::-1]
    v = v[:, ::-1]
    if w[0] <= 0:
        raise NotPositiveDefinite("gram matrix has no positive eigenvalue")
    rank = int(np.sum(w > rtol * w[0]))
    cols = [phase_fix(v[:, k]) * math.sqrt(max(w[k], 0.0)) for k in range(rank)]
    return np.stack(cols, axis=1)


@dataclass
class GnsResult:
    rep: UnitaryRep
    vector: np.ndarray
    rank: int


def gns(pdf: PositiveDefiniteFunction) -> GnsResult:
    """Cyclic representation (pi, xi) with pdf(s) = <pi(s) xi, xi>.

    Built from the eigendecomposition of the gram matrix [pdf(s t^{-1})]; the
    columns of the factor's adjoint are the orbit vectors pi(s)* xi, which
    span the representation space.
    """
    group = pdf.group
    x = correlation_factor(pdf)
    rank = x.shape[1]
    orbit = dagger(x)  # column s is pi(s)* xi
    pinv = np.linalg.pinv(orbit)
    mats = np.empty((group.order, rank, rank), dtype=complex)
    for u in group.elements():
        shifted = orbit[:, group.table[:, u]]
        mats[u] = polar_unitary(dagger(shifted @ pinv))
    rep = UnitaryRep(group, mats, name=f"gns-{rank}d", validate=True)
    xi = orbit[:, 0].copy()
    rebuilt = pdf_from_rep(rep, xi)
    if np.max(np.abs(rebuilt.values - pdf.values)) > 1e-10:
        raise NumericalFailure("cyclic representation does not reproduce the function")
    return GnsResult(rep=rep, vector=xi, rank=rank)


def fourier_matrix(group: FiniteGroup) -> np.ndarray:
    """Unitary F with F[chi, s] = conj(chi(s)) / sqrt(|G|).

    Satisfies F r_s F† = diag(chi(s) over the character ordering).
    """
    if not group.is_abelian:
        raise NonAbelianGroup("the Fourier matrix needs an abelian group")
    chars = characters(group)
    table = np.stack([chi.values for chi in chars])
    return table.conj() / math.sqrt(group.order)


def fourier_of_measure(mu: ProbabilityMeasure) -> PositiveDefiniteFunction:
    """Fourier-Stieltjes transform chi -> sum_s conj(chi(s)) mu(s) on the dual."""
    group = mu.group
    if not group.is_abelian:
        raise NonAbelianGroup("measure transforms need an abelian group")
    chars = characters(group)
    values = np.array([np.sum(chi.values.conj() * mu.weights) for chi in chars])
    return PositiveDefiniteFunction(dual_group(group), values, validate=True)


def random_pdf(group: FiniteGroup, rng: np.random.Generator) -> PositiveDefiniteFunction:
    """Generic normalised positive definite function, sampled as a vector
    state of the left regular representation."""
    psi = rng.standard_normal(group.order) + 1j * rng.standard_normal(group.order)
    psi /= np.linalg.norm(psi)
    return pdf_from_rep(left_regular(group), psi)
