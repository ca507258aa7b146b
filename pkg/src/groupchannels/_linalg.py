"""Small dense linear-algebra helpers shared across modules."""

from __future__ import annotations

import numpy as np


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def spectral_norm(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Trace inner product tr(a† b)."""
    return complex(np.vdot(a, b))


def polar_unitary(m: np.ndarray) -> np.ndarray:
    """Closest unitary in Frobenius norm (polar factor)."""
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def is_hermitian(m: np.ndarray, atol: float = 1e-10) -> bool:
    return spectral_norm(m - dagger(m)) <= atol


def phase_fix(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate a global phase so the largest-magnitude entry is positive real."""
    idx = int(np.argmax(np.abs(v)))
    pivot = v[idx]
    if abs(pivot) <= tol:
        return v
    return v * (pivot.conjugate() / abs(pivot))


def orthonormal_rows(vectors: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (as rows) of the row span, rank cut at rtol."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[1]), dtype=complex)
    _, s, vh = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, vectors.shape[1]), dtype=complex)
    rank = int(np.sum(s > rtol * s[0]))
    return vh[:rank]


def matrix_span_basis(mats, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal (trace inner product) basis of the span of d x d matrices."""
    mats = np.asarray(mats, dtype=complex)
    k, d, _ = mats.shape
    rows = orthonormal_rows(mats.reshape(k, d * d), rtol=rtol)
    return rows.reshape(-1, d, d)


def span_projector(mats) -> np.ndarray:
    """Orthogonal projector (d^2 x d^2) onto the span of vectorised matrices."""
    mats = np.asarray(mats, dtype=complex)
    k, d, _ = mats.shape
    rows = orthonormal_rows(mats.reshape(k, d * d))
    return rows.T @ rows.conj()


def same_span(mats_a, mats_b, tol: float = 1e-9) -> bool:
    pa = span_projector(mats_a)
    pb = span_projector(mats_b)
    return spectral_norm(pa - pb) <= tol


def contains_span(sub, sup, tol: float = 1e-9) -> bool:
    """True when span(sub) is contained in span(sup)."""
    p_sup = span_projector(sup)
    sub = np.asarray(sub, dtype=complex)
    k, d, _ = sub.shape
    vecs = sub.reshape(k, d * d)
    resid = vecs - vecs @ p_sup.T
    scale = max(1.0, float(np.max(np.abs(vecs))) if vecs.size else 1.0)
    return float(np.max(np.abs(resid))) <= tol * scale if vecs.size else True


def null_space_rows(m: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (rows) of {x : m x = 0}, singular values below atol."""
    m = np.asarray(m, dtype=complex)
    _, s, vh = np.linalg.svd(m)
    ncols = m.shape[1]
    nkeep = int(np.sum(s <= atol))
    nkeep += ncols - s.size
    if nkeep == 0:
        return np.zeros((0, ncols), dtype=complex)
    # rows of vh are conjugated right singular vectors; undo the conjugation
    return vh[ncols - nkeep:].conj()


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def cluster_values(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted real values into clusters separated by gaps above tol.

    Returns index arrays into the original (unsorted) values, clusters ordered
    by descending value.
    """
    order = np.argsort(values)[::-1]
    clusters: list[list[int]] = [[int(order[0])]]
    for idx in order[1:]:
        if abs(values[idx] - values[clusters[-1][-1]]) <= tol:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    return [np.array(c, dtype=int) for c in clusters]
