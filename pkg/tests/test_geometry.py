import json

import numpy as np
import pytest

import groupchannels as gc
from groupchannels._linalg import spectral_norm
from groupchannels.errors import EmptyInput, RankNotTwo, RepresentationDimensionOne

SQ3 = np.sqrt(3.0)


def paper_matrix():
    a, b, c = -0.5, (2 / 5) * SQ3, (3 / 10) * SQ3
    return np.array([
        [1, a + b * 1j, a - b * 1j, 0, -c, c],
        [a - b * 1j, 1, a + b * 1j, c, 0, -c],
        [a + b * 1j, a - b * 1j, 1, -c, c, 0],
        [0, c, -c, 1, a - b * 1j, a + b * 1j],
        [-c, 0, c, a + b * 1j, 1, a - b * 1j],
        [c, -c, 0, a - b * 1j, a + b * 1j, 1],
    ])


def test_correlation_matrix_displayed_entries(paper_pdf):
    corr = gc.correlation_matrix(paper_pdf)
    assert np.max(np.abs(corr.matrix - paper_matrix())) <= 1e-12
    assert corr.rank == 2
    assert spectral_norm(corr.factor @ corr.factor.conj().T - corr.matrix) <= 1e-10


def test_correlation_matrix_delta_and_constant(s3):
    assert np.allclose(gc.correlation_matrix(gc.delta_pdf(s3)).matrix, np.eye(6))
    corr = gc.correlation_matrix(gc.constant_pdf(s3))
    assert np.allclose(corr.matrix, np.ones((6, 6)))
    assert corr.rank == 1


def test_correlation_gram_consistency(s3):
    rng = np.random.default_rng(0)
    pdf = gc.random_pdf(s3, rng)
    corr = gc.correlation_matrix(pdf)
    result = gc.gns(pdf)
    orbit = np.stack([result.rep.matrices[s].conj().T @ result.vector
                      for s in s3.elements()], axis=1)
    gram = orbit.conj().T @ orbit
    assert np.max(np.abs(gram - corr.matrix)) <= 1e-10


def test_gell_mann_basis_properties():
    for r in (2, 3, 4):
        sigma = gc.gell_mann_basis(r)
        assert sigma.shape == (r * r - 1, r, r)
        for a, sa in enumerate(sigma):
            assert spectral_norm(sa - sa.conj().T) <= 1e-14
            assert abs(np.trace(sa)) <= 1e-14
            for b, sb in enumerate(sigma):
                want = 2.0 if a == b else 0.0
                assert np.trace(sa @ sb) == pytest.approx(want, abs=1e-13)
    pauli = gc.gell_mann_basis(2)
    assert np.allclose(pauli[0], [[0, 1], [1, 0]])
    assert np.allclose(pauli[1], [[0, -1j], [1j, 0]])
    assert np.allclose(pauli[2], [[1, 0], [0, -1]])


def test_extremality_paper_cases(s3_two_dim, paper_pdf):
    report = gc.is_extreme_correlation(gc.correlation_matrix(paper_pdf))
    assert report.extreme
    assert report.span_dim == 4
    assert report.rank == 2
    flat = gc.pdf_from_rep(s3_two_dim, np.array([1.0, 0.0]))
    report = gc.is_extreme_correlation(gc.correlation_matrix(flat))
    assert not report.extreme


def test_extremality_delta_not_extreme(s3):
    corr = gc.correlation_matrix(gc.delta_pdf(s3))
    report = gc.is_extreme_correlation(corr)
    assert not report.extreme
    assert report.span_dim == 6  # diagonal projections only
    assert report.hermitian_dim == 36


def test_bloch_vectors_reconstruction_and_norms(paper_pdf):
    corr = gc.correlation_matrix(paper_pdf)
    orbit = gc.bloch_vectors(corr)
    assert orbit.vectors.shape == (6, 3)
    norms = np.linalg.norm(orbit.vectors, axis=1)
    assert np.max(np.abs(norms - 1.0)) <= 1e-9  # pure qubit states
    xis = corr.column_vectors()
    for j in range(6):
        state = np.eye(2) / 2
        for k, sigma in enumerate(orbit.generator_basis):
            state = state + 0.5 * orbit.vectors[j, k] * sigma
        proj = np.outer(xis[:, j], xis[:, j].conj())
        assert spectral_norm(state - proj) <= 1e-10


def test_bloch_vector_basis_point():
    corr = gc.CorrelationMatrix(matrix=np.eye(2, dtype=complex), rank=2,
                                factor=np.eye(2, dtype=complex))
    orbit = gc.bloch_vectors(corr)
    # projection onto e1 sits at the north pole under the (X, Y, Z) ordering
    assert np.allclose(orbit.vectors[0], [0, 0, 1], atol=1e-12)
    assert np.allclose(orbit.vectors[1], [0, 0, -1], atol=1e-12)


def test_bloch_norm_bound_higher_rank(s3):
    rng = np.random.default_rng(1)
    for _ in range(5):
        pdf = gc.random_pdf(s3, rng)
        corr = gc.correlation_matrix(pdf)
        orbit = gc.bloch_vectors(corr)
        bound = np.sqrt(2 * (corr.rank - 1) / corr.rank) + 1e-9
        assert np.max(np.linalg.norm(orbit.vectors, axis=1)) <= bound


def test_affine_span_dim_basics():
    assert gc.affine_span_dim(np.array([[1.0, 2.0, 3.0]])) == 0
    pts = np.array([[0.0, 0, 0], [1, 1, 1], [2, 2, 2]])
    assert gc.affine_span_dim(pts) == 1
    assert gc.affine_span_dim(np.zeros((4, 0))) == 0
    with pytest.raises(EmptyInput):
        gc.affine_span_dim(np.zeros((0, 3)))


def test_affine_span_paper_orbits(s3_two_dim, paper_pdf):
    orbit = gc.bloch_vectors(gc.correlation_matrix(paper_pdf))
    assert gc.affine_span_dim(orbit.vectors) == 3
    coplanar = gc.pdf_from_rep(s3_two_dim, np.array([1.0, 1j]) / np.sqrt(2))
    orbit = gc.bloch_vectors(gc.correlation_matrix(coplanar))
    assert gc.affine_span_dim(orbit.vectors) == 2


def test_is_maximally_extreme_certificates(s3_two_dim, paper_pdf):
    cert = gc.is_maximally_extreme(paper_pdf)
    assert cert.extreme and cert.rank == 2 and cert.span_dim == 4
    assert cert.aqbc_violation and not cert.real_valued
    z4 = gc.cyclic(4)
    chi = gc.characters(z4)[1]
    cert = gc.is_maximally_extreme(gc.PositiveDefiniteFunction(z4, chi.values))
    assert cert.rank == 1 and not cert.aqbc_violation
    # real correlation matrix: flag withheld even with rank >= 2
    coplanar = gc.pdf_from_rep(s3_two_dim, np.array([1.0, 1j]) / np.sqrt(2))
    cert = gc.is_maximally_extreme(coplanar)
    assert cert.real_valued and cert.rank == 2 and not cert.aqbc_violation


def test_dichotomy_extreme_branch(paper_pdf):
    result = gc.dichotomy_decompose(gc.correlation_matrix(paper_pdf))
    assert result.kind == "extreme"
    assert result.decomposition is None


def test_dichotomy_random_unitary_branch(s3_two_dim):
    pdf = gc.pdf_from_rep(s3_two_dim, np.array([1.0, 1j]) / np.sqrt(2))
    corr = gc.correlation_matrix(pdf)
    result = gc.dichotomy_decompose(corr)
    assert result.kind == "random_unitary"
    dec = result.decomposition
    assert dec.residual <= 1e-10
    assert np.sum(dec.weights) == pytest.approx(1.0, abs=1e-10)
    # decomposition reproduces the Schur channel on every matrix unit
    ch = gc.theta_hat(pdf)
    w1, w2 = dec.weights
    m1, m2 = dec.unitaries
    for a in range(6):
        for b in range(6):
            e = np.zeros((6, 6), dtype=complex)
            e[a, b] = 1.0
            rebuilt = w1 * m1 @ e @ m1.conj().T + w2 * m2 @ e @ m2.conj().T
            assert spectral_norm(rebuilt - ch.apply(e)) <= 1e-10
    # the mixture of unitary conjugations is again bistochastic
    mix = gc.QuantumChannel([np.sqrt(w1) * m1, np.sqrt(w2) * m2])
    assert gc.is_bistochastic(mix).verdict


def test_dichotomy_phase_flip_weights():
    z2 = gc.cyclic(2)
    p = 0.3
    corr = gc.correlation_matrix(gc.PositiveDefiniteFunction(z2, [1, 1 - 2 * p]))
    dec = gc.dichotomy_decompose(corr).decomposition
    assert np.allclose(np.sort(dec.weights), [p, 1 - p], atol=1e-12)
    for u in dec.unitaries:
        d = np.diag(u)
        ratio = d / d[0]
        assert abs(abs(d[0]) - 1.0) <= 1e-12
        assert min(abs(ratio[1] - 1.0), abs(ratio[1] + 1.0)) <= 1e-12


def test_dichotomy_rank_guard(s3):
    with pytest.raises(RankNotTwo):
        gc.dichotomy_decompose(gc.correlation_matrix(gc.delta_pdf(s3)))


def test_criteria_agree_on_seeded_samples():
    rng = np.random.default_rng(42)
    groups = [gc.symmetric(3), gc.dihedral(4), gc.cyclic(4)]
    checked = 0
    for group in groups:
        for rep in gc.irrep_catalog(group):
            for _ in range(8):
                z = rng.standard_normal(rep.dim) + 1j * rng.standard_normal(rep.dim)
                pdf = gc.pdf_from_rep(rep, z / np.linalg.norm(z))
                corr = gc.correlation_matrix(pdf)
                span_test = gc.is_extreme_correlation(corr).extreme
                orbit = gc.bloch_vectors(corr)
                affine_test = gc.affine_span_dim(orbit.vectors) == corr.rank ** 2 - 1
                assert span_test == affine_test
                checked += 1
    assert checked == 96


def test_aqbc_search_deterministic(s3_two_dim):
    first = gc.aqbc_search(s3_two_dim, 200, seed=5)
    second = gc.aqbc_search(s3_two_dim, 200, seed=5)
    threaded = gc.aqbc_search(s3_two_dim, 200, seed=5, threads=3)
    for other in (second, threaded):
        assert len(first.hits) == len(other.hits)
        for a, b in zip(first.hits, other.hits):
            assert a.index == b.index
            assert np.array_equal(a.xi, b.xi)
    assert first.hit_fraction() >= 0.99


def test_aqbc_search_certifies_paper_vector(s3_two_dim, paper_xi):
    cert = gc.is_maximally_extreme(gc.pdf_from_rep(s3_two_dim, paper_xi))
    assert cert.aqbc_violation


def test_aqbc_search_rejects_dimension_one():
    z3 = gc.cyclic(3)
    rep = gc.irrep_catalog(z3)[1]
    with pytest.raises(RepresentationDimensionOne):
        gc.aqbc_search(rep, 10, seed=0)


def test_refinement_escapes_flat_orbits(s3_two_dim):
    from groupchannels.geometry import _classify, _refine

    flat = np.array([1.0, 0.0])
    cert, reason = _classify(s3_two_dim, flat)
    assert reason == "not extreme"
    refined = _refine(s3_two_dim, flat)
    cert, reason = _classify(s3_two_dim, refined)
    assert reason is None and cert.aqbc_violation
    # real-matrix samples are rejected, not refined
    real = np.array([1.0, 1j]) / np.sqrt(2)
    _, reason = _classify(s3_two_dim, real)
    assert reason == "real correlation matrix"
    result = gc.aqbc_search(s3_two_dim, 30, seed=3, optimize=True)
    assert result.hit_fraction() >= 0.9


def test_export_bloch_orbit_csv_and_json(s3, s3_two_dim, paper_pdf):
    corr = gc.correlation_matrix(paper_pdf)
    orbit = gc.bloch_vectors(corr, labels=s3.labels, group_name=s3.name)
    csv_text = gc.export_bloch_orbit(orbit, "csv")
    lines = csv_text.strip().splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    assert any("affine_span_dim=3" in ln for ln in meta)
    header = next(ln for ln in lines if ln.startswith("label"))
    assert header == "label,v1,v2,v3"
    rows = [ln for ln in lines if not ln.startswith("#") and not ln.startswith("label")]
    assert len(rows) == 6
    assert rows[0].split(",")[0] == "e"
    payload = json.loads(gc.export_bloch_orbit(orbit, "json"))
    assert payload["metadata"]["rank"] == 2
    assert payload["metadata"]["affine_span_dim"] == 3
    assert len(payload["rows"]) == 6
    # figure-2 style orbit: coplanar metadata
    coplanar = gc.pdf_from_rep(s3_two_dim, np.array([1.0, 1j]) / np.sqrt(2))
    orbit2 = gc.bloch_vectors(gc.correlation_matrix(coplanar), labels=s3.labels)
    payload2 = json.loads(gc.export_bloch_orbit(orbit2, "json", include_hull=True))
    assert payload2["metadata"]["affine_span_dim"] <= 2
    assert len(payload2["rows"]) == 6


def test_export_single_point_orbit():
    z1 = gc.cyclic(1)
    pdf = gc.constant_pdf(z1)
    corr = gc.correlation_matrix(pdf)
    orbit = gc.bloch_vectors(corr, labels=z1.labels)
    csv_text = gc.export_bloch_orbit(orbit, "csv")
    rows = [ln for ln in csv_text.strip().splitlines()
            if not ln.startswith("#") and not ln.startswith("label")]
    assert len(rows) == 1
