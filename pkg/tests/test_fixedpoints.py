import numpy as np
import pytest

import groupchannels as gc
from groupchannels._linalg import contains_span, spectral_norm
from groupchannels.errors import NotAnAlgebra


def subgroups_of(group):
    seen = {(0,)}
    for s in group.elements():
        seen.add(tuple(gc.subgroup_generated(group, [s])))
        for t in group.elements():
            seen.add(tuple(gc.subgroup_generated(group, [s, t])))
    return [list(h) for h in sorted(seen)]


def test_fixed_point_space_identity_channel():
    space = gc.fixed_point_space(gc.identity_channel(3))
    assert space.dim == 9


def test_fixed_point_space_uniform_bit_flip():
    z2 = gc.cyclic(2)
    space = gc.fixed_point_space(gc.theta(gc.haar(z2)))
    assert space.dim == 2
    targets = np.stack([np.eye(2, dtype=complex),
                        np.array([[0, 1], [1, 0]], dtype=complex)])
    assert contains_span(targets, space.basis)


def test_fixed_point_space_adapted_schur_is_diagonal():
    g = gc.make_group("z2^2")
    chars = gc.characters(g)
    weights = np.array([0.4, 0.3, 0.2, 0.1])
    values = sum(w * c.values for w, c in zip(weights, chars))
    pdf = gc.PositiveDefiniteFunction(g, values)
    assert pdf.one_set() == [0]
    space = gc.fixed_point_space(gc.theta_hat(pdf))
    assert space.dim == 4
    diag = np.stack([np.diag(e) for e in np.eye(4, dtype=complex)])
    assert contains_span(diag, space.basis)


def test_fix_always_contains_translations_and_diagonal(s3):
    rng = np.random.default_rng(0)
    mu = gc.ProbabilityMeasure(s3, rng.dirichlet(np.ones(6)))
    space = gc.fixed_point_space(gc.theta(mu))
    assert contains_span(gc.left_regular(s3).matrices, space.basis, tol=1e-10)
    pdf = gc.random_pdf(s3, rng)
    space = gc.fixed_point_space(gc.theta_hat(pdf))
    diag = np.stack([np.diag(e) for e in np.eye(6, dtype=complex)])
    assert contains_span(diag, space.basis, tol=1e-10)


def test_fix_contained_in_fix_of_convolution_powers(s3):
    rng = np.random.default_rng(1)
    mu = gc.ProbabilityMeasure(s3, rng.dirichlet(np.ones(6)))
    space = gc.fixed_point_space(gc.theta(mu))
    power = mu
    for _ in range(4):
        power = gc.convolve(power, mu)
        bigger = gc.fixed_point_space(gc.theta(power))
        assert contains_span(space.basis, bigger.basis, tol=1e-8)


def test_harmonic_functions_dimensions():
    z4 = gc.cyclic(4)
    mu = gc.uniform_on(z4, [0, 2])
    basis = gc.harmonic_functions(mu)
    assert basis.shape[0] == 2
    # harmonic functions are constant on cosets of {0, 2}
    for f in basis:
        assert abs(f[0] - f[2]) <= 1e-10
        assert abs(f[1] - f[3]) <= 1e-10
    assert gc.harmonic_functions(gc.point_mass(z4, 0)).shape[0] == 4
    s3 = gc.symmetric(3)
    adapted = gc.ProbabilityMeasure(s3, [0.0, 0.5, 0.0, 0.5, 0.0, 0.0])
    assert gc.is_adapted(adapted)
    assert gc.harmonic_functions(adapted).shape[0] == 1


def test_verify_fix_theta_examples(s3):
    rng = np.random.default_rng(2)
    adapted = gc.ProbabilityMeasure(s3, rng.dirichlet(np.ones(6)))
    result = gc.verify_fix_theta(adapted)
    assert result.holds and result.lhs_dim == 6
    result = gc.verify_fix_theta(gc.point_mass(s3, 0))
    assert result.holds and result.lhs_dim == 36
    z4 = gc.cyclic(4)
    result = gc.verify_fix_theta(gc.uniform_on(z4, [0, 2]))
    assert result.holds and result.lhs_dim == 8


def test_verify_fix_theta_hat_examples(s3, paper_pdf):
    result = gc.verify_fix_theta_hat(gc.constant_pdf(s3))
    assert result.holds and result.lhs_dim == 36
    result = gc.verify_fix_theta_hat(paper_pdf)
    assert result.holds and result.lhs_dim == 6
    z4 = gc.cyclic(4)
    result = gc.verify_fix_theta_hat(gc.indicator_pdf(z4, [0, 2]))
    assert result.holds


def test_is_algebra():
    eye = np.eye(2, dtype=complex)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    good = gc.OperatorSubspace(2, np.stack([eye, x]) / np.sqrt(2))
    assert gc.is_algebra(good).verdict
    e01 = np.zeros((2, 2), dtype=complex)
    e01[0, 1] = 1.0
    bad = gc.OperatorSubspace(2, np.stack([eye / np.sqrt(2), e01]))
    report = gc.is_algebra(bad)
    assert not report.verdict
    assert report.witness is not None


def test_fixed_points_of_both_families_are_algebras(s3):
    rng = np.random.default_rng(3)
    for _ in range(3):
        mu = gc.ProbabilityMeasure(s3, rng.dirichlet(np.ones(6)))
        assert gc.is_algebra(gc.fixed_point_space(gc.theta(mu))).verdict
        pdf = gc.random_pdf(s3, rng)
        assert gc.is_algebra(gc.fixed_point_space(gc.theta_hat(pdf))).verdict


def test_structure_decomposition_group_algebra_d4():
    d4 = gc.dihedral(4)
    algebra = gc.generated_algebra(gc.left_regular(d4).matrices, 8)
    assert algebra.dim == 8
    dec = gc.structure_decomposition(algebra, seed=0)
    assert dec.blocks == [(2, 2), (1, 1), (1, 1), (1, 1), (1, 1)]
    assert dec.residual <= 1e-9
    u = dec.change_of_basis
    assert spectral_norm(u @ u.conj().T - np.eye(8)) <= 1e-9


def test_structure_decomposition_trivial_cases():
    scalars = gc.OperatorSubspace(4, (np.eye(4, dtype=complex) / 2.0).reshape(1, 4, 4))
    assert gc.structure_decomposition(scalars, seed=0).blocks == [(1, 4)]
    shift = np.roll(np.eye(3, dtype=complex), 1, axis=0)
    full = gc.generated_algebra([shift, np.diag([1.0, 2.0, 3.0]).astype(complex)], 3)
    assert full.dim == 9
    assert gc.structure_decomposition(full, seed=0).blocks == [(3, 1)]
    diag = gc.OperatorSubspace(3, np.stack([np.diag(e) for e in np.eye(3, dtype=complex)]))
    assert gc.structure_decomposition(diag, seed=0).blocks == [(1, 1)] * 3


def test_structure_decomposition_rejects_non_algebra():
    e01 = np.zeros((2, 2), dtype=complex)
    e01[0, 1] = 1.0
    eye = np.eye(2, dtype=complex) / np.sqrt(2)
    with pytest.raises(NotAnAlgebra):
        gc.structure_decomposition(gc.OperatorSubspace(2, np.stack([eye, e01])), seed=0)


def test_structure_decomposition_seed_invariant():
    d4 = gc.dihedral(4)
    algebra = gc.generated_algebra(gc.left_regular(d4).matrices, 8)
    blocks = {tuple(gc.structure_decomposition(algebra, seed=s).blocks)
              for s in range(10)}
    assert len(blocks) == 1


@pytest.mark.parametrize("alias,expected", [
    ("d4", [(2, 2), (1, 1), (1, 1), (1, 1), (1, 1)]),
    ("d4-semidirect", [(2, 2), (1, 1), (1, 1), (1, 1), (1, 1)]),
])
def test_noiseless_subsystems_d4(alias, expected):
    g = gc.make_group(alias)
    report = gc.noiseless_subsystems(gc.theta(gc.haar(g)), seed=0)
    assert report.blocks == expected
    assert report.noiseless == [0]


def test_noiseless_subsystems_s3_and_abelian(s3):
    rng = np.random.default_rng(4)
    report = gc.noiseless_subsystems(
        gc.theta(gc.ProbabilityMeasure(s3, rng.dirichlet(np.ones(6)))), seed=0)
    assert report.blocks == [(2, 2), (1, 1), (1, 1)]
    assert report.noiseless == [0]
    assert report.peter_weyl_dims == [2, 1, 1]
    assert report.peter_weyl_match is True
    assert report.coefficient_functions is not None
    assert report.coefficient_functions.shape == (6, 6)
    z4 = gc.cyclic(4)
    report = gc.noiseless_subsystems(
        gc.theta(gc.ProbabilityMeasure(z4, rng.dirichlet(np.ones(4)))), seed=0)
    assert report.blocks == [(1, 1)] * 4
    assert report.noiseless == []


def test_noiseless_blocks_match_irrep_dims_for_adapted_measures():
    rng = np.random.default_rng(5)
    for alias in ("z4", "d4", "s3"):
        group = gc.make_group(alias)
        mu = gc.ProbabilityMeasure(group, rng.dirichlet(np.ones(group.order)))
        report = gc.noiseless_subsystems(gc.theta(mu), seed=0)
        dims = sorted(r.dim for r in gc.irrep_catalog(group))
        assert sorted(n for n, _ in report.blocks) == dims
        assert all(n == m for n, m in report.blocks)


def test_exhaustive_subgroup_grid_fix_theorems():
    for alias in ("z4", "z6", "s3"):
        group = gc.make_group(alias)
        for sub in subgroups_of(group):
            mu = gc.uniform_on(group, sub)
            result = gc.verify_fix_theta(mu)
            assert result.holds, (alias, sub)
            pdf = gc.indicator_pdf(group, sub)
            result = gc.verify_fix_theta_hat(pdf)
            assert result.holds, (alias, sub)


def test_diagonal_group_algebra_intersection(s3):
    assert gc.diagonal_group_algebra_intersection_dim(s3) == 1
    assert gc.diagonal_group_algebra_intersection_dim(gc.cyclic(4)) == 1
    assert gc.diagonal_group_algebra_intersection_dim(gc.make_group("d4-semidirect")) == 1
