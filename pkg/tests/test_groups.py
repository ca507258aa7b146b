import numpy as np
import pytest

import groupchannels as gc
from groupchannels.errors import (
    EmptyGeneratorSet,
    NoIdentity,
    NonAbelianGroup,
    NonAssociativeTable,
    NotASubgroup,
    UnsupportedDescriptor,
    ValidationError,
)


def test_cyclic_two_table():
    g = gc.cyclic(2)
    assert g.order == 2
    assert g.table.tolist() == [[0, 1], [1, 0]]


@pytest.mark.parametrize("group", [
    gc.cyclic(1), gc.cyclic(5), gc.product(gc.cyclic(2), gc.cyclic(3)),
    gc.dihedral(4), gc.symmetric(3), gc.symmetric(4),
    gc.make_group("d4-semidirect"),
])
def test_group_axioms_exhaustive(group):
    n = group.order
    t = group.table
    assert np.array_equal(t[0], np.arange(n))
    assert np.array_equal(t[:, 0], np.arange(n))
    for s in range(n):
        assert t[s, group.inv(s)] == 0
        assert t[group.inv(s), s] == 0
        assert group.inv(group.inv(s)) == s
    assert np.array_equal(t[t], t[:, t])


def test_semidirect_d4_has_two_order_four_elements():
    g = gc.make_group("d4-semidirect")
    assert g.order == 8
    orders = sorted(g.element_order(s) for s in g.elements())
    assert orders.count(4) == 2


def test_symmetric_three_order_and_commutativity():
    g = gc.symmetric(3)
    assert g.order == 6
    assert not g.is_abelian
    assert g.labels == ["e", "(123)", "(132)", "(12)", "(23)", "(13)"]


def test_explicit_rejects_bad_tables():
    with pytest.raises(NoIdentity):
        gc.explicit([[1, 0], [0, 1]])
    # left-invertible latin square that is not associative
    bad = [[0, 1, 2, 3, 4],
           [1, 0, 3, 4, 2],
           [2, 4, 0, 1, 3],
           [3, 2, 4, 0, 1],
           [4, 3, 1, 2, 0]]
    with pytest.raises((NonAssociativeTable, ValidationError)):
        gc.explicit(bad)
    with pytest.raises(UnsupportedDescriptor):
        gc.symmetric(6)


def test_make_group_aliases():
    assert gc.make_group("z6").order == 6
    assert gc.make_group("z2^3").order == 8
    assert gc.make_group("z2xz3").order == 6
    assert gc.make_group("d5").order == 10
    assert gc.make_group("s4").order == 24
    with pytest.raises(UnsupportedDescriptor):
        gc.make_group("q8")


def test_subgroup_generated():
    z4 = gc.cyclic(4)
    assert gc.subgroup_generated(z4, [2]) == [0, 2]
    s3 = gc.symmetric(3)
    # single transposition closes to an order-2 subgroup
    assert gc.subgroup_generated(s3, [3]) == [0, 3]
    # a transposition and a 3-cycle generate everything
    assert gc.subgroup_generated(s3, [3, 1]) == list(range(6))
    with pytest.raises(EmptyGeneratorSet):
        gc.subgroup_generated(s3, [])


def test_left_cosets():
    z4 = gc.cyclic(4)
    assert gc.left_cosets(z4, [0, 2]) == [[0, 2], [1, 3]]
    assert gc.left_cosets(z4, range(4)) == [[0, 1, 2, 3]]
    s3 = gc.symmetric(3)
    cosets = gc.left_cosets(s3, [0, 3])
    assert len(cosets) == 3
    assert all(len(c) == 2 for c in cosets)
    assert sorted(x for c in cosets for x in c) == list(range(6))
    with pytest.raises(NotASubgroup):
        gc.left_cosets(z4, [0, 1])


def test_adapted_iff_single_coset():
    z4 = gc.cyclic(4)
    for support in ([1], [2], [0, 2], [1, 2]):
        mu = gc.uniform_on(z4, support)
        sub = gc.subgroup_generated(z4, support)
        single = len(gc.left_cosets(z4, sub)) == 1
        assert gc.is_adapted(mu) == (len(sub) == 4) == single


def test_characters_z2():
    chars = gc.characters(gc.cyclic(2))
    values = sorted(tuple(np.round(c.values.real, 12)) for c in chars)
    assert values == [(1.0, -1.0), (1.0, 1.0)]


def test_characters_cyclic_formula():
    d = 5
    zd = gc.cyclic(d)
    chars = gc.characters(zd)
    for s in range(d):
        for t in range(d):
            assert chars[s][t] == pytest.approx(np.exp(2j * np.pi * s * t / d), abs=1e-12)


def test_characters_power_of_two_group_are_products():
    g = gc.make_group("z2^3")
    chars = gc.characters(g)
    assert len(chars) == 8
    base = gc.characters(gc.cyclic(2))
    for m, chi in enumerate(chars):
        digits = [(m >> 2) & 1, (m >> 1) & 1, m & 1]
        for t in range(8):
            bits = [(t >> 2) & 1, (t >> 1) & 1, t & 1]
            expected = np.prod([base[d][b] for d, b in zip(digits, bits)])
            assert chi[t] == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("group", [
    gc.cyclic(6), gc.product(gc.cyclic(2), gc.cyclic(4)), gc.dihedral(2)])
def test_character_orthogonality(group):
    chars = gc.characters(group)
    assert len(chars) == group.order
    n = group.order
    for i, a in enumerate(chars):
        for j, b in enumerate(chars):
            inner = np.sum(a.values * b.values.conj()) / n
            assert abs(inner - (1.0 if i == j else 0.0)) <= 1e-12


def test_characters_form_group_under_product():
    g = gc.cyclic(4)
    chars = gc.characters(g)
    table = set()
    for a in chars:
        for b in chars:
            prod = (a * b).values
            matches = [k for k, c in enumerate(chars)
                       if np.max(np.abs(c.values - prod)) < 1e-10]
            assert len(matches) == 1
            table.add(matches[0])
    assert table == set(range(4))


def test_characters_need_abelian():
    with pytest.raises(NonAbelianGroup):
        gc.characters(gc.symmetric(3))


def test_convolution_unit_and_point_masses():
    s3 = gc.symmetric(3)
    rng = np.random.default_rng(11)
    mu = gc.ProbabilityMeasure(s3, rng.dirichlet(np.ones(6)))
    out = gc.convolve(gc.point_mass(s3, 0), mu)
    assert np.allclose(out.weights, mu.weights, atol=1e-15)
    out = gc.convolve(mu, gc.point_mass(s3, 0))
    assert np.allclose(out.weights, mu.weights, atol=1e-15)
    for s in range(6):
        for t in range(6):
            conv = gc.convolve(gc.point_mass(s3, s), gc.point_mass(s3, t))
            assert conv.weights[s3.mul(s, t)] == pytest.approx(1.0)


def test_convolution_z2_closed_form():
    z2 = gc.cyclic(2)
    p, q = 0.3, 0.25
    conv = gc.convolve(gc.ProbabilityMeasure(z2, [1 - p, p]),
                       gc.ProbabilityMeasure(z2, [1 - q, q]))
    assert conv.weights[0] == pytest.approx(1 - p - q + 2 * p * q, abs=1e-15)
    assert conv.weights[1] == pytest.approx(p + q - 2 * p * q, abs=1e-15)


@pytest.mark.parametrize("group", [gc.cyclic(4), gc.symmetric(3), gc.dihedral(6)])
def test_convolution_associative_and_haar_absorbing(group):
    rng = np.random.default_rng(5)
    n = group.order
    mu = gc.ProbabilityMeasure(group, rng.dirichlet(np.ones(n)))
    nu = gc.ProbabilityMeasure(group, rng.dirichlet(np.ones(n)))
    rho = gc.ProbabilityMeasure(group, rng.dirichlet(np.ones(n)))
    lhs = gc.convolve(gc.convolve(mu, nu), rho)
    rhs = gc.convolve(mu, gc.convolve(nu, rho))
    assert np.max(np.abs(lhs.weights - rhs.weights)) <= 1e-14
    h = gc.haar(group)
    assert np.max(np.abs(gc.convolve(h, mu).weights - h.weights)) <= 1e-14
    assert np.max(np.abs(gc.convolve(mu, h).weights - h.weights)) <= 1e-14


def test_haar_is_uniform():
    assert np.allclose(gc.haar(gc.cyclic(2)).weights, [0.5, 0.5])
    assert np.allclose(gc.haar(gc.symmetric(3)).weights, np.full(6, 1 / 6))


def test_measure_validation():
    z2 = gc.cyclic(2)
    with pytest.raises(ValidationError):
        gc.ProbabilityMeasure(z2, [0.9, -0.1])
    with pytest.raises(ValidationError):
        gc.ProbabilityMeasure(z2, [0.9, 0.3])
    # small drift is renormalised, large drift rejected
    m = gc.ProbabilityMeasure(z2, [0.5 + 2e-10, 0.5])
    assert m.weights.sum() == pytest.approx(1.0, abs=1e-15)


def test_measure_reflect():
    z4 = gc.cyclic(4)
    mu = gc.ProbabilityMeasure(z4, [0.4, 0.3, 0.2, 0.1])
    assert np.allclose(mu.reflect().weights, [0.4, 0.1, 0.2, 0.3])


def test_cyclic_factorization_derived():
    # abelian group without construction metadata
    d2 = gc.dihedral(2)
    orders, exponents = gc.cyclic_factorization(d2)
    assert sorted(orders) == [2, 2]
    assert exponents.shape == (4, 2)
    assert len({tuple(row) for row in exponents}) == 4


def test_quotient_group():
    z6 = gc.cyclic(6)
    q, coset_of = gc.quotient_group(z6, [0, 3])
    assert q.order == 3
    assert coset_of[0] == coset_of[3]
