import numpy as np
import pytest

import groupchannels as gc


@pytest.fixture(scope="session")
def s3():
    return gc.symmetric(3)


@pytest.fixture(scope="session")
def s3_two_dim(s3):
    return next(r for r in gc.irrep_catalog(s3) if r.dim == 2)


@pytest.fixture(scope="session")
def paper_xi():
    return np.array([1j, 3.0]) / np.sqrt(10)


@pytest.fixture(scope="session")
def paper_pdf(s3_two_dim, paper_xi):
    return gc.pdf_from_rep(s3_two_dim, paper_xi)


def random_measure(group, rng):
    return gc.ProbabilityMeasure(group, rng.dirichlet(np.ones(group.order)))
