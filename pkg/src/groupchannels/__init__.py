"""Quantum channels from finite-group data.

Two dual channel families act on matrices indexed by a finite group: the
translation channels average conjugation by right translations over a
probability measure, and the Schur channels multiply entrywise by the
correlation matrix of a normalised positive definite function.  The package
constructs both families, verifies their structure (bistochasticity,
commutation, fixed-point algebras, noiseless subsystems), analyses the
correlation-matrix geometry behind extremality and random-unitary
decompositions, and computes capacities, minimum output entropies,
entanglement-breaking verdicts, and the abelian Fourier duality.
"""

__version__ = "0.1.0"

from .errors import (
    GroupChannelsError,
    NumericalFailure,
    ValidationError,
)
from .groups import (
    Character,
    FiniteGroup,
    ProbabilityMeasure,
    characters,
    convolve,
    cyclic,
    cyclic_factorization,
    dihedral,
    dual_group,
    explicit,
    haar,
    is_adapted,
    is_subgroup,
    left_cosets,
    make_group,
    point_mass,
    product,
    quotient_group,
    semidirect,
    subgroup_generated,
    symmetric,
    uniform_on,
)
from .reps import (
    GnsResult,
    PositiveDefiniteFunction,
    UnitaryRep,
    check_positive_definite,
    constant_pdf,
    correlation_factor,
    delta_pdf,
    fourier_matrix,
    fourier_of_measure,
    gns,
    indicator_pdf,
    irrep_catalog,
    left_regular,
    pdf_from_rep,
    random_pdf,
    regular_reps,
    right_regular,
    trivial_rep,
)
from .channels import (
    ChoiMatrix,
    QuantumChannel,
    choi,
    complement,
    compose,
    conditional_expectation,
    duality_check,
    identity_channel,
    is_bistochastic,
    is_unitary_conjugation,
    tensor,
    theta,
    theta_hat,
    weyl_covariant,
)
from .geometry import (
    BlochOrbit,
    CorrelationMatrix,
    DichotomyResult,
    ExtremityCertificate,
    affine_span_dim,
    aqbc_search,
    bloch_vectors,
    correlation_from_matrix,
    correlation_matrix,
    dichotomy_decompose,
    export_bloch_orbit,
    gell_mann_basis,
    is_extreme_correlation,
    is_maximally_extreme,
)
from .spectra import (
    CapacityResult,
    EbReport,
    MoeEstimate,
    PptReport,
    choi_ppt,
    coherent_information,
    eb_test,
    min_output_entropy,
    moe_theta_hat_restricted,
    moe_theta_restricted,
    schur_capacity,
    shannon_entropy,
    von_neumann_entropy,
)
from .fixedpoints import (
    AlgebraDecomposition,
    FixComparison,
    NoiselessReport,
    OperatorSubspace,
    diagonal_group_algebra_intersection_dim,
    fixed_point_space,
    generated_algebra,
    harmonic_functions,
    is_algebra,
    noiseless_subsystems,
    structure_decomposition,
    verify_fix_theta,
    verify_fix_theta_hat,
)
