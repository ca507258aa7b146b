"""Exception hierarchy used across the package."""


class GroupChannelsError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GroupChannelsError, ValueError):
    """Input fails a structural precondition."""


class NumericalFailure(GroupChannelsError, RuntimeError):
    """A numerical routine could not certify its result."""


class NonAssociativeTable(ValidationError):
    """Multiplication table is not associative."""


class NoIdentity(ValidationError):
    """Element 0 is not a two-sided identity."""


class NoInverse(ValidationError):
    """Some element has no two-sided inverse."""


class UnsupportedDescriptor(ValidationError):
    """Group descriptor not recognised or outside the supported caps."""


class EmptyGeneratorSet(ValidationError):
    """Subgroup generation requires at least one generator."""


class NotASubgroup(ValidationError):
    """Element set is not closed under product and inverse."""


class NonAbelianGroup(ValidationError):
    """Operation requires an abelian group."""


class UnsupportedGroup(ValidationError):
    """No built-in irreducible representations for this group."""


class InvalidRep(ValidationError):
    """Matrices fail the unitarity or homomorphism checks."""


class NonUnitVector(ValidationError):
    """Vector is not normalised."""


class NotPositiveDefinite(ValidationError):
    """Function fails the positive-definiteness test."""


class NotNormalizedAtIdentity(ValidationError):
    """Function does not take the value 1 at the identity."""


class DimensionMismatch(ValidationError):
    """Operand dimensions are incompatible."""


class RankNotTwo(ValidationError):
    """Operation requires a rank-2 correlation matrix."""


class RepresentationDimensionOne(ValidationError):
    """Search requires a representation of dimension at least 2."""


class EmptyInput(ValidationError):
    """Operation requires a nonempty input."""


class NotAState(ValidationError):
    """Matrix is not a valid density matrix."""


class NotAnAlgebra(ValidationError):
    """Operator subspace is not closed under products and adjoints."""


class FixedPointsNotAlgebra(ValidationError):
    """Fixed-point space of the channel is not an algebra."""
