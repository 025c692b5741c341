"""Exception hierarchy.

Every domain failure carries a stable ``code`` (the class name) so the CLI
can report it without parsing messages.
"""


class OrbitkitError(Exception):
    """Base class for mathematical/domain failures."""

    @property
    def code(self) -> str:
        return type(self).__name__


# spectral_core
class ProfileError(OrbitkitError, ValueError):
    pass


class DuplicateEigenvalue(ProfileError):
    pass


class ZeroListedAsEigenvalue(ProfileError):
    pass


class BadMultiplicity(ProfileError):
    pass


class DimensionTooSmall(OrbitkitError, ValueError):
    pass


class DimensionMismatch(OrbitkitError, ValueError):
    pass


class NotNormal(OrbitkitError, ValueError):
    pass


# dense_linalg
class NotHermitian(OrbitkitError, ValueError):
    pass


class NoConvergence(OrbitkitError, ArithmeticError):
    pass


class SingularInput(OrbitkitError, ArithmeticError):
    pass


class NotAProjection(OrbitkitError, ValueError):
    pass


# symmetric_norms
class UnsortedInput(OrbitkitError, ValueError):
    pass


class ReferenceTooShort(OrbitkitError, ValueError):
    pass


# expectations
class InconsistentFamily(OrbitkitError, ValueError):
    pass


class CommutantMismatch(OrbitkitError, ArithmeticError):
    """The commutator test and the expectation test disagreed."""


# commutator_analysis
class ExpectationNonzero(OrbitkitError, ValueError):
    pass


class RepeatedBlockValue(OrbitkitError, ValueError):
    pass


class TooFewEigenvalues(OrbitkitError, ValueError):
    pass


class NotPartialIsometry(OrbitkitError, ValueError):
    pass


class InitialSpaceMismatch(OrbitkitError, ValueError):
    pass


# orbit_analysis
class InexactProfile(OrbitkitError, ValueError):
    pass


class NotInClosure(OrbitkitError, ValueError):
    pass


class CellMassMismatch(OrbitkitError, ValueError):
    pass


class SpectrumTooClose(OrbitkitError, ValueError):
    pass


class SpectrumMismatch(OrbitkitError, ValueError):
    """Matrix argument's spectrum is not near the profile's nodes."""


# counterexamples
class NotDecreasing(OrbitkitError, ValueError):
    pass


class NotBiNormalizing(OrbitkitError, ValueError):
    pass


class BadIndex(OrbitkitError, ValueError):
    pass
