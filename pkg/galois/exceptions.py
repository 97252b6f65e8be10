"""Exception hierarchy shared by the library and the management commands."""


class GaloisImageError(Exception):
    """Base class for every error raised by the galois app."""


class DomainError(GaloisImageError):
    """An argument is outside the domain of the operation."""


class CRTConflict(DomainError):
    """Two congruences have no common solution."""


class NotAUnit(DomainError):
    """A matrix or residue that must be invertible is not."""


class BadLevel(DomainError):
    """A modulus does not divide, or is not coprime to, another as required."""


class BadPrime(DomainError):
    """A prime of bad reduction, or a prime the operation does not handle."""


class NotASubgroup(GaloisImageError):
    """A group is not contained in the ambient group it was checked against."""


class GroupTooLarge(GaloisImageError):
    """Closure would exceed the configured element cap."""


class SearchTooLarge(GaloisImageError):
    """An exhaustive search would exceed its configured cap."""


class OutOfScope(GaloisImageError):
    """The input curve is outside what the algorithm covers."""


class NotCM(OutOfScope):
    """The j-invariant is not one of the 13 rational CM j-invariants."""


class Unsupported(OutOfScope):
    """A non-simplest curve with j = 0 or 1728."""


class NotSimplest(GaloisImageError):
    """The curve is not Q-isomorphic to any embedded simplest curve."""


class InternalInvariantViolation(GaloisImageError):
    """A property guaranteed by the theory failed; the inputs are inconsistent."""


class DataIntegrityError(GaloisImageError):
    """The embedded simplest-curve table failed a load-time check."""


class CurveParseError(GaloisImageError):
    """A curve specification or LMFDB label could not be parsed."""


class LMFDBUnavailable(GaloisImageError):
    """A label could not be fetched and no cached copy exists."""


class VerificationError(GaloisImageError):
    """Base class for failed independent checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FrobeniusMismatch(VerificationError):
    """Some Frobenius trace/determinant pair has no matching image element."""


class EntanglementMismatch(VerificationError):
    """The Cartan index pattern at M, ell^n and N-dagger is not (2; 1, 1)."""


class DifferentiationMismatch(VerificationError):
    """Conjugacy at level M disagrees with isomorphism over Q."""


class DeterminantMismatch(VerificationError):
    """Determinants are not all units, or the Cartan part is not cut out by the field character."""


class LevelSupportMismatch(VerificationError):
    """The minimal level and the computed level have different prime divisors."""
