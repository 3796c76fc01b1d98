class LatnabError(Exception):
    # Base of every error raised on purpose. The CLI exits with exit_code.
    exit_code = 1


# Domain errors: the input lattice, vector or matrix is not acceptable (exit 1)
class DomainError(LatnabError):
    exit_code = 1

class DimensionMismatchError(DomainError):...
class NotSquareError(DomainError):...
class RankDeficientError(DomainError):...
class SingularMatrixError(DomainError):...
class NotPositiveDefiniteError(DomainError):...
class NotIntegralError(DomainError):...
class NotSublatticeError(DomainError):...
class NotProperCosetError(DomainError):...
class IndexNotTwoError(DomainError):...
class NonIntegralNeighborError(DomainError):...
class VenkovPreconditionError(DomainError):...
class UnknownLatticeError(DomainError):...
class LatticeFormatError(DomainError):...
class IndeterminateIsometryError(DomainError):...
class InvalidValueError(DomainError, ValueError):...  # configuration or argument value


# Budget errors: the computation was refused because it is too large (exit 2)
class BudgetExceededError(LatnabError):
    exit_code = 2

class QuotientTooLargeError(BudgetExceededError):...
class PairwiseBudgetError(BudgetExceededError):...


# Reproduce harness found a difference not recorded as a known typo (exit 3)
class ReproduceMismatchError(LatnabError):
    exit_code = 3
