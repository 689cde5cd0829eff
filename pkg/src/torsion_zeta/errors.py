"""Exception and warning classes.

Every error raised on purpose by this package derives from
:class:`TorsionZetaError`, so callers can tell our failures apart from
``ValueError`` and friends coming out of numpy or scipy.
"""


class TorsionZetaError(Exception):
    """Base class for all package errors."""


class ValidationError(TorsionZetaError):
    """A domain object was constructed with data breaking its invariants."""


class FormatError(TorsionZetaError):
    """A file did not follow the expected schema."""


# geodesics
class NotLoxodromic(TorsionZetaError):
    """Element is elliptic, parabolic or the identity; discard the word."""


class BudgetExceeded(TorsionZetaError):
    """Word enumeration exceeded its node limit; lower ``max_word_len``."""


class CutoffExceeded(TorsionZetaError):
    """Query radius lies beyond the spectrum cutoff."""


class DimensionMismatch(TorsionZetaError):
    """Array shapes or degrees do not line up."""


class AmbiguousDecomposition(UserWarning):
    """Two different primitive classes explain the same class numerically."""


# reps
class IndexOutOfRange(TorsionZetaError):
    """A word refers to a generator that does not exist."""


class NeedsSpectrum(TorsionZetaError):
    """Shortest primitive length is required but unknown."""


# zeta
class NoGrowthConstants(TorsionZetaError):
    """Error bounds need counting-growth metadata that was not supplied."""


class NotConvergent(TorsionZetaError):
    """Point lies on or left of the certified abscissa of convergence."""


class BadWeight(TorsionZetaError):
    """Highest weight vector has the wrong length."""


# regdet
class OnCut(TorsionZetaError):
    """Eigenvalue lies on the branch cut of the chosen logarithm."""


class ZeroEigenvalue(TorsionZetaError):
    """Zero modes must be removed before taking a determinant."""


class SpectrumNotPositive(TorsionZetaError):
    """Mellin representation needs Re(lambda) >= delta > 0."""


class MissingTail(TorsionZetaError):
    """A tail model is required for the Mellin determinant."""


class ROnSpectrum(TorsionZetaError):
    """Cut parameter r coincides with the real part of an eigenvalue."""


# torsion
class Singular(TorsionZetaError):
    """Vectors handed in as a basis are linearly dependent."""


class NotAcyclicWithoutBases(TorsionZetaError):
    """Complex has cohomology but no cohomology bases were supplied."""


class InconsistentBases(TorsionZetaError):
    """Supplied cohomology representatives are not cycles or not a basis."""


class NotClosed(TorsionZetaError):
    """Restricted maps do not preserve the generalized zero eigenspace."""


class IllConditioned(UserWarning):
    """Rank decision was made with a narrow numerical margin."""


class BadLength(TorsionZetaError):
    """Dimension vector has the wrong number of entries."""


class DualityViolated(TorsionZetaError):
    """Per-degree spectra are not symmetric under p -> d - p."""


class FixtureMissing(TorsionZetaError):
    """A bundled verification fixture could not be located."""
