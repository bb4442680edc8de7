"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line can map failures
onto its documented status codes without a lookup table.
"""


class NarrativeError(Exception):
    exit_code = 2


# -- configuration / validation (exit 2) --------------------------------------

class ValidationError(NarrativeError):
    exit_code = 2


class MalformedConfig(ValidationError):
    pass


class GroupSupportsNothing(ValidationError):
    pass


class PolicyUnsupported(ValidationError):
    pass


class EmptyCategory(ValidationError):
    pass


class TwoGroupOrderingViolated(ValidationError):
    pass


class InvalidQ(ValidationError):
    pass


class NarrativeOutsideCategories(ValidationError):
    pass


class MalformedTaxonomy(ValidationError):
    pass


class NotTwoGroups(ValidationError):
    pass


class AssumptionViolated(ValidationError):
    pass


class GroupNotInCoalition(ValidationError):
    pass


class NotFullSupport(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class EmptyTail(ValidationError):
    pass


# -- verification (exit 3) ----------------------------------------------------

class VerificationFailed(NarrativeError):
    exit_code = 3


class NoSolutionFound(VerificationFailed):
    """The binding-set oracle found no admissible solution."""


class MultipleSolutions(VerificationFailed):
    """The binding-set oracle found more than one distinct solution."""


class CrossCheckMismatch(VerificationFailed):
    pass


# -- resource guards (exit 4) -------------------------------------------------

class ResourceGuard(NarrativeError):
    exit_code = 4


class PlatformSpaceTooLarge(ResourceGuard):
    pass


class OracleBoundExceeded(ResourceGuard):
    pass
