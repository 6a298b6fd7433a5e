"""Exception and warning types shared across the package."""


class EpiquantError(Exception):
    """Base class for all errors raised by this package."""


class GroupError(EpiquantError):
    """A Cayley table or permutation set fails the group axioms."""


class NotASubgroup(EpiquantError):
    """An element set is not closed under the group operation."""


class NotInGeneratedSubgroup(EpiquantError):
    """The target element is outside the subgroup generated by the given sets."""


class ModelError(EpiquantError):
    """A model file or model structure is invalid.

    Carries ``path``, a dotted field path into the offending structure.
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParseError(ModelError):
    pass


class UnfaithfulAction(ModelError):
    pass


class UnresolvedReference(ModelError):
    pass


class WellDefinednessViolation(EpiquantError):
    """Two words for the same group element produced different matrices."""


class DegenerateFallback(EpiquantError):
    """An indicator-projected state vector has (near-)zero norm."""


class BasisMismatch(EpiquantError):
    """Amplitude vectors expressed in different bases were combined."""


class NotAnEffect(EpiquantError):
    """Weights or spectrum fall outside the unit interval."""


class RankDeficient(EpiquantError):
    """The effect sample does not span the Hermitian matrix space."""


class BadPrior(EpiquantError):
    """Prior weights are negative or do not sum to one."""


class ZeroProbabilityOutcome(EpiquantError):
    """Conditioning on an outcome whose predicted probability is zero."""


class ActionMismatch(EpiquantError):
    """A factor's value action is inconsistent with the shared group."""


class EmptyRestriction(EpiquantError):
    """The restricted tuple set is empty."""


class NoOrbitSelected(EpiquantError):
    """An orbit reduction selected no orbits."""


class TrivialSubgroupWarning(UserWarning):
    """An induced subgroup contains only the identity."""
