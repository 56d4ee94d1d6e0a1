"""Exception hierarchy shared across the package."""


class PolicyError(Exception):
    """Base class for all policheck errors."""


class PatternError(PolicyError):
    """A pattern is not well-formed for its component."""


class PatternTooLong(PatternError):
    pass


class CharOutsideCharset(PatternError):
    pass


class WildcardNotAllowed(PatternError):
    pass


class EnumValueUnknown(PatternError):
    pass


class TypeMismatch(PolicyError):
    """Two objects that must share a policy type do not."""


class UnknownComponentPath(PolicyError):
    """A formula references a component the policy type does not define."""


class DomainTooLarge(PolicyError):
    """The request space is too big to enumerate."""


class StateBudgetExceeded(PolicyError):
    """An automaton construction crossed the configured live-state cap."""


class SchemaError(PolicyError):
    """A policy JSON document does not conform to the documented schema."""


class UnknownPolicyType(SchemaError):
    """A document names a policy type absent from the registry."""


class MalformedPermSpec(PolicyError):
    """A permission spec string does not follow the documented grammar."""


class SolverSpawnFailure(PolicyError):
    """The external solver executable could not be started."""


class ModelParseError(PolicyError):
    """Solver output claimed sat but the model could not be decoded."""


class UnknownFamily(PolicyError):
    """An unrecognized benchmark family name."""
