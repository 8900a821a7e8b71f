"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: capacity problems exit 3, an
algorithm that does not apply to the requested setting exits 4, and every
other library error exits 1.
"""


class ElectionControlError(Exception):
    """Base class for all library errors."""


class StructuralError(ElectionControlError):
    """Malformed instance, ranking, solution, or file content."""


class ConfigurationError(ElectionControlError):
    """Required configuration (e.g. threshold weights) is missing."""


class CapacityError(ElectionControlError):
    """Exhaustive computation was requested beyond the configured caps."""


class RuleIncompleteError(ElectionControlError):
    """A custom revision table has no entry for the queried input."""


class InapplicableError(ElectionControlError):
    """The requested algorithm's precondition fails for this setting."""


class ConstructionError(ElectionControlError):
    """A generated instance failed its own built-in verifier."""
