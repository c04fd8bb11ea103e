"""Exception hierarchy.

Everything raised on purpose derives from :class:`QAError`, so the CLI can map
domain failures to exit code 1 and usage failures to exit code 2.
"""


class QAError(Exception):
    """Base class for domain errors."""


class DimensionError(QAError, ValueError):
    """Matrix shapes do not match what the operation needs."""


class RankDeficiencyError(QAError, ValueError):
    """Gram-Schmidt input was not linearly independent."""


class ConstructionError(QAError, RuntimeError):
    """An operator basis could not be built (indicates an indexing bug)."""


class PreconditionError(QAError, ValueError):
    pass


class SymbolError(QAError, KeyError):
    """A word contains a symbol outside the alphabet."""

    def __str__(self):  # KeyError repr-quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class BudgetError(QAError, RuntimeError):
    """A word enumeration would exceed the configured cap."""


class InternalConsistencyError(QAError, RuntimeError):
    """Numerical breakdown: invariance held but no unitary could be recovered."""


class ParseError(QAError, ValueError):
    pass


class ValidationError(QAError, ValueError):
    """An automaton violates a physical invariant.

    ``violations`` holds the individual :class:`qadim.automaton.Violation` items.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class UsageError(QAError, ValueError):
    """Caller supplied arguments that make no sense together."""
