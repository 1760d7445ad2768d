"""Exception hierarchy.

Input problems derive from :class:`InputError`, numerical breakdowns from
:class:`NumericalError`. The CLI maps the two families to distinct exit codes.
"""


class SuplocError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SuplocError, ValueError):
    """Malformed or inconsistent user input."""


class SpecError(InputError):
    """A measure description violates its invariants."""


class ParseError(InputError):
    pass


class NotHankel(InputError):
    pass


class NonPositiveMass(InputError):
    pass


class InconsistentPrefix(InputError):
    pass


class DegreeOutOfRange(InputError):
    pass


class NonPositiveError(InputError):
    pass


class EmptySet(InputError):
    pass


class DegreeBudgetExceeded(InputError):
    """An oracle was asked to integrate beyond its exactness degree."""

    def __init__(self, requested, budget):
        super().__init__(f"degree {requested} exceeds oracle budget {budget}")
        self.requested = requested
        self.budget = budget


OracleBudget = DegreeBudgetExceeded


class NonPSD(InputError):
    def __init__(self, min_eig, threshold):
        super().__init__(
            f"moment matrix is not positive semidefinite: min_eig={min_eig:.6g} "
            f"< -{threshold:.3g}"
        )
        self.min_eig = min_eig


class NumericalError(SuplocError, ArithmeticError):
    """A numerical procedure broke down."""


class LostPositivity(NumericalError):
    """A recurrence norm became non-positive (or non-finite) at index ``j``."""

    def __init__(self, j, value):
        super().__init__(f"lost positivity at j={j} (zeta={value!r})")
        self.j = j
        self.value = value


class NoConvergence(NumericalError):
    def __init__(self, index, iterations):
        super().__init__(
            f"eigenvalue {index} did not converge within {iterations} iterations"
        )
        self.index = index


class NonSimpleRoots(NumericalError):
    pass
