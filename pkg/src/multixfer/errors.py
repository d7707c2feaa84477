"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class AliasingError(DomainError):
    """A grid is too coarse to resolve the requested frequencies."""


class HypothesisViolation(DomainError):
    """Inputs violate a hypothesis of the inequality being checked."""


class InvariantViolation(RuntimeError):
    """A numerical invariant that must hold by construction failed."""
