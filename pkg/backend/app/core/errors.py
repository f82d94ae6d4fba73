"""Exception hierarchy shared by the services, the CLI and the HTTP routers."""


class SsgaError(Exception):
    """Base class for every error raised by the runtime lab."""


class ContractViolation(SsgaError, ValueError):
    """A precondition of an operation does not hold."""


class ViabilityError(ContractViolation):
    """Fitness-level bounds that violate the viability condition or row normalisation."""


class InfiniteExpectationError(SsgaError, ArithmeticError):
    """The absorbing time of a chain has no finite expectation."""


class ChainBudgetExceeded(SsgaError, RuntimeError):
    """A simulated episode ran past the step cap (the chain is close to reducible)."""


def require(condition: bool, message: str) -> None:
    if not condition:
        raise ContractViolation(message)
