"""Exception hierarchy shared across the package."""


class InputError(ValueError):
    """Bad user-supplied input: syntax errors, invalid expressions, wrong
    graph mode for a solver, missing weights, infeasible generator specs."""


class ContractViolation(RuntimeError):
    """An internal precondition was broken, e.g. Dijkstra saw a negative
    reduced edge cost although the supplied potential was declared feasible."""


class VerificationError(RuntimeError):
    """A debug-mode invariant check failed (``--verify`` on the CLI)."""
