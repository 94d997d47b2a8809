class NumericalError(RuntimeError):
    """A numerical routine failed to converge or lost its accuracy guarantee."""
