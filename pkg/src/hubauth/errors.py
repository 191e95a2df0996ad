"""Exception types shared across the package."""


class GraphFormatError(Exception):
    """Malformed or unsupported graph input (bad line, bad header, bad index)."""


class ParameterError(ValueError):
    """A method parameter is outside its admissible range."""


class ConvergenceError(RuntimeError):
    """An iterative kernel failed to converge within its iteration cap."""


class SizeLimitError(ValueError):
    """A dense-only operation was requested above the dense size threshold."""
