"""Exception types raised across the package."""


class DimensionCoherenceError(ValueError):
    """Vertices carry different channel counts and no coherence mode was given.

    Three situations are possible: all dimensions equal (nothing to do),
    some vertices miss channels (project the others, or zero-pad the short
    ones), or dimensions differ fundamentally (augment to a common size).
    """


class ParseError(ValueError):
    """Malformed input file. ``line`` is 1-based, or None when not applicable."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
