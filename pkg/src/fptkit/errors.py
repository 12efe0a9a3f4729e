"""Exception hierarchy shared by every fptkit module."""


class FPTError(Exception):
    """Base class for all fptkit errors."""


class PolySyntaxError(FPTError, ValueError):
    """Malformed polynomial text. ``position`` is a 0-based column."""

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownVariable(FPTError, ValueError):
    def __init__(self, name, position=0):
        self.name = name
        self.position = position
        super().__init__(f"unknown variable {name!r} at position {position}")


class NegativeExponent(FPTError, ValueError):
    def __init__(self, position=0):
        self.position = position
        super().__init__(f"negative exponent at position {position}")


class ResourceLimit(FPTError):
    """A configured term/tuple/level budget was exceeded.

    ``partial`` carries whatever was computed before the limit hit
    (for example the finished levels of a nu sequence).
    """

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class AllLevelsNotFPure(FPTError):
    """Every computed level had a vanishing multiplier power."""


class NotMPrimary(FPTError, ValueError):
    def __init__(self, variable):
        self.variable = variable
        super().__init__(f"ideal is not m-primary: no pure power of {variable} among the generators")
