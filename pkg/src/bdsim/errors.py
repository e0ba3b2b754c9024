"""Exception types raised across the simulator."""


class BdsimError(Exception):
    pass


class DomainError(BdsimError, ValueError):
    """An argument lies outside the region where a model is defined."""


class ParseError(BdsimError):
    """Malformed netlist text or value token.

    ``line`` is 1-based (``None`` for bare value tokens); ``offset`` is the
    character offset inside the offending token when known.
    """

    def __init__(self, message, line=None, offset=None):
        self.message = message
        self.line = line
        self.offset = offset
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class TopologyError(BdsimError):
    pass


class SingularMatrix(BdsimError):
    pass


class NoConvergence(BdsimError):
    def __init__(self, message, best_residual=float("inf"), time=None, point=None):
        self.best_residual = best_residual
        self.time = time
        self.point = point
        super().__init__(message)


class NotFound(BdsimError):
    """A measurement feature (crossing, edge, interval) is absent."""


class NotSettled(BdsimError):
    pass
