"""Exception hierarchy shared by every stage of the toolchain."""


class PolyloopError(Exception):
    """Base class for all errors raised by polyloop."""


class UsageError(PolyloopError):
    """Input is well-formed but not a meaningful request (e.g. unit ideal)."""


class ParseError(PolyloopError):
    def __init__(self, message, position=None, line=None):
        self.position = position
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"col {position}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class UnknownVariable(PolyloopError):
    pass


class MissingAssignment(PolyloopError):
    pass


class NonAffineUpdate(PolyloopError):
    pass


class NondeterministicUpdate(PolyloopError):
    pass


class EmptyInvariant(PolyloopError):
    pass


class SymbolicInitial(PolyloopError):
    pass


class IrrationalEigenvalue(PolyloopError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"characteristic factor {residual} has no rational roots")


class ResourceLimit(PolyloopError):
    pass


class Unsat(PolyloopError):
    pass


class NonRationalModel(PolyloopError):
    def __init__(self, unknown, raw=None):
        self.unknown = unknown
        self.raw = raw
        detail = f" ({raw})" if raw is not None else ""
        super().__init__(f"value of {unknown} is not rational{detail}")


class SolverNotFound(PolyloopError):
    pass


class SolverProtocolError(PolyloopError):
    pass


class SolverTimeout(PolyloopError):
    pass
