"""Exception types shared across the package."""


class InsideOutError(Exception):
    """Base class for all errors raised by this package."""


class EmptyPolyhedron(InsideOutError):
    pass


class UnboundedPolyhedron(InsideOutError):
    pass


class NoLatticeCompatibleOrigin(InsideOutError):
    """The dilated affine hulls never contain a lattice point."""


class DegenerateArrangement(InsideOutError):
    """Some hyperplane contains the whole affine hull of the polytope."""

    def __init__(self, message, hyperplane=None):
        super().__init__(message)
        self.hyperplane = hyperplane


class VerificationFailure(InsideOutError):
    """An interpolated quasipolynomial disagreed with a direct count."""


class SymmetryViolation(InsideOutError):
    pass


class ParseError(InsideOutError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
