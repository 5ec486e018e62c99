"""Exception types shared across the package."""


class FewPhotonError(Exception):
    """Base class for package errors."""


class InvalidArgument(FewPhotonError, ValueError):
    pass


class CapacityError(FewPhotonError):
    """Photon number would exceed the configured cap."""


class NumericalDegeneracy(FewPhotonError, ArithmeticError):
    """A Gram matrix is not positive semidefinite within tolerance."""


class FitFailure(FewPhotonError, RuntimeError):
    """A least-squares fit did not converge or the data were degenerate."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
