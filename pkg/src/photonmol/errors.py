"""Exception types raised across the toolkit."""


class PhotonmolError(Exception):
    """Base class for all toolkit errors."""


class DomainError(PhotonmolError, ValueError):
    """An argument lies outside the physical domain of an operation."""


class UsageError(PhotonmolError, ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class DataError(PhotonmolError, ValueError):
    """Input data are malformed (non-finite, negative, wrong shape)."""


class SingularityError(PhotonmolError, ArithmeticError):
    """A transfer-matrix denominator vanished."""

    def __init__(self, message, wavelength_nm=None):
        super().__init__(message)
        self.wavelength_nm = wavelength_nm


class FitError(PhotonmolError, RuntimeError):
    """A least-squares fit could not identify its parameters."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number
