"""Exception types shared across the models."""


class BasisError(ValueError):
    """An operator or map produced a ket outside the enumerated basis."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ResourceError(RuntimeError):
    """A basis or propagation exceeds a configured size ceiling."""


class NotHermitianError(ValueError):
    pass


class SectorError(ValueError):
    """A state has weight outside the symmetry sector a map requires."""

    def __init__(self, message, deficit=None):
        super().__init__(message)
        self.deficit = deficit


class EmptySectorError(ValueError):
    """Post-selection onto a sector whose probability is numerically zero."""

    def __init__(self, message, probability=None):
        super().__init__(message)
        self.probability = probability
