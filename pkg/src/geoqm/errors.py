"""Exception hierarchy shared by all geoqm modules."""


class GeoQMError(Exception):
    """Base class for every error raised by geoqm."""


class SchemaError(GeoQMError, ValueError):
    """A JSON payload or matrix does not have the expected shape or contents."""


class DimensionMismatch(GeoQMError, ValueError):
    """Operands live on Hilbert spaces of different dimension."""


class NotHermitianError(GeoQMError, ValueError):
    pass


class InvalidStateError(GeoQMError, ValueError):
    """Matrix is not a density matrix, or vector is not normalized."""


class ConvergenceError(GeoQMError, RuntimeError):
    pass


class ParameterMismatch(GeoQMError, ValueError):
    """Two observables were built with different (n, kappa)."""


class DegenerateError(GeoQMError, RuntimeError):
    """A fit, projection or sample set is rank deficient."""
