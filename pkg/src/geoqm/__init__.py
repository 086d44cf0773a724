"""Finite-dimensional quantum mechanics as Hamiltonian mechanics on projective space."""
from __future__ import annotations

from .errors import (
    ConvergenceError,
    DegenerateError,
    DimensionMismatch,
    GeoQMError,
    InvalidStateError,
    NotHermitianError,
    ParameterMismatch,
    SchemaError,
)
from .linalg import DensityMatrix, HermitianOperator, PurePoint, eig_hermitian
from .measures import SeededSampler, mc_integrate
from .observables import AffineObservable, LiouvilleDensity, QuantParams
from .maps import dequantize, quantize_inverse, state_to_density

__version__ = "0.1.0"

__all__ = [
    "AffineObservable",
    "ConvergenceError",
    "DegenerateError",
    "DensityMatrix",
    "DimensionMismatch",
    "GeoQMError",
    "HermitianOperator",
    "InvalidStateError",
    "LiouvilleDensity",
    "NotHermitianError",
    "ParameterMismatch",
    "PurePoint",
    "QuantParams",
    "SchemaError",
    "SeededSampler",
    "dequantize",
    "eig_hermitian",
    "mc_integrate",
    "quantize_inverse",
    "state_to_density",
]
