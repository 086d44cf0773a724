"""Affine functions on the projective space and the (n, kappa) parameter pair.

Every classical-like observable and every Liouville density handled by the
package has the form ``f(p) = tr(pK) + b``.  Because ``tr p = 1`` such an
``f`` coincides with the frame function ``p -> tr(pB)`` of
``B = K + b I``; :attr:`AffineObservable.frame_operator` exposes it and all
exact integrals are computed from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ParameterMismatch
from .linalg import PurePoint, _frozen, as_matrix, dagger

__all__ = [
    "AffineObservable",
    "LiouvilleDensity",
    "QuantParams",
    "integral",
    "integral_product",
]


@dataclass(frozen=True)
class QuantParams:
    """Dimension ``n`` and metric scale ``kappa`` with the derived constants.

    ``c = (1 - kappa)/n`` is the offset coefficient of the observable map,
    ``kappa_prime = n(n+1)/kappa`` and ``c_prime = (kappa - n - 1)/kappa`` are
    the slope and offset of the density map.
    """

    n: int
    kappa: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be a positive finite number, got {self.kappa!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "kappa", float(self.kappa))

    @classmethod
    def default(cls, n: int) -> "QuantParams":
        """``kappa = n + 1``: the smallest value giving non-negative densities."""
        return cls(n, n + 1.0)

    @property
    def c(self) -> float:
        return (1.0 - self.kappa) / self.n

    @property
    def kappa_prime(self) -> float:
        return self.n * (self.n + 1) / self.kappa

    @property
    def c_prime(self) -> float:
        return (self.kappa - (self.n + 1)) / self.kappa


class AffineObservable:
    """The function ``p -> tr(p K) + b`` on the projective space."""

    __slots__ = ("kernel", "offset", "params")

    def __init__(self, kernel, offset: complex, params: QuantParams):
        k = as_matrix(kernel)
        if k.shape[0] != params.n:
            raise DimensionMismatch(f"kernel is {k.shape[0]}x{k.shape[0]}, params say n={params.n}")
        object.__setattr__(self, "kernel", _frozen(k))
        object.__setattr__(self, "offset", complex(offset))
        object.__setattr__(self, "params", params)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def constant(cls, value: complex, params: QuantParams) -> "AffineObservable":
        return cls(np.zeros((params.n, params.n)), value, params)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def frame_operator(self) -> np.ndarray:
        """``B`` with ``f(p) = tr(pB)`` for every point ``p``."""
        return self.kernel + self.offset * np.eye(self.n)

    @property
    def weight(self) -> complex:
        """Sum of ``f`` over any orthonormal basis: ``tr K + n b``."""
        return complex(np.trace(self.kernel)) + self.n * self.offset

    def is_real(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.abs(self.kernel).max()), abs(self.offset))
        return (np.abs(self.kernel - dagger(self.kernel)).max() <= tol * scale
                and abs(self.offset.imag) <= tol * scale)

    def _cast(self, values):
        return values.real if self.is_real() else values

    def __call__(self, point) -> complex | float:
        """Value at a :class:`PurePoint` or at (the ray of) a vector."""
        psi = point.psi if isinstance(point, PurePoint) else np.asarray(point, dtype=np.complex128)
        val = np.vdot(psi, self.kernel @ psi) / np.vdot(psi, psi) + self.offset
        return float(val.real) if self.is_real() else complex(val)

    def batch(self, psis: np.ndarray) -> np.ndarray:
        """Values at an ``(m, n)`` stack of unit vectors."""
        psis = np.asarray(psis, dtype=np.complex128)
        vals = np.einsum("mi,ij,mj->m", np.conj(psis), self.kernel, psis) + self.offset
        return self._cast(vals)

    def at_projector(self, p) -> complex | float:
        val = np.trace(as_matrix(p) @ self.kernel) + self.offset
        return float(val.real) if self.is_real() else complex(val)

    def _check(self, other: "AffineObservable"):
        if self.params != other.params:
            raise ParameterMismatch(f"{self.params} != {other.params}")

    def conj(self) -> "AffineObservable":
        """Pointwise complex conjugate."""
        return AffineObservable(dagger(self.kernel), np.conj(self.offset), self.params)

    def __add__(self, other):
        if isinstance(other, AffineObservable):
            self._check(other)
            return AffineObservable(self.kernel + other.kernel, self.offset + other.offset, self.params)
        return AffineObservable(self.kernel, self.offset + other, self.params)

    __radd__ = __add__

    def __neg__(self):
        return AffineObservable(-self.kernel, -self.offset, self.params)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, AffineObservable):
            return NotImplemented
        return AffineObservable(scalar * self.kernel, scalar * self.offset, self.params)

    __rmul__ = __mul__

    def allclose(self, other: "AffineObservable", atol: float = 1e-12) -> bool:
        """Equality as functions (compares frame operators, not raw (K, b))."""
        self._check(other)
        return bool(np.abs(self.frame_operator - other.frame_operator).max() <= atol)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, kappa={self.params.kappa}, offset={self.offset:.6g})"


class LiouvilleDensity(AffineObservable):
    """Density ``kappa' tr(sigma p) + c'`` attached to a state ``sigma``."""

    __slots__ = ("state",)

    def __init__(self, state: np.ndarray, params: QuantParams):
        super().__init__(params.kappa_prime * as_matrix(state), params.c_prime, params)
        object.__setattr__(self, "state", _frozen(as_matrix(state)))


def integral(f: AffineObservable) -> complex:
    """Exact integral of ``f`` against the invariant probability measure."""
    return complex(np.trace(f.frame_operator)) / f.n


def integral_product(f: AffineObservable, g: AffineObservable) -> complex:
    """Exact integral of the pointwise product ``f g`` (no conjugation)."""
    f._check(g)
    bf, bg = f.frame_operator, g.frame_operator
    n = f.n
    return complex(np.trace(bf @ bg) + np.trace(bf) * np.trace(bg)) / (n * (n + 1))
