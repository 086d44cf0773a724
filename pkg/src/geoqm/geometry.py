"""Almost-Kähler structure of the projective space, evaluated by trace formulas.

A tangent vector at ``p`` is ``v = -i[A, p]`` for a self-adjoint generator
``A``; generators differing by an operator commuting with ``p`` give the
same vector.  Every quantity here is computed from generators and ``p``
directly, with no coordinate charts:

* symplectic form   ``omega_p(u, v) = -i kappa tr(p [A_u, A_v])``
* metric            ``g_p(u, v) = -kappa tr(p ([A_u,p][A_v,p] + [A_v,p][A_u,p]))``
* complex structure ``j_p(v) = i[v, p]``, acting on generators as ``A -> i[A, p]``

The bilinear forms are also exposed on raw (possibly non-Hermitian)
generators through :func:`omega_generators` and :func:`metric_generators`,
which the star-product code uses for complexified observables.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GeoQMError, ParameterMismatch
from .linalg import HermitianOperator, PurePoint, as_matrix, commutator
from .observables import AffineObservable

__all__ = [
    "KahlerParams",
    "TangentVector",
    "acs",
    "cometric",
    "fs_metric",
    "hamiltonian_field",
    "metric_generators",
    "omega",
    "omega_generators",
    "poisson",
    "poisson_at",
    "tangent",
]


@dataclass(frozen=True)
class KahlerParams:
    kappa: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")


class TangentVector:
    """Tangent vector ``-i[A, p]`` at ``base``, carried with its generator ``A``."""

    __slots__ = ("base", "generator", "matrix")

    def __init__(self, base: PurePoint, generator):
        gen = as_matrix(generator)
        if gen.shape[0] != base.n:
            raise DimensionMismatch(f"generator is {gen.shape[0]}x{gen.shape[0]}, base point has n={base.n}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "generator", HermitianOperator(gen).matrix)
        object.__setattr__(self, "matrix", -1j * commutator(self.generator, base.projector))

    def __setattr__(self, name, value):
        raise AttributeError("TangentVector is immutable")

    def __neg__(self):
        return TangentVector(self.base, -self.generator)

    def __add__(self, other: "TangentVector"):
        _same_base(self, other)
        return TangentVector(self.base, self.generator + other.generator)

    def __mul__(self, scalar: float):
        return TangentVector(self.base, scalar * self.generator)

    __rmul__ = __mul__

    def isclose(self, other: "TangentVector", atol: float = 1e-12) -> bool:
        """Equality as vectors, i.e. up to generators commuting with the base point."""
        _same_base(self, other)
        return bool(np.abs(self.matrix - other.matrix).max() <= atol)

    def __repr__(self):
        return f"TangentVector(n={self.base.n})"


def _same_base(u: TangentVector, v: TangentVector):
    if u.base is not v.base and u.base != v.base:
        raise GeoQMError("tangent vectors are based at different points")


def tangent(p: PurePoint, a) -> TangentVector:
    return TangentVector(p, a)


def omega_generators(p: np.ndarray, a_u: np.ndarray, a_v: np.ndarray, kappa: float) -> complex:
    """``-i kappa tr(p [A_u, A_v])`` for arbitrary square matrices."""
    return -1j * kappa * np.trace(p @ (a_u @ a_v - a_v @ a_u))


def metric_generators(p: np.ndarray, a_u: np.ndarray, a_v: np.ndarray, kappa: float) -> complex:
    """``-kappa tr(p([A_u,p][A_v,p] + [A_v,p][A_u,p]))`` for arbitrary square matrices."""
    cu = a_u @ p - p @ a_u
    cv = a_v @ p - p @ a_v
    return -kappa * np.trace(p @ (cu @ cv + cv @ cu))


def _kappa(k) -> float:
    return k.kappa if isinstance(k, KahlerParams) else float(k)


def omega(p: PurePoint, u: TangentVector, v: TangentVector, k: KahlerParams = KahlerParams()) -> float:
    """Symplectic form on a pair of tangent vectors at ``p``."""
    _same_base(u, v)
    if u.base != p:
        raise GeoQMError("tangent vectors are not based at p")
    return float(omega_generators(p.projector, u.generator, v.generator, _kappa(k)).real)


def fs_metric(p: PurePoint, u: TangentVector, v: TangentVector, k: KahlerParams = KahlerParams()) -> float:
    """Fubini-Study metric scaled by ``kappa``; ``g(u,u) = 2 kappa tr(p v^2)``."""
    _same_base(u, v)
    if u.base != p:
        raise GeoQMError("tangent vectors are not based at p")
    return float(metric_generators(p.projector, u.generator, v.generator, _kappa(k)).real)


def acs(p: PurePoint, v: TangentVector) -> TangentVector:
    """Almost complex structure ``j_p v = i[v, p]``.

    If ``v = -i[A, p]`` then ``i[v, p] = -i[B, p]`` with the self-adjoint
    generator ``B = i[A, p]``.
    """
    if v.base != p:
        raise GeoQMError("tangent vector is not based at p")
    return TangentVector(p, 1j * commutator(v.generator, p.projector))


def hamiltonian_field(a, p: PurePoint) -> TangentVector:
    """Hamiltonian vector field of ``f_A`` at ``p``: ``-i[A, p]``."""
    return TangentVector(p, a)


def _generator(f: AffineObservable) -> np.ndarray:
    # df_p(v) = tr(v K) and omega_p(X, v) = kappa tr(v A_X), so K/kappa generates X_f
    return f.kernel / f.params.kappa


def poisson(f: AffineObservable, g: AffineObservable) -> AffineObservable:
    """Poisson bracket ``{f, g} = omega(X_f, X_g)`` as an affine observable.

    For ``f = f_A``, ``g = f_B`` the result is ``f_{-i[A,B]}``, whose
    kernel is ``kappa (-i[A,B])`` and whose offset vanishes.
    """
    if f.params != g.params:
        raise ParameterMismatch(f"{f.params} != {g.params}")
    kappa = f.params.kappa
    a, b = _generator(f), _generator(g)
    return AffineObservable(kappa * (-1j) * (a @ b - b @ a), 0.0, f.params)


def poisson_at(f: AffineObservable, g: AffineObservable, p: PurePoint) -> complex:
    """``omega_p(X_f, X_g)`` evaluated pointwise from the vector fields."""
    if f.params != g.params:
        raise ParameterMismatch(f"{f.params} != {g.params}")
    val = omega_generators(p.projector, _generator(f), _generator(g), f.params.kappa)
    return float(val.real) if f.is_real() and g.is_real() else complex(val)


def cometric(f: AffineObservable, g: AffineObservable, p: PurePoint) -> float | complex:
    """``G_p(df, dg)``, computed as ``g_p(X_f, X_g)``."""
    if f.params != g.params:
        raise ParameterMismatch(f"{f.params} != {g.params}")
    val = metric_generators(p.projector, _generator(f), _generator(g), f.params.kappa)
    return float(val.real) if f.is_real() and g.is_real() else complex(val)
