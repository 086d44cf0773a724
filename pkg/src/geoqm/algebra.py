"""C*-algebra structure transported to functions on projective space.

The star product has two independent realizations that must agree:

* :func:`star_operator` maps both factors back to operators, multiplies
  them and maps the product forward again;
* :func:`star_geometric` evaluates it at a point from the Poisson bracket,
  the co-metric, the pointwise product and exact integrals, without ever
  forming an operator product.

Writing ``I(h)`` for the integral of ``h`` against the invariant
probability measure, the geometric expression is::

    f*g = (i/2){f,g} + (1/2)G(df,dg) + fg/kappa
          + (1-kappa)/kappa * ((n+1)/kappa I(fg) - f I(g) - g I(f))
          + (1-kappa)(kappa-n-1)/kappa^2 * I(f) I(g)
"""
from __future__ import annotations

import numpy as np

from .errors import ParameterMismatch
from .geometry import cometric, poisson, poisson_at
from .linalg import PurePoint, eig_hermitian
from .maps import dequantize, quantize_inverse
from .observables import AffineObservable, integral, integral_product

__all__ = [
    "cstar_norm",
    "jordan",
    "jordan_geometric",
    "lie",
    "star_geometric",
    "star_operator",
]


def _same(f: AffineObservable, g: AffineObservable):
    if f.params != g.params:
        raise ParameterMismatch(f"{f.params} != {g.params}")


def star_operator(f: AffineObservable, g: AffineObservable) -> AffineObservable:
    """``O(O^{-1}(f) O^{-1}(g))``."""
    _same(f, g)
    return quantize_inverse(dequantize(f) @ dequantize(g), f.params)


def _symmetric_part(f: AffineObservable, g: AffineObservable, p: PurePoint) -> complex:
    q = f.params
    n, kappa = q.n, q.kappa
    i_f, i_g, i_fg = integral(f), integral(g), integral_product(f, g)
    fp, gp = f(p), g(p)
    return (0.5 * cometric(f, g, p)
            + fp * gp / kappa
            + (1 - kappa) / kappa * ((n + 1) / kappa * i_fg - fp * i_g - gp * i_f)
            + (1 - kappa) * (kappa - (n + 1)) / kappa ** 2 * i_f * i_g)


def star_geometric(f: AffineObservable, g: AffineObservable, p: PurePoint) -> complex:
    """Value of ``f * g`` at ``p`` from the geometric expression."""
    _same(f, g)
    return complex(0.5j * poisson_at(f, g, p) + _symmetric_part(f, g, p))


def jordan_geometric(f: AffineObservable, g: AffineObservable, p: PurePoint) -> complex:
    """Jordan product ``f o g`` at ``p``: the geometric star product minus ``(i/2){f,g}``."""
    _same(f, g)
    val = complex(_symmetric_part(f, g, p))
    return val.real if f.is_real() and g.is_real() else val


def lie(f: AffineObservable, g: AffineObservable) -> AffineObservable:
    """Lie product: the Poisson bracket."""
    return poisson(f, g)


def jordan(f: AffineObservable, g: AffineObservable) -> AffineObservable:
    """Jordan product ``O((AB + BA)/2)``, the real part of ``f * g`` for real ``f, g``."""
    _same(f, g)
    a, b = dequantize(f), dequantize(g)
    return quantize_inverse(0.5 * (a @ b + b @ a), f.params)


def _sup_abs(f: AffineObservable) -> float:
    # sup over p of |tr(pK) + b| for real f: attained at an extreme eigenprojector of K
    w, _ = eig_hermitian(f.kernel)
    b = f.offset.real
    return float(max(abs(w[0] + b), abs(w[-1] + b)))


def cstar_norm(f: AffineObservable) -> float:
    """C*-norm ``(1/kappa) || f - (1 - kappa) I(f) ||_inf``.

    The sup norm of the affine function is found spectrally.  A non-real
    ``f`` goes through ``sqrt(|||conj(f) * f|||)``.
    """
    if not f.is_real():
        return float(np.sqrt(cstar_norm(star_operator(f.conj(), f))))
    kappa = f.params.kappa
    shifted = f - (1.0 - kappa) * integral(f).real
    return _sup_abs(shifted) / kappa

