"""Dense complex linear algebra on a finite-dimensional Hilbert space.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The wrapper
types below (:class:`HermitianOperator`, :class:`DensityMatrix`,
:class:`PurePoint`) validate their invariants once at construction and
expose read-only arrays afterwards.

The Hermitian eigensolver is a cyclic complex Jacobi iteration; it is
accurate to a few ulps at the small dimensions this package targets and
has no dependency beyond array arithmetic.
"""
from __future__ import annotations

from typing import Literal, NamedTuple

import numpy as np
import numpy.typing as npt

from .config import get_tolerances
from .errors import (
    ConvergenceError,
    DimensionMismatch,
    InvalidStateError,
    NotHermitianError,
    SchemaError,
)

__all__ = [
    "DensityMatrix",
    "HermitianOperator",
    "Norms",
    "PurePoint",
    "as_matrix",
    "commutator",
    "dagger",
    "eig_hermitian",
    "expm_unitary",
    "hs_inner",
    "norms",
    "projector",
    "singular_values",
    "state_rank_class",
]

ArrayLike = npt.ArrayLike


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` (array-like or wrapper type) to a square complex matrix.

    Raises
    ------
    SchemaError
        If the result is not square, has dimension < 2, or holds NaN/Inf.
    """
    if isinstance(a, (HermitianOperator, DensityMatrix)):
        return a.matrix
    if isinstance(a, PurePoint):
        return a.projector
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SchemaError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise SchemaError("dimension must be at least 2")
    if not np.all(np.isfinite(m)):
        raise SchemaError("matrix has NaN or infinite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def _check_same_dim(*mats: np.ndarray) -> int:
    n = mats[0].shape[-1]
    for m in mats[1:]:
        if m.shape[-1] != n:
            raise DimensionMismatch(f"dimension {m.shape[-1]} != {n}")
    return n


class HermitianOperator:
    """A self-adjoint operator.

    The input is symmetrized to ``(A + A*)/2``; the symmetrization residual
    ``||A - A*||_2 / 2`` is kept in :attr:`residual` and must not exceed the
    ``herm`` tolerance (relative to ``max(1, ||A||_2)``).
    """

    __slots__ = ("matrix", "residual")

    def __init__(self, matrix, tol: float | None = None):
        m = as_matrix(matrix)
        tol = get_tolerances().herm if tol is None else tol
        asym = 0.5 * np.linalg.norm(m - dagger(m))
        scale = max(1.0, float(np.linalg.norm(m)))
        if asym > tol * scale:
            raise NotHermitianError(
                f"matrix is not Hermitian: ||A - A*||/2 = {asym:.3e}")
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + dagger(m))))
        object.__setattr__(self, "residual", float(asym))

    def __setattr__(self, name, value):
        raise AttributeError("HermitianOperator is immutable")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"HermitianOperator(n={self.n})"


class DensityMatrix:
    """A quantum state: positive semidefinite, unit trace."""

    __slots__ = ("matrix", "eigenvalues")

    def __init__(self, matrix, tol: float | None = None):
        tols = get_tolerances()
        h = HermitianOperator(matrix)
        tr = np.trace(h.matrix).real
        trace_tol = tols.trace if tol is None else tol
        if abs(tr - 1.0) > trace_tol:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        w, _ = eig_hermitian(h)
        if w[0] < -tols.psd:
            raise InvalidStateError(f"negative eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "matrix", h.matrix)
        object.__setattr__(self, "eigenvalues", np.clip(w, 0.0, 1.0))

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(n={self.n})"


class PurePoint:
    """A point of the projective space, stored as a unit vector ``psi``.

    The rank-one projector ``p = psi psi*`` is built on first access.
    Two points are equal when their projectors agree; the global phase of
    ``psi`` carries no meaning.
    """

    __slots__ = ("psi", "_projector")

    def __init__(self, psi, tol: float | None = None):
        v = np.asarray(psi, dtype=np.complex128)
        if v.ndim != 1 or v.shape[0] < 2:
            raise SchemaError(f"expected a vector of length >= 2, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise SchemaError("state vector has NaN or infinite entries")
        tol = get_tolerances().norm if tol is None else tol
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > tol:
            raise InvalidStateError(f"state vector has norm {nrm!r}")
        object.__setattr__(self, "psi", _frozen(v / nrm))
        object.__setattr__(self, "_projector", None)

    @classmethod
    def from_vector(cls, v) -> "PurePoint":
        """Normalize ``v`` and wrap it."""
        v = np.asarray(v, dtype=np.complex128)
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise InvalidStateError("zero vector does not define a point")
        return cls(v / nrm)

    def __setattr__(self, name, value):
        raise AttributeError("PurePoint is immutable")

    @property
    def n(self) -> int:
        return self.psi.shape[0]

    @property
    def projector(self) -> np.ndarray:
        if self._projector is None:
            object.__setattr__(self, "_projector", _frozen(projector(self.psi)))
        return self._projector

    def transform(self, u: np.ndarray) -> "PurePoint":
        """The image ``U p U*`` under a unitary ``u``."""
        return PurePoint(np.asarray(u) @ self.psi)

    def __eq__(self, other):
        if not isinstance(other, PurePoint):
            return NotImplemented
        return other.n == self.n and abs(abs(np.vdot(self.psi, other.psi)) - 1.0) <= 1e-12

    __hash__ = None

    def __repr__(self):
        return f"PurePoint(n={self.n})"


def projector(psi: np.ndarray) -> np.ndarray:
    """``psi psi*`` for a vector, or a stack of them along the first axis."""
    psi = np.asarray(psi, dtype=np.complex128)
    return psi[..., :, None] * np.conj(psi[..., None, :])


def _fix_phases(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # first component with |x| > tol of each column made real positive
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size:
            x = col[idx[0]]
            v[:, k] = col * (np.conj(x) / abs(x))
    return v


def _jacobi(a: np.ndarray, rel: float, max_sweeps: int):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    target = rel * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off <= target:
            return np.diag(a).real.copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                # D = diag(1, e^{-i phi}) makes the (p, q) entry real, then a
                # real Jacobi rotation R = [[c, s], [-s, c]] annihilates it.
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = [p, q]
                a[:, cols] = a[:, cols] @ rot
                a[cols, :] = dagger(rot) @ a[cols, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, cols] = v[:, cols] @ rot
    raise ConvergenceError(
        f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
        f"(off-diagonal norm {off:.3e}, target {target:.3e})")


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition ``A = V diag(w) V*`` of a Hermitian operator.

    Returns eigenvalues in ascending order and a unitary ``V`` whose
    columns are the eigenvectors, each with its first non-negligible
    component made real and positive.
    """
    if not isinstance(a, HermitianOperator):
        a = HermitianOperator(a)
    tols = get_tolerances()
    w, v = _jacobi(np.array(a.matrix), tols.jacobi_rel, tols.jacobi_max_sweeps)
    order = np.argsort(w, kind="stable")
    return w[order], _fix_phases(v[:, order])


def expm_unitary(h, t: float) -> np.ndarray:
    """``exp(-i t H)`` through the spectral decomposition of ``H``."""
    w, v = eig_hermitian(h)
    return (v * np.exp(-1j * t * w)) @ dagger(v)


class Norms(NamedTuple):
    op: float
    trace: float
    hs: float


def singular_values(a) -> np.ndarray:
    """Singular values in descending order.

    Hermitian input uses ``|eig(A)|`` directly; otherwise the square roots of
    ``eig(A* A)``, which loses relative accuracy only for singular values
    below ``sqrt(eps) * ||A||``.
    """
    m = as_matrix(a)
    if np.allclose(m, dagger(m), rtol=0.0, atol=1e-14 * max(1.0, np.abs(m).max())):
        s = np.abs(eig_hermitian(m)[0])
    else:
        s = np.sqrt(np.clip(eig_hermitian(dagger(m) @ m)[0], 0.0, None))
    return np.sort(s)[::-1]


def norms(a) -> Norms:
    """Operator, trace and Hilbert-Schmidt norms of ``a``."""
    s = singular_values(a)
    return Norms(op=float(s[0]), trace=float(s.sum()),
                 hs=float(np.linalg.norm(as_matrix(a))))


def commutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _check_same_dim(a, b)
    return a @ b - b @ a


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt product ``tr(A* B)``."""
    a, b = as_matrix(a), as_matrix(b)
    _check_same_dim(a, b)
    return complex(np.vdot(a, b))


def state_rank_class(sigma) -> Literal["interior", "boundary", "pure"]:
    """Classify a state by the dimension of its range.

    Full rank states are interior points of the state space; every other
    state lies on its boundary, and rank one states are the pure ones.
    """
    if not isinstance(sigma, DensityMatrix):
        sigma = DensityMatrix(sigma)
    rank = int(np.sum(sigma.eigenvalues > get_tolerances().psd))
    if rank == 1:
        return "pure"
    if rank < sigma.n:
        return "boundary"
    return "interior"
