"""Unitarily invariant sampling of the projective space and Monte-Carlo integration.

All randomness flows through :class:`SeededSampler`, which wraps numpy's
Philox-4x64 counter-based generator.  A sampler is identified by a 64-bit
seed and a tuple *stream key*; ``SeededSampler(seed, key)`` always yields
the same sequence, and sub-streams are addressed by extending the key.
Gaussians are produced by the Box-Muller transform from Philox uniforms,
so the sample sequence depends only on Philox's bit stream and the fixed
53-bit uniform conversion.

Integrals are taken against the invariant probability measure, so the
constant function 1 integrates to 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, GeoQMError
from .linalg import PurePoint, as_matrix, dagger

__all__ = [
    "CHUNK_SIZE",
    "McEstimate",
    "SeededSampler",
    "exact_integral_FA",
    "exact_integral_pair",
    "haar_unitary",
    "hs_from_integrals",
    "mc_integrate",
    "random_density",
    "random_hermitian",
    "sample_basis",
    "sample_pure",
    "sample_pure_batch",
]

CHUNK_SIZE = 4096


class SeededSampler:
    """Deterministic, splittable random source.

    Parameters
    ----------
    seed : int
        Non-negative integer below ``2**64``.
    stream : int or tuple of int
        Stream key.  Distinct keys give statistically independent streams.
    """

    def __init__(self, seed: int, stream: int | tuple[int, ...] = 0):
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self.stream = (stream,) if isinstance(stream, (int, np.integer)) else tuple(stream)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        self._gen = np.random.Generator(np.random.Philox(seq))
        self._children = 0

    def __repr__(self):
        return f"SeededSampler(seed={self.seed}, stream={self.stream})"

    def substream(self, index: int) -> "SeededSampler":
        """Stream with key ``self.stream + (index,)``; does not touch this one."""
        return SeededSampler(self.seed, self.stream + (int(index),))

    def spawn(self) -> "SeededSampler":
        """Next child stream in a deterministic sequence of children."""
        child = self.substream(self._children)
        self._children += 1
        return child

    def uniform(self, size) -> np.ndarray:
        return self._gen.random(size)

    def complex_normal(self, size) -> np.ndarray:
        """Standard complex Gaussians ``(x + iy)`` with ``x, y ~ N(0, 1)``.

        One Box-Muller pair gives one complex variate.
        """
        size = (size,) if np.isscalar(size) else tuple(size)
        u = self._gen.random((2,) + size)
        r = np.sqrt(-2.0 * np.log1p(-u[0]))  # 1 - u in (0, 1]
        return r * np.exp(2j * np.pi * u[1])


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error.

    ``std_error`` is ``sqrt(s^2 / N)`` with ``s^2`` the unbiased sample
    variance; for complex samples ``s^2`` is the variance of the modulus
    of the deviation, i.e. the sum of the real and imaginary variances.
    ``mean`` and ``std_error`` may also be arrays (entrywise estimates).
    """

    mean: complex | float | np.ndarray
    std_error: float | np.ndarray
    n_samples: int

    def within(self, value, k: float = 4.0) -> bool:
        """True if ``value`` lies within ``k`` standard errors (entrywise)."""
        return bool(np.all(np.abs(np.asarray(self.mean) - value) <= k * np.asarray(self.std_error)))


def sample_pure_batch(sampler: SeededSampler, n: int, m: int) -> np.ndarray:
    """``m`` unit vectors in C^n, one per row, distributed uniformly."""
    z = sampler.complex_normal((m, n))
    nrm = np.linalg.norm(z, axis=1)
    bad = np.flatnonzero(nrm == 0.0)
    while bad.size:  # probability zero, kept for the contract
        z[bad] = sampler.complex_normal((bad.size, n))
        nrm[bad] = np.linalg.norm(z[bad], axis=1)
        bad = bad[nrm[bad] == 0.0]
    return z / nrm[:, None]


def sample_pure(sampler: SeededSampler, n: int) -> PurePoint:
    """One point drawn from the invariant probability measure."""
    return PurePoint(sample_pure_batch(sampler, n, 1)[0])


def haar_unitary(sampler: SeededSampler, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the phases of ``diag(R)`` removed."""
    while True:
        z = sampler.complex_normal((n, n))
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        if np.min(np.abs(d)) > 1e-12 * np.abs(z).max():
            return q * (d / np.abs(d))


def sample_basis(sampler: SeededSampler, n: int) -> list[PurePoint]:
    """A random orthonormal basis, returned as ``n`` points."""
    u = haar_unitary(sampler, n)
    return [PurePoint(u[:, k]) for k in range(n)]


def random_hermitian(sampler: SeededSampler, n: int, scale: float = 1.0) -> np.ndarray:
    """GUE-type Hermitian matrix ``scale * (G + G*)/2``."""
    g = sampler.complex_normal((n, n))
    return scale * 0.5 * (g + dagger(g))


def random_density(sampler: SeededSampler, n: int, rank: int | None = None) -> np.ndarray:
    """Random state ``G G* / tr(G G*)`` with ``G`` an ``n x rank`` Gaussian.

    ``rank`` defaults to a uniformly chosen value in ``1..n``.
    """
    if rank is None:
        rank = 1 + int(sampler.uniform(()) * n)
    g = sampler.complex_normal((n, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def _combine(a, b):
    # Chan et al. pairwise merge of (count, mean, M2)
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    mean = ma + delta * (nb / n)
    m2 = sa + sb + np.abs(delta) ** 2 * (na * nb / n)
    return n, mean, m2


def mc_integrate(
    f: Callable,
    N: int,
    sampler: SeededSampler,
    n: int,
    *,
    batched: bool = False,
) -> McEstimate:
    """Monte-Carlo estimate of the integral of ``f`` over the projective space.

    Parameters
    ----------
    f : callable
        Scalar function of a :class:`PurePoint`.  With ``batched=True`` it
        instead receives an ``(m, n)`` array of unit vectors and must return
        ``m`` values (or an ``(m, ...)`` array for entrywise estimates).
    N : int
        Number of samples, at least 2.
    sampler : SeededSampler
        Source of randomness.  A fresh child stream is spawned per call and
        chunk ``k`` of :data:`CHUNK_SIZE` samples uses sub-stream ``k`` of
        that child, so the estimate does not depend on how chunks would be
        distributed among workers.
    n : int
        Hilbert space dimension.
    """
    if N < 2:
        raise ValueError("mc_integrate needs at least 2 samples")
    stream = sampler.spawn()
    acc = None
    for k, start in enumerate(range(0, N, CHUNK_SIZE)):
        m = min(CHUNK_SIZE, N - start)
        psis = sample_pure_batch(stream.substream(k), n, m)
        if batched:
            vals = np.asarray(f(psis))
        else:
            vals = np.asarray([f(PurePoint(psi)) for psi in psis])
        if vals.shape[0] != m:
            raise ValueError(f"integrand returned {vals.shape[0]} values for {m} samples")
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.flatnonzero(bad.reshape(m, -1).any(axis=1))[0])
            raise GeoQMError(
                f"integrand is not finite at sample {start + i} "
                f"(psi = {np.array2string(psis[i], precision=6)})")
        if not np.iscomplexobj(vals):
            vals = vals.astype(float)
        mean = vals.mean(axis=0)
        chunk = (m, mean, np.sum(np.abs(vals - mean) ** 2, axis=0))
        acc = chunk if acc is None else _combine(acc, chunk)
    total, mean, m2 = acc
    std = np.sqrt(m2 / (total - 1) / total)
    if np.ndim(mean) == 0:
        mean = complex(mean) if np.iscomplexobj(mean) else float(mean)
        std = float(std)
    return McEstimate(mean=mean, std_error=std, n_samples=total)


def exact_integral_FA(a) -> complex:
    """Integral of ``p -> tr(pA)``: ``tr(A)/n``."""
    a = as_matrix(a)
    return complex(np.trace(a)) / a.shape[0]


def exact_integral_pair(a, b) -> complex:
    """Integral of ``conj(tr(pA)) tr(pB)``: ``(tr(A*B) + conj(tr A) tr B) / (n(n+1))``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    n = a.shape[0]
    return (np.vdot(a, b) + np.conj(np.trace(a)) * np.trace(b)) / (n * (n + 1))


def hs_from_integrals(int_ab: complex, int_a: complex, int_b: complex, n: int) -> complex:
    """Recover ``tr(A*B)`` from the integrals of ``conj(F_A) F_B``, ``conj(F_A)`` and ``F_B``."""
    return n * (n + 1) * int_ab - n * n * int_a * int_b
