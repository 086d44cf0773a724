"""Observable and state maps between operators and functions on projective space.

For a parameter pair ``q = QuantParams(n, kappa)``:

* observables  ``A -> f_A(p) = kappa tr(pA) + c tr(A)``
* states       ``sigma -> rho_sigma(p) = kappa' tr(sigma p) + c'``
* dequantizer  ``A = ∫ f_A(p) Omega(p) dmu(p)`` with
  ``Omega(p) = kappa' p + c' I``, so that ``tr(sigma Omega(p)) = rho_sigma(p)``

``dmu`` is always the invariant probability measure.
"""
from __future__ import annotations

import warnings
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .config import get_tolerances
from .errors import DegenerateError, DimensionMismatch, GeoQMError, SchemaError
from .linalg import (
    DensityMatrix,
    HermitianOperator,
    PurePoint,
    as_matrix,
    dagger,
    eig_hermitian,
    norms,
    projector,
)
from .measures import (
    McEstimate,
    SeededSampler,
    haar_unitary,
    mc_integrate,
    random_density,
    sample_basis,
    sample_pure_batch,
)
from .observables import (
    AffineObservable,
    LiouvilleDensity,
    QuantParams,
    integral,
    integral_product,
)

__all__ = [
    "BoundsReport",
    "CharacterizeResult",
    "ExpectationReport",
    "FrameCheck",
    "GleasonFit",
    "PositivityReport",
    "bounds",
    "characterize",
    "covariance_check",
    "dequantize",
    "dequantize_blackbox",
    "dequantizer_kernel",
    "expectation_match",
    "frame_check",
    "gleason_fit",
    "observable_with_offset",
    "positivity_check",
    "quantize_inverse",
    "reflection_unitary",
    "state_to_density",
]


def _dim_check(a: np.ndarray, q: QuantParams):
    if a.shape[0] != q.n:
        raise DimensionMismatch(f"operator is {a.shape[0]}x{a.shape[0]}, params say n={q.n}")


def quantize_inverse(a, q: QuantParams) -> AffineObservable:
    """Classical-like observable ``f_A`` of an operator.

    Hermitian ``A`` gives a real function.  Non-Hermitian input is accepted
    and mapped by complex linearity.
    """
    a = as_matrix(a)
    _dim_check(a, q)
    return AffineObservable(q.kappa * a, q.c * np.trace(a), q)


def observable_with_offset(a, kappa: float, c: float) -> AffineObservable:
    """``kappa tr(pA) + c tr(A)`` for an arbitrary offset coefficient ``c``.

    The map is injective exactly when ``kappa + n c != 0``; the returned
    observable still carries ``QuantParams(n, kappa)``, so only the default
    ``c`` round-trips through :func:`dequantize`.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if abs(kappa + n * c) <= 1e-14 * max(1.0, abs(kappa)):
        raise ValueError("kappa + n c must not vanish: the map would not be injective")
    return AffineObservable(kappa * a, c * np.trace(a), QuantParams(n, kappa))


def state_to_density(sigma, q: QuantParams) -> LiouvilleDensity:
    if not isinstance(sigma, DensityMatrix):
        sigma = DensityMatrix(sigma)
    _dim_check(sigma.matrix, q)
    return LiouvilleDensity(sigma.matrix, q)


def dequantize(f: AffineObservable) -> np.ndarray:
    """Operator ``A`` with ``f = f_A``.

    Every affine ``f`` is the frame function of ``B = K + bI``, and since
    ``kappa + n c = 1`` the operator is ``A = (B - c tr(B) I)/kappa``.  The
    answer depends only on ``f`` as a function, not on how it is split into
    kernel and offset.  It is Hermitian whenever ``f`` is real.
    """
    q = f.params
    bop = f.frame_operator
    return (bop - q.c * np.trace(bop) * np.eye(q.n)) / q.kappa


def dequantizer_kernel(psis: np.ndarray, q: QuantParams) -> np.ndarray:
    """``Omega(p) = kappa' p + c' I`` for one vector or an ``(m, n)`` stack."""
    return q.kappa_prime * projector(psis) + q.c_prime * np.eye(q.n)


def dequantize_blackbox(F: Callable, N: int, sampler: SeededSampler, q: QuantParams,
                        *, batched: bool = False) -> McEstimate:
    """Monte-Carlo estimate of ``∫ F(p) Omega(p) dmu``, entrywise.

    ``F`` follows the calling convention of :func:`mc_integrate`.  The
    returned estimate holds an ``n x n`` mean and entrywise standard errors.
    """
    def integrand(psis):
        vals = np.asarray(F(psis)) if batched else np.asarray([F(PurePoint(x)) for x in psis])
        return vals[:, None, None] * dequantizer_kernel(psis, q)

    return mc_integrate(integrand, N, sampler, q.n, batched=True)


class ExpectationReport(NamedTuple):
    quantum: float
    classical_exact: float
    classical_mc: McEstimate | None


def expectation_match(sigma, a, q: QuantParams, *, samples: int = 0,
                      sampler: SeededSampler | None = None) -> ExpectationReport:
    """Quantum expectation ``tr(sigma A)`` against ``∫ rho_sigma f_A dmu``.

    The classical side is computed exactly from the trace-integral formulas;
    with ``samples > 0`` a Monte-Carlo estimate is added.
    """
    rho = state_to_density(sigma, q)
    a = HermitianOperator(a).matrix
    f = quantize_inverse(a, q)
    quantum = float(np.trace(rho.state @ a).real)
    exact = integral_product(rho, f).real
    mc = None
    if samples:
        if sampler is None:
            raise ValueError("a sampler is required for the Monte-Carlo estimate")
        mc = mc_integrate(lambda x: rho.batch(x) * f.batch(x), samples, sampler, q.n, batched=True)
    return ExpectationReport(quantum, float(exact), mc)


class FrameCheck(NamedTuple):
    is_frame: bool
    weight: complex | float
    spread: float


def frame_check(F: Callable, trials: int, sampler: SeededSampler, n: int,
                tol: float | None = None) -> FrameCheck:
    """Test whether basis sums of ``F`` are constant over random bases.

    ``F`` is called on :class:`PurePoint` instances.  ``spread`` is the
    largest distance between two observed sums (real and imaginary parts
    together); ``is_frame`` holds when it does not exceed ``tol``.
    """
    if trials < 2:
        raise ValueError("frame_check needs at least 2 bases")
    tol = get_tolerances().frame if tol is None else tol
    sums = []
    for t in range(trials):
        vals = [F(p) for p in sample_basis(sampler, n)]
        if not np.all(np.isfinite(vals)):
            raise GeoQMError(f"F is not finite on basis {t}")
        sums.append(np.sum(vals))
    sums = np.asarray(sums)
    spread = float(np.hypot(np.ptp(sums.real), np.ptp(np.imag(sums))))
    weight = sums.mean()
    if not np.iscomplexobj(sums) or np.all(sums.imag == 0):
        weight = float(np.real(weight))
    return FrameCheck(spread <= tol, weight, spread)


class GleasonFit(NamedTuple):
    operator: np.ndarray
    residual: float
    hermitian: bool


def _hermitian_design(psis: np.ndarray) -> np.ndarray:
    n = psis.shape[1]
    cols = [np.abs(psis[:, i]) ** 2 for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w = np.conj(psis[:, i]) * psis[:, j]
            cols.append(2.0 * w.real)    # coefficient of Re A_ij
            cols.append(-2.0 * w.imag)   # coefficient of Im A_ij
    return np.stack(cols, axis=1)


def _hermitian_from_params(x: np.ndarray, n: int) -> np.ndarray:
    a = np.diag(x[:n]).astype(np.complex128)
    k = n
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = x[k] + 1j * x[k + 1]
            a[j, i] = np.conj(a[i, j])
            k += 2
    return a


def gleason_fit(samples: Sequence[tuple[PurePoint, complex]]) -> GleasonFit:
    """Least-squares operator ``A`` with ``value ≈ tr(pA)`` over the samples.

    Real values give a Hermitian fit over the ``n^2`` real parameters of a
    self-adjoint matrix; complex values give a general complex fit.  The
    residual is the RMS misfit.  In dimension 2 frame functions need not be
    of this form, so the fit is best effort and a warning is emitted.
    """
    if not samples:
        raise DegenerateError("no samples")
    psis = np.stack([p.psi if isinstance(p, PurePoint) else np.asarray(p) for p, _ in samples])
    vals = np.asarray([v for _, v in samples])
    m, n = psis.shape
    if n == 2:
        warnings.warn("dimension 2: a frame function need not be tr(pA); fit is best effort",
                      stacklevel=2)
    if m < n * n:
        raise DegenerateError(f"need at least n^2 = {n * n} samples, got {m}")
    hermitian = not np.iscomplexobj(vals) or np.abs(vals.imag).max() == 0.0
    if hermitian:
        design = _hermitian_design(psis)
        x, _, rank, _ = np.linalg.lstsq(design, vals.real, rcond=None)
        a = _hermitian_from_params(x, n)
    else:
        design = (np.conj(psis)[:, :, None] * psis[:, None, :]).reshape(m, n * n)
        x, _, rank, _ = np.linalg.lstsq(design, vals, rcond=None)
        a = x.reshape(n, n)
    if rank < n * n:
        raise DegenerateError(
            f"sample set determines only {rank} of {n * n} parameters; add more (generic) samples")
    fitted = np.einsum("mi,ij,mj->m", np.conj(psis), a, psis)
    resid = fitted - vals
    return GleasonFit(a, float(np.sqrt(np.mean(np.abs(resid) ** 2))), hermitian)


class BoundsReport(NamedTuple):
    min_f: float
    max_f: float
    range_in_spectrum: bool
    sup_norm: float
    estimate_holds: bool | None


def bounds(a, q: QuantParams) -> BoundsReport:
    """Exact range of ``f_A`` from the spectrum of ``A``.

    ``range_in_spectrum`` says whether ``f_A`` stays inside ``[min sp A, max sp A]``
    for every ``A`` (true iff ``kappa <= 1``).  ``estimate_holds`` checks
    ``||f_A||_inf <= ||A||`` when ``kappa <= 1`` and
    ``||f_A||_inf <= (1 + 2n|c|) ||A||`` when ``kappa >= n + 1``; it is
    ``None`` in between, where no estimate applies.
    """
    h = HermitianOperator(a)
    _dim_check(h.matrix, q)
    w, _ = eig_hermitian(h)
    tr = float(np.sum(w))
    lo, hi = w[0], w[-1]
    # f = kappa tr(pA) + c tr A with kappa > 0: extremes sit at the extreme eigenprojectors
    min_f = lo + q.c * (tr - q.n * lo)
    max_f = hi + q.c * (tr - q.n * hi)
    sup = max(abs(min_f), abs(max_f))
    op = norms(h).op
    slack = 1e-12 * max(1.0, op)
    if q.kappa <= 1.0:
        est = sup <= op + slack
    elif q.kappa >= q.n + 1:
        est = sup <= (1 + 2 * q.n * abs(q.c)) * op + slack
    else:
        est = None
    return BoundsReport(float(min_f), float(max_f), q.kappa <= 1.0, float(sup), est)


class PositivityReport(NamedTuple):
    always_nonneg: bool
    worst: float
    worst_sampled: float
    witness: tuple[np.ndarray, np.ndarray] | None


def positivity_check(q: QuantParams, trials: int, sampler: SeededSampler) -> PositivityReport:
    """Scan random (state, point) pairs for negative density values.

    ``always_nonneg`` and ``worst`` are exact: the smallest value any
    density takes is ``c'`` (reached where ``tr(sigma p) = 0``), so
    densities are non-negative iff ``kappa >= n + 1``.  ``worst_sampled``
    is the minimum observed over ``trials`` pairs, and ``witness`` is the
    ``(sigma, psi)`` pair achieving it when it is negative.  States are
    drawn with a uniformly random rank so the scan covers pure and mixed
    states alike.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    best, witness = np.inf, None
    stream = sampler.spawn()
    for _ in range(trials):
        sigma = random_density(stream, q.n)
        psi = sample_pure_batch(stream, q.n, 1)[0]
        val = q.kappa_prime * np.vdot(psi, sigma @ psi).real + q.c_prime
        if val < best:
            best, witness = val, (sigma, psi)
    return PositivityReport(q.kappa >= q.n + 1, q.c_prime, float(best),
                            witness if best < 0 else None)


class CharacterizeResult(NamedTuple):
    a: float
    b: float
    is_quantum: bool
    max_residual: float
    std_error: float


def characterize(f: Callable, q: QuantParams, trials: int, sampler: SeededSampler,
                 *, samples: int = 100_000, batched: bool = False, k_sigma: float = 5.0
                 ) -> CharacterizeResult:
    """Decide whether ``f`` is a quantum observable via the pure-state test.

    For random points ``p0`` the integral ``I(p0) = ∫ rho_{p0} f dmu`` is
    estimated by Monte Carlo (one common sample set for all ``p0``) and
    regressed on ``f(p0)``.  ``f`` is declared quantum when the affine fit
    ``I = a f + b`` leaves residuals within ``k_sigma`` standard errors and
    ``|a|`` is itself more than ``k_sigma`` standard errors from zero.
    """
    if trials < 3:
        raise ValueError("characterize needs at least 3 trial points")
    n = q.n

    def evaluate(psis):
        return np.asarray(f(psis)) if batched else np.asarray([f(PurePoint(x)) for x in psis])

    stream = sampler.spawn()
    p0 = sample_pure_batch(stream, n, trials)
    f0 = evaluate(p0).real
    pts = sample_pure_batch(stream, n, samples)
    fv = evaluate(pts).real
    if not (np.all(np.isfinite(f0)) and np.all(np.isfinite(fv))):
        raise GeoQMError("f is not finite on the sample set")
    overlap = np.abs(np.conj(p0) @ pts.T) ** 2            # (trials, samples)
    vals = (q.kappa_prime * overlap + q.c_prime) * fv
    est = vals.mean(axis=1)
    se = vals.std(axis=1, ddof=1) / np.sqrt(samples)

    design = np.stack([f0, np.ones_like(f0)], axis=1)
    if np.ptp(f0) <= 1e-12 * max(1.0, np.abs(f0).max()):
        raise DegenerateError("f is constant on the trial points; the regression is degenerate")
    coef, *_ = np.linalg.lstsq(design, est, rcond=None)
    resid = est - design @ coef
    sigma = float(se.max())
    cov = np.linalg.inv(design.T @ design) * sigma ** 2
    a_se = float(np.sqrt(cov[0, 0]))
    max_res = float(np.abs(resid).max())
    ok = max_res <= k_sigma * sigma and abs(coef[0]) > k_sigma * a_se
    return CharacterizeResult(float(coef[0]), float(coef[1]), bool(ok), max_res, sigma)


def covariance_check(a, q: QuantParams, trials: int, sampler: SeededSampler) -> float:
    """Largest ``|f_A(U p U*) - f_{U* A U}(p)|`` over random ``(U, p)``."""
    a = HermitianOperator(a).matrix
    _dim_check(a, q)
    f = quantize_inverse(a, q)
    stream = sampler.spawn()
    worst = 0.0
    for _ in range(trials):
        u = haar_unitary(stream, q.n)
        psi = sample_pure_batch(stream, q.n, 1)[0]
        lhs = f(u @ psi)
        rhs = quantize_inverse(dagger(u) @ a @ u, q)(psi)
        worst = max(worst, abs(lhs - rhs))
    return worst


def reflection_unitary(phi, psi) -> np.ndarray:
    """Self-adjoint involutive unitary ``U`` with ``U phi = alpha psi``, ``|alpha| = 1``.

    On ``span{phi, psi}`` with orthonormal basis ``(phi, phi1)``, where
    ``psi = a phi + b phi1``, ``U`` acts as ``[[c, conj(d)], [d, -c]]`` with
    ``(c, d) = alpha (a, b)`` and the phase ``alpha`` chosen so that
    ``c >= 0``; it is the identity on the orthogonal complement.
    """
    phi = np.asarray(phi, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    if phi.shape != psi.shape or phi.ndim != 1:
        raise SchemaError("phi and psi must be vectors of the same length")
    tol = get_tolerances().norm
    for v in (phi, psi):
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise GeoQMError("reflection_unitary needs unit vectors")
    n = phi.shape[0]
    a = np.vdot(phi, psi)
    rest = psi - a * phi
    rnorm = np.linalg.norm(rest)
    if rnorm <= 1e-14:
        return np.eye(n, dtype=np.complex128)
    phi1 = rest / rnorm
    b = np.vdot(phi1, psi)
    alpha = np.conj(a) / abs(a) if abs(a) > 0 else 1.0
    c, d = (alpha * a).real, alpha * b
    block = np.array([[c, np.conj(d)], [d, -c]])
    frame = np.stack([phi, phi1], axis=1)
    return np.eye(n) - frame @ dagger(frame) + frame @ block @ dagger(frame)
