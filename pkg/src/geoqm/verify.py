"""Identity suite behind ``geoqm verify``.

Each check measures the violation of one identity on random data drawn
from a seeded sampler and compares it with a fixed threshold.  Checks that
theory predicts to fail for the configured ``kappa`` (or dimension) are
reported with status ``"expected"`` or ``"skipped"`` and never count as
failures.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import algebra, dynamics, geometry, maps, measures
from .config import get_tolerances, tolerances
from .linalg import PurePoint, dagger, eig_hermitian, norms
from .measures import SeededSampler, random_density, random_hermitian, sample_basis, sample_pure
from .observables import AffineObservable, QuantParams, integral

PASS, FAIL, EXPECTED, SKIPPED = "pass", "fail", "expected", "skipped"


@dataclass
class Check:
    name: str
    identity: str
    violation: float
    threshold: float
    status: str = ""
    note: str = ""

    def __post_init__(self):
        if not self.status:
            self.status = PASS if self.violation <= self.threshold else FAIL


@dataclass
class VerifyConfig:
    n: int = 3
    kappa: float | None = None
    seed: int = 42
    samples: int = 100_000
    trials: int = 100
    tol: dict = field(default_factory=dict)

    def params(self) -> QuantParams:
        return QuantParams(self.n, self.n + 1.0 if self.kappa is None else self.kappa)


def _max(vals) -> float:
    return float(max(vals)) if len(vals) else 0.0


def _linalg(cfg, s):
    n = cfg.n
    res, chain, states = [], [], []
    for _ in range(cfg.trials):
        a = random_hermitian(s, n)
        w, v = eig_hermitian(a)
        res.append(np.linalg.norm((v * w) @ dagger(v) - a) / np.linalg.norm(a))
        g = s.complex_normal((n, n))
        op, tr, hs = norms(g)
        chain.append(max(op - hs, hs - tr, 0.0))
        sig = random_density(s, n)
        op2, _, hs2 = norms(sig)
        states.append(max(n ** -0.5 - hs2, hs2 - 1, 1.0 / n - op2, op2 - 1, 0.0))
    yield Check("eigen_reconstruction", "||V diag(w) V* - A||_2 / ||A||_2", _max(res), 1e-10)
    yield Check("norm_chain", "||A|| <= ||A||_2 <= ||A||_1", _max(chain), 1e-12)
    yield Check("state_norm_bounds", "n^-1/2 <= ||s||_2 <= 1, 1/n <= ||s|| <= 1", _max(states), 1e-12)


def _geometry(cfg, s, q):
    n, k = cfg.n, geometry.KahlerParams(q.kappa)
    anti, sym, neg, jj, c1, c2, c3, ham = ([] for _ in range(8))
    for _ in range(cfg.trials):
        p = sample_pure(s, n)
        u = geometry.tangent(p, random_hermitian(s, n))
        v = geometry.tangent(p, random_hermitian(s, n))
        ju, jv = geometry.acs(p, u), geometry.acs(p, v)
        anti.append(abs(geometry.omega(p, u, v, k) + geometry.omega(p, v, u, k)))
        sym.append(abs(geometry.fs_metric(p, u, v, k) - geometry.fs_metric(p, v, u, k)))
        neg.append(max(0.0, -geometry.fs_metric(p, u, u, k)))
        jj.append(np.abs(geometry.acs(p, ju).matrix + u.matrix).max())
        c1.append(abs(geometry.omega(p, u, v, k) - geometry.fs_metric(p, ju, v, k)))
        c2.append(abs(geometry.fs_metric(p, ju, jv, k) - geometry.fs_metric(p, u, v, k)))
        c3.append(abs(geometry.omega(p, ju, jv, k) - geometry.omega(p, u, v, k)))
        a = random_hermitian(s, n)
        x = geometry.hamiltonian_field(a, p)
        ham.append(abs(geometry.omega(p, x, v, k) - q.kappa * np.trace(v.matrix @ a).real))
    yield Check("omega_antisymmetry", "omega(u,v) + omega(v,u) = 0", _max(anti), 1e-12)
    yield Check("metric_symmetry", "g(u,v) = g(v,u)", _max(sym), 1e-12)
    yield Check("metric_positivity", "g(u,u) >= 0", _max(neg), 1e-12)
    yield Check("acs_square", "j j v = -v", _max(jj), 1e-12)
    yield Check("kahler_compatibility", "omega(u,v) = g(ju, v) = -g(u, jv)", _max(c1), 1e-12)
    yield Check("acs_isometry", "g(ju,jv) = g(u,v)", _max(c2), 1e-12)
    yield Check("acs_symplectic", "omega(ju,jv) = omega(u,v)", _max(c3), 1e-12)
    yield Check("hamiltonian_field", "omega(X_fA, v) = kappa tr(vA)", _max(ham), 1e-12)


def _observables(cfg, s, q):
    n = cfg.n
    pb, var, frame_a, frame_rho, norm1, expect, roundtrip, cov = ([] for _ in range(8))
    q1 = QuantParams(n, 1.0)
    for _ in range(cfg.trials):
        a, b = random_hermitian(s, n), random_hermitian(s, n)
        fa, fb = maps.quantize_inverse(a, q), maps.quantize_inverse(b, q)
        p = sample_pure(s, n)
        pb.append(abs(geometry.poisson(fa, fb)(p) - geometry.poisson_at(fa, fb, p)))
        g1 = maps.quantize_inverse(a, q1)
        variance = np.vdot(p.psi, a @ a @ p.psi).real - np.vdot(p.psi, a @ p.psi).real ** 2
        var.append(abs(0.5 * geometry.cometric(g1, g1, p) - variance))
        basis = sample_basis(s, n)
        sigma = random_density(s, n)
        rho = maps.state_to_density(sigma, q)
        frame_a.append(abs(sum(fa(x) for x in basis) - np.trace(a).real))
        frame_rho.append(abs(sum(rho(x) for x in basis) - n))
        norm1.append(abs(integral(rho) - 1.0))
        rep = maps.expectation_match(sigma, a, q)
        expect.append(abs(rep.quantum - rep.classical_exact))
        roundtrip.append(np.abs(maps.dequantize(fa) - a).max())
    yield Check("poisson_bracket", "{f_A, f_B} = f_{-i[A,B]} = omega(X_fA, X_fB)", _max(pb), 1e-10)
    yield Check("variance_cometric", "kappa=1: G(df_A, df_A)/2 = <A^2> - <A>^2", _max(var), 1e-12)
    yield Check("frame_weight_observable", "sum_i tr(p_i A) = tr A", _max(frame_a), 1e-10)
    yield Check("frame_weight_density", "sum_i rho(p_i) = n", _max(frame_rho), 1e-10)
    yield Check("density_normalization", "int rho dmu = 1", _max(norm1), 1e-12)
    yield Check("expectation_match", "tr(sigma A) = int rho_sigma f_A dmu", _max(expect), 1e-12)
    yield Check("dequantize_roundtrip", "O^-1(O(A)) = A", _max(roundtrip), 1e-12)
    a = random_hermitian(s, n)
    yield Check("covariance", "f_A(U p U*) = f_{U* A U}(p)",
                maps.covariance_check(a, q, cfg.trials, s), 1e-11)
    yield Check("killing", "omega, g invariant under e^{-itH}",
                dynamics.killing_check(random_hermitian(s, n), q, cfg.trials, s), 1e-11)


def _integrals(cfg, s, q):
    n = cfg.n
    a, b = random_hermitian(s, n), random_hermitian(s, n)
    fa = AffineObservable(a, 0.0, q)
    fb = AffineObservable(b, 0.0, q)
    exact1 = measures.exact_integral_FA(a)
    exact2 = measures.exact_integral_pair(a, b)
    mc1 = measures.mc_integrate(fa.batch, cfg.samples, s, n, batched=True)
    mc2 = measures.mc_integrate(lambda x: fa.batch(x) * fb.batch(x), cfg.samples, s, n, batched=True)
    yield Check("trace_integral_one", "int tr(pA) dmu = tr A / n  [|mc - exact| / std_error]",
                abs(mc1.mean - exact1) / mc1.std_error, 4.0)
    yield Check("trace_integral_two",
                "int tr(pA) tr(pB) dmu = (tr AB + tr A tr B)/(n(n+1))  [|mc - exact| / std_error]",
                abs(mc2.mean - exact2) / mc2.std_error, 4.0)
    inv = measures.hs_from_integrals(exact2, np.conj(exact1), measures.exact_integral_FA(b), n)
    yield Check("trace_integral_inversion", "n(n+1) int FA FB - n^2 int FA int FB = tr(A* B)",
                abs(inv - np.trace(dagger(a) @ b)), 1e-12)
    fq = maps.quantize_inverse(a, q)
    est = maps.dequantize_blackbox(fq.batch, cfg.samples, s, q, batched=True)
    z = np.abs(est.mean - a) / est.std_error
    yield Check("dequantize_kernel_mc", "int f_A Omega dmu = A  [max entrywise z-score]",
                float(z.max()), 4.0)


def _bounds_positivity(cfg, s, q):
    n = cfg.n
    a = random_hermitian(s, n)
    rep = maps.bounds(a, q)
    w, v = eig_hermitian(a)
    f = maps.quantize_inverse(a, q)
    attained = max(abs(f(PurePoint(v[:, 0])) - rep.min_f), abs(f(PurePoint(v[:, -1])) - rep.max_f))
    yield Check("bounds_attained", "min/max f_A attained at extreme eigenprojectors", attained, 1e-12)
    vals = f.batch(measures.sample_pure_batch(s.spawn(), n, cfg.samples))
    outside = max(rep.min_f - vals.min(), vals.max() - rep.max_f, 0.0)
    yield Check("bounds_contain_samples", "min f_A <= f_A(p) <= max f_A", outside, 1e-12)
    yield Check("range_in_spectrum_consistency", "f_A within spectrum range iff kappa <= 1",
                0.0 if rep.range_in_spectrum == (q.kappa <= 1) else 1.0, 0.0,
                note="range inside spectrum" if rep.range_in_spectrum else "range exceeds spectrum for this kappa (expected)")
    if rep.estimate_holds is not None:
        yield Check("sup_norm_estimate", "||f_A||_inf within its kappa-dependent bound",
                    0.0 if rep.estimate_holds else 1.0, 0.0)
    pos = maps.positivity_check(q, max(cfg.trials * 10, 1000), s)
    if q.kappa >= n + 1:
        yield Check("density_positivity", "rho_sigma(p) >= 0 for kappa >= n+1",
                    max(0.0, -pos.worst_sampled), 1e-12)
    else:
        yield Check("density_positivity", "rho_sigma(p) >= 0 for kappa >= n+1",
                    max(0.0, -pos.worst_sampled), 1e-12, status=EXPECTED,
                    note=f"kappa < n+1: negative densities expected by theory "
                         f"(analytic minimum {pos.worst:.6g}, sampled {pos.worst_sampled:.6g})")


def _gleason(cfg, s, q):
    n = cfg.n
    if n == 2:
        yield Check("gleason_fit", "frame function = tr(pA)", 0.0, 0.0, status=SKIPPED,
                    note="dimension 2: frame functions need not be of the form tr(pA)")
        return
    a = random_hermitian(s, n)
    pts = [sample_pure(s, n) for _ in range(max(50, 2 * n * n))]
    fit = maps.gleason_fit([(p, float(np.vdot(p.psi, a @ p.psi).real)) for p in pts])
    yield Check("gleason_fit", "noiseless tr(pA) samples recover A", float(np.abs(fit.operator - a).max()), 1e-10)


def _dynamics(cfg, s, q):
    n = cfg.n
    h = random_hermitian(s, n)
    p0 = sample_pure(s, n)
    traj = dynamics.evolve_flow(h, p0, dynamics.FlowConfig(dt=1e-3, t_final=1.0))
    exact = dynamics.evolve_exact(h, p0, 1.0)
    yield Check("flow_vs_schrodinger", "||p_flow(1) - p_exact(1)||_2, dt=1e-3",
                float(np.linalg.norm(traj.final.projector - exact.projector)), 1e-6)
    fh = maps.quantize_inverse(h, q)
    energy = [fh(x) for x in traj.points]
    yield Check("energy_conservation", "f_H constant along the flow", float(np.ptp(energy)), 1e-8)
    a = random_hermitian(s, n)
    fa = maps.quantize_inverse(a, q)
    pt = dynamics.evolve_exact(h, p0, 0.7)
    duality = abs(fa(pt) - maps.quantize_inverse(dynamics.heisenberg(a, h, 0.7), q)(p0))
    yield Check("heisenberg_duality", "f_A(p(t)) = f_{A(t)}(p0)", duality, 1e-10)


def _algebra(cfg, s, q):
    n = cfg.n
    star, norm, cstar, lj, leib = ([] for _ in range(5))
    for _ in range(cfg.trials):
        a, b, c = (random_hermitian(s, n) for _ in range(3))
        fa, fb, fc = (maps.quantize_inverse(x, q) for x in (a, b, c))
        p = sample_pure(s, n)
        prod = algebra.star_operator(fa, fb)
        star.append(abs(prod(p) - algebra.star_geometric(fa, fb, p)))
        norm.append(abs(algebra.cstar_norm(fa) - norms(a).op))
        z = maps.quantize_inverse(a + 1j * b, q)
        cstar.append(abs(algebra.cstar_norm(algebra.star_operator(z.conj(), z))
                         - algebra.cstar_norm(z) ** 2) / max(1.0, algebra.cstar_norm(z) ** 2))
        lj.append(abs(prod(p) - (0.5j * algebra.lie(fa, fb)(p) + algebra.jordan(fa, fb)(p))))
        lhs = algebra.lie(fa, algebra.jordan(fb, fc))
        rhs = algebra.jordan(algebra.lie(fa, fb), fc) + algebra.jordan(fb, algebra.lie(fa, fc))
        leib.append(abs(lhs(p) - rhs(p)))
    yield Check("star_geometric_vs_operator", "O(AB)(p) = geometric star expression", _max(star), 1e-10)
    yield Check("cstar_norm", "|||f_A||| = ||A||", _max(norm), 1e-10)
    yield Check("cstar_identity", "|||conj(f) * f||| = |||f|||^2 (relative)", _max(cstar), 1e-10)
    yield Check("lie_jordan_recomposition", "f * g = (i/2){f,g} + f o g", _max(lj), 1e-12)
    yield Check("leibniz_rule", "{f, g o h} = {f,g} o h + g o {f,h}", _max(leib), 1e-10)


def _reflection(cfg, s, q):
    n = cfg.n
    worst = []
    for _ in range(cfg.trials):
        phi, psi = sample_pure(s, n).psi, sample_pure(s, n).psi
        u = maps.reflection_unitary(phi, psi)
        worst.append(max(np.abs(u - dagger(u)).max(), np.abs(u @ u - np.eye(n)).max(),
                         abs(abs(np.vdot(psi, u @ phi)) - 1.0)))
    yield Check("reflection_unitary", "U = U* = U^-1, U phi = alpha psi", _max(worst), 1e-12)


SUITES = (_linalg, _geometry, _observables, _integrals, _bounds_positivity, _gleason,
          _dynamics, _algebra, _reflection)


def run(cfg: VerifyConfig) -> dict:
    """Run every suite and return the report as a JSON-ready dict."""
    q = cfg.params()
    root = SeededSampler(cfg.seed)
    checks: list[Check] = []
    with tolerances(**cfg.tol), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for k, suite in enumerate(SUITES):
            s = root.substream(k)
            checks.extend(suite(cfg, s) if suite is _linalg else suite(cfg, s, q))
        tol = get_tolerances()
    return {
        "config": {"n": q.n, "kappa": q.kappa, "seed": cfg.seed, "samples": cfg.samples,
                   "trials": cfg.trials, "tolerances": asdict(tol)},
        "derived": {"c": q.c, "kappa_prime": q.kappa_prime, "c_prime": q.c_prime,
                    "range_in_spectrum": q.kappa <= 1.0, "densities_nonnegative": q.kappa >= q.n + 1},
        "checks": [asdict(c) for c in checks],
        "all_passed": all(c.status != FAIL for c in checks),
    }
