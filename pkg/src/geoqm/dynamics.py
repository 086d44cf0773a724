"""Schrödinger evolution and the equivalent Hamiltonian flow on projective space."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import get_tolerances
from .errors import DegenerateError
from .geometry import metric_generators, omega_generators
from .linalg import HermitianOperator, PurePoint, dagger, expm_unitary, projector
from .measures import SeededSampler, random_hermitian, sample_pure_batch
from .observables import QuantParams

__all__ = [
    "FlowConfig",
    "Trajectory",
    "evolve_exact",
    "evolve_flow",
    "heisenberg",
    "killing_check",
]


@dataclass(frozen=True)
class FlowConfig:
    """Integration settings for :func:`evolve_flow`.

    ``stride`` controls how many steps separate stored trajectory points;
    the initial and final points are always stored.
    """

    dt: float
    t_final: float
    method: str = "rk4"
    reproject: bool = True
    stride: int = 10

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > self.t_final:
            raise ValueError("dt must not exceed t_final")
        if self.method != "rk4":
            raise ValueError(f"unknown method {self.method!r}")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    points: list[PurePoint]
    final_projector: np.ndarray = field(repr=False)

    @property
    def final(self) -> PurePoint:
        return self.points[-1]


def evolve_exact(h, p0: PurePoint, t: float) -> PurePoint:
    """``e^{-itH} psi0``; the projector evolves as ``U p0 U*``."""
    return PurePoint(expm_unitary(h, t) @ p0.psi)


def heisenberg(a, h, t: float) -> np.ndarray:
    """``e^{itH} A e^{-itH}``."""
    u = expm_unitary(h, t)
    return HermitianOperator(dagger(u) @ HermitianOperator(a).matrix @ u).matrix


def _dominant(p: np.ndarray, guess: np.ndarray) -> np.ndarray:
    # power iteration on the (nearly rank-one) Hermitian part of p
    p = 0.5 * (p + dagger(p))
    v = guess
    for _ in range(3):
        v = p @ v
        v = v / np.linalg.norm(v)
    lam = np.vdot(v, p @ v).real
    rest = np.linalg.norm(p - lam * projector(v))
    if lam - rest < get_tolerances().reproject_gap:
        raise DegenerateError(
            f"cannot reproject: leading eigenvalue {lam:.3e} is not separated "
            f"from the rest (residual norm {rest:.3e}); reduce dt")
    return v


def evolve_flow(h, p0: PurePoint, cfg: FlowConfig) -> Trajectory:
    """Integrate ``dp/dt = -i[H, p]`` with classical RK4 on matrices.

    With ``cfg.reproject`` each step is followed by replacing ``p`` with
    the projector onto its dominant eigenvector, which keeps ``p`` a pure
    state to round-off.  Stored points are the dominant eigenvectors.
    """
    hm = HermitianOperator(h).matrix
    steps = int(round(cfg.t_final / cfg.dt))
    dt = cfg.t_final / steps

    def rhs(p):
        return -1j * (hm @ p - p @ hm)

    p = np.array(p0.projector)
    psi = np.array(p0.psi)
    times, points = [0.0], [p0]
    for k in range(1, steps + 1):
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * dt * k1)
        k3 = rhs(p + 0.5 * dt * k2)
        k4 = rhs(p + dt * k3)
        p = p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if cfg.reproject or k % cfg.stride == 0 or k == steps:
            psi = _dominant(p, psi)
        if cfg.reproject:
            p = projector(psi)
        if k % cfg.stride == 0 or k == steps:
            times.append(k * dt)
            points.append(PurePoint(psi))
    return Trajectory(np.asarray(times), points, p)


def killing_check(h, q: QuantParams, trials: int, sampler: SeededSampler) -> float:
    """Largest change of ``omega`` and ``g`` under the flow ``U = e^{-itH}``.

    Each trial draws ``t``, a point and two generators, pushes all three
    forward by ``U`` and compares both forms before and after.
    """
    hm = HermitianOperator(h).matrix
    n = hm.shape[0]
    stream = sampler.spawn()
    worst = 0.0
    for _ in range(trials):
        t = 4.0 * stream.uniform(()) - 2.0
        u = expm_unitary(hm, t)
        psi = sample_pure_batch(stream, n, 1)[0]
        au, av = random_hermitian(stream, n), random_hermitian(stream, n)
        p = projector(psi)
        pt = projector(u @ psi)
        aut, avt = u @ au @ dagger(u), u @ av @ dagger(u)
        for form in (omega_generators, metric_generators):
            before = form(p, au, av, q.kappa).real
            after = form(pt, aut, avt, q.kappa).real
            worst = max(worst, abs(before - after))
    return worst
