"""Numerical tolerances, overridable globally or in a ``with`` block."""
from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10
    trace: float = 1e-10
    norm: float = 1e-10
    psd: float = 1e-10
    unitary: float = 1e-10
    frame: float = 1e-8
    # Jacobi stops once the off-diagonal HS norm is below jacobi_rel * ||A||_2
    jacobi_rel: float = 1e-14
    jacobi_max_sweeps: int = 100
    # minimum eigen-gap accepted when reprojecting onto a rank-1 projector
    reproject_gap: float = 1e-8


_current = Tolerances()


def get_tolerances() -> Tolerances:
    return _current


def set_tolerances(**overrides) -> Tolerances:
    """Replace the process-wide tolerances; returns the previous value."""
    global _current
    previous = _current
    _current = dataclasses.replace(_current, **overrides)
    return previous


@contextlib.contextmanager
def tolerances(**overrides):
    global _current
    previous = set_tolerances(**overrides)
    try:
        yield _current
    finally:
        _current = previous
