"""``geoqm`` command-line front end.

Every subcommand writes a JSON report (or CSV for trajectories and point
samples) to ``--output`` or stdout.  Reports carry the parameters used and
a SHA-256 of the input files, and nothing time dependent, so identical
invocations give byte-identical output.

Exit codes: 0 success, 1 failed verification or numerical error, 2 usage
or malformed config, 3 missing input file, 4 schema violation, 5 dimension
mismatch.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import algebra, dynamics, maps, verify
from .config import Tolerances, get_tolerances, tolerances
from .errors import DimensionMismatch, GeoQMError, InvalidStateError, NotHermitianError, SchemaError
from .jsonio import (
    dumps,
    file_digest,
    load_json,
    matrix_from_json,
    matrix_to_json,
    observable_from_json,
    observable_to_json,
    state_from_json,
    vector_from_json,
    vector_to_json,
)
from .linalg import DensityMatrix, PurePoint, eig_hermitian
from .measures import SeededSampler, sample_pure, sample_pure_batch
from .observables import QuantParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NOFILE, EXIT_SCHEMA, EXIT_DIM = 0, 1, 2, 3, 4, 5

# flags that a --config file may set, with their types and built-in defaults
_CONFIG_KEYS = {
    "n": (int, 3),
    "kappa": (float, None),
    "seed": (int, 42),
    "samples": (int, 100_000),
    "trials": (int, 100),
    "tol": (dict, None),
    "dt": (float, 1e-3),
    "t_final": (float, 1.0),
    "format": (str, "json"),
}


class UsageError(Exception):
    pass


def _parse_tol(items) -> dict:
    names = set(Tolerances.__dataclass_fields__)
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep or key not in names:
            raise UsageError(f"--tol expects NAME=VALUE with NAME in {sorted(names)}, got {item!r}")
        try:
            out[key] = int(val) if key == "jacobi_max_sweeps" else float(val)
        except ValueError:
            raise UsageError(f"--tol {key}: not a number: {val!r}") from None
    return out


def _load_config(path) -> dict:
    try:
        cfg = load_json(path)
    except SchemaError as exc:
        raise UsageError(f"config: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    out = {}
    for raw_key, val in cfg.items():
        key = raw_key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"config: unknown key {raw_key!r}")
        typ = _CONFIG_KEYS[key][0]
        if typ is dict:
            if not isinstance(val, dict):
                raise UsageError("config: 'tol' must be an object")
            out[key] = _parse_tol(f"{k}={v}" for k, v in val.items())
        elif typ is str:
            if not isinstance(val, str):
                raise UsageError(f"config: {raw_key!r} must be a string")
            out[key] = val
        else:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise UsageError(f"config: {raw_key!r} must be a number")
            if typ is int and float(val) != int(val):
                raise UsageError(f"config: {raw_key!r} must be an integer")
            out[key] = typ(val)
    return out


def _settings(args) -> dict:
    """Merge built-in defaults < config file < explicit flags."""
    merged = {k: d for k, (_, d) in _CONFIG_KEYS.items()}
    if args.config:
        merged.update(_load_config(args.config))
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if key == "tol":
            val = _parse_tol(val) if val else None
            if val:
                merged["tol"] = {**(merged["tol"] or {}), **val}
            continue
        if val is not None:
            merged[key] = val
    merged["tol"] = merged["tol"] or {}
    if merged["format"] not in ("json", "csv"):
        raise UsageError(f"unknown format {merged['format']!r}")
    if merged["n"] < 2:
        raise UsageError("n must be >= 2")
    if merged["samples"] < 1 or merged["trials"] < 1:
        raise UsageError("samples and trials must be positive")
    k = merged["kappa"]
    if k is not None and not (math.isfinite(k) and k > 0):
        raise UsageError("kappa must be positive and finite")
    return merged


def _params(s: dict, n: int, payload=None) -> QuantParams:
    kappa = s["kappa"]
    if kappa is None and isinstance(payload, dict) and "kappa" in payload:
        try:
            kappa = float(payload["kappa"])
        except (TypeError, ValueError):
            raise SchemaError("'kappa' must be a number") from None
        if not (math.isfinite(kappa) and kappa > 0):
            raise SchemaError("'kappa' must be positive and finite")
    return QuantParams(n, n + 1.0 if kappa is None else kappa)


def _provenance(command: str, s: dict, q: QuantParams | None, inputs=()) -> dict:
    out = {
        "command": command,
        "seed": s["seed"],
        "tolerances": asdict(get_tolerances()),
    }
    if q is not None:
        out.update(n=q.n, kappa=q.kappa, c=q.c, kappa_prime=q.kappa_prime, c_prime=q.c_prime)
    paths = [p for p in inputs if p is not None]
    if paths:
        out["inputs"] = [Path(p).name for p in paths]
        out["input_sha256"] = file_digest(*paths)
    return out


def _emit(text: str, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _report(payload: dict) -> str:
    return dumps(json.loads(json.dumps(payload, default=_json_default)))


def _read_matrix(path):
    payload = load_json(path)
    return payload, matrix_from_json(payload)


# ---------------------------------------------------------------- commands

def cmd_verify(args, s) -> int:
    cfg = verify.VerifyConfig(n=s["n"], kappa=s["kappa"], seed=s["seed"], samples=s["samples"],
                              trials=s["trials"], tol=s["tol"])
    rep = verify.run(cfg)
    for c in rep["checks"]:
        if c["status"] == verify.SKIPPED:
            print(f"warning: {c['name']} skipped: {c['note']}", file=sys.stderr)
    _emit(_report({"provenance": {"command": "verify"}, **rep}), args.output)
    return EXIT_OK if rep["all_passed"] else EXIT_FAIL


def cmd_quantize(args, s) -> int:
    payload, a = _read_matrix(args.matrix)
    q = _params(s, a.shape[0], payload)
    if args.c is not None:
        f = maps.observable_with_offset(a, q.kappa, args.c)
    else:
        f = maps.quantize_inverse(a, q)
    _emit(_report({"provenance": _provenance("quantize", s, q, [args.matrix]),
                   "observable": observable_to_json(f)}), args.output)
    return EXIT_OK


def cmd_dequantize(args, s) -> int:
    payload = load_json(args.observable)
    if isinstance(payload, dict) and "observable" in payload:
        payload = payload["observable"]  # a quantize report
    f = observable_from_json(payload)
    a = maps.dequantize(f)
    _emit(_report({"provenance": _provenance("dequantize", s, f.params, [args.observable]),
                   "operator": matrix_to_json(a)}), args.output)
    return EXIT_OK


def cmd_star(args, s) -> int:
    pf, a = _read_matrix(args.f)
    pg, b = _read_matrix(args.g)
    if a.shape != b.shape:
        raise DimensionMismatch(f"f is {a.shape[0]}-dimensional, g is {b.shape[0]}-dimensional")
    q = _params(s, a.shape[0], pf)
    fa, fb = maps.quantize_inverse(a, q), maps.quantize_inverse(b, q)
    prod = algebra.star_operator(fa, fb)
    sampler = SeededSampler(s["seed"])
    worst = 0.0
    for _ in range(s["trials"]):
        p = sample_pure(sampler, q.n)
        worst = max(worst, abs(prod(p) - algebra.star_geometric(fa, fb, p)))
    _emit(_report({
        "provenance": _provenance("star", s, q, [args.f, args.g]),
        "product": observable_to_json(prod),
        "agreement": {"points": s["trials"], "max_abs_difference": worst},
    }), args.output)
    return EXIT_OK


def cmd_bounds(args, s) -> int:
    payload, a = _read_matrix(args.matrix)
    q = _params(s, a.shape[0], payload)
    rep = maps.bounds(a, q)
    w, _ = eig_hermitian(a)
    _emit(_report({
        "provenance": _provenance("bounds", s, q, [args.matrix]),
        "min": rep.min_f, "max": rep.max_f, "sup_norm": rep.sup_norm,
        "spectrum": [float(x) for x in w],
        "range_in_spectrum": rep.range_in_spectrum, "densities_nonnegative": q.kappa >= q.n + 1,
        "estimate_holds": rep.estimate_holds,
    }), args.output)
    return EXIT_OK


def cmd_positivity(args, s) -> int:
    q = _params(s, s["n"])
    rep = maps.positivity_check(q, s["samples"], SeededSampler(s["seed"]))
    # the mu-prime normalization (total mass n) divides densities by n
    scale = 1.0 / q.n if args.measure == "mu-prime" else 1.0
    out = {
        "provenance": {**_provenance("positivity", s, q), "samples": s["samples"],
                       "measure": args.measure},
        "always_nonnegative": rep.always_nonneg,
        "analytic_minimum": rep.worst * scale,
        "sampled_minimum": rep.worst_sampled * scale,
        "witness": None,
    }
    if rep.witness is not None:
        sigma, psi = rep.witness
        out["witness"] = {"state": matrix_to_json(sigma), "point": vector_to_json(psi)}
    _emit(_report(out), args.output)
    return EXIT_OK


def cmd_gleason_fit(args, s) -> int:
    payload = load_json(args.data)
    if not isinstance(payload, dict) or "points" not in payload or "values" not in payload:
        raise SchemaError("expected {'points': [vector, ...], 'values': [number or {re, im}, ...]}")
    pts, vals = payload["points"], payload["values"]
    if not isinstance(pts, list) or not isinstance(vals, list) or len(pts) != len(vals):
        raise SchemaError("'points' and 'values' must be lists of equal length")
    vecs = [vector_from_json(p) for p in pts]
    if len({v.shape[0] for v in vecs}) > 1:
        raise DimensionMismatch("points have different dimensions")
    values = []
    for v in vals:
        if isinstance(v, dict):
            values.append(complex(float(v.get("re", 0.0)), float(v.get("im", 0.0))))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            values.append(float(v))
        else:
            raise SchemaError(f"bad value {v!r}")
    if not all(map(np.isfinite, values)):
        raise SchemaError("values contain NaN or infinite entries")
    samples = [(PurePoint.from_vector(v), x) for v, x in zip(vecs, values)]
    n = vecs[0].shape[0] if vecs else 0
    if n == 2:
        print("warning: dimension 2: a frame function need not be tr(pA); fit is best effort",
              file=sys.stderr)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = maps.gleason_fit(samples)
    _emit(_report({
        "provenance": _provenance("gleason-fit", s, None, [args.data]),
        "operator": matrix_to_json(fit.operator),
        "residual": fit.residual, "hermitian": fit.hermitian, "n_samples": len(samples),
    }), args.output)
    return EXIT_OK


def cmd_sample(args, s) -> int:
    n, m = s["n"], s["samples"]
    psis = sample_pure_batch(SeededSampler(s["seed"]), n, m)
    if s["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"{part}_{i}" for i in range(n) for part in ("re", "im")])
        for psi in psis:
            w.writerow([repr(float(x)) for z in psi for x in (z.real, z.imag)])
        _emit(buf.getvalue(), args.output)
    else:
        _emit(_report({"provenance": {**_provenance("sample", s, None), "n": n, "samples": m},
                       "points": [vector_to_json(p) for p in psis]}), args.output)
    return EXIT_OK


def cmd_evolve(args, s) -> int:
    ph, h = _read_matrix(args.hamiltonian)
    state = state_from_json(load_json(args.state))
    if state.shape[0] != h.shape[0]:
        raise DimensionMismatch(f"state has n={state.shape[0]}, Hamiltonian has n={h.shape[0]}")
    if state.ndim == 2:
        sigma = DensityMatrix(state)
        w, v = eig_hermitian(sigma)
        if w[-2] > get_tolerances().psd:
            raise InvalidStateError("evolve needs a pure state (rank-one density matrix)")
        p0 = PurePoint(v[:, -1])
    else:
        p0 = PurePoint.from_vector(state)
    q = _params(s, h.shape[0], ph)
    t_final, dt = s["t_final"], s["dt"]
    try:
        cfg = dynamics.FlowConfig(dt=dt, t_final=t_final, stride=args.stride)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.exact:
        steps = int(round(t_final / dt))
        step = t_final / steps
        ks = list(range(0, steps + 1, args.stride))
        if ks[-1] != steps:
            ks.append(steps)
        ts = [k * step for k in ks]
        pts = [dynamics.evolve_exact(h, p0, t) for t in ts]
    else:
        traj = dynamics.evolve_flow(h, p0, cfg)
        ts, pts = list(traj.times), traj.points
    fh = maps.quantize_inverse(h, q)
    n = q.n
    if s["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"{part}_{i}" for i in range(n) for part in ("re", "im")] + ["f_H"])
        for t, p in zip(ts, pts):
            w.writerow([repr(float(t))] + [repr(float(x)) for z in p.psi for x in (z.real, z.imag)]
                       + [repr(float(fh(p)))])
        _emit(buf.getvalue(), args.output)
    else:
        _emit(_report({
            "provenance": {**_provenance("evolve", s, q, [args.hamiltonian, args.state]),
                           "dt": dt, "t_final": t_final,
                           "method": "exact" if args.exact else "flow"},
            "times": [float(t) for t in ts],
            "states": [vector_to_json(p.psi) for p in pts],
            "f_H": [float(fh(p)) for p in pts],
        }), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="Hilbert space dimension (default 3)")
    common.add_argument("--kappa", type=float, help="symplectic scale (default n+1)")
    common.add_argument("--seed", type=int, help="RNG seed (default 42)")
    common.add_argument("--samples", type=int, help="Monte-Carlo sample count (default 100000)")
    common.add_argument("--trials", type=int, help="random draws per pointwise check (default 100)")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="tolerance override, repeatable")
    common.add_argument("--dt", type=float, help="time step (default 1e-3)")
    common.add_argument("--t-final", dest="t_final", type=float, help="final time (default 1)")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--config", help="JSON file of defaults; explicit flags win")

    parser = argparse.ArgumentParser(prog="geoqm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run every identity suite")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("quantize", parents=[common], help="operator -> affine observable")
    p.add_argument("--matrix", required=True)
    p.add_argument("--c", type=float, help="offset constant (default (1-kappa)/n)")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("dequantize", parents=[common], help="affine observable -> operator")
    p.add_argument("--observable", required=True)
    p.set_defaults(func=cmd_dequantize)

    p = sub.add_parser("star", parents=[common], help="star product of f_A and f_B")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("bounds", parents=[common], help="exact range of f_A")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("positivity", parents=[common], help="scan densities for negative values")
    p.add_argument("--measure", choices=("mu", "mu-prime"), default="mu",
                   help="report densities against the probability measure or its n-fold multiple")
    p.set_defaults(func=cmd_positivity)

    p = sub.add_parser("gleason-fit", parents=[common], help="fit tr(pA) to sampled values")
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_gleason_fit)

    p = sub.add_parser("sample", parents=[common], help="draw invariant random pure states")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evolve", parents=[common], help="evolve a pure state")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--state", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--flow", action="store_true", help="RK4 Hamiltonian flow (default)")
    mode.add_argument("--exact", action="store_true", help="exact unitary evolution")
    p.add_argument("--stride", type=int, default=10, help="steps between stored points")
    p.set_defaults(func=cmd_evolve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        s = _settings(args)
        if getattr(args, "stride", 1) < 1:
            raise UsageError("--stride must be >= 1")
        with tolerances(**s["tol"]):
            return args.func(args, s)
    except UsageError as exc:
        parser.error(str(exc))
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_NOFILE
    except DimensionMismatch as exc:
        print(f"error: dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIM
    except (SchemaError, NotHermitianError, InvalidStateError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except GeoQMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
