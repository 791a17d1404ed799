"""Command-line front end: couplings, verification runs, sweeps, reports.

Every subcommand prints a human-readable report and exits 0 on success,
1 when a tolerance or convergence check fails, 2 on argument errors.  All
randomness derives from --seed, and `sweep` writes byte-identical files for
identical arguments and seed (wall-clock timing is opt-in for that reason).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import closedform, energy, regularity, riesz, symcalc
from .errors import DomainError, NotConverged
from .model import FracParams
from .pvquad import QuadratureSpec, f_integral_num, frac_op_num
from .specfun import kappa

__all__ = ["SweepRecord", "emit", "main", "run"]

_CSV_HEADER = "d,s,delta,epsilon,closed_value,quad_value,abs_residual,rel_residual,nodes,seed,wall_ms"


@dataclasses.dataclass(frozen=True)
class SweepRecord:
    d: int
    s: float
    delta: float
    epsilon: float
    closed_value: float
    quad_value: float
    abs_residual: float
    rel_residual: float
    nodes: int
    seed: int
    wall_ms: int


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def emit(records: list[SweepRecord], fmt: str, path: str) -> None:
    """Write records as CSV or JSON; temp-file-and-rename, never partial."""
    if not records:
        raise DomainError("refusing to emit an empty record list")
    if fmt == "csv":
        lines = [_CSV_HEADER]
        for r in records:
            lines.append(
                ",".join(_fmt(getattr(r, k)) for k in _CSV_HEADER.split(","))
            )
        payload = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = (
            json.dumps(
                [
                    {
                        k: getattr(r, k)
                        for k in _CSV_HEADER.split(",")
                    }
                    for r in records
                ],
                indent=None,
                separators=(",", ":"),
            )
            + "\n"
        )
    else:
        raise DomainError(f"unknown format {fmt!r}")
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".emit-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _spec_from(args) -> QuadratureSpec:
    return QuadratureSpec(
        r_min=args.r_min,
        r_max=args.r_max,
        bands_per_decade=args.bands_per_decade,
        radial_nodes=args.radial_nodes,
        angular_nodes=args.angular_nodes,
        mc_samples=args.mc_samples,
        seed=args.seed,
        target_rel_err=args.target_rel_err,
    )


def _parse_range(text: str) -> list[float]:
    """'a:b:n' inclusive linear range, or a comma list, or one value."""
    if ":" in text:
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            raise ValueError("range count must be >= 1")
        if n == 1:
            return [float(a)]
        step = (float(b) - float(a)) / (n - 1)
        return [float(a) + k * step for k in range(n)]
    return [float(tok) for tok in text.split(",") if tok]


def _parse_point(text: str | None, d: int) -> np.ndarray:
    if text is None:
        x = np.zeros(d)
        x[0] = 1.0
        return x
    vals = [float(tok) for tok in text.split(",")]
    if len(vals) != d:
        raise ValueError(f"point must have {d} coordinates")
    return np.asarray(vals)


def _coupled_params(d: int, s: float, delta: float) -> FracParams:
    eps = closedform.b_of_delta(d, s, delta)
    return FracParams(d, s, delta, eps, extended=True)


def _cmd_couple(args) -> int:
    d = args.d
    if args.inverse:
        if args.epsilon is None:
            raise DomainError("--inverse needs --epsilon")
        delta = closedform.delta_of_epsilon(d, args.s, args.epsilon)
        print(f"delta(epsilon={_fmt(args.epsilon)}) = {_fmt(delta)}")
        eps = args.epsilon
    else:
        delta = args.delta
        eps = closedform.b_of_delta(d, args.s, delta) if delta > 0 else 0.0
        print(f"epsilon = b(delta={_fmt(delta)}) = {_fmt(eps)}")
    print(f"classical epsilon = {_fmt(closedform.classical_epsilon(d, delta))}")
    if d == 2 and delta > 0:
        e, lo, hi = closedform.d2_epsilon_and_bounds(args.s, delta)
        hi_txt = _fmt(hi) if hi is not None else "absent"
        print(f"d=2 bounds: lower = {_fmt(lo)} <= epsilon = {_fmt(e)} <= upper = {hi_txt}")
    return 0


def _cmd_verify(args) -> int:
    d, s, delta = args.d, args.s, args.delta
    params = _coupled_params(d, s, delta)
    x = _parse_point(args.x, d)
    spec = _spec_from(args)
    closed = closedform.operator_value(params, x)
    res = frac_op_num(params, x, spec)
    quad = kappa(d, s) * res.value
    scale = abs(closedform.operator_value(FracParams(d, s, delta, 0.0), x))
    residual = abs(closed - quad)
    print(f"epsilon = b(delta) = {_fmt(params.epsilon)}")
    print(f"closed operator value  = {_fmt(closed)}")
    print(f"quadrature value       = {_fmt(quad)} (nodes {res.nodes_used})")
    print(f"residual               = {_fmt(residual)} (scale {_fmt(scale)})")
    # the value at the coupling is ~0, so convergence is judged against the
    # eps = 0 operator magnitude rather than the (vanishing) value itself
    ok = (
        residual <= args.tol * max(scale, 1e-12)
        and kappa(d, s) * res.err_estimate <= args.tol * max(scale, 1e-12)
    )
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_sweep(args) -> int:
    d = args.d
    spec = _spec_from(args)
    records = []
    for s in _parse_range(args.s_range):
        for delta in _parse_range(args.delta_range):
            t0 = time.perf_counter()
            params = _coupled_params(d, s, delta)
            x = np.zeros(d)
            x[0] = 1.0
            closed = closedform.operator_value(params, x)
            res = frac_op_num(params, x, spec)
            quad = kappa(d, s) * res.value
            wall = int(round(1000.0 * (time.perf_counter() - t0))) if args.wall_clock else 0
            records.append(
                SweepRecord(
                    d=d,
                    s=s,
                    delta=delta,
                    epsilon=params.epsilon,
                    closed_value=closed,
                    quad_value=quad,
                    abs_residual=abs(closed - quad),
                    rel_residual=abs(closed - quad) / max(abs(closed), 1e-12),
                    nodes=res.nodes_used,
                    seed=args.seed,
                    wall_ms=wall,
                )
            )
    fmt = "json" if args.out.endswith(".json") else "csv"
    emit(records, fmt, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_fourier(args) -> int:
    d, s, delta = args.d, args.s, args.delta
    pipe = symcalc.pipeline(args.which, d, s, delta)
    closed = {
        "f1": closedform.f1_closed,
        "f2": closedform.f2_closed,
    }[args.which](d, s, delta)
    rel = abs(pipe - closed) / max(abs(closed), 1e-300)
    print(f"pipeline    = {_fmt(pipe)}")
    print(f"closed form = {_fmt(closed)}")
    print(f"relative    = {_fmt(rel)}")
    ok = rel <= args.tol
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_regularity(args) -> int:
    pred = regularity.membership(args.d, args.delta, args.t, args.q)
    res = regularity.dyadic_seminorm(
        args.d, args.delta, args.t, args.q, bands=args.bands, seed=args.seed
    )
    print(f"membership predicate: {'member' if pred else 'not a member'}")
    print(f"band ratio = {_fmt(res.band_ratio)}, verdict = {res.verdict}")
    print(f"reference band = {_fmt(res.reference)} +- {_fmt(res.reference_se)}")
    print(f"partial sums: {[format(v, '.6g') for v in res.partial_sums[:6]]} ...")
    ok = (res.verdict == "converging") == pred
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_energy(args) -> int:
    spec = _spec_from(args)
    v = energy.bump_x1(1.0)
    rows = energy.gamma_limit_probe(args.eps, v, _parse_range(args.probe_s), spec=spec)
    print("s, nonlocal energy, local energy, relative gap")
    for s, val, loc, rel in rows:
        print(f"{_fmt(s)}, {_fmt(val)}, {_fmt(loc)}, {_fmt(rel)}")
    gaps = [r[3] for r in rows]
    monotone = all(a > b for a, b in zip(gaps, gaps[1:]))
    s_check = args.s if args.s is not None else _parse_range(args.probe_s)[0]
    params = FracParams(args.d, s_check, 0.0, args.eps)
    lhs, rhs = energy.convexity_identity_check(
        params, energy.bump_x1(1.0), energy.bump_x1(0.7), spec
    )
    ident = abs(lhs - rhs) <= 1e-10 * (abs(lhs) + 1e-12)
    print(f"convexity identity: lhs = {_fmt(lhs)}, rhs = {_fmt(rhs)}")
    ok = monotone and ident
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_riesz(args) -> int:
    d, s, delta = args.d, args.s, args.delta
    c_star, c_star_star = riesz.riesz_constants(d, s, delta)
    eps = riesz.riesz_coupling(d, delta)
    print(f"c*  = {_fmt(c_star)}")
    print(f"c** = {_fmt(c_star_star)}")
    print(f"coupling epsilon = {_fmt(eps)}")
    x = np.zeros(d)
    x[0] = 1.0
    _, div_at, riesz_div_at = riesz.flux_divergence(d, s, delta, eps, x)
    print(f"divergence bracket at coupling: div = {_fmt(div_at)}")
    spec = _spec_from(args)
    probe_eps = min(0.9, eps + 0.2)
    conv = riesz.riesz_div_conv_num(d, s, delta, probe_eps, x, spec)
    _, _, want = riesz.flux_divergence(d, s, delta, probe_eps, x)
    rel = abs(conv.value - want) / max(abs(want), 1e-300)
    print(f"convolution check at eps={_fmt(probe_eps)}: rel = {_fmt(rel)}")
    ok = abs(div_at) <= 1e-14 and rel <= 1e-3
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_quadrature(args) -> int:
    spec = _spec_from(args)
    res = f_integral_num(args.which, args.d, args.s, args.delta, spec)
    print(f"value        = {_fmt(res.value)}")
    print(f"err_estimate = {_fmt(res.err_estimate)}")
    print(f"nodes_used   = {res.nodes_used}")
    print(f"converged    = {res.converged}")
    return 0 if res.converged else 1


def _add_quad_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r-min", type=float, default=1e-6)
    p.add_argument("--r-max", type=float, default=1e6)
    p.add_argument("--bands-per-decade", type=int, default=4)
    p.add_argument("--radial-nodes", type=int, default=10)
    p.add_argument("--angular-nodes", type=int, default=64)
    p.add_argument("--mc-samples", type=int, default=60000)
    p.add_argument("--target-rel-err", type=float, default=1e-4)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocal-lab",
        description="verification laboratory for the anisotropic fractional model",
    )
    parser.add_argument("--config", help="key=value file merged under explicit flags")
    parser.add_argument("--seed", type=int, default=42)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("couple", help="coupling b(delta), inverse, and bounds")
    p.add_argument("--d", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--epsilon", type=float)
    p.set_defaults(fn=_cmd_couple, required_keys=("d", "s"))

    p = sub.add_parser("verify", help="closed form vs quadrature at the coupling")
    p.add_argument("--d", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--x", help="comma-separated point, default e1")
    p.add_argument("--tol", type=float, default=1e-3)
    _add_quad_flags(p)
    p.set_defaults(fn=_cmd_verify, required_keys=("d", "s", "delta"))

    p = sub.add_parser("sweep", help="parameter sweep to CSV/JSON")
    p.add_argument("--d", type=int)
    p.add_argument("--s-range")
    p.add_argument("--delta-range")
    p.add_argument("--out")
    p.add_argument("--wall-clock", action="store_true", help="record real timings (breaks byte-reproducibility)")
    _add_quad_flags(p)
    p.set_defaults(fn=_cmd_sweep, required_keys=("d", "s_range", "delta_range", "out"))

    p = sub.add_parser("fourier", help="symbol pipeline vs closed form")
    p.add_argument("--which", choices=("f1", "f2"))
    p.add_argument("--d", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(fn=_cmd_fourier, required_keys=("which", "d", "s", "delta"))

    p = sub.add_parser("regularity", help="membership predicate and dyadic witness")
    p.add_argument("--d", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--bands", type=int, default=12)
    p.set_defaults(fn=_cmd_regularity, required_keys=("d", "delta", "t", "q"))

    p = sub.add_parser("energy", help="limit-towards-local probe and convexity")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--s", type=float, help="order for the convexity check (default: first probe value)")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--probe-s", default="0.9,0.95,0.99")
    _add_quad_flags(p)
    p.set_defaults(fn=_cmd_energy, required_keys=())

    p = sub.add_parser("riesz", help="fractional-gradient constants and chain")
    p.add_argument("--d", type=int)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--delta", type=float)
    _add_quad_flags(p)
    p.set_defaults(fn=_cmd_riesz, required_keys=("d", "delta"))

    p = sub.add_parser("quadrature", help="raw principal-value result")
    p.add_argument("--which", choices=("f1", "f2", "f3", "f4"))
    p.add_argument("--d", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--delta", type=float)
    _add_quad_flags(p)
    p.set_defaults(fn=_cmd_quadrature, required_keys=("which", "d", "s", "delta"))

    return parser


def _load_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"bad config line: {raw.rstrip()}")
            key, val = (tok.strip() for tok in line.split("=", 1))
            key = key.replace("-", "_")
            for cast in (int, float):
                try:
                    out[key] = cast(val)
                    break
                except ValueError:
                    continue
            else:
                out[key] = val
    return out


def run(argv=None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    parser = _build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)

    # config values fill anything the command line left at its default
    if args.config:
        explicit = {
            tok[2:].split("=", 1)[0].replace("-", "_")
            for tok in argv
            if tok.startswith("--")
        }
        for key, val in _load_config(args.config).items():
            if key not in explicit and hasattr(args, key):
                setattr(args, key, val)

    for key in getattr(args, "required_keys", ()):
        if getattr(args, key, None) is None:
            parser.error(f"missing required argument --{key.replace('_', '-')}")
    try:
        return args.fn(args)
    except (DomainError, NotConverged, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
