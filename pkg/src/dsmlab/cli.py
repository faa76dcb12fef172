"""Command-line entry point.

One binary, subcommand style; no positional arguments beyond the
subcommand.  Every output file embeds the tool version, the fully resolved
configuration, and a hash of the inputs, so runs are reproducible and
downstream plotting can verify what it reads.  Exit codes: 0 success,
2 domain error or refutation, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .maps import CRITICAL_POINT, MapParams, iterate_critical
from .mt import find_mt, smallest_mt_fixture
from .boundfree import beta_bound_period, recovery_check
from .certify import (ExpansionCertificate, Inconclusive, Refutation,
                      certify_uniform, scan_plane, tongue_tip,
                      TongueNotFoundError)
from .induction import (AccountingError, InductionConfig,
                        run as run_induction, stopping_time)

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_INCONCLUSIVE = 3

WORKERS_ENV = "DSMLAB_WORKERS"


def _config_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _meta_lines(command: str, resolved: dict, input_hash: str | None = None) -> list[str]:
    h = _config_hash(resolved)
    lines = [
        f"# tool: dsmlab {__version__}",
        f"# command: {command}",
        f"# config: {json.dumps(resolved, sort_keys=True)}",
        f"# config_hash: {h}",
    ]
    if input_hash is not None:
        lines.append(f"# input_hash: {input_hash}")
    return lines


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def cmd_orbit(args) -> int:
    resolved = {"a": args.a, "b": args.b, "n": args.n, "x0": args.x0,
                "mp_bits": args.mp_bits}
    p = MapParams(args.a, args.b)
    out = io.StringIO()
    for line in _meta_lines("orbit", resolved):
        out.write(line + "\n")
    out.write("j,xi,fprime,deriv_prod,da_xi\n")
    if args.mp_bits:
        from .maps import mp_orbit
        import mpmath
        pts, derivs = mp_orbit(args.a, args.b, args.n, prec_bits=args.mp_bits,
                               x0=args.x0)
        with mpmath.workprec(args.mp_bits):
            da = mpmath.mpf(0)
            for j in range(args.n + 1):
                fp = 2 + 2 * mpmath.mpf(args.b) * mpmath.cos(2 * mpmath.pi * pts[j])
                out.write(f"{j},{mpmath.nstr(pts[j], 17)},{mpmath.nstr(fp, 17)},"
                          f"{mpmath.nstr(derivs[j], 17)},{mpmath.nstr(da, 17)}\n")
                da = 1 + fp * da
    else:
        trace = iterate_critical(p, args.n, x0=args.x0)
        from .maps import deriv
        for j, (x, sd, pd) in enumerate(zip(trace.points, trace.space_derivs,
                                            trace.param_derivs)):
            out.write(f"{j},{_fmt(x)},{_fmt(deriv(p, x))},{_fmt(sd)},{_fmt(pd)}\n")
    _write_text(args.out, out.getvalue())
    return EXIT_OK


def cmd_find_mt(args) -> int:
    resolved = {"m": args.m, "ell": args.ell, "range": [args.lo, args.hi],
                "tol": args.tol}
    hits = find_mt(args.m, args.ell, (args.lo, args.hi), tol=args.tol)
    out = io.StringIO()
    for line in _meta_lines("find-mt", resolved):
        out.write(line + "\n")
    out.write("a0,m,ell,periodic_point,multiplier,kappa_tilde,d_bar\n")
    for h in hits:
        out.write(f"{_fmt(h.a0)},{h.m},{h.ell},{_fmt(h.periodic_point)},"
                  f"{_fmt(h.multiplier)},{_fmt(h.kappa_tilde)},{_fmt(h.d_bar)}\n")
    _write_text(args.out, out.getvalue())
    # an empty list is a legitimate answer (no roots in range), not an error
    return EXIT_OK


def cmd_bound_period(args) -> int:
    resolved = {"a": args.a, "b": args.b, "x": args.x, "beta": args.beta,
                "j_max": args.j_max}
    p = MapParams(args.a, args.b)
    res = beta_bound_period(p, args.x, args.beta, j_max=args.j_max)
    rep = recovery_check(p, args.x, res)
    payload = {
        "meta": {"tool": f"dsmlab {__version__}", "command": "bound-period",
                 "config": resolved, "config_hash": _config_hash(resolved)},
        "p": res.p, "exit_gap": res.exit_gap, "capped": res.capped,
        "recovery_deriv": res.recovery_deriv,
        "vs_escape_envelope": rep.vs_escape_envelope,
    }
    _write_text(args.out, json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_certify(args) -> int:
    resolved = {"a": args.a, "b": args.b, "n": args.n,
                "lambda_target": args.lam, "max_depth": args.max_depth}
    p = MapParams(args.a, args.b)
    outcome = certify_uniform(p, args.n, args.lam, max_depth=args.max_depth)
    meta = {"tool": f"dsmlab {__version__}", "command": "certify",
            "config": resolved, "config_hash": _config_hash(resolved)}
    if isinstance(outcome, ExpansionCertificate):
        payload = {"meta": meta, "result": "certificate", "n_steps": outcome.n_steps,
                   "lambda": outcome.lam, "cells": outcome.cells,
                   "max_cell_width": outcome.max_cell_width,
                   "method": outcome.method}
        code = EXIT_OK
    elif isinstance(outcome, Refutation):
        payload = {"meta": meta, "result": "refutation", "witness": outcome.witness,
                   "upper_bound": outcome.upper_bound}
        code = EXIT_DOMAIN
    else:
        payload = {"meta": meta, "result": "inconclusive",
                   "best_lower": outcome.best_lower,
                   "cells_stuck": outcome.cells_stuck}
        code = EXIT_INCONCLUSIVE
    _write_text(args.out, json.dumps(payload, sort_keys=True) + "\n")
    return code


def _pool_map(workers: int):
    if workers <= 1:
        return map, None
    pool = ProcessPoolExecutor(max_workers=workers)
    return pool.map, pool


def cmd_scan_plane(args) -> int:
    resolved = {"a_range": [args.a_lo, args.a_hi], "b_range": [args.b_lo, args.b_hi],
                "resolution": [args.na, args.nb], "max_iter": args.max_iter,
                "period_cap": args.period_cap}
    pmap, pool = _pool_map(args.workers)
    try:
        cells = scan_plane((args.a_lo, args.a_hi), (args.b_lo, args.b_hi),
                           (args.na, args.nb), max_iter=args.max_iter,
                           period_cap=args.period_cap, pmap=pmap)
    finally:
        if pool is not None:
            pool.shutdown()
    out = io.StringIO()
    for line in _meta_lines("scan-plane", resolved):
        out.write(line + "\n")
    out.write("a,b,class,period,multiplier,lyapunov,cert_N,cert_lambda\n")
    for cell in cells:
        out.write(f"{_fmt(cell.a)},{_fmt(cell.b)},{cell.cls},{_fmt(cell.period)},"
                  f"{_fmt(cell.multiplier)},{_fmt(cell.lyapunov)},"
                  f"{_fmt(cell.cert_n)},{_fmt(cell.cert_lambda)}\n")
    _write_text(args.out, out.getvalue())
    return EXIT_OK


def cmd_tongue_tip(args) -> int:
    resolved = {"period": args.period, "a_window": [args.a_lo, args.a_hi],
                "b_tol": args.b_tol}
    try:
        a_star, b_star = tongue_tip(args.period, (args.a_lo, args.a_hi),
                                    b_tol=args.b_tol)
    except TongueNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    payload = {
        "meta": {"tool": f"dsmlab {__version__}", "command": "tongue-tip",
                 "config": resolved, "config_hash": _config_hash(resolved)},
        "a_star": a_star, "b_star": b_star,
    }
    _write_text(args.out, json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


_INDUCTION_KEYS = {
    "a0", "mt_m", "mt_ell", "mt_range_lo", "mt_range_hi", "epsilon", "b",
    "r_delta", "r_delta1", "beta", "sample_density", "nhat_rule", "two_sided",
    "n_hat_override", "split_bisections",
}


def parse_induction_config(path: str) -> tuple[InductionConfig, str]:
    """Read the key=value run file ([run] section); unknown keys rejected."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        raw = fh.read()
    cp.read_string(raw)
    if "run" not in cp:
        raise ValueError("config file needs a [run] section")
    section = cp["run"]
    unknown = set(section.keys()) - _INDUCTION_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    m = section.getint("mt_m", 2)
    ell = section.getint("mt_ell", 1)
    if "a0" in section and section.get("a0") != "auto":
        a0_val = section.getfloat("a0")
        width = 5e-6
        hits = find_mt(m, ell, (max(0.0, a0_val - width), min(1.0, a0_val + width)))
        if not hits:
            raise ValueError(f"no preperiodic-critical parameter near a0={a0_val}")
        mt = hits[0]
    else:
        lo = section.getfloat("mt_range_lo", 0.0)
        hi = section.getfloat("mt_range_hi", 1.0)
        hits = find_mt(m, ell, (lo, hi))
        if not hits:
            raise ValueError("no preperiodic-critical parameter in range")
        mt = hits[0]
    cfg = InductionConfig(
        a0=mt,
        epsilon=section.getfloat("epsilon"),
        b=section.getfloat("b"),
        r_delta=section.getint("r_delta"),
        r_delta1=section.getint("r_delta1") if "r_delta1" in section else None,
        beta=section.getfloat("beta") if "beta" in section else None,
        sample_density=section.getint("sample_density", 9),
        nhat_rule=section.get("nhat_rule", "double-sqrt"),
        two_sided=section.getboolean("two_sided", True),
        n_hat_override=section.getint("n_hat_override") if "n_hat_override" in section else None,
        split_bisections=section.getint("split_bisections", 48),
    )
    input_hash = hashlib.sha256(raw.encode()).hexdigest()[:16]
    return cfg, input_hash


def cmd_induction(args) -> int:
    cfg, input_hash = parse_induction_config(args.config)
    report = run_induction(cfg)
    doc = json.loads(report.to_json())
    doc["meta"]["tool"] = f"dsmlab {__version__}"
    doc["meta"]["input_hash"] = input_hash
    doc["meta"]["config_hash"] = _config_hash(doc["meta"]["config"])
    _write_text(args.out, json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    if args.log:
        _write_text(args.log, report.format_log() + "\n")
    return EXIT_OK


def cmd_stopping_time(args) -> int:
    st = stopping_time(args.b, args.rule)
    resolved = {"b": args.b, "rule": args.rule}
    payload = {
        "meta": {"tool": f"dsmlab {__version__}", "command": "stopping-time",
                 "config": resolved, "config_hash": _config_hash(resolved)},
        "n_hat": st.n_hat, "r0": st.r0,
    }
    _write_text(args.out, json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    default_workers = int(os.environ.get(WORKERS_ENV, "1"))
    top = argparse.ArgumentParser(prog="dsmlab", description=__doc__)
    top.add_argument("--version", action="version", version=f"dsmlab {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    o = sub.add_parser("orbit", help="critical-orbit table (CSV)")
    o.add_argument("--a", type=float, required=True)
    o.add_argument("--b", type=float, required=True)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--x0", type=float, default=None)
    o.add_argument("--mp-bits", type=int, default=0)
    o.add_argument("--out", default="-")
    o.set_defaults(fn=cmd_orbit)

    f = sub.add_parser("find-mt", help="preperiodic-critical parameters (CSV)")
    f.add_argument("--m", type=int, required=True)
    f.add_argument("--ell", type=int, required=True)
    f.add_argument("--lo", type=float, default=0.0)
    f.add_argument("--hi", type=float, default=1.0)
    f.add_argument("--tol", type=float, default=1e-13)
    f.add_argument("--out", default="-")
    f.set_defaults(fn=cmd_find_mt)

    bp = sub.add_parser("bound-period", help="pointwise shadowing time (JSON)")
    bp.add_argument("--a", type=float, required=True)
    bp.add_argument("--b", type=float, required=True)
    bp.add_argument("--x", type=float, required=True)
    bp.add_argument("--beta", type=float, required=True)
    bp.add_argument("--j-max", type=int, default=100000)
    bp.add_argument("--out", default="-")
    bp.set_defaults(fn=cmd_bound_period)

    ce = sub.add_parser("certify", help="uniform-expansion certificate (JSON)")
    ce.add_argument("--a", type=float, required=True)
    ce.add_argument("--b", type=float, required=True)
    ce.add_argument("--n", type=int, required=True)
    ce.add_argument("--lam", type=float, required=True)
    ce.add_argument("--max-depth", type=int, default=24)
    ce.add_argument("--out", default="-")
    ce.set_defaults(fn=cmd_certify)

    sp = sub.add_parser("scan-plane", help="parameter-plane raster (CSV)")
    sp.add_argument("--a-lo", type=float, default=0.0)
    sp.add_argument("--a-hi", type=float, default=1.0)
    sp.add_argument("--b-lo", type=float, default=0.0)
    sp.add_argument("--b-hi", type=float, default=1.0)
    sp.add_argument("--na", type=int, required=True)
    sp.add_argument("--nb", type=int, required=True)
    sp.add_argument("--max-iter", type=int, default=2000)
    sp.add_argument("--period-cap", type=int, default=32)
    sp.add_argument("--workers", type=int, default=default_workers)
    sp.add_argument("--out", default="-")
    sp.set_defaults(fn=cmd_scan_plane)

    tt = sub.add_parser("tongue-tip", help="lowest b with an attracting cycle (JSON)")
    tt.add_argument("--period", type=int, required=True)
    tt.add_argument("--a-lo", type=float, default=0.0)
    tt.add_argument("--a-hi", type=float, default=1.0)
    tt.add_argument("--b-tol", type=float, default=1e-6)
    tt.add_argument("--out", default="-")
    tt.set_defaults(fn=cmd_tongue_tip)

    ind = sub.add_parser("induction", help="parameter-exclusion run (JSON report)")
    ind.add_argument("--config", required=True, help="key=value run file")
    ind.add_argument("--out", default="-")
    ind.add_argument("--log", default=None, help="event log output path")
    ind.set_defaults(fn=cmd_induction)

    st = sub.add_parser("stopping-time", help="exclusion horizon for b (JSON)")
    st.add_argument("--b", type=float, required=True)
    st.add_argument("--rule", choices=["sqrt", "double-sqrt"], default="double-sqrt")
    st.add_argument("--out", default="-")
    st.set_defaults(fn=cmd_stopping_time)

    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, AccountingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
