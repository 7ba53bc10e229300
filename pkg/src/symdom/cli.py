"""symdom command-line interface.

Usage:
    symdom domain-info --domain '{"kind":"I","p":2,"q":3}'
    symdom normal-form --config nf.json
    symdom heta-eigs --config eta.json --output eigs.csv
    symdom curvature --domain '{"kind":"IV","n":3}' --random 100 --seed 1
    symdom curve-profile --config curve.json --output profile.csv
    symdom rescale --config exiting.json --output report.json
    symdom kobayashi-check --domain '{"kind":"I","p":2,"q":2}' --random 1000 --seed 7
    symdom selftest

Configs are JSON objects whose keys are the command's inputs plus the
common keys below; unknown keys are rejected.  Command-line flags override
config values.  Data goes to ``--output`` (stdout when omitted); a one-line
summary is printed when data goes to a file.

Exit codes: 0 success, 2 a verification verdict failed, 1 usage or runtime
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .domains import DomainError, DomainSpec, TangentVector, boundary_distance, contains
from .reports import csv_text, json_text, parse_complex, parse_vector

COMMON_KEYS = {"command", "domain", "output", "seed", "tol", "parallel"}
COMMAND_KEYS = {
    "domain-info": set(),
    "normal-form": {"vector", "base"},
    "heta-eigs": {"vector", "base"},
    "curvature": {"vectors", "base", "random"},
    "curve-profile": {"curve", "samples", "rays"},
    "rescale": {"curve", "b", "steps", "grid_radii", "per_circle", "csv_output"},
    "kobayashi-check": {"random", "points"},
    "selftest": {"only"},
}
DEFAULT_TOL = {
    "normal-form": 1e-7,
    "heta-eigs": 1e-8,
    "curvature": 1e-5,
    "curve-profile": 1e-6,
    "rescale": 1e-3,
    "kobayashi-check": 1e-12,
}


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--domain", help="inline domain JSON, e.g. '{\"kind\":\"I\",\"p\":2,\"q\":2}'")
    common.add_argument("--output", type=Path, help="data output path (default: stdout)")
    common.add_argument("--seed", type=int, help="seed for randomized sweeps (default 0)")
    common.add_argument("--tol", type=float, help="verification tolerance (command-specific default)")
    common.add_argument("--parallel", type=int, help="worker processes for sweeps (default 1)")
    common.add_argument("--random", type=int, help="number of random samples for sweeps")

    parser = _Parser(prog="symdom", description=__doc__.split("\n\n")[0],
                     formatter_class=argparse.RawDescriptionHelpFormatter, epilog=__doc__.split("\n\n", 1)[1])
    parser.add_argument("--version", action="version", version=f"symdom {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "domain-info": "dimension, rank, genus and tube type of a domain",
        "normal-form": "normal form and rank of a tangent vector ('vector', optional 'base')",
        "heta-eigs": "spectrum of the curvature form H_eta ('vector', optional 'base')",
        "curvature": "curvature R(a,b,c,d) ('vectors', 'base') or closed-form vs finite-difference sweep (--random)",
        "curve-profile": "lambda, kappa, |sigma|^2 and rank along a curve ('curve', 'samples' or 'rays')",
        "rescale": "rescaling sequence toward a boundary point ('curve', 'b', 'steps')",
        "kobayashi-check": "distance and frame-norm bounds on random or given points",
        "selftest": "run the built-in verification battery ('only': list of check numbers)",
    }
    for name, text in helps.items():
        keys = ", ".join(sorted(COMMAND_KEYS[name] | COMMON_KEYS))
        tol = f"; default --tol {DEFAULT_TOL[name]:g}" if name in DEFAULT_TOL else ""
        sub.add_parser(name, parents=[common], help=text, description=f"{text}. Config keys: {keys}{tol}.")
    return parser


def _load_config(args) -> dict[str, Any]:
    cfg: dict[str, Any] = {}
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed JSON in {args.config} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("the config must be a JSON object")
    allowed = COMMON_KEYS | COMMAND_KEYS[args.command]
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise UsageError(f"unknown config fields for {args.command}: {', '.join(unknown)}")
    if cfg.get("command", args.command) != args.command:
        raise UsageError(f"config is for {cfg['command']!r}, not {args.command!r}")
    if args.domain is not None:
        try:
            cfg["domain"] = json.loads(args.domain)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed --domain JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    for key in ("seed", "tol", "parallel", "random"):
        val = getattr(args, key, None)
        if val is not None:
            if key not in allowed:
                raise UsageError(f"--{key} does not apply to {args.command}")
            cfg[key] = val
    if args.output is not None:
        cfg["output"] = str(args.output)
    return cfg


def _domain(cfg) -> DomainSpec:
    if "domain" not in cfg:
        raise UsageError("a domain is required (--domain or 'domain' in the config)")
    try:
        return DomainSpec.from_dict(cfg["domain"])
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"invalid domain: {exc}") from exc


def _point(d: DomainSpec, raw, what: str) -> np.ndarray:
    try:
        z = parse_vector(raw)
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from exc
    if z.shape[0] != d.dim:
        raise UsageError(f"{what} has length {z.shape[0]}, {d} has dimension {d.dim}")
    return z


def _base(d: DomainSpec, cfg) -> np.ndarray:
    if "base" not in cfg:
        return np.zeros(d.dim, dtype=complex)
    z = _point(d, cfg["base"], "base")
    if not contains(d, z):
        raise UsageError(f"base point {cfg['base']} is not inside {d}")
    return z


def _emit(cfg, text: str, summary: str) -> None:
    out = cfg.get("output")
    if out:
        Path(out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)


def _rng(cfg) -> np.random.Generator:
    return np.random.default_rng(int(cfg.get("seed", 0)))


# commands


def cmd_domain_info(cfg) -> int:
    d = _domain(cfg)
    info = {
        "domain": d.to_dict(),
        "dim": d.dim,
        "rank": d.rank,
        "genera": list(d.genera),
        "tube_type": d.is_tube_type,
    }
    _emit(cfg, json_text(info), f"{d}: dim {d.dim}, rank {d.rank}")
    return 0


def _vector_input(cfg) -> tuple[DomainSpec, TangentVector]:
    d = _domain(cfg)
    if "vector" not in cfg:
        raise UsageError("'vector' is required")
    return d, TangentVector(_base(d, cfg), _point(d, cfg["vector"], "vector"))


def cmd_normal_form(cfg) -> int:
    from .normal_forms import normal_form

    d, v = _vector_input(cfg)
    nf = normal_form(d, v, tol=cfg.get("tol", DEFAULT_TOL["normal-form"]))
    data = {"values": list(nf.values), "rank": nf.rank, "generic": nf.generic, "ambiguous": nf.ambiguous}
    _emit(cfg, json_text(data), f"normal form {tuple(round(x, 6) for x in nf.values)}, rank {nf.rank}")
    return 0


def cmd_heta_eigs(cfg) -> int:
    from .normal_forms import h_eta

    d, v = _vector_input(cfg)
    if not np.any(v.dir):
        raise UsageError("eta must be nonzero")
    form = h_eta(d, v)
    tol = cfg.get("tol", DEFAULT_TOL["heta-eigs"])
    rows = [(i, float(w)) for i, w in enumerate(form.eigenvalues)]
    _emit(cfg, csv_text(("index", "eigenvalue"), rows), f"{len(rows)} eigenvalues in [{rows[0][1]:.6g}, {rows[-1][1]:.6g}]")
    ok = form.eigenvalues[0] >= -2 - tol and form.eigenvalues[-1] <= tol
    return 0 if ok else 2


def _random_quadruple(d, rng):
    return [rng.normal(size=d.dim) + 1j * rng.normal(size=d.dim) for _ in range(4)]


def _curvature_row(args):
    from .metrics import curvature, ke_metric

    d, base, vecs = args
    g = ke_metric(d, base, allow_near_boundary=True)
    scale = float(np.prod([g.norm(v) for v in vecs]))
    closed = curvature(d, base, *vecs, allow_near_boundary=True).value
    fd = curvature(d, base, *vecs, method="fd", allow_near_boundary=True).value
    return closed, fd, abs(closed - fd) / scale


def _map(fn, items, workers: int):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def cmd_curvature(cfg) -> int:
    d = _domain(cfg)
    base = _base(d, cfg)
    tol = cfg.get("tol", DEFAULT_TOL["curvature"])
    if "random" in cfg:
        rng = _rng(cfg)
        jobs = [(d, base, _random_quadruple(d, rng)) for _ in range(int(cfg["random"]))]
    elif "vectors" in cfg:
        vecs = cfg["vectors"]
        if not isinstance(vecs, list) or len(vecs) != 4:
            raise UsageError("'vectors' must list four vectors a, b, c, d")
        jobs = [(d, base, [_point(d, v, "vector") for v in vecs])]
    else:
        raise UsageError("give 'vectors' or --random N")
    results = _map(_curvature_row, jobs, int(cfg.get("parallel", 1)))
    rows = [(i, c.real, c.imag, f.real, f.imag, gap) for i, (c, f, gap) in enumerate(results)]
    header = ("index", "closed_re", "closed_im", "fd_re", "fd_im", "relative_gap")
    worst = max(r[-1] for r in rows)
    _emit(cfg, csv_text(header, rows), f"{len(rows)} quadruples, worst relative gap {worst:.3e}")
    return 0 if worst <= tol else 2


def _curve(cfg):
    from .curves import CurveSpec

    if "curve" not in cfg:
        raise UsageError("'curve' is required")
    curve_cfg = dict(cfg["curve"])
    if "domain" not in curve_cfg:
        if "domain" not in cfg:
            raise UsageError("the curve needs a domain")
        curve_cfg["domain"] = cfg["domain"]
    try:
        return CurveSpec.from_dict(curve_cfg)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"invalid curve: {exc}") from exc


def cmd_curve_profile(cfg) -> int:
    from .curves import PROFILE_HEADER, profile

    c = _curve(cfg)
    if "samples" in cfg:
        samples = [parse_complex(w) for w in cfg["samples"]]
    elif "rays" in cfg:
        rays = cfg["rays"]
        bs = [parse_complex(b) for b in rays.get("b", [[c.b0.real, c.b0.imag]])]
        deltas = [float(x) for x in rays.get("deltas", [1e-1, 1e-2, 1e-3])]
        samples = [(1.0 - dl) * b for b in bs for dl in deltas]
    else:
        raise UsageError("give 'samples' or 'rays'")
    for w in samples:
        if abs(w) >= 1:
            raise UsageError(f"sample {w} is not inside the unit disk")
        if not contains(c.domain, c(w)):
            raise UsageError(f"the curve leaves {c.domain} at w = {w}")
    rows = profile(c, samples)
    tol = cfg.get("tol", DEFAULT_TOL["curve-profile"])
    ok = all(r.lam > 0 and r.kappa >= -2 - 10 * tol and r.sigma2 >= -tol for r in rows)
    _emit(cfg, csv_text(PROFILE_HEADER, [r.as_row() for r in rows]), f"{len(rows)} profile rows, invariants {'ok' if ok else 'VIOLATED'}")
    return 0 if ok else 2


def cmd_rescale(cfg) -> int:
    from .rescaling import default_grid, default_schedule, rescale_sequence

    c = _curve(cfg)
    b = parse_complex(cfg["b"]) if "b" in cfg else c.b0
    sched = default_schedule(b, int(cfg.get("steps", 12)))
    grid = default_grid(tuple(cfg.get("grid_radii", (0.05, 0.1))), int(cfg.get("per_circle", 12)))
    rep = rescale_sequence(c, b, sched, grid, tol=cfg.get("tol", DEFAULT_TOL["rescale"]))
    ok = all(rep.verdicts.values())
    if "csv_output" in cfg:
        r = c.domain.rank
        header = ("k", "wk_re", "wk_im", "sigma2_0", *[f"nf_{j + 1}" for j in range(r)], "cauchy")
        Path(cfg["csv_output"]).write_text(csv_text(header, rep.step_rows()))
    sig0 = float(rep.limit["sigma2"][0])
    _emit(cfg, json_text(rep.to_dict()), f"m0 = {rep.m0}, sigma2 limit {sig0:.3e}, verdicts {rep.verdicts}")
    return 0 if ok else 2


def _kobayashi_row(args):
    from .kobayashi import boundary_bound_check, exact_kind, frame_norm_bound_check

    d, z = args
    b = boundary_bound_check(d, z) if exact_kind(d) else None
    f = frame_norm_bound_check(d, z) if boundary_distance(d, z) >= 1e-4 else None
    return b, f


def cmd_kobayashi_check(cfg) -> int:
    from .acceptance import random_point
    from .kobayashi import exact_kind

    d = _domain(cfg)
    if "points" in cfg:
        pts = [_point(d, p, "point") for p in cfg["points"]]
        for p in pts:
            if not contains(d, p):
                raise UsageError(f"point {p} is not inside {d}")
    else:
        rng = _rng(cfg)
        pts = [random_point(d, rng) for _ in range(int(cfg.get("random", 100)))]
    if not exact_kind(d):
        print(f"note: {d} has no exact distance formula here; only the frame-norm bound is checked", file=sys.stderr)
    results = _map(_kobayashi_row, [(d, z) for z in pts], int(cfg.get("parallel", 1)))
    rows, ok = [], True
    for i, (z, (b, f)) in enumerate(zip(pts, results)):
        rows.append((
            i,
            boundary_distance(d, z),
            b.lhs if b else float("nan"),
            b.rhs if b else float("nan"),
            b.ok if b else "",
            f.lhs if f else float("nan"),
            f.rhs if f else float("nan"),
            f.ok if f else "",
        ))
        ok &= (b is None or b.ok) and (f is None or f.ok)
    header = ("index", "delta", "distance", "neg_log_delta", "distance_ok", "frame_norm", "frame_bound", "frame_ok")
    _emit(cfg, csv_text(header, rows), f"{len(rows)} points, {'all ok' if ok else 'VIOLATIONS'}")
    return 0 if ok else 2


def _selftest_one(args):
    from .acceptance import run_check

    n, seed = args
    return run_check(n, seed)


def cmd_selftest(cfg) -> int:
    from .acceptance import CHECKS

    only = cfg.get("only") or sorted(CHECKS)
    bad = [n for n in only if n not in CHECKS]
    if bad:
        raise UsageError(f"unknown checks {bad}; valid numbers are {sorted(CHECKS)}")
    seed = int(cfg.get("seed", 7))
    results = _map(_selftest_one, [(n, seed) for n in only], int(cfg.get("parallel", 1)))
    for r in results:
        print(r.line(), file=sys.stderr if cfg.get("output") is None else sys.stdout)
        for line in r.details:
            print(f"      {line}", file=sys.stderr if cfg.get("output") is None else sys.stdout)
    rows = [(r.number, r.name, r.passed) for r in results]
    passed = sum(r.passed for r in results)
    _emit(cfg, csv_text(("check", "name", "passed"), rows), f"{passed} of {len(results)} checks passed")
    return 0 if passed == len(results) else 2


COMMANDS = {
    "domain-info": cmd_domain_info,
    "normal-form": cmd_normal_form,
    "heta-eigs": cmd_heta_eigs,
    "curvature": cmd_curvature,
    "curve-profile": cmd_curve_profile,
    "rescale": cmd_rescale,
    "kobayashi-check": cmd_kobayashi_check,
    "selftest": cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"symdom {args.command}: {exc}", file=sys.stderr)
        return 1
    except (DomainError, ValueError) as exc:
        print(f"symdom {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
