"""Command-line front end: ``veelab check|identity|restrict|scan|catalog``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .catalog import PolynomialPrepotential, closed_form_case, get_entry, list_catalog
from .errors import ParseError, VeeLabError
from .exact import ExactScalar, parse_exact
from .geometry import VectorConfig, build_config, to_numeric
from .identity_field import (
    closed_form_identity,
    identity_for_metric,
    identity_residual,
    minor_identity_field,
)
from .prepotential import (
    commutativity_residual,
    get_kernel,
    sample_points,
    third_derivative_tensor,
    wdvv_residual,
)
from .report import CheckReport, config_digest
from .restriction import restrict, subsystem
from .solver import relation_scan
from .vee_check import condition2_relative, euclidean_vee_residual

DEFAULT_CHECKS = ("vee", "condition2", "commute")
ALL_CHECKS = ("vee", "condition2", "commute", "wdvv", "identity")


# --------------------------------------------------------------------------
# parsing


def parse_value(text: str):
    """Number, or a comma-separated tuple of numbers."""
    text = text.strip()
    if "," in text:
        return tuple(parse_value(t) for t in text.split(",") if t.strip())
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise ValueError(f"cannot parse value {text!r}") from None


def parse_sets(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = parse_value(val)
    return out


def _component(x, where: str):
    if isinstance(x, bool):
        raise ParseError("booleans are not valid components", where)
    if isinstance(x, int):
        return x, True
    if isinstance(x, float):
        return x, x.is_integer()
    if isinstance(x, str):
        try:
            return parse_exact(x), True
        except ValueError:
            try:
                return complex(x.replace("i", "j").replace(" ", "")), False
            except ValueError:
                raise ParseError(f"cannot parse component {x!r}", where) from None
    raise ParseError(f"unsupported component {x!r}", where)


def _multiplicity(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ParseError("booleans are not valid multiplicities", where)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, dict) and set(x) <= {"re", "im"}:
        return complex(x.get("re", 0), x.get("im", 0))
    if isinstance(x, str):
        try:
            return complex(x.replace("i", "j"))
        except ValueError:
            pass
    raise ParseError(f"cannot parse multiplicity {x!r}", where)


def parse_config_file(path: str) -> VectorConfig:
    """Read a JSON configuration; exact mode iff every component is an exact token."""
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, f"{path}:{err.lineno}:{err.colno}") from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", path)
    for key in ("dim", "vectors", "multiplicities"):
        if key not in data:
            raise ParseError(f"missing key {key!r}", path)
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ParseError("dim must be an integer", f"{path}: dim")
    if not isinstance(data["vectors"], list):
        raise ParseError("vectors must be a list", f"{path}: vectors")
    if not isinstance(data["multiplicities"], list):
        raise ParseError("multiplicities must be a list", f"{path}: multiplicities")
    vectors, all_exact = [], True
    for i, vec in enumerate(data["vectors"]):
        if not isinstance(vec, list):
            raise ParseError("each vector must be a list", f"{path}: vectors[{i}]")
        row = []
        for j, x in enumerate(vec):
            val, is_exact = _component(x, f"{path}: vectors[{i}][{j}]")
            all_exact &= is_exact
            row.append(val)
        vectors.append(row)
    mults = [_multiplicity(m, f"{path}: multiplicities[{k}]") for k, m in enumerate(data["multiplicities"])]
    if all_exact:
        vectors = [[int(x) if isinstance(x, float) else x for x in row] for row in vectors]
    else:
        vectors = [[complex(x) for x in row] for row in vectors]
    return build_config(dim, vectors, mults)


# --------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    target: str
    params: dict = field(default_factory=dict)
    points: int = 20
    seed: int = 0
    tol: float = 1e-8
    checks: tuple[str, ...] = DEFAULT_CHECKS
    output: str = "human"
    kernel: str = "trig"
    i0: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.points < 1:
            raise ValueError("point count must be at least 1")


def resolve_target(target: str, params: dict):
    if os.path.exists(target) or target.endswith(".json"):
        if not os.path.exists(target):
            raise ParseError("file not found", target)
        return parse_config_file(target)
    return get_entry(target).builder(params)


def run_check(rc: RunConfig) -> tuple[CheckReport, int]:
    cfg = resolve_target(rc.target, rc.params)
    if isinstance(cfg, PolynomialPrepotential):
        raise VeeLabError(f"{rc.target} is not a vector configuration; use the identity verb")
    kernel = get_kernel(rc.kernel)
    rep = CheckReport(target=rc.target, params=dict(rc.params), digest=config_digest(cfg))
    unknown = [c for c in rc.checks if c not in ALL_CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; choose from {', '.join(ALL_CHECKS)}")
    if "vee" in rc.checks:
        vee = euclidean_vee_residual(cfg, rc.tol)
        rep.add("vee", vee.max_residual, rc.tol, vee.verdict, mode=cfg.mode)
        rep.hypotheses["c_delta_min"] = vee.hypothesis.get("c_delta_min")
        if vee.hypothesis.get("violated"):
            rep.warnings.append("C_delta hypothesis violated: some collinear sub-collection has zero weight")
    if "condition2" in rc.checks:
        rep.add("condition2", condition2_relative(cfg), rc.tol)
    needs_points = {"commute", "wdvv", "identity"} & set(rc.checks)
    if needs_points:
        pts = sample_points(cfg, kernel, rc.points, rc.seed)
        rep.points = {
            "count": len(pts),
            "seed": rc.seed,
            "kernel": kernel.name,
            "min_clearance": min(p.clearance for p in pts),
        }
        tensors = [third_derivative_tensor(cfg, kernel, p.point) for p in pts]
        if "commute" in rc.checks:
            vals = [commutativity_residual(T) for T in tensors]
            rep.add("commute", max(vals), rc.tol, per_point=vals)
        if {"wdvv", "identity"} & set(rc.checks):
            wd, idr, ranks = [], [], []
            for T in tensors:
                try:
                    f = minor_identity_field(T, rc.i0)
                except VeeLabError as err:
                    rep.warnings.append(f"identity field unavailable: {err}")
                    wd.append(np.inf)
                    idr.append(np.inf)
                    continue
                ranks.append(f.rank)
                idr.append(identity_residual(T, f.e))
                wd.append(wdvv_residual(T, np.einsum("k,kij->ij", f.A, T.F)))
            rep.hypotheses["pivot_rank_min"] = min(ranks) if ranks else None
            if "wdvv" in rc.checks:
                rep.add("wdvv", max(wd), rc.tol, per_point=wd)
            if "identity" in rc.checks:
                rep.add("identity", max(idr), rc.tol, per_point=idr)
    return rep, rep.exit_code()


def run_identity(rc: RunConfig, compare: list[str]) -> tuple[CheckReport, int]:
    obj = resolve_target(rc.target, rc.params)
    rep = CheckReport(target=rc.target, params=dict(rc.params))
    if isinstance(obj, PolynomialPrepotential):
        pts = sample_points(2, "trig", rc.points, rc.seed)
        res, dev = [], []
        for p in pts:
            m = identity_for_metric(obj.tensor(p.point), obj.metric, rc.i0)
            res.append(m.residual)
            dev.append(float(np.max(np.abs(m.e - np.array([1, 0])))))
        rep.points = {"count": len(pts), "seed": rc.seed}
        rep.add("metric_identity", max(res), rc.tol, per_point=res)
        rep.add("equals_d_t1", max(dev), rc.tol)
        return rep, rep.exit_code()
    cfg = obj
    rep.digest = config_digest(cfg)
    kernel = get_kernel(rc.kernel)
    pts = sample_points(cfg, kernel, rc.points, rc.seed)
    rep.points = {"count": len(pts), "seed": rc.seed, "kernel": kernel.name}
    case = closed_form_case(rc.target, rc.params) if "closed" in compare else None
    minors, closed, gap = [], [], []
    for p in pts:
        T = third_derivative_tensor(cfg, kernel, p.point)
        e_m = e_c = None
        if "minors" in compare:
            e_m = minor_identity_field(T, rc.i0).e
            minors.append(identity_residual(T, e_m))
        if case is not None:
            e_c, _ = closed_form_identity(case, p.point)
            closed.append(identity_residual(T, e_c))
        if e_m is not None and e_c is not None:
            gap.append(float(np.max(np.abs(e_m - e_c))))
    if minors:
        rep.add("identity_minors", max(minors), rc.tol)
    if closed:
        rep.add("identity_closed", max(closed), rc.tol, case=case.tag)
    if gap:
        rep.add("minors_vs_closed", max(gap), rc.tol)
    return rep, rep.exit_code()


def _parse_vector(text: str, exact: bool) -> list:
    comps = [t for t in text.split(",") if t.strip()]
    if exact:
        try:
            return [parse_exact(t) for t in comps]
        except ValueError:
            pass
    return [complex(t.strip().replace("i", "j")) for t in comps]


def run_restrict(rc: RunConfig, along: list[str]) -> tuple[CheckReport, int, dict]:
    cfg = resolve_target(rc.target, rc.params)
    gens = [_parse_vector(a, cfg.exact) for a in along]
    if not cfg.exact or any(not isinstance(x, ExactScalar) for g in gens for x in g):
        cfg = to_numeric(cfg)
    B = subsystem(cfg, gens)
    frame = restrict(cfg, B)
    proj = frame.config
    rep = CheckReport(target=rc.target, params=dict(rc.params), digest=config_digest(proj))
    rep.hypotheses = {"c_delta_min": frame.c_min, "frame_exact": frame.exact, "subsystem": list(B)}
    pts = sample_points(proj, get_kernel(rc.kernel), rc.points, rc.seed)
    vals = [commutativity_residual(third_derivative_tensor(proj, rc.kernel, p.point)) for p in pts]
    rep.points = {"count": len(pts), "seed": rc.seed}
    rep.add("restricted_commute", max(vals), rc.tol, per_point=vals)
    listing = {
        "dim": proj.dim,
        "vectors": [[str(x) if isinstance(x, ExactScalar) else repr(complex(x)) for x in v] for v in proj.vectors],
        "multiplicities": [{"re": c.real, "im": c.imag} for c in proj.mults],
    }
    return rep, rep.exit_code(), listing


# --------------------------------------------------------------------------
# entry point


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="parameter substitution")
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--kernel", choices=("trig", "rational"), default="trig")
    p.add_argument("--i0", type=int, default=0, help="pivot index (zero-based)")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1; status 2 means pass with warnings."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _join_interval(argv: list[str]) -> list[str]:
    """Let ``--interval -5,-1`` through argparse's option detection."""
    out, k = [], 0
    while k < len(argv):
        if argv[k] == "--interval" and k + 1 < len(argv):
            out.append(f"--interval={argv[k + 1]}")
            k += 2
        else:
            out.append(argv[k])
            k += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="veelab", description=__doc__)
    sub = ap.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("check", help="run vee/commutativity checks on a configuration")
    p.add_argument("target", help="catalog name or JSON file")
    p.add_argument("--checks", default=",".join(DEFAULT_CHECKS), help=f"comma list from {','.join(ALL_CHECKS)}")
    _common(p)
    p = sub.add_parser("identity", help="identity vector field by minors and closed form")
    p.add_argument("target")
    p.add_argument("--compare", default="minors,closed")
    _common(p)
    p = sub.add_parser("restrict", help="project along a subsystem and check commutativity")
    p.add_argument("target")
    p.add_argument("--along", action="append", required=True, help="generator vector, comma separated")
    _common(p)
    p = sub.add_parser("scan", help="locate multiplicity relations along one parameter")
    p.add_argument("target")
    p.add_argument("--free", required=True)
    p.add_argument("--interval", required=True, help="lo,hi")
    p.add_argument("--grid", type=int, default=16)
    _common(p)
    p = sub.add_parser("catalog", help="list named configurations")
    p.add_argument("--json", action="store_true")
    return ap


def _emit(rep: CheckReport, as_json: bool, extra: dict | None = None) -> None:
    if as_json:
        d = rep.to_dict()
        if extra:
            d.update(extra)
        print(json.dumps(d, sort_keys=True, indent=2))
        return
    print(f"target: {rep.target}")
    for c in rep.checks:
        print(f"  {c.name:<20} {c.residual:.3e}  tol {c.tolerance:.1e}  {'PASS' if c.passed else 'FAIL'}")
    for w in rep.warnings:
        print(f"  warning: {w}")
    if extra:
        print(json.dumps(extra, sort_keys=True, indent=2))


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_join_interval(argv))
    try:
        if args.verb == "catalog":
            entries = [e.summary() for e in list_catalog()]
            if args.json:
                print(json.dumps(entries, sort_keys=True, indent=2))
            else:
                for e in entries:
                    rel = "; ".join(e["relations"]) or "none"
                    print(f"{e['name']:<9} dim {e['dim']:<10} params {','.join(e['params'])}  relations: {rel}")
            return 0
        params = parse_sets(args.set)
        rc = RunConfig(args.target, params, args.points, args.seed, args.tol, output="json" if args.json else "human",
                       kernel=args.kernel, i0=args.i0)
        if args.verb == "check":
            rc.checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
            rep, code = run_check(rc)
            _emit(rep, args.json)
            return code
        if args.verb == "identity":
            compare = [c.strip() for c in args.compare.split(",") if c.strip()]
            rep, code = run_identity(rc, compare)
            _emit(rep, args.json)
            return code
        if args.verb == "restrict":
            rep, code, listing = run_restrict(rc, args.along)
            _emit(rep, args.json, {"projected": listing})
            return code
        if args.verb == "scan":
            lo, hi = (float(t) for t in args.interval.split(","))
            scan = relation_scan(args.target, params, args.free, (lo, hi), args.grid)
            rep = CheckReport(target=args.target, params=params)
            rep.add("roots_verified", max(scan.root_residuals, default=0.0), 1e-10)
            extra = {"free": scan.free, "roots": scan.roots, "identically_zero": scan.identically_zero}
            _emit(rep, args.json, extra)
            return rep.exit_code()
    except (VeeLabError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
