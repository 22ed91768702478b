"""Recover multiplicity relations as zeros of the quadratic-condition residual."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .catalog import build_named
from .errors import ConditionOneFails, Diverged, NoRootInInterval, SingularJacobian
from .geometry import VectorConfig
from .vee_check import condition2_residual, condition2_tensor, euclidean_vee_residual

ROOT_TOL = 1e-10
XTOL = 1e-12


def _builder(builder) -> Callable[[dict], VectorConfig]:
    if callable(builder):
        return builder
    return lambda params: build_named(builder, params)


@dataclass
class RelationScan:
    free: str
    fixed: dict
    interval: tuple[float, float]
    grid: np.ndarray
    residuals: np.ndarray
    roots: list[float] = field(default_factory=list)
    root_residuals: list[float] = field(default_factory=list)
    methods: list[str] = field(default_factory=list)
    identically_zero: bool = False  # the residual vanishes on the whole grid


def relation_scan(builder, fixed: dict, free: str, interval, grid_size: int = 16) -> RelationScan:
    """Roots in ``interval`` of the quadratic-condition residual along one parameter.

    A signed surrogate (the tensor entry of largest size at the midpoint) is
    bracketed on a grid and refined with Brent's method.  Grid minima that
    do not bracket are polished with bounded scalar minimization, which
    catches double roots.  Every root is verified against the full residual.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    lo, hi = float(interval[0]), float(interval[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise ValueError("interval must be finite with lo < hi")
    build = _builder(builder)

    def cfg_at(t: float) -> VectorConfig:
        return build({**fixed, free: t})

    mid = 0.5 * (lo + hi)
    probe = mid + 0.1234567 * (hi - lo) / grid_size
    if not euclidean_vee_residual(cfg_at(probe)).verdict:
        raise ConditionOneFails(f"the vee-condition fails at {free}={probe}; the path leaves the locus")

    T_mid = condition2_tensor(cfg_at(probe))
    idx = np.unravel_index(np.argmax(np.abs(T_mid)), T_mid.shape)
    phase = T_mid[idx] / abs(T_mid[idx]) if abs(T_mid[idx]) > 0 else 1.0

    def signed(t: float) -> float:
        return float((condition2_tensor(cfg_at(t))[idx] / phase).real)

    def full(t: float) -> float:
        return condition2_residual(cfg_at(t))

    grid = np.linspace(lo, hi, grid_size)
    rvals = np.array([full(t) for t in grid])
    if np.all(rvals < ROOT_TOL):
        return RelationScan(free, dict(fixed), (lo, hi), grid, rvals, identically_zero=True)
    svals = np.array([signed(t) for t in grid])
    candidates: list[tuple[float, str]] = []
    for k in range(grid_size):
        if svals[k] == 0:
            candidates.append((grid[k], "grid"))
        if k + 1 < grid_size and svals[k] * svals[k + 1] < 0:
            candidates.append((brentq(signed, grid[k], grid[k + 1], xtol=XTOL, rtol=4 * np.finfo(float).eps), "bisection"))
    for k in range(grid_size):
        left = rvals[k - 1] if k > 0 else np.inf
        right = rvals[k + 1] if k + 1 < grid_size else np.inf
        if rvals[k] <= left and rvals[k] <= right:
            a, b = grid[max(k - 1, 0)], grid[min(k + 1, grid_size - 1)]
            opt = minimize_scalar(full, bounds=(a, b), method="bounded", options={"xatol": XTOL})
            candidates.append((float(opt.x), "minimize"))

    scan = RelationScan(free, dict(fixed), (lo, hi), grid, rvals)
    for t, method in sorted(candidates):
        res = full(t)
        if res >= ROOT_TOL:
            continue
        if scan.roots and abs(t - scan.roots[-1]) < 1e-8:
            if res < scan.root_residuals[-1]:
                scan.roots[-1], scan.root_residuals[-1], scan.methods[-1] = t, res, method
            continue
        scan.roots.append(float(t))
        scan.root_residuals.append(res)
        scan.methods.append(method)
    if not scan.roots:
        raise NoRootInInterval(f"no zero of the residual for {free} in [{lo}, {hi}]")
    return scan


@dataclass
class NewtonResult:
    params: dict
    values: np.ndarray
    iterations: int
    residual: float
    history: list[float]


def _residual_vector(build, params: dict) -> np.ndarray:
    T = condition2_tensor(build(params)).ravel()
    return np.concatenate([T.real, T.imag])


def newton_refine(
    builder,
    params: dict,
    free: list[str],
    init,
    tol: float = 1e-11,
    max_iter: int = 25,
    step: float = 1e-6,
) -> NewtonResult:
    """Gauss-Newton on the quadratic-condition tensor over the ``free`` parameters.

    Steps are minimum-norm least-squares solutions, so a Jacobian that is
    rank deficient only because the zero set is a curve or surface is fine.
    A free parameter whose column is numerically zero raises SingularJacobian.
    """
    build = _builder(builder)
    free = list(free)
    x = np.array(init, dtype=float)
    if x.shape != (len(free),):
        raise ValueError("init must have one value per free parameter")

    def at(vals) -> dict:
        return {**params, **{k: float(v) for k, v in zip(free, vals)}}

    r = _residual_vector(build, at(x))
    res = float(np.max(np.abs(r)))
    history = [res]
    for it in range(max_iter + 1):
        if res < tol:
            return NewtonResult(at(x), x, it, res, history)
        if it == max_iter:
            break
        J = np.empty((r.size, len(free)))
        for k in range(len(free)):
            dx = np.zeros(len(free))
            dx[k] = step * max(1.0, abs(x[k]))
            J[:, k] = (_residual_vector(build, at(x + dx)) - _residual_vector(build, at(x - dx))) / (2 * dx[k])
        col = np.linalg.norm(J, axis=0)
        scale = 1.0 + np.linalg.norm(r)
        dead = [free[k] for k in range(len(free)) if col[k] <= 1e-9 * scale]
        if dead:
            raise SingularJacobian(f"free parameters {dead} do not affect the residual")
        delta = np.linalg.lstsq(J, -r, rcond=None)[0]
        x = x + delta
        r = _residual_vector(build, at(x))
        res = float(np.max(np.abs(r)))
        history.append(res)
        if not np.isfinite(res) or res > 1e6 * max(history[0], 1.0):
            raise Diverged(f"residual grew to {res:.3e}")
    raise Diverged(f"no convergence after {max_iter} iterations (residual {res:.3e})")
