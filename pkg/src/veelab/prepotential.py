"""Third derivatives of trigonometric and rational prepotentials.

Only F_ijk is ever evaluated; the prepotential itself is not needed by any
of the checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PoleHit, SamplingExhausted, SingularMetric
from .geometry import VectorConfig

POLE_CLEARANCE = 1e-2
POLE_HIT = 1e-14
MAX_REJECTIONS = 1000


@dataclass(frozen=True)
class Kernel:
    """Third derivative of the one-variable building block f."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    clearance: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, z):
        return self.func(np.asarray(z, dtype=complex))

    @classmethod
    def custom(cls, func, clearance=None, name: str = "custom") -> Kernel:
        """User kernel; oddness is not checked."""
        return cls(name, func, clearance)


def _cot(z):
    return np.cos(z) / np.sin(z)


def _two_over(z):
    return 2.0 / z


TRIGONOMETRIC = Kernel("trigonometric", _cot, lambda z: np.abs(np.sin(z)))
RATIONAL = Kernel("rational", _two_over, np.abs)


def get_kernel(name: str | Kernel) -> Kernel:
    if isinstance(name, Kernel):
        return name
    key = name.lower()
    if key in ("trig", "trigonometric"):
        return TRIGONOMETRIC
    if key in ("rational", "rat"):
        return RATIONAL
    raise ValueError(f"unknown kernel {name!r}; expected trig or rational")


@dataclass(frozen=True)
class PointSample:
    point: np.ndarray
    seed: int
    clearance: float


@dataclass(frozen=True)
class DerivativeTensor:
    """F[i, j, k] = third partial derivative of F at ``point``."""

    dim: int
    F: np.ndarray
    point: np.ndarray | None = None

    @property
    def matrices(self) -> list[np.ndarray]:
        return [self.F[i] for i in range(self.dim)]


def pole_clearance(cfg: VectorConfig, kernel: Kernel, x) -> float:
    if len(cfg) == 0 or kernel.clearance is None:
        return float("inf")
    z = cfg.array @ np.asarray(x, dtype=complex)
    return float(np.min(kernel.clearance(z)))


def sample_points(
    cfg: VectorConfig | int,
    kernel: Kernel | str = TRIGONOMETRIC,
    count: int = 20,
    seed: int = 0,
    clearance: float = POLE_CLEARANCE,
    max_rejections: int = MAX_REJECTIONS,
) -> list[PointSample]:
    """Seeded points in [-1,1]^N + i[-1,1]^N away from the poles of every vector.

    ``cfg`` may be a bare dimension, in which case no clearance is enforced.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    kernel = get_kernel(kernel)
    dim = cfg if isinstance(cfg, int) else cfg.dim
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        for _attempt in range(max_rejections + 1):
            x = rng.uniform(-1, 1, dim) + 1j * rng.uniform(-1, 1, dim)
            clr = float("inf") if isinstance(cfg, int) else pole_clearance(cfg, kernel, x)
            if clr >= clearance:
                out.append(PointSample(x, seed, clr))
                break
        else:
            raise SamplingExhausted(f"no point with pole clearance {clearance} after {max_rejections} rejections")
    return out


def symmetrize_fill(F: np.ndarray) -> np.ndarray:
    """Copy each sorted-index entry to all its permutations so symmetry is exact."""
    n = F.shape[0]
    out = np.empty_like(F)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                v = F[i, j, k]
                out[i, j, k] = out[i, k, j] = out[j, i, k] = v
                out[j, k, i] = out[k, i, j] = out[k, j, i] = v
    return out


def third_derivative_tensor(cfg: VectorConfig, kernel: Kernel | str, x) -> DerivativeTensor:
    """F_ijk = sum_alpha c_alpha alpha_i alpha_j alpha_k kernel((alpha, x))."""
    kernel = get_kernel(kernel)
    x = np.asarray(x, dtype=complex)
    n = cfg.dim
    if len(cfg) == 0:
        return DerivativeTensor(n, np.zeros((n, n, n), dtype=complex), x)
    arr = cfg.array
    c = cfg.mult_array
    z = arr @ x
    live = c != 0
    if kernel.clearance is not None and np.any(live):
        clr = kernel.clearance(z[live])
        if np.min(clr) < POLE_HIT:
            raise PoleHit(f"point lies on a pole (clearance {float(np.min(clr)):.3e})")
    w = np.zeros(len(cfg), dtype=complex)
    w[live] = c[live] * kernel(z[live])
    F = np.einsum("a,ai,aj,ak->ijk", w, arr, arr, arr)
    return DerivativeTensor(n, symmetrize_fill(F), x)


def commutativity_residual(T: DerivativeTensor) -> float:
    """max_{i<j} |[F_i, F_j]|_F / (1 + |F_i|_F |F_j|_F)."""
    worst = 0.0
    norms = [np.linalg.norm(T.F[i]) for i in range(T.dim)]
    for i in range(T.dim):
        for j in range(i + 1, T.dim):
            comm = T.F[i] @ T.F[j] - T.F[j] @ T.F[i]
            worst = max(worst, float(np.linalg.norm(comm) / (1 + norms[i] * norms[j])))
    return worst


def wdvv_residual(T: DerivativeTensor, B, with_condition: bool = False):
    """max_{i<j} |F_i B^-1 F_j - F_j B^-1 F_i|_F normalized by 1 + |F_i||B^-1|_2|F_j|.

    With B the identity this reduces to ``commutativity_residual``.
    """
    B = np.asarray(B, dtype=complex)
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[-1] < 1e-12 * sv[0] or sv[0] == 0:
        raise SingularMetric(f"metric is singular (singular values {sv})")
    Binv = np.linalg.inv(B)
    binv_norm = 1.0 / sv[-1]
    norms = [np.linalg.norm(T.F[i]) for i in range(T.dim)]
    worst = 0.0
    for i in range(T.dim):
        for j in range(i + 1, T.dim):
            d = T.F[i] @ Binv @ T.F[j] - T.F[j] @ Binv @ T.F[i]
            worst = max(worst, float(np.linalg.norm(d) / (1 + norms[i] * binv_norm * norms[j])))
    if with_condition:
        return worst, float(sv[0] / sv[-1])
    return worst


def commutator_entry(T: DerivativeTensor, a: int, b: int, i: int, j: int) -> complex:
    """Entry (i, j) of F_a F_b - F_b F_a."""
    return complex((T.F[a] @ T.F[b] - T.F[b] @ T.F[a])[i, j])


def residuals_at_points(cfg: VectorConfig, kernel, points) -> list[float]:
    return [commutativity_residual(third_derivative_tensor(cfg, kernel, _pt(p))) for p in points]


def _pt(p):
    return p.point if isinstance(p, PointSample) else p
