"""Subsystems B = A cap W and the configuration projected to the orthogonal
complement of B."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import exact as ex
from .catalog import ClosedFormCase
from .errors import IsotropicComplement
from .exact import ExactScalar, sqrt_exact
from .geometry import VectorConfig, _leading_sign, build_config, class_of, inner
from .identity_field import closed_form_identity, identity_residual, metric_normalizer
from .prepotential import (
    TRIGONOMETRIC,
    commutativity_residual,
    sample_points,
    third_derivative_tensor,
)
from .report import CheckReport, config_digest

TANGENCY_TOL = 1e-9


def _exact_vectors(vectors) -> list[list[ExactScalar]] | None:
    try:
        return [[ExactScalar.coerce(x) for x in v] for v in vectors]
    except TypeError:
        return None


def subsystem(cfg: VectorConfig, generators) -> tuple[int, ...]:
    """Indices of the configuration vectors lying in span(generators)."""
    gens = [list(g) for g in generators]
    if not gens:
        raise ValueError("at least one generator is required")
    egens = _exact_vectors(gens) if cfg.exact else None
    if egens is not None:
        base = ex.rank(egens)
        return tuple(i for i, v in enumerate(cfg.vectors) if ex.rank(egens + [list(v)]) == base)
    G = np.array(gens, dtype=complex)
    Q, _ = np.linalg.qr(G.T)
    sv = np.linalg.svd(G, compute_uv=False)
    Q = Q[:, : int(np.sum(sv > 1e-10 * sv[0]))]
    out = []
    for i, v in enumerate(cfg.array):
        if np.linalg.norm(v - Q @ (Q.conj().T @ v)) <= 1e-10 * np.linalg.norm(v):
            out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class RestrictionFrame:
    """Orthonormal frame of the complement of B and the projected configuration."""

    source: VectorConfig
    subsystem: tuple[int, ...]
    basis: tuple[tuple, ...]  # f_1..f_n, each a length-N vector
    config: VectorConfig  # projected, merged
    source_map: tuple  # original index -> projected index or None
    exact: bool
    c_min: float | None = None
    dropped: tuple[int, ...] = field(default=())

    @property
    def basis_array(self) -> np.ndarray:
        """N x n complex matrix whose columns are the frame vectors."""
        return np.array([[complex(x) for x in f] for f in self.basis], dtype=complex).reshape(-1, self.source.dim).T

    def project_mults(self, mults) -> tuple[complex, ...]:
        """Push multiplicities on the source vectors through the merge map."""
        out = [0j] * len(self.config)
        for i, k in enumerate(self.source_map):
            if k is not None:
                out[k] += complex(mults[i])
        return tuple(out)

    def embed(self, y) -> np.ndarray:
        """Point of W_B with frame coordinates y."""
        return self.basis_array @ np.asarray(y, dtype=complex)


def _exact_frame(rows, dim):
    null = ex.nullspace(rows, dim) if rows else [[ExactScalar(int(i == j)) for i in range(dim)] for j in range(dim)]
    frame = []
    for v in null:
        for f in frame:
            k = inner(v, f)
            v = [a - k * b for a, b in zip(v, f)]
        n2 = inner(v, v)
        if n2.is_zero():
            raise IsotropicComplement("the form is degenerate on the complement of the subsystem")
        root = sqrt_exact(n2)
        if root is None:
            return None
        frame.append([a / root for a in v])
    return frame


def _numeric_frame(rows, dim):
    if rows:
        R = np.array(rows, dtype=complex)
        _, sv, Vh = np.linalg.svd(R)
        rk = int(np.sum(sv > 1e-10 * sv[0])) if sv.size and sv[0] > 0 else 0
        V = Vh[rk:].conj().T
    else:
        V = np.eye(dim, dtype=complex)
    if V.shape[1] == 0:
        return V
    for _ in range(2):
        g = V.T @ V
        if abs(np.linalg.det(g)) < 1e-12 * max(1.0, np.linalg.norm(g)) ** V.shape[1]:
            raise IsotropicComplement("the form is degenerate on the complement of the subsystem")
        if np.allclose(g.imag, 0) and np.allclose(V.imag, 0) and np.all(np.linalg.eigvalsh(g.real) > 0):
            L = np.linalg.cholesky(g.real)
            V = V @ np.linalg.inv(L).T
        else:
            C_hat, _ = metric_normalizer(np.linalg.inv(g))
            V = V @ np.linalg.inv(C_hat)
    return V


def restrict(cfg: VectorConfig, B) -> RestrictionFrame:
    """Project A minus B onto an orthonormal frame of W_B = B-perp, merging repeats.

    Vectors whose projections agree up to sign are merged and their
    multiplicities summed; zero totals are kept so reduced multiplicities
    stay aligned.
    """
    B = tuple(sorted(set(B)))
    rows = [list(cfg.vectors[i]) for i in B]
    exact = cfg.exact
    frame = _exact_frame(rows, cfg.dim) if exact else None
    if frame is None:
        exact = False
        F = _numeric_frame([[complex(x) for x in r] for r in rows], cfg.dim)
        frame = [list(F[:, k]) for k in range(F.shape[1])]
    n = len(frame)
    if n == 0:
        raise IsotropicComplement("the subsystem spans the whole space; the complement is zero")

    vecs: list[tuple] = []
    mults: list[complex] = []
    source_map: list = [None] * len(cfg)
    dropped = []
    index: dict = {}
    for i, alpha in enumerate(cfg.vectors):
        if i in B:
            continue
        if exact:
            y = tuple(inner(alpha, f) for f in frame)
            if all(t.is_zero() for t in y):
                dropped.append(i)
                continue
        else:
            a = np.array([complex(t) for t in alpha])
            y = tuple(complex(np.dot(a, np.asarray(f, dtype=complex))) for f in frame)
            if max(abs(t) for t in y) <= 1e-12 * np.linalg.norm(a):
                dropped.append(i)
                continue
        if _leading_sign(y, exact) < 0:
            y = tuple(-t for t in y)
        key = y if exact else tuple(np.round(np.array(y) * 1e9).astype(complex).tolist())
        pos = index.get(key)
        if pos is None:
            pos = index[key] = len(vecs)
            vecs.append(y)
            mults.append(0j)
        mults[pos] += cfg.mults[i]
        source_map[i] = pos
    projected = build_config(n, vecs, mults) if vecs else VectorConfig(n, (), (), exact)
    c_min = min((class_of(cfg, b).c_min_over_subsets() for b in B), default=None)
    return RestrictionFrame(cfg, B, tuple(tuple(f) for f in frame), projected, tuple(source_map), exact, c_min, tuple(dropped))


def restrict_along(cfg: VectorConfig, generators) -> RestrictionFrame:
    return restrict(cfg, subsystem(cfg, generators))


def restricted_commutativity(
    cfg: VectorConfig, B, count: int = 20, seed: int = 7, tol: float = 1e-8, kernel=TRIGONOMETRIC, points=None
) -> CheckReport:
    """Commutativity residual of the projected configuration in frame coordinates."""
    frame = restrict(cfg, B)
    pts = points if points is not None else [p.point for p in sample_points(frame.config, kernel, count, seed)]
    res = [commutativity_residual(third_derivative_tensor(frame.config, kernel, p)) for p in pts]
    rep = CheckReport(target="restriction", digest=config_digest(frame.config))
    rep.points = {"count": len(pts), "seed": seed}
    rep.add("restricted_commute", max(res), tol, per_point=res)
    c_min = frame.c_min
    scale = max([1.0] + [abs(c) for c in cfg.mults])
    rep.hypotheses = {"c_delta_min": c_min, "frame_exact": frame.exact, "subsystem": list(frame.subsystem)}
    if c_min is not None and c_min <= 1e-12 * scale:
        rep.warnings.append("C_delta hypothesis violated on the subsystem")
    return rep


def project_case(case: ClosedFormCase, frame: RestrictionFrame) -> ClosedFormCase:
    """Closed-form data on the projected configuration (same c0, H0; cbar pushed through)."""
    return ClosedFormCase(
        case.tag, frame.config, frame.project_mults(case.reduced), case.c0, case.H0, dict(case.params), case.name
    )


def _field_callable(field_source) -> Callable:
    if isinstance(field_source, ClosedFormCase):
        return lambda x: closed_form_identity(field_source, x)[0]
    return field_source


@dataclass(frozen=True)
class TangencyResult:
    tangent: bool
    max_normal: float
    per_point: tuple[float, ...]


def tangency_check(field_source, frame: RestrictionFrame, count: int = 20, seed: int = 11, points=None) -> TangencyResult:
    """Size of the component of e normal to W_B at points of W_B."""
    e_of = _field_callable(field_source)
    F = frame.basis_array
    ys = points if points is not None else [p.point for p in sample_points(frame.config, TRIGONOMETRIC, count, seed)]
    out = []
    for y in ys:
        e = np.asarray(e_of(F @ y), dtype=complex)
        normal = e - F @ (F.T @ e)
        out.append(float(np.linalg.norm(normal) / max(1.0, np.linalg.norm(e))))
    worst = max(out)
    return TangencyResult(worst < TANGENCY_TOL, worst, tuple(out))


def restricted_identity_residual(field_source, frame: RestrictionFrame, count: int = 20, seed: int = 13) -> float:
    """max over points of |e~^k (F_B)_kij - delta_ij| with e~ the frame components of e."""
    e_of = _field_callable(field_source)
    F = frame.basis_array
    worst = 0.0
    for p in sample_points(frame.config, TRIGONOMETRIC, count, seed):
        e = np.asarray(e_of(F @ p.point), dtype=complex)
        T = third_derivative_tensor(frame.config, TRIGONOMETRIC, p.point)
        worst = max(worst, identity_residual(T, F.T @ e))
    return worst


# --------------------------------------------------------------------------
# equivalence of configurations


@dataclass(frozen=True)
class Equivalence:
    mapping: tuple[int, ...]  # index in first -> index in second
    signs: tuple[int, ...]
    scale: complex  # (w_i, w_j) = scale * (v_i, v_j)


def _gram(cfg: VectorConfig, exact: bool):
    n = len(cfg)
    if exact:
        return [[inner(cfg.vectors[i], cfg.vectors[j]) for j in range(n)] for i in range(n)]
    A = cfg.array
    return (A @ A.T).tolist()


def gram_equivalence(
    first: VectorConfig, second: VectorConfig, allow_scale: bool = False, mult_tol: float = 1e-12, tol: float = 1e-9
) -> Equivalence | None:
    """Bijection (with signs, optional global scale) matching Gram matrices and multiplicities.

    Exact configurations are compared exactly; otherwise to ``tol``.  Zero
    multiplicity vectors take part like any other.
    """
    if len(first) != len(second):
        return None
    n = len(first)
    if n == 0:
        return Equivalence((), (), 1)
    exact = first.exact and second.exact
    G1, G2 = _gram(first, exact), _gram(second, exact)

    def same(a, b) -> bool:
        if exact:
            return a == b
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))

    def mult_ok(i, j):
        a, b = first.mults[i], second.mults[j]
        return abs(a - b) <= mult_tol * max(1.0, abs(a), abs(b))

    order = sorted(range(n), key=lambda i: -abs(complex(G1[i][i])))
    scales = [1] if not allow_scale else []
    if allow_scale:
        i0 = order[0]
        for j in range(n):
            s = G2[j][j] / G1[i0][i0]
            if not any(same(s, t) for t in scales):
                scales.append(s)
    for scale in scales:
        mapping = [-1] * n
        signs = [1] * n
        used = [False] * n

        def assign(pos: int) -> bool:
            if pos == n:
                return True
            i = order[pos]
            for j in range(n):
                if used[j] or not mult_ok(i, j) or not same(G2[j][j], scale * G1[i][i]):
                    continue
                for sg in (1, -1):
                    ok = True
                    for prev in order[:pos]:
                        k = mapping[prev]
                        if not same(sg * signs[prev] * G2[j][k], scale * G1[i][prev]):
                            ok = False
                            break
                    if ok:
                        mapping[i], signs[i], used[j] = j, sg, True
                        if assign(pos + 1):
                            return True
                        used[j] = False
                        mapping[i] = -1
            return False

        if assign(0):
            return Equivalence(tuple(mapping), tuple(signs), complex(scale))
    return None
