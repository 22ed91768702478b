"""Identity vector fields built from determinant minors or closed forms.

A general constant metric is handled by a linear change of coordinates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .catalog import ClosedFormCase, build_f4
from .errors import (
    FactorizationFailure,
    HVanishes,
    PoleHit,
    RankDeficient,
    SingularMetric,
    ZeroH,
)
from .prepotential import POLE_HIT, DerivativeTensor

RANK_TOL = 1e-10
H_TOL = 1e-10


@dataclass(frozen=True)
class IdentityField:
    A: np.ndarray  # signed maximal minors
    h: complex
    e: np.ndarray
    pivot: int
    singular_values: np.ndarray
    rank: int
    h_values: np.ndarray  # sum_k A^k F_kii for each i
    h_spread: float  # max_i |h_i - h| / |h|


def pivot_matrix(T: DerivativeTensor, i0: int) -> np.ndarray:
    """Rows (F_{i0 i j})_j for i != i0."""
    rows = [i for i in range(T.dim) if i != i0]
    return T.F[i0][rows, :]


def signed_minors(P: np.ndarray) -> np.ndarray:
    """A^k = (-1)^k det(P without column k), zero-based k."""
    n = P.shape[1]
    if n == 1:
        return np.ones(1, dtype=complex)
    return np.array(
        [(-1) ** k * np.linalg.det(np.delete(P, k, axis=1)) for k in range(n)], dtype=complex
    )


def minor_identity_field(T: DerivativeTensor, i0: int = 0) -> IdentityField:
    """Identity field e = A / h built from the maximal minors of the pivot matrix."""
    n = T.dim
    if not 0 <= i0 < n:
        raise IndexError(f"pivot index {i0} outside 0..{n - 1}")
    P = pivot_matrix(T, i0)
    if P.size:
        sv = np.linalg.svd(P, compute_uv=False)
        rank = int(np.sum(sv > RANK_TOL * sv[0])) if sv[0] > 0 else 0
    else:
        sv, rank = np.zeros(0), 0
    if rank < n - 1:
        raise RankDeficient(f"pivot matrix has rank {rank} < {n - 1}", singular_values=sv, rank=rank)
    A = signed_minors(P)
    B = b_matrix(T, A)
    hs = np.diag(B).copy()
    h = complex(np.mean(hs))
    if abs(h) < 1e-12 * max(np.linalg.norm(A) * np.linalg.norm(T.F), 1e-300):
        raise ZeroH(f"h = {h} vanishes; the minor combination is degenerate")
    spread = float(np.max(np.abs(hs - h)) / abs(h))
    return IdentityField(A, h, A / h, i0, sv, rank, hs, spread)


def b_matrix(T: DerivativeTensor, A) -> np.ndarray:
    """B_ij = sum_k A^k F_kij."""
    return np.einsum("k,kij->ij", np.asarray(A, dtype=complex), T.F)


def identity_residual(T: DerivativeTensor, e, g_lower=None) -> float:
    """max_ij |e^k F_kij - g_ij| with g the identity by default."""
    target = np.eye(T.dim) if g_lower is None else np.asarray(g_lower)
    return float(np.max(np.abs(b_matrix(T, e) - target)))


def b_defects(T: DerivativeTensor, A, h: complex) -> tuple[float, float]:
    """Off-diagonal size and diagonal spread of B, both divided by |h|."""
    B = b_matrix(T, A)
    off = B - np.diag(np.diag(B))
    d = np.diag(B)
    off_max = float(np.max(np.abs(off))) if B.size else 0.0
    spread = float(np.max(np.abs(d[:, None] - d[None, :]))) if B.size else 0.0
    return off_max / abs(h), spread / abs(h)


def det_q_values(T: DerivativeTensor, i0: int = 0) -> list[tuple[int, int, float]]:
    """For r < t (both != i0) the normalized |det Q|, Q = pivot matrix plus row F_{. r t}.

    Each determinant is divided by the product of the row norms of Q.
    """
    n = T.dim
    P = pivot_matrix(T, i0)
    others = [i for i in range(n) if i != i0]
    out = []
    for a, r in enumerate(others):
        for t in others[a + 1:]:
            Q = np.vstack([P, T.F[:, r, t][None, :]])
            norms = np.prod(np.linalg.norm(Q, axis=1))
            val = abs(np.linalg.det(Q)) / norms if norms > 0 else 0.0
            out.append((r, t, float(val)))
    return out


# --------------------------------------------------------------------------
# closed forms


def closed_form_identity(case: ClosedFormCase, x) -> tuple[np.ndarray, complex]:
    """e(x) = c0 H^-1 sum cbar sin(2(alpha,x)) alpha and H = H0 + sum cbar sin^2(alpha,x)."""
    x = np.asarray(x, dtype=complex)
    A = case.config.array
    cbar = np.asarray(case.reduced, dtype=complex)
    z = A @ x
    H = complex(case.H0 + np.sum(cbar * np.sin(z) ** 2))
    if abs(H) < H_TOL:
        raise HVanishes(f"H(x) = {H} vanishes")
    e = case.c0 / H * ((cbar * np.sin(2 * z)) @ A)
    return e, H


def closed_form_field(case: ClosedFormCase):
    """The closed-form e as a function of the point."""
    return lambda x: closed_form_identity(case, x)[0]


def _variant(variant) -> int:
    key = str(variant).replace(" ", "").lower()
    if key in ("r=-2q", "-2", "1"):
        return 2
    if key in ("r=-4q", "-4", "2"):
        return 4
    raise ValueError(f"variant must be 'r=-2q' or 'r=-4q', got {variant!r}")


def f4_explicit_components(x, variant: str = "r=-2q", q: complex = 1.0) -> tuple[np.ndarray, complex]:
    """Components B^k and scalar h of the F4 identity field, e = B / h."""
    x = np.asarray(x, dtype=complex)
    kind = _variant(variant)
    s, c = np.sin(x), np.cos(x)
    B = np.empty(4, dtype=complex)
    for k in range(4):
        rest = [i for i in range(4) if i != k]
        prod = np.prod(c[rest])
        if kind == 2:
            B[k] = s[k] * (c[k] * (-1 + np.sum(np.cos(2 * x[rest]))) - 2 * prod)
        else:
            B[k] = s[k] * (c[k] + 2 * prod)
    if kind == 2:
        cfg = build_f4({"r": -2 * q, "q": q})
        h = 6 * q + 0.5 * np.sum(cfg.mult_array * np.cos(2 * (cfg.array @ x)))
    else:
        h = -q * (6 + np.sum(np.cos(2 * x)) + 8 * np.prod(c))
    h = complex(h)
    if abs(h) < H_TOL:
        raise HVanishes(f"h(x) = {h} vanishes")
    return B, h


def master_identity_residual(case: ClosedFormCase, x, u, v) -> float:
    """|LHS - H(u,v)/c0| normalized by the summed term magnitudes.

    LHS = sum_{alpha,beta} cbar_a c_b (alpha,beta)(beta,u)(beta,v) sin(2(alpha,x)) cot((beta,x)).
    """
    x = np.asarray(x, dtype=complex)
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    A = case.config.array
    c = case.config.mult_array
    cbar = np.asarray(case.reduced, dtype=complex)
    z = A @ x
    live = c != 0
    if np.any(live) and np.min(np.abs(np.sin(z[live]))) < POLE_HIT:
        raise PoleHit("point lies on a mirror")
    cot = np.zeros_like(z)
    cot[live] = np.cos(z[live]) / np.sin(z[live])
    left = cbar * np.sin(2 * z)  # indexed by alpha
    right = c * (A @ u) * (A @ v) * cot  # indexed by beta
    terms = np.outer(left, right) * (A @ A.T)
    lhs = np.sum(terms)
    H = case.H0 + np.sum(cbar * np.sin(z) ** 2)
    rhs = H * np.dot(u, v) / case.c0
    scale = float(np.sum(np.abs(terms)) + abs(rhs))
    if scale == 0:
        return 0.0
    return float(abs(lhs - rhs) / scale)


# --------------------------------------------------------------------------
# constant metrics


def takagi(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """G = U diag(s) U^T with U unitary, for complex symmetric G."""
    W, s, Vh = np.linalg.svd(G)
    Z = W.conj().T @ Vh.T
    root = scipy.linalg.sqrtm(Z)
    U = W @ root
    if np.linalg.norm(U @ np.diag(s) @ U.T - G) > 1e-10 * max(1.0, s[0]):
        raise FactorizationFailure("Takagi factorization did not reproduce the matrix")
    return U, s


def metric_normalizer(g_upper) -> tuple[np.ndarray, float]:
    """Matrix Chat with Chat g Chat^T = I, and the verification residual."""
    G = np.asarray(g_upper, dtype=complex)
    n = G.shape[0]
    if G.shape != (n, n):
        raise ValueError("metric must be square")
    if np.linalg.norm(G - G.T) > 1e-12 * max(1.0, np.linalg.norm(G)):
        raise ValueError("metric must be symmetric")
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[0] == 0 or sv[-1] < 1e-12 * sv[0]:
        raise SingularMetric(f"metric is singular (singular values {sv})")
    if np.count_nonzero(G - np.diag(np.diag(G))) == 0:
        C_hat = np.diag(1 / np.sqrt(np.diag(G)))
    else:
        U, s = takagi(G)
        C_hat = np.diag(s ** -0.5) @ U.conj().T
    res = float(np.linalg.norm(C_hat @ G @ C_hat.T - np.eye(n)))
    if res > 1e-10:
        raise FactorizationFailure(f"normalizer residual {res:.3e} exceeds 1e-10")
    return C_hat, res


def tensor_in_coords(T: DerivativeTensor, C: np.ndarray) -> DerivativeTensor:
    """Third derivatives after the linear change x = C y."""
    F = np.einsum("pa,jb,kc,pjk->abc", C, C, C, T.F)
    return DerivativeTensor(T.dim, F, None)


@dataclass(frozen=True)
class MetricIdentity:
    e: np.ndarray
    residual: float
    normalizer: np.ndarray
    field_new_coords: IdentityField


def identity_for_metric(T: DerivativeTensor, g_upper, i0: int = 0, normalizer=None) -> MetricIdentity:
    """Identity field with e^k F_klm = g_lm, g_lm the inverse of ``g_upper``.

    Coordinates are changed so the metric becomes the identity, the minors
    route is applied there, and the field is pulled back.  ``normalizer``
    overrides the computed Chat; it must satisfy Chat g Chat^T = I.  The rank
    of the pivot matrix depends on this choice.
    """
    if normalizer is None:
        C_hat, _ = metric_normalizer(g_upper)
    else:
        C_hat = np.asarray(normalizer, dtype=complex)
        G = np.asarray(g_upper, dtype=complex)
        if np.linalg.norm(C_hat @ G @ C_hat.T - np.eye(T.dim)) > 1e-10:
            raise FactorizationFailure("supplied normalizer does not satisfy Chat g Chat^T = I")
    C = np.linalg.inv(C_hat)
    field_y = minor_identity_field(tensor_in_coords(T, C), i0)
    e = C @ field_y.e
    g_lower = np.linalg.inv(np.asarray(g_upper, dtype=complex))
    return MetricIdentity(e, identity_residual(T, e, g_lower), C_hat, field_y)


def verify_supplied_field(T: DerivativeTensor, e, g_upper=None) -> float:
    """Residual of e^k F_klm = g_lm for an externally supplied field."""
    g_lower = None if g_upper is None else np.linalg.inv(np.asarray(g_upper, dtype=complex))
    return identity_residual(T, np.asarray(e, dtype=complex), g_lower)
