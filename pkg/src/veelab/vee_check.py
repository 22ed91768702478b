"""Residuals of the vee-conditions and of the quadratic condition.

The eigenspace decomposition of M = sum c alpha alpha^T lives here too."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exact as ex
from .errors import NotEigenvector, SpanDeficient
from .exact import ExactScalar
from .geometry import (
    VectorConfig,
    collinear_classes,
    gram_operator,
    gram_operator_exact,
    inner,
    positive_normalize,
)
from .strings import DisjointSet, alpha_strings

TAU = 1e-8
TAU_CLUSTER = 1e-8


@dataclass
class VeeReport:
    """Normalized residuals per (alpha, string) or per plane, with a verdict."""

    max_residual: float
    table: dict
    tau: float
    hypothesis: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return self.max_residual < self.tau

    @property
    def status(self) -> str:
        if self.hypothesis.get("violated"):
            return "hypothesis violated"
        return "pass" if self.verdict else "fail"


def _c_hypothesis(cfg: VectorConfig) -> dict:
    """Smallest |C| over sub-collections of each collinear class."""
    if len(cfg) == 0:
        return {"c_delta_min": None, "violated": False}
    vals = [cls.c_min_over_subsets() for cls in collinear_classes(cfg)]
    low = min(vals)
    scale = max(1.0, max(abs(c) for c in cfg.mults))
    return {"c_delta_min": float(low), "violated": bool(low <= 1e-12 * scale)}


def _string_sum(cfg: VectorConfig, alpha_idx: int, members, pairing) -> np.ndarray:
    """sum_beta c_beta pairing(alpha, beta) alpha^beta.

    Since alpha^beta is linear in beta the sum equals alpha ^ (sum w_beta beta).
    In exact mode the geometric part is summed exactly per distinct
    multiplicity value so Weyl-symmetric cancellations give exact zero.
    """
    alpha = cfg.vectors[alpha_idx]
    n = cfg.dim
    total = np.zeros((n, n), dtype=complex)
    if cfg.exact:
        groups: dict[complex, list] = {}
        for b in members:
            groups.setdefault(cfg.mults[b], []).append(b)
        for c, idxs in groups.items():
            acc = [ExactScalar(0)] * n
            for b in idxs:
                w = pairing(alpha, cfg.vectors[b])
                acc = [x + w * y for x, y in zip(acc, cfg.vectors[b])]
            wedge = [[alpha[i] * acc[j] - alpha[j] * acc[i] for j in range(n)] for i in range(n)]
            if all(x.is_zero() for row in wedge for x in row):
                continue
            total += c * np.array([[complex(x) for x in row] for row in wedge])
        return total
    a = cfg.array[alpha_idx]
    acc = np.zeros(n, dtype=complex)
    for b in members:
        acc += cfg.mults[b] * pairing(a, cfg.array[b]) * cfg.array[b]
    return np.outer(a, acc) - np.outer(acc, a)


def _vee_report(cfg: VectorConfig, tau: float, pairing, pairing_scale) -> VeeReport:
    table = {}
    worst = 0.0
    norms2 = [float(np.linalg.norm(v) ** 2) for v in cfg.array]
    for i in range(len(cfg)):
        for st in alpha_strings(cfg, i):
            S = _string_sum(cfg, i, st.members, pairing)
            scale = 1.0 + sum(abs(cfg.mults[b]) * pairing_scale * norms2[i] * norms2[b] for b in st.members)
            res = float(np.linalg.norm(S)) / scale
            table[(i, st.members)] = res
            worst = max(worst, res)
    return VeeReport(worst, table, tau, _c_hypothesis(cfg))


def euclidean_vee_residual(cfg: VectorConfig, tau: float = TAU) -> VeeReport:
    """For each alpha and alpha-string: |sum c_beta (alpha,beta) alpha^beta|_F, normalized."""
    if cfg.exact:
        pairing = inner
    else:
        def pairing(a, b):
            return complex(np.dot(a, b))
    return _vee_report(cfg, tau, pairing, 1.0)


def trig_vee_residual(cfg: VectorConfig, tau: float = TAU) -> VeeReport:
    """Same as the Euclidean check but pairing through G(x,y) = x^T M y."""
    M_exact = gram_operator_exact(cfg)
    M = gram_operator(cfg)
    m_norm = float(np.linalg.norm(M, 2)) if len(cfg) else 0.0
    if M_exact is not None:
        n = cfg.dim

        def pairing(a, b):
            acc = ExactScalar(0)
            for i in range(n):
                if a[i].is_zero():
                    continue
                row = ExactScalar(0)
                for j in range(n):
                    if not b[j].is_zero():
                        row = row + M_exact[i, j] * b[j]
                acc = acc + a[i] * row
            return acc
    else:
        work = cfg if not cfg.exact else VectorConfig(cfg.dim, tuple(map(tuple, cfg.array)), cfg.mults, False)

        def pairing(a, b):
            return complex(np.asarray(a, dtype=complex) @ M @ np.asarray(b, dtype=complex))

        cfg = work
    return _vee_report(cfg, tau, pairing, max(m_norm, 1e-300))


# --------------------------------------------------------------------------
# quadratic condition


def condition2_tensor(cfg: VectorConfig) -> np.ndarray:
    """T_abij = sum_{alpha,beta} c_a c_b (alpha,beta) (alpha^beta)_ab (alpha^beta)_ij over A+."""
    pos = positive_normalize(cfg)
    n = cfg.dim
    if len(pos) == 0:
        return np.zeros((n, n, n, n), dtype=complex)
    A = pos.array
    c = pos.mult_array
    G = A @ A.T
    W = np.einsum("pa,qb->pqab", A, A)
    W = W - W.transpose(0, 1, 3, 2)
    weight = np.outer(c, c) * G
    return np.einsum("pq,pqab,pqij->abij", weight, W, W)


def condition2_residual(cfg: VectorConfig) -> float:
    """Largest absolute entry of the quadratic-condition tensor."""
    T = condition2_tensor(cfg)
    return float(np.max(np.abs(T))) if T.size else 0.0


def condition2_relative(cfg: VectorConfig) -> float:
    """condition2_residual divided by the summed magnitudes of its terms."""
    pos = positive_normalize(cfg)
    if len(pos) == 0:
        return 0.0
    A = pos.array
    c = np.abs(pos.mult_array)
    norms = np.linalg.norm(A, axis=1)
    scale = float(np.sum(np.outer(c, c) * np.abs(A @ A.T) * (2 * np.outer(norms, norms) ** 2) ** 2))
    return condition2_residual(cfg) / scale if scale > 0 else 0.0


# --------------------------------------------------------------------------
# M-operator decomposition


@dataclass
class Decomposition:
    eigenvalues: list[complex]
    assignment: list[int]
    bases: list[np.ndarray]
    eigen_residuals: list[float]
    well_distributed: list[bool]
    orthogonality_defect: float
    not_eigen: list[int] = field(default_factory=list)

    @property
    def components(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.eigenvalues]
        for idx, comp in enumerate(self.assignment):
            if comp >= 0:
                out[comp].append(idx)
        return out


def _numeric_rank(A: np.ndarray, rel: float = 1e-10) -> int:
    if A.size == 0:
        return 0
    sv = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(sv > rel * sv[0])) if sv[0] > 0 else 0


def _cluster(values: list[complex], tau: float) -> list[int]:
    """Single-linkage clustering; labels ordered by first appearance."""
    ds = DisjointSet(len(values))
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) < tau:
                ds.union(i, j)
    labels, out = {}, []
    for i in range(len(values)):
        out.append(labels.setdefault(ds.find(i), len(labels)))
    return out


def _exact_eigen(M_exact, vec) -> ExactScalar | None:
    n = len(vec)
    Mv = [sum((M_exact[i, j] * vec[j] for j in range(n)), ExactScalar(0)) for i in range(n)]
    p = next(i for i, x in enumerate(vec) if not x.is_zero())
    lam = Mv[p] / vec[p]
    if all(m == lam * v for m, v in zip(Mv, vec)):
        return lam
    return None


def eigen_components(M: np.ndarray, coords: np.ndarray, tau: float):
    """Rayleigh-quotient eigenvalues of the rows of ``coords`` under M with their residuals.

    M is normalized to unit spectral norm first; that norm is returned too.
    """
    norm = float(np.linalg.norm(M, 2))
    Mn = M / norm if norm > 0 else M
    lams, res = [], []
    for y in coords:
        My = Mn @ y
        lam = np.vdot(y, My) / np.vdot(y, y)
        lams.append(complex(lam))
        res.append(float(np.linalg.norm(My - lam * y) / np.linalg.norm(y)))
    return lams, res, norm


def m_decomposition(cfg: VectorConfig, tau_cluster: float = TAU_CLUSTER, diagnostic: bool = False) -> Decomposition:
    """Split V by the eigenvalues of M = sum c alpha alpha^T on the vectors of A."""
    arr = cfg.array
    if len(cfg) == 0 or _numeric_rank(arr) < cfg.dim or (cfg.exact and ex.rank([list(v) for v in cfg.vectors]) < cfg.dim):
        raise SpanDeficient("configuration vectors do not span the ambient space")
    M = gram_operator(cfg)
    lams, res, norm = eigen_components(M, arr, tau_cluster)
    M_exact = gram_operator_exact(cfg)
    if M_exact is not None:
        for k, vec in enumerate(cfg.vectors):
            lam = _exact_eigen(M_exact, vec)
            if lam is not None:
                res[k] = 0.0
                lams[k] = complex(lam) / norm if norm > 0 else 0j
            elif res[k] == 0.0:
                res[k] = float(np.finfo(float).eps)
    bad = [k for k, r in enumerate(res) if r > tau_cluster]
    if bad and not diagnostic:
        raise NotEigenvector(f"vectors {bad} are not eigenvectors of M (max residual {max(res):.3e})")
    good = [k for k in range(len(cfg)) if k not in bad]
    labels = _cluster([lams[k] for k in good], tau_cluster)
    n_comp = max(labels) + 1 if labels else 0
    assignment = [-1] * len(cfg)
    for k, lab in zip(good, labels):
        assignment[k] = lab
    eigenvalues, bases, well = [], [], []
    for comp in range(n_comp):
        idx = [k for k in good if assignment[k] == comp]
        eigenvalues.append(complex(np.mean([lams[k] for k in idx])) * norm)
        Q, R = np.linalg.qr(arr[idx].T)
        rk = _numeric_rank(arr[idx])
        Q = Q[:, :rk]
        bases.append(Q)
        Mi = (arr[idx].T * cfg.mult_array[idx]) @ arr[idx]
        MiQ = Mi @ Q
        mu = np.trace(Q.conj().T @ MiQ) / rk
        scale = max(float(np.linalg.norm(Mi, 2)), 1e-300)
        well.append(bool(np.linalg.norm(MiQ - mu * Q) / scale < tau_cluster))
    ortho = 0.0
    for i in good:
        for j in good:
            if assignment[i] < assignment[j]:
                d = abs(np.dot(arr[i], arr[j])) / (np.linalg.norm(arr[i]) * np.linalg.norm(arr[j]))
                ortho = max(ortho, float(d))
    return Decomposition(eigenvalues, assignment, bases, res, well, ortho, bad)


# --------------------------------------------------------------------------
# rational complex vee-systems: the two-plane test


def _plane_key(cfg: VectorConfig, i: int, j: int):
    if cfg.exact:
        red, _ = ex.rref([list(cfg.vectors[i]), list(cfg.vectors[j])])
        return tuple(tuple(row) for row in red)
    U = cfg.array[[i, j]].T
    P = U @ np.linalg.pinv(U)
    return tuple(np.round(P.ravel() / 1e-9).astype(np.int64).tolist())


def _in_plane(cfg: VectorConfig, i: int, j: int, k: int) -> bool:
    if cfg.exact:
        return ex.rank([list(cfg.vectors[i]), list(cfg.vectors[j]), list(cfg.vectors[k])]) == 2
    U = cfg.array[[i, j]].T
    b = cfg.array[k]
    proj = U @ np.linalg.lstsq(U, b, rcond=None)[0]
    return bool(np.linalg.norm(b - proj) <= 1e-10 * np.linalg.norm(b))


def _is_collinear_pair(cfg: VectorConfig, i: int, j: int) -> bool:
    if cfg.exact:
        return ex.rank([list(cfg.vectors[i]), list(cfg.vectors[j])]) < 2
    return _numeric_rank(cfg.array[[i, j]]) < 2


def rational_complex_vee_check(cfg: VectorConfig, tau: float = TAU) -> VeeReport:
    """Every 2-plane spanned by two vectors: reducible, or G_B proportional to (,) there.

    The form of the rescaled vectors sqrt(c) alpha equals sum c alpha alpha^T,
    so it is computed directly from the multiplicities.
    """
    table = {}
    worst = 0.0
    seen = set()
    isotropic = []
    for i in range(len(cfg)):
        for j in range(i + 1, len(cfg)):
            if _is_collinear_pair(cfg, i, j):
                continue
            key = _plane_key(cfg, i, j)
            if key in seen:
                continue
            seen.add(key)
            members = [k for k in range(len(cfg)) if k in (i, j) or _in_plane(cfg, i, j, k)]
            U = cfg.array[[i, j]].T
            g = U.T @ U
            if abs(np.linalg.det(g)) < 1e-12 * max(1.0, np.linalg.norm(g) ** 2):
                isotropic.append((i, j))
                continue
            B = cfg.array[members]
            c = cfg.mult_array[members]
            form = (U.T @ B.T * c) @ (B @ U)  # G_B in the plane basis
            coords = np.linalg.solve(g, U.T @ B.T).T  # beta = U @ coords
            op = np.linalg.solve(g, form)
            if _reducible(op, coords):
                table[(i, j)] = 0.0
                continue
            lam = np.vdot(g.ravel(), form.ravel()) / np.vdot(g.ravel(), g.ravel())
            scale = float(np.sum(np.abs(c) * np.linalg.norm(B, axis=1) ** 2)) + 1e-300
            res = float(np.linalg.norm(form - lam * g)) / scale
            table[(i, j)] = res
            worst = max(worst, res)
    rep = VeeReport(worst, table, tau)
    rep.hypothesis = {"isotropic_planes": isotropic, "violated": False}
    return rep


def _reducible(op: np.ndarray, coords: np.ndarray) -> bool:
    lams, res, _ = eigen_components(op, coords, TAU_CLUSTER)
    if max(res) > TAU_CLUSTER:
        return False
    return max(_cluster(lams, TAU_CLUSTER)) >= 1
