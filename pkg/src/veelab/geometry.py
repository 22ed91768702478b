"""Vector configurations with multiplicities, and their basic geometry."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Integral
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, MixedScalarMode, ZeroVector
from .exact import ExactScalar

TAU_COL = 1e-10


def _is_exact_token(x) -> bool:
    return isinstance(x, (ExactScalar, Fraction))


def _is_neutral(x) -> bool:
    """Integers (and integral real floats) fit either scalar mode."""
    if isinstance(x, bool):
        return False
    if isinstance(x, Integral):
        return True
    if isinstance(x, (float, complex, np.floating, np.complexfloating)):
        z = complex(x)
        return z.imag == 0 and float(z.real).is_integer()
    return False


def _to_exact(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (Fraction, Integral)):
        return ExactScalar(Fraction(x))
    return ExactScalar(int(complex(x).real))


@dataclass(frozen=True, eq=True)
class VectorConfig:
    """Finite list of vectors in C^N with complex multiplicities.

    ``exact`` is True when every coordinate is an ExactScalar.
    """

    dim: int
    vectors: tuple[tuple, ...]
    mults: tuple[complex, ...]
    exact: bool = field(default=False)

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "numeric"

    @cached_property
    def array(self) -> np.ndarray:
        """Vectors as an (M, N) complex array."""
        if not self.vectors:
            return np.zeros((0, self.dim), dtype=complex)
        return np.array([[complex(v) for v in vec] for vec in self.vectors], dtype=complex)

    @cached_property
    def mult_array(self) -> np.ndarray:
        return np.array(self.mults, dtype=complex)

    def with_mults(self, mults: Sequence[complex]) -> VectorConfig:
        return build_config(self.dim, list(self.vectors), list(mults))


def build_config(dim: int, vectors, mults) -> VectorConfig:
    """Validate and freeze a configuration.

    Integers are accepted in either mode.  A mixture of ExactScalar/Fraction
    entries with non-integral floats raises MixedScalarMode.
    """
    if not isinstance(dim, Integral) or dim < 1:
        raise DimensionMismatch(f"ambient dimension must be a positive integer, got {dim!r}")
    vectors = [list(v) for v in vectors]
    mults = list(mults)
    if len(vectors) != len(mults):
        raise DimensionMismatch(f"{len(vectors)} vectors but {len(mults)} multiplicities")
    has_exact = has_float = False
    for i, v in enumerate(vectors):
        if len(v) != dim:
            raise DimensionMismatch(f"vector {i} has length {len(v)}, expected {dim}")
        for x in v:
            if _is_exact_token(x):
                has_exact = True
            elif not _is_neutral(x):
                if not isinstance(x, (float, complex, np.number)):
                    raise TypeError(f"unsupported component type {type(x).__name__}")
                has_float = True
    if has_exact and has_float:
        raise MixedScalarMode("configuration mixes exact and floating-point components")
    exact = not has_float
    out = []
    for i, v in enumerate(vectors):
        if exact:
            vec = tuple(_to_exact(x) for x in v)
            nonzero = any(not x.is_zero() for x in vec)
        else:
            vec = tuple(complex(x) for x in v)
            nonzero = any(x != 0 for x in vec)
        if not nonzero:
            raise ZeroVector(f"vector {i} is zero")
        out.append(vec)
    cm = tuple(complex(c) for c in mults)
    return VectorConfig(int(dim), tuple(out), cm, exact)


def to_numeric(cfg: VectorConfig) -> VectorConfig:
    if not cfg.exact:
        return cfg
    return VectorConfig(cfg.dim, tuple(tuple(complex(x) for x in v) for v in cfg.vectors), cfg.mults, False)


def transform_config(cfg: VectorConfig, matrix) -> VectorConfig:
    """Apply the linear map ``matrix`` to every vector (numeric result)."""
    mat = np.asarray(matrix, dtype=complex)
    if mat.shape[1] != cfg.dim:
        raise DimensionMismatch(f"matrix has {mat.shape[1]} columns, config dim is {cfg.dim}")
    arr = cfg.array @ mat.T
    return build_config(mat.shape[0], [tuple(row) for row in arr], cfg.mults)


def _both_exact(u, v) -> bool:
    return all(_is_exact_token(x) or _is_neutral(x) and isinstance(x, Integral) for x in (*u, *v)) and any(
        isinstance(x, ExactScalar) for x in (*u, *v)
    )


def inner(u, v):
    """Standard bilinear form sum_i u_i v_i (no complex conjugation)."""
    if len(u) != len(v):
        raise DimensionMismatch(f"lengths {len(u)} and {len(v)} differ")
    if _both_exact(u, v):
        acc = ExactScalar(0)
        for a, b in zip(u, v):
            acc = acc + _to_exact(a) * _to_exact(b)
        return acc
    return complex(np.dot(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)))


def wedge_matrix(alpha, beta) -> np.ndarray:
    """Antisymmetric matrix with entries alpha_i beta_j - alpha_j beta_i.

    Exact operands give an object array of ExactScalar entries.
    """
    if len(alpha) != len(beta):
        raise DimensionMismatch(f"lengths {len(alpha)} and {len(beta)} differ")
    if _both_exact(alpha, beta):
        a = [_to_exact(x) for x in alpha]
        b = [_to_exact(x) for x in beta]
        n = len(a)
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                out[i, j] = a[i] * b[j] - a[j] * b[i]
        return out
    a = np.asarray(alpha, dtype=complex)
    b = np.asarray(beta, dtype=complex)
    return np.outer(a, b) - np.outer(b, a)


# --------------------------------------------------------------------------
# collinearity


@dataclass(frozen=True)
class CollinearClass:
    """Indices of mutually collinear vectors, with ratios to the representative."""

    representative: int
    members: tuple[int, ...]
    ratios: tuple  # member = ratio * representative
    c_value: complex
    mults: tuple[complex, ...] = ()

    def c_min_over_subsets(self, limit: int = 12) -> float:
        """Smallest |sum c k^2| over nonempty sub-collections of the class."""
        terms = [c * complex(k) ** 2 for c, k in zip(self.mults, self.ratios)]
        if len(terms) > limit:
            return abs(sum(terms))
        best = float("inf")
        for size in range(1, len(terms) + 1):
            for sub in itertools.combinations(terms, size):
                best = min(best, abs(sum(sub)))
        return best


def collinear_ratio(alpha, gamma, exact: bool, tau: float = TAU_COL):
    """Return k with gamma = k*alpha, or None when not collinear."""
    if exact:
        p = next(i for i, x in enumerate(alpha) if not x.is_zero())
        k = gamma[p] / alpha[p]
        if all(g == k * a for a, g in zip(alpha, gamma)):
            return k
        return None
    a = np.asarray(alpha, dtype=complex)
    g = np.asarray(gamma, dtype=complex)
    k = np.vdot(a, g) / np.vdot(a, a)
    if np.linalg.norm(g - k * a) <= tau * max(np.linalg.norm(g), np.linalg.norm(a) * abs(k)):
        return complex(k)
    return None


def collinear_classes(cfg: VectorConfig, tau: float = TAU_COL) -> list[CollinearClass]:
    """Partition indices into maximal collinear classes (smallest index represents)."""
    assigned = [False] * len(cfg)
    classes = []
    for i, alpha in enumerate(cfg.vectors):
        if assigned[i]:
            continue
        members, ratios = [], []
        for j in range(i, len(cfg)):
            if assigned[j]:
                continue
            k = collinear_ratio(alpha, cfg.vectors[j], cfg.exact, tau)
            if k is not None:
                members.append(j)
                ratios.append(k)
                assigned[j] = True
        mults = tuple(cfg.mults[j] for j in members)
        cval = sum(c * complex(k) ** 2 for c, k in zip(mults, ratios))
        classes.append(CollinearClass(i, tuple(members), tuple(ratios), complex(cval), mults))
    return classes


def class_of(cfg: VectorConfig, idx: int, tau: float = TAU_COL) -> CollinearClass:
    for cls in collinear_classes(cfg, tau):
        if idx in cls.members:
            return cls
    raise IndexError(idx)


# --------------------------------------------------------------------------
# positive systems


def _leading_sign(vec, exact: bool) -> int:
    if exact:
        for x in vec:
            s = x.sign()
            if s:
                return s
        return 0
    scale = max(abs(x) for x in vec)
    for x in vec:
        if abs(x) > 1e-12 * scale:
            # deterministic tie-break for complex entries: real part, then imaginary
            if abs(x.real) > 1e-12 * scale:
                return 1 if x.real > 0 else -1
            return 1 if x.imag > 0 else -1
    return 0


def _same_vector(u, v, exact: bool, tau: float = TAU_COL) -> bool:
    if exact:
        return u == v
    a = np.asarray(u, dtype=complex)
    b = np.asarray(v, dtype=complex)
    return bool(np.linalg.norm(a - b) <= tau * max(np.linalg.norm(a), np.linalg.norm(b)))


def positive_normalize(cfg: VectorConfig, drop_zero: bool = True) -> VectorConfig:
    """Flip vectors into the lexicographic half-space and merge duplicates.

    Merged vectors whose total multiplicity is exactly zero are removed
    unless ``drop_zero`` is False.
    """
    vecs: list[tuple] = []
    mults: list[complex] = []
    index: dict = {}
    for vec, c in zip(cfg.vectors, cfg.mults):
        if _leading_sign(vec, cfg.exact) < 0:
            vec = tuple(-x for x in vec)
        if cfg.exact:
            pos = index.get(vec)
        else:
            pos = next((k for k, w in enumerate(vecs) if _same_vector(vec, w, False)), None)
        if pos is None:
            index[vec] = len(vecs)
            vecs.append(vec)
            mults.append(c)
        else:
            mults[pos] += c
    keep = [k for k, c in enumerate(mults) if not (drop_zero and c == 0)]
    return VectorConfig(cfg.dim, tuple(vecs[k] for k in keep), tuple(mults[k] for k in keep), cfg.exact)


def gram_operator(cfg: VectorConfig) -> np.ndarray:
    """M = sum_alpha c_alpha alpha alpha^T as a complex array."""
    arr = cfg.array
    return (arr.T * cfg.mult_array) @ arr


def gram_operator_exact(cfg: VectorConfig) -> np.ndarray | None:
    """Exact M when the config is exact and every multiplicity is real.

    Real doubles are converted to the rational they represent exactly, so no
    rounding enters.  Returns None otherwise.
    """
    if not cfg.exact or any(c.imag != 0 for c in cfg.mults):
        return None
    n = cfg.dim
    out = np.empty((n, n), dtype=object)
    out[...] = ExactScalar(0)
    for vec, c in zip(cfg.vectors, cfg.mults):
        cc = ExactScalar(Fraction(c.real))
        for i in range(n):
            if vec[i].is_zero():
                continue
            ci = cc * vec[i]
            for j in range(n):
                out[i, j] = out[i, j] + ci * vec[j]
    return out
