"""Decomposition of a configuration into maximal alpha-strings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IndexOutOfRange
from .geometry import VectorConfig, collinear_classes

TAU_INT = 1e-8


class DisjointSet:
    """Union-find with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


@dataclass(frozen=True)
class AlphaString:
    alpha: int
    members: tuple[int, ...]
    pairwise_ok: bool  # every pair relates directly, not only through the closure


def integer_multiple(diff, alpha, exact: bool, tau: float = TAU_INT, scale: float = 1.0) -> int | None:
    """Return m when diff == m*alpha for an integer m, else None."""
    if exact:
        if all(x.is_zero() for x in diff):
            return 0
        p = next(i for i, x in enumerate(alpha) if not x.is_zero())
        k = diff[p] / alpha[p]
        if not k.is_integer():
            return None
        if all(d == k * a for d, a in zip(diff, alpha)):
            return int(k.a)
        return None
    d = np.asarray(diff, dtype=complex)
    a = np.asarray(alpha, dtype=complex)
    cand = np.vdot(a, d) / np.vdot(a, a)
    m = round(cand.real)
    if abs(cand - m) >= tau:
        return None
    if np.linalg.norm(d - m * a) >= tau * scale:
        return None
    return int(m)


@lru_cache(maxsize=32)
def lattice_coords(cfg: VectorConfig) -> tuple[tuple[int, ...], ...]:
    """Exact vectors as integer tuples over the Q-basis (1, sqrt2, sqrt3, sqrt6).

    All vectors share one common denominator, so integer relations between
    them are preserved and can be tested with integer arithmetic.
    """
    dens = [f.denominator for v in cfg.vectors for x in v for f in x.coeffs]
    lcm = math.lcm(*dens) if dens else 1
    return tuple(
        tuple(int(f * lcm) for x in v for f in x.coeffs) for v in cfg.vectors
    )


def _int_multiple(diff: tuple[int, ...], alpha: tuple[int, ...]) -> int | None:
    p = next(i for i, x in enumerate(alpha) if x)
    if diff[p] % alpha[p]:
        return None
    m = diff[p] // alpha[p]
    if all(d == m * a for d, a in zip(diff, alpha)):
        return m
    return None


def related(g1, g2, alpha, exact: bool, tau: float = TAU_INT) -> bool:
    """True when g1 + g2 or g1 - g2 is an integer multiple of alpha.

    In exact mode the arguments are integer lattice tuples.
    """
    if exact:
        plus = tuple(x + y for x, y in zip(g1, g2))
        minus = tuple(x - y for x, y in zip(g1, g2))
        return _int_multiple(plus, alpha) is not None or _int_multiple(minus, alpha) is not None
    a = np.asarray(g1, dtype=complex)
    b = np.asarray(g2, dtype=complex)
    scale = 1.0 + np.linalg.norm(a) + np.linalg.norm(b)
    return (
        integer_multiple(a + b, alpha, False, tau, scale) is not None
        or integer_multiple(a - b, alpha, False, tau, scale) is not None
    )


@lru_cache(maxsize=32)
def _class_members(cfg: VectorConfig) -> dict[int, frozenset]:
    out = {}
    for cls in collinear_classes(cfg):
        for k in cls.members:
            out[k] = frozenset(cls.members)
    return out


def alpha_strings(cfg: VectorConfig, alpha_idx: int, tau: float = TAU_INT) -> list[AlphaString]:
    """Maximal alpha-strings partitioning the vectors not collinear with alpha."""
    if not 0 <= alpha_idx < len(cfg):
        raise IndexOutOfRange(f"alpha index {alpha_idx} outside 0..{len(cfg) - 1}")
    vecs = lattice_coords(cfg) if cfg.exact else cfg.vectors
    alpha = vecs[alpha_idx]
    excluded = _class_members(cfg)[alpha_idx]
    rest = [i for i in range(len(cfg)) if i not in excluded]
    ds = DisjointSet(len(rest))
    direct = set()
    for p in range(len(rest)):
        for q in range(p + 1, len(rest)):
            if related(vecs[rest[p]], vecs[rest[q]], alpha, cfg.exact, tau):
                ds.union(p, q)
                direct.add((p, q))
    groups: dict[int, list[int]] = {}
    for p in range(len(rest)):
        groups.setdefault(ds.find(p), []).append(p)
    out = []
    for members in groups.values():
        ok = all((p, q) in direct for i, p in enumerate(members) for q in members[i + 1:])
        out.append(AlphaString(alpha_idx, tuple(rest[p] for p in members), ok))
    out.sort(key=lambda s: s.members[0])
    return out
