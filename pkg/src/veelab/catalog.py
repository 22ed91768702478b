"""Named configurations and their known multiplicity relations.

The registry also holds one polynomial prepotential with a constant
off-diagonal metric."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import BadCaseParameters, BadParameter, MissingParameter, UnknownName
from .exact import ExactScalar, sqrt_exact
from .geometry import VectorConfig, build_config
from .prepotential import DerivativeTensor

E = ExactScalar
ZERO, ONE = E(0), E(1)
HALF = E(Fraction(1, 2))
SQRT2 = E(0, 1)
SQRT3 = E(0, 0, 1)

RELATION_TOL = 1e-12


@dataclass(frozen=True)
class Relation:
    """A parameter substitution under which commutativity holds."""

    label: str
    solve: Callable[[dict], dict]

    def apply(self, params: dict) -> dict:
        out = dict(params)
        out.update(self.solve(params))
        return out


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dim: str
    params: tuple[tuple[str, str], ...]
    relations: tuple[Relation, ...]
    builder: Callable[[dict], object]
    description: str = ""
    is_config: bool = True

    @property
    def relation_labels(self) -> list[str]:
        return [r.label for r in self.relations]

    def summary(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "params": {k: doc for k, doc in self.params},
            "relations": self.relation_labels,
            "description": self.description,
        }


def _need(params: dict, *keys):
    out = []
    for k in keys:
        if k not in params or params[k] is None:
            raise MissingParameter(f"missing parameter {k!r}")
        out.append(params[k])
    return out


def _num(x, key: str) -> complex:
    try:
        return complex(x)
    except (TypeError, ValueError):
        raise BadParameter(f"parameter {key!r} must be a number, got {x!r}") from None


def _vec(*xs) -> tuple:
    return tuple(E.coerce(x) if not isinstance(x, ExactScalar) else x for x in xs)


def _unit(n: int, i: int, scale=ONE) -> list:
    v = [ZERO] * n
    v[i] = scale
    return v


# --------------------------------------------------------------------------
# builders


def _bc_m(params: dict) -> tuple:
    m = params.get("m")
    if m is None:
        if "n" not in params:
            raise MissingParameter("BCn needs 'm' (tuple of m_i) or 'n'")
        n = int(params["n"])
        if n < 1:
            raise BadParameter("n must be at least 1")
        m = (1,) * n
    if isinstance(m, (int, float, complex, Fraction)):
        m = (m,)
    m = tuple(m)
    if not m:
        raise BadParameter("m must be nonempty")
    if any(complex(mi) == 0 for mi in m):
        raise BadParameter("every m_i must be nonzero")
    return m


def _inv_sqrt(mi):
    """Exact m^(-1/2) when available, else None."""
    z = complex(mi)
    if z.imag != 0 or z.real <= 0:
        return None
    try:
        fr = Fraction(mi) if not isinstance(mi, float) else Fraction(mi).limit_denominator(10**6)
    except (TypeError, ValueError):
        return None
    if float(fr) != z.real:
        return None
    return sqrt_exact(E(1 / fr))


def build_bcn(params: dict) -> VectorConfig:
    q, r, s = (_num(v, k) for v, k in zip(_need(params, "q", "r", "s"), "qrs"))
    m = _bc_m(params)
    n = len(m)
    scales = [_inv_sqrt(mi) for mi in m]
    exact = all(sc is not None for sc in scales)
    if not exact:
        scales = [complex(mi) ** -0.5 for mi in m]
        zero, two = 0j, 2
    else:
        zero, two = ZERO, E(2)
    mc = [complex(mi) for mi in m]

    def unit(i, scale):
        v = [zero] * n
        v[i] = scale
        return v

    vecs, mults = [], []
    for i in range(n):
        vecs.append(unit(i, scales[i]))
        mults.append(r * mc[i])
    for i in range(n):
        vecs.append(unit(i, two * scales[i]))
        mults.append(s * mc[i] + 0.5 * q * mc[i] * (mc[i] - 1))
    for i, j in itertools.combinations(range(n), 2):
        for sign in (1, -1):
            v = [zero] * n
            v[i] = scales[i]
            v[j] = scales[j] if sign > 0 else -scales[j]
            vecs.append(v)
            mults.append(q * mc[i] * mc[j])
    return build_config(n, vecs, mults)


def build_bc1(params: dict) -> VectorConfig:
    r, s = (_num(v, k) for v, k in zip(_need(params, "r", "s"), "rs"))
    return build_config(1, [[ONE], [E(2)]], [r, s])


def build_f4(params: dict) -> VectorConfig:
    r, q = (_num(v, k) for v, k in zip(_need(params, "r", "q"), "rq"))
    vecs, mults = [], []
    for i in range(4):
        vecs.append(_unit(4, i))
        mults.append(r)
    for i, j in itertools.combinations(range(4), 2):
        for sign in (1, -1):
            v = _unit(4, i)
            v[j] = E(sign)
            vecs.append(v)
            mults.append(q)
    for signs in itertools.product((1, -1), repeat=3):
        vecs.append([HALF] + [HALF * sg for sg in signs])
        mults.append(r)
    return build_config(4, vecs, mults)


def build_g2(params: dict) -> VectorConfig:
    p, q = (_num(v, k) for v, k in zip(_need(params, "p", "q"), "pq"))
    half_s3 = HALF * SQRT3
    vecs = [
        [ZERO, ONE],
        [half_s3, HALF],
        [half_s3, -HALF],
        [SQRT3, ZERO],
        [half_s3, E(Fraction(3, 2))],
        [half_s3, E(Fraction(-3, 2))],
    ]
    return build_config(2, vecs, [p, p, p, q, q, q])


def build_f4_a1_1(params: dict) -> VectorConfig:
    r, q = (_num(v, k) for v, k in zip(_need(params, "r", "q"), "rq"))
    vecs, mults = [], []
    for i in range(3):
        vecs.append(_unit(3, i))
        mults.append(r + 2 * q)
    for i, j in itertools.combinations(range(3), 2):
        for sign in (1, -1):
            v = _unit(3, i)
            v[j] = E(sign)
            vecs.append(v)
            mults.append(q)
    for s2, s3 in itertools.product((1, -1), repeat=2):
        vecs.append([HALF, HALF * s2, HALF * s3])
        mults.append(2 * r)
    return build_config(3, vecs, mults)


def build_f4_a1_2(params: dict) -> VectorConfig:
    r, q = (_num(v, k) for v, k in zip(_need(params, "r", "q"), "rq"))
    h2 = HALF * SQRT2
    vecs = [
        ([ONE, ZERO, ZERO], r),
        ([ZERO, ONE, ZERO], r),
        ([ZERO, ZERO, SQRT2], q),
        ([ZERO, ZERO, h2], 2 * r),
        ([ONE, ONE, ZERO], q),
        ([ONE, -ONE, ZERO], q),
        ([HALF, HALF, ZERO], 2 * r),
        ([HALF, -HALF, ZERO], 2 * r),
        ([ONE, ZERO, h2], 2 * q),
        ([ONE, ZERO, -h2], 2 * q),
        ([ZERO, ONE, h2], 2 * q),
        ([ZERO, ONE, -h2], 2 * q),
    ]
    for s2, s3 in itertools.product((1, -1), repeat=2):
        vecs.append(([HALF, HALF * s2, h2 * s3], r))
    return build_config(3, [v for v, _ in vecs], [c for _, c in vecs])


def build_f4_a2_1(params: dict) -> VectorConfig:
    r, q = (_num(v, k) for v, k in zip(_need(params, "r", "q"), "rq"))
    inv_s3 = SQRT3 / 3
    vecs = [
        ([ONE, ZERO], r),
        ([ZERO, inv_s3], 3 * r),
        ([ZERO, 2 * inv_s3], 3 * q),
        ([ONE, inv_s3], 3 * q),
        ([ONE, -inv_s3], 3 * q),
        ([HALF, HALF * inv_s3], 3 * r),
        ([HALF, -HALF * inv_s3], 3 * r),
        ([HALF, HALF * SQRT3], r),
        ([HALF, -HALF * SQRT3], r),
    ]
    return build_config(2, [v for v, _ in vecs], [c for _, c in vecs])


def build_f4_a1sq(params: dict) -> VectorConfig:
    r, q = (_num(v, k) for v, k in zip(_need(params, "r", "q"), "rq"))
    h2 = HALF * SQRT2
    vecs = [
        ([ONE, ZERO], r + 2 * q),
        ([ZERO, SQRT2], q),
        ([HALF, ZERO], 4 * r),
        ([ZERO, h2], 2 * (r + 2 * q)),
        ([ONE, h2], 2 * q),
        ([ONE, -h2], 2 * q),
        ([HALF, h2], 2 * r),
        ([HALF, -h2], 2 * r),
    ]
    return build_config(2, [v for v, _ in vecs], [c for _, c in vecs])


@dataclass(frozen=True)
class PolynomialPrepotential:
    """F(t1, t2) = t1^2 t2 / 2 + a * t2^k with the constant metric [[0,1],[1,0]]."""

    k: int = 4
    a: complex = 1.0
    dim: int = 2
    metric: np.ndarray = field(default_factory=lambda: np.array([[0, 1], [1, 0]], dtype=complex))

    def f_third(self, t2) -> complex:
        k = self.k
        coeff = k * (k - 1) * (k - 2)
        if coeff == 0:
            return 0j
        return complex(self.a * coeff * complex(t2) ** (k - 3))

    def tensor(self, x) -> DerivativeTensor:
        x = np.asarray(x, dtype=complex)
        F = np.zeros((2, 2, 2), dtype=complex)
        F[0, 0, 1] = F[0, 1, 0] = F[1, 0, 0] = 1.0
        F[1, 1, 1] = self.f_third(x[1])
        return DerivativeTensor(2, F, x)


def build_poly2d(params: dict) -> PolynomialPrepotential:
    k = params.get("k", 4)
    a = params.get("a", 1.0)
    kc = complex(k)
    if kc.imag != 0 or not float(kc.real).is_integer() or kc.real < 0:
        raise BadParameter("k must be a nonnegative integer")
    return PolynomialPrepotential(int(kc.real), complex(a))


# --------------------------------------------------------------------------
# registry


def _rel(label: str, key: str, fn) -> Relation:
    return Relation(label, lambda p: {key: fn(p)})


_F4_RELATIONS = (
    _rel("r=-2q", "r", lambda p: -2 * complex(p["q"])),
    _rel("r=-4q", "r", lambda p: -4 * complex(p["q"])),
)
_G2_RELATIONS = (
    _rel("p=-3q", "p", lambda p: -3 * complex(p["q"])),
    _rel("p=-9q", "p", lambda p: -9 * complex(p["q"])),
)
_BC_RELATION = (
    _rel(
        "r = -8s - 2q(N-2), N = sum of m_i",
        "r",
        lambda p: -8 * complex(p["s"]) - 2 * complex(p["q"]) * (sum(complex(x) for x in _bc_m(p)) - 2),
    ),
)
_RQ = (("r", "short-vector multiplicity"), ("q", "long-vector multiplicity"))

_ENTRIES = (
    CatalogEntry(
        "BCn",
        "n = len(m)",
        (("q", "mixed-vector weight"), ("r", "weight of m_i^(-1/2) e_i"), ("s", "weight of 2 m_i^(-1/2) e_i"),
         ("m", "tuple (m_1,...,m_n) of nonzero numbers; or give n for all ones")),
        _BC_RELATION,
        build_bcn,
        "deformed BC_n family; m = (1,...,1) is the positive half of BC_n",
    ),
    CatalogEntry("BC1", "1", (("r", "weight of e1"), ("s", "weight of 2e1")), (), build_bc1, "positive half of BC_1"),
    CatalogEntry("F4+", "4", _RQ, _F4_RELATIONS, build_f4, "positive half of F4 (24 vectors)"),
    CatalogEntry("G2+", "2", (("p", "short-root multiplicity"), ("q", "long-root multiplicity")), _G2_RELATIONS,
                 build_g2, "positive half of G2 (6 vectors)"),
    CatalogEntry("F4_A1_1", "3", _RQ, _F4_RELATIONS, build_f4_a1_1, "F4 projected along the A1 of a short root"),
    CatalogEntry("F4_A1_2", "3", _RQ, _F4_RELATIONS, build_f4_a1_2, "F4 projected along the A1 of a long root"),
    CatalogEntry("F4_A2_1", "2", _RQ, _F4_RELATIONS, build_f4_a2_1, "F4 projected along a long-root A2"),
    CatalogEntry("F4_A1sq", "2", _RQ, _F4_RELATIONS, build_f4_a1sq, "F4 projected along A1 x A1"),
    CatalogEntry("poly2d", "2", (("k", "exponent of t2 (default 4)"), ("a", "coefficient (default 1)")), (),
                 build_poly2d, "F = t1^2 t2 / 2 + a t2^k with metric [[0,1],[1,0]]", is_config=False),
)
CATALOG = {e.name: e for e in _ENTRIES}
F4_FAMILY = ("F4+", "F4_A1_1", "F4_A1_2", "F4_A2_1", "F4_A1sq")


def list_catalog() -> list[CatalogEntry]:
    return list(_ENTRIES)


def get_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownName(f"unknown catalog name {name!r}; valid names: {', '.join(CATALOG)}") from None


def build_named(name: str, params: dict | None = None, **kw):
    params = dict(params or {}, **kw)
    return get_entry(name).builder(params)


# --------------------------------------------------------------------------
# closed-form identity field cases


@dataclass(frozen=True)
class ClosedFormCase:
    """Data for e = c0 H^-1 sum_alpha cbar_alpha sin(2(alpha,x)) alpha."""

    tag: int
    config: VectorConfig
    reduced: tuple[complex, ...]
    c0: complex
    H0: complex
    params: dict = field(default_factory=dict)
    name: str = ""


def _close(a: complex, b: complex) -> bool:
    return abs(a - b) <= RELATION_TOL * max(1.0, abs(a), abs(b))


def closed_form_case(name: str, params: dict | None = None, **kw) -> ClosedFormCase:
    """Select the closed-form case matching ``name`` and its parameters."""
    params = dict(params or {}, **kw)
    entry = get_entry(name)
    if not entry.is_config:
        raise BadCaseParameters(f"{name} has no closed-form identity field")
    cfg = entry.builder(params)

    if name in F4_FAMILY:
        r, q = complex(params["r"]), complex(params["q"])
        if q == 0:
            raise BadCaseParameters("cases for the F4 family need q != 0")
        if _close(r, -2 * q):
            return ClosedFormCase(1, cfg, cfg.mults, -1 / (4 * q), 0j, params, name)
        if _close(r, -4 * q):
            red = entry.builder({**params, "q": 0})
            return ClosedFormCase(2, cfg, red.mults, 1 / (4 * q), 36 * q, params, name)
        raise BadCaseParameters(f"{name} needs r=-2q or r=-4q, got r={r}, q={q}")

    if name == "G2+":
        p, q = complex(params["p"]), complex(params["q"])
        if q == 0:
            raise BadCaseParameters("G2 cases need q != 0")
        if _close(p, -3 * q):
            return ClosedFormCase(3, cfg, cfg.mults, -1 / (9 * q), 0j, params, name)
        if _close(p, -9 * q):
            red = entry.builder({**params, "q": 0})
            return ClosedFormCase(4, cfg, red.mults, 1 / (9 * q), 27 * q, params, name)
        raise BadCaseParameters(f"G2+ needs p=-3q or p=-9q, got p={p}, q={q}")

    if name == "BC1" or (name == "BCn" and len(_bc_m(params)) == 1):
        if name == "BCn" and complex(_bc_m(params)[0]) != 1:
            raise BadCaseParameters("the one-dimensional case needs m = (1,)")
        r, s = complex(params["r"]), complex(params["s"])
        if r + 8 * s == 0 or r == 0:
            raise BadCaseParameters("the BC1 case needs r != 0 and r + 8s != 0")
        c0 = -1 / (2 * (r + 8 * s))
        H0 = -r * (r + 4 * s) / (r + 8 * s)
        return ClosedFormCase(6, cfg, (r, 0j), c0, H0, params, name)

    if name == "BCn":
        q, r, s = complex(params["q"]), complex(params["r"]), complex(params["s"])
        total = sum(complex(x) for x in _bc_m(params))
        if q == 0:
            raise BadCaseParameters("the BC_n case needs q != 0")
        if not _close(r, -8 * s - 2 * q * (total - 2)):
            raise BadCaseParameters(f"BCn needs r = -8s - 2q(N-2) = {-8 * s - 2 * q * (total - 2)}, got r={r}")
        red = build_bcn({**params, "q": 0, "s": 0})
        return ClosedFormCase(5, cfg, red.mults, -1 / (4 * q), r * (2 * s - q) / q, params, name)

    raise BadCaseParameters(f"{name} has no closed-form identity field")
