"""Exact arithmetic in the biquadratic field Q(sqrt2, sqrt3).

Every coordinate that appears in the catalog configurations (F4, G2, the
BC family with square-free-friendly m_i, and the F4 projections) lives in
this field, so collinearity and integer-relation tests can be decided
without tolerances.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

import mpmath

_RADICALS = (1, 2, 3, 6)
# sqrt(p) * sqrt(q) = factor * sqrt(slot radical)
_MUL_TABLE = (
    ((0, 1), (1, 1), (2, 1), (3, 1)),
    ((1, 1), (0, 2), (3, 1), (2, 2)),
    ((2, 1), (3, 1), (0, 3), (1, 3)),
    ((3, 1), (2, 2), (1, 3), (0, 6)),
)
_MP_DPS = 50


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not x.is_integer():
            raise TypeError(f"refusing to convert non-integral float {x!r} to an exact scalar")
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def _sign_q(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sign_sqrt2(p: Fraction, q: Fraction) -> int:
    """Sign of p + q*sqrt2 for rational p, q."""
    sp, sq = _sign_q(p), _sign_q(q)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq if sp == 0 else sp
    return sp * _sign_q(p * p - 2 * q * q)


class ExactScalar:
    """The number a + b*sqrt2 + c*sqrt3 + d*sqrt6 with rational a, b, c, d."""

    __slots__ = ("a", "b", "c", "d", "_hash")

    def __init__(self, a=0, b=0, c=0, d=0):
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))
        object.__setattr__(self, "c", _frac(c))
        object.__setattr__(self, "d", _frac(d))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    # construction helpers -------------------------------------------------
    @classmethod
    def coerce(cls, x) -> ExactScalar:
        if isinstance(x, ExactScalar):
            return x
        return cls(_frac(x))

    @classmethod
    def sqrt_of(cls, n: int) -> ExactScalar:
        """sqrt(n) for n in {0, 1, 2, 3, 6} times perfect squares."""
        root = sqrt_exact(cls(n))
        if root is None:
            raise ValueError(f"sqrt({n}) is not in Q(sqrt2, sqrt3)")
        return root

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    # predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def is_integer(self) -> bool:
        return self.is_rational() and self.a.denominator == 1

    def sign(self) -> int:
        """Exact sign of the real number represented."""
        sp = _sign_sqrt2(self.a, self.b)
        sq = _sign_sqrt2(self.c, self.d)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq if sp == 0 else sp
        # compare P^2 with 3 Q^2, both in Q(sqrt2)
        a, b, c, d = self.coeffs
        diff = _sign_sqrt2(a * a + 2 * b * b - 3 * c * c - 6 * d * d, 2 * a * b - 6 * c * d)
        return sp * diff

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return ExactScalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.a, -self.b, -self.c, -self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return ExactScalar(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        if o.is_rational():
            k = o.a
            return ExactScalar(self.a * k, self.b * k, self.c * k, self.d * k) if k else ZERO
        if self.is_rational():
            k = self.a
            return ExactScalar(o.a * k, o.b * k, o.c * k, o.d * k) if k else ZERO
        out = [Fraction(0)] * 4
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for j, y in enumerate(o.coeffs):
                if not y:
                    continue
                slot, factor = _MUL_TABLE[i][j]
                out[slot] += factor * x * y
        return ExactScalar(*out)

    __rmul__ = __mul__

    def conj2(self) -> ExactScalar:
        """Image under sqrt2 -> -sqrt2."""
        return ExactScalar(self.a, -self.b, self.c, -self.d)

    def conj3(self) -> ExactScalar:
        """Image under sqrt3 -> -sqrt3."""
        return ExactScalar(self.a, self.b, -self.c, -self.d)

    def norm(self) -> Fraction:
        """Field norm down to Q (product of the four conjugates)."""
        y = self * self.conj2()
        return (y * y.conj3()).a

    def inverse(self) -> ExactScalar:
        if self.is_zero():
            raise ZeroDivisionError("inverse of exact zero")
        if self.is_rational():
            return ExactScalar(1 / self.a)
        y = self * self.conj2()
        n = (y * y.conj3()).a
        return self.conj2() * y.conj3() * ExactScalar(1 / n)

    def __truediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ExactScalar(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison / hashing --------------------------------------------------
    def __eq__(self, other):
        o = _maybe(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) == other
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.a) if self.is_rational() else hash(("ExactScalar",) + self.coeffs)
            object.__setattr__(self, "_hash", h)
        return h

    def __lt__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __bool__(self):
        return not self.is_zero()

    # conversion ------------------------------------------------------------
    def to_mpf(self) -> mpmath.mpf:
        with mpmath.workdps(_MP_DPS):
            return (
                mpmath.mpf(self.a.numerator) / self.a.denominator
                + mpmath.mpf(self.b.numerator) / self.b.denominator * mpmath.sqrt(2)
                + mpmath.mpf(self.c.numerator) / self.c.denominator * mpmath.sqrt(3)
                + mpmath.mpf(self.d.numerator) / self.d.denominator * mpmath.sqrt(6)
            )

    def __float__(self) -> float:
        if self.is_rational():
            return float(self.a)
        return float(self.to_mpf())

    def __complex__(self) -> complex:
        return complex(float(self))

    def __repr__(self) -> str:
        return f"ExactScalar({self})"

    def __str__(self) -> str:
        parts = []
        for coef, rad in zip(self.coeffs, _RADICALS):
            if not coef:
                continue
            if rad == 1:
                parts.append(str(coef))
            else:
                if coef == 1:
                    parts.append(f"sqrt{rad}")
                elif coef == -1:
                    parts.append(f"-sqrt{rad}")
                else:
                    parts.append(f"{coef}*sqrt{rad}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


def _maybe(x) -> ExactScalar | None:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return ExactScalar(x)
    return None


ZERO = ExactScalar(0)
ONE = ExactScalar(1)


def is_exact_like(x) -> bool:
    return isinstance(x, (ExactScalar, Fraction)) or (isinstance(x, int) and not isinstance(x, bool))


# --------------------------------------------------------------------------
# square roots


def _conjugate_values(x: ExactScalar) -> dict[tuple[int, int], mpmath.mpf]:
    out = {}
    with mpmath.workdps(_MP_DPS):
        r2, r3, r6 = mpmath.sqrt(2), mpmath.sqrt(3), mpmath.sqrt(6)
        a, b, c, d = (mpmath.mpf(v.numerator) / v.denominator for v in x.coeffs)
        for s2 in (1, -1):
            for s3 in (1, -1):
                out[(s2, s3)] = a + s2 * b * r2 + s3 * c * r3 + s2 * s3 * d * r6
    return out


def _mp_to_fraction(v: mpmath.mpf, max_den: int) -> Fraction:
    return Fraction(mpmath.nstr(v, 45, min_fixed=-50, max_fixed=50)).limit_denominator(max_den)


def sqrt_exact(x, max_den: int = 10**9) -> ExactScalar | None:
    """Nonnegative square root of ``x`` inside Q(sqrt2, sqrt3), or None.

    The root's four Galois conjugates are square roots of the conjugates of
    ``x``; recovering the coordinates from them is a 4x4 linear solve.  Every
    candidate is verified exactly, so a returned value is never approximate.
    """
    x = ExactScalar.coerce(x)
    if x.is_zero():
        return ZERO
    if x.sign() < 0:
        return None
    conj = _conjugate_values(x)
    if any(v < 0 for v in conj.values()):
        return None
    with mpmath.workdps(_MP_DPS):
        roots = {k: mpmath.sqrt(v) for k, v in conj.items()}
        r2, r3, r6 = mpmath.sqrt(2), mpmath.sqrt(3), mpmath.sqrt(6)
        others = [(1, -1), (-1, 1), (-1, -1)]
        for signs in range(8):
            eps = {(1, 1): 1}
            for bit, key in enumerate(others):
                eps[key] = -1 if (signs >> bit) & 1 else 1
            y = {k: eps[k] * roots[k] for k in roots}
            a = sum(y.values()) / 4
            b = sum(k[0] * v for k, v in y.items()) / (4 * r2)
            c = sum(k[1] * v for k, v in y.items()) / (4 * r3)
            d = sum(k[0] * k[1] * v for k, v in y.items()) / (4 * r6)
            cand = ExactScalar(*(_mp_to_fraction(t, max_den) for t in (a, b, c, d)))
            if cand * cand == x:
                return cand if cand.sign() >= 0 else -cand
    return None


# --------------------------------------------------------------------------
# parsing

_TERM = re.compile(
    r"""^(?:
        (?P<num>\d+)(?:/(?P<den>\d+))?       # leading rational
        (?:\*?(?P<rad1>sqrt[236]))?          # optional radical
        (?:/(?P<den2>\d+))?
      |
        (?P<rad2>sqrt[236])(?:/(?P<den3>\d+))?
    )$""",
    re.VERBOSE,
)


def parse_exact(text: str) -> ExactScalar:
    """Parse tokens like ``"1/2+sqrt3/2"``, ``"-3*sqrt2/4"``, ``"2"``.

    Raises ValueError when the text is not in the exact grammar.
    """
    s = "".join(text.split())
    if not s:
        raise ValueError("empty exact token")
    terms = re.findall(r"[+-]?[^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"malformed exact token {text!r}")
    acc = [Fraction(0)] * 4
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        body = term.lstrip("+-")
        m = _TERM.match(body)
        if not m:
            raise ValueError(f"malformed exact term {term!r} in {text!r}")
        if m.group("num") is not None:
            coef = Fraction(int(m.group("num")), int(m.group("den") or 1))
            if m.group("den2"):
                coef /= int(m.group("den2"))
            rad = m.group("rad1")
        else:
            coef = Fraction(1, int(m.group("den3") or 1))
            rad = m.group("rad2")
        slot = 0 if rad is None else _RADICALS.index(int(rad[4:]))
        acc[slot] += sign * coef
    return ExactScalar(*acc)


# --------------------------------------------------------------------------
# linear algebra over the field


def rref(rows: list[list[ExactScalar]]) -> tuple[list[list[ExactScalar]], list[int]]:
    """Reduced row-echelon form and pivot columns."""
    m = [list(map(ExactScalar.coerce, r)) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if not m[i][col].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][col].is_zero():
                f = m[i][col]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols: int) -> list[list[ExactScalar]]:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    if not rows:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis
