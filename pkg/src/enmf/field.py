"""Scalars for exact and floating computation.

Exact values live in the real quadratic field Q(sqrt(d)); a value is stored
as ``(p + q*sqrt(d)) / den`` with integer ``p, q`` and positive ``den`` in
lowest terms.  Every other module talks to scalars through a backend object
(:class:`ExactField` or :class:`FloatField`) so the same algorithms run in
both modes.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "QuadraticScalar",
    "ExactField",
    "FloatField",
    "FieldError",
    "parse_scalar",
    "format_scalar",
    "approx",
    "round_pow2",
    "pow2_exponent",
    "make_field",
    "bit_size",
]

DEFAULT_RADICAND = 5
DEFAULT_TOLERANCE = 1e-9


class FieldError(ArithmeticError):
    """Raised on division by zero, radicand mismatch or domain errors."""


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


class QuadraticScalar:
    """Exact element ``a + b*sqrt(d)`` of Q(sqrt(d)), ``a, b`` rational."""

    __slots__ = ("_p", "_q", "_den", "radicand")

    def __init__(self, rat=0, irr=0, radicand: int = DEFAULT_RADICAND):
        rat = Fraction(rat)
        irr = Fraction(irr)
        den = rat.denominator * irr.denominator // math.gcd(rat.denominator, irr.denominator)
        self._set(rat.numerator * (den // rat.denominator),
                  irr.numerator * (den // irr.denominator), den, radicand)

    @classmethod
    def _raw(cls, p: int, q: int, den: int, radicand: int) -> "QuadraticScalar":
        obj = cls.__new__(cls)
        obj._set(p, q, den, radicand)
        return obj

    def _set(self, p: int, q: int, den: int, radicand: int) -> None:
        if den < 0:
            p, q, den = -p, -q, -den
        g = math.gcd(math.gcd(p, q), den)
        if g > 1:
            p //= g
            q //= g
            den //= g
        self._p, self._q, self._den, self.radicand = p, q, den, radicand

    # -- components ---------------------------------------------------------
    @property
    def rat(self) -> Fraction:
        return Fraction(self._p, self._den)

    @property
    def irr(self) -> Fraction:
        return Fraction(self._q, self._den)

    def is_rational(self) -> bool:
        return self._q == 0

    def conjugate(self) -> "QuadraticScalar":
        return QuadraticScalar._raw(self._p, -self._q, self._den, self.radicand)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - d*b^2``."""
        return Fraction(self._p * self._p - self.radicand * self._q * self._q,
                        self._den * self._den)

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadraticScalar):
            if other.radicand != self.radicand:
                if other._q == 0:
                    return QuadraticScalar._raw(other._p, 0, other._den, self.radicand)
                if self._q == 0:
                    return other
                raise FieldError(
                    f"mixed radicands sqrt({self.radicand}) and sqrt({other.radicand})")
            return other
        if isinstance(other, (int, Rational)):
            f = Fraction(other)
            return QuadraticScalar._raw(f.numerator, 0, f.denominator, self.radicand)
        return None

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.radicand if self._q or not o._q else o.radicand
        if self._den == o._den:
            return QuadraticScalar._raw(self._p + o._p, self._q + o._q, self._den, d)
        return QuadraticScalar._raw(self._p * o._den + o._p * self._den,
                                    self._q * o._den + o._q * self._den,
                                    self._den * o._den, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticScalar._raw(-self._p, -self._q, self._den, self.radicand)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p1, q1, p2, q2 = self._p, self._q, o._p, o._q
        if q1 == 0 and q2 == 0:
            return QuadraticScalar._raw(p1 * p2, 0, self._den * o._den, self.radicand)
        d = self.radicand if q1 else o.radicand
        return QuadraticScalar._raw(p1 * p2 + d * q1 * q2, p1 * q2 + q1 * p2,
                                    self._den * o._den, d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticScalar":
        if self._p == 0 and self._q == 0:
            raise FieldError("division by zero")
        # 1/x = den * conj / (p^2 - d q^2)
        n = self._p * self._p - self.radicand * self._q * self._q
        return QuadraticScalar._raw(self._den * self._p, -self._den * self._q, n,
                                    self.radicand)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadraticScalar._raw(1, 0, 1, self.radicand)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order --------------------------------------------------------------
    def sign(self) -> int:
        p, q = self._p, self._q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return (q > 0) - (q < 0)
        if p > 0 and q > 0:
            return 1
        if p < 0 and q < 0:
            return -1
        # opposite signs: compare p^2 with d*q^2
        diff = p * p - self.radicand * q * q
        return (1 if diff > 0 else -1) if p > 0 else (-1 if diff > 0 else 1)

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __eq__(self, other):
        if isinstance(other, float):
            return float(self) == other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._p == o._p and self._q == o._q and self._den == o._den

    def __hash__(self):
        if self._q == 0:
            return hash(Fraction(self._p, self._den))
        return hash((self._p, self._q, self._den, self.radicand))

    def __bool__(self):
        return self._p != 0 or self._q != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        a = Fraction(self._p, self._den)
        if self._q == 0:
            return float(a)
        b = Fraction(self._q, self._den)
        # avoid cancellation when a and b*sqrt(d) nearly cancel
        if (a > 0) != (b > 0):
            conj = float(a) - float(b) * math.sqrt(self.radicand)
            if conj != 0.0:
                return float(a * a - b * b * self.radicand) / conj
        return float(a) + float(b) * math.sqrt(self.radicand)

    def __repr__(self):
        return f"QuadraticScalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


# ---------------------------------------------------------------------------
# text grammar

_INT = r"[+-]?\d+"
_RAT = rf"{_INT}(?:/\d+)?"
_RAT_RE = re.compile(rf"^({_INT})(?:/(\d+))?$")
_QUAD_RE = re.compile(rf"^\(({_RAT})\)\+\(({_RAT})\)\*sqrt\((\d+)\)$")


def _parse_rational(text: str) -> Fraction:
    m = _RAT_RE.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def parse_scalar(text: str, radicand: int | None = None) -> QuadraticScalar:
    """Parse ``INT``, ``INT/INT`` or ``(R)+(R)*sqrt(D)`` (whitespace ignored)."""
    s = re.sub(r"\s+", "", str(text))
    m = _QUAD_RE.match(s)
    if m:
        d = int(m.group(3))
        if radicand is not None and d != radicand:
            raise ValueError(f"radicand {d} in {text!r} does not match context {radicand}")
        if not _squarefree(d):
            raise ValueError(f"radicand {d} is not square-free")
        return QuadraticScalar(_parse_rational(m.group(1)), _parse_rational(m.group(2)), d)
    return QuadraticScalar(_parse_rational(s), 0,
                           radicand if radicand is not None else DEFAULT_RADICAND)


def _fmt_rat(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(x) -> str:
    if isinstance(x, QuadraticScalar):
        if x.is_rational():
            return _fmt_rat(x.rat)
        return f"({_fmt_rat(x.rat)})+({_fmt_rat(x.irr)})*sqrt({x.radicand})"
    if isinstance(x, (int, Fraction)):
        return _fmt_rat(Fraction(x))
    return repr(float(x))


# ---------------------------------------------------------------------------
# approximation and power-of-two rounding

def approx(x, bits: int) -> Fraction:
    """Rational ``q`` with ``|q - x| < 2**-bits``."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if x.is_rational():
        return x.rat
    b = x.irr
    # floor(sqrt(d) * 2^n) / 2^n is within 2^-n below sqrt(d)
    n = bits + max(0, abs(b).numerator.bit_length() - b.denominator.bit_length()) + 2
    s = Fraction(math.isqrt(x.radicand << (2 * n)), 1 << n)
    return x.rat + b * s


def _as_exact(x):
    return x if isinstance(x, QuadraticScalar) else QuadraticScalar(Fraction(x))


def pow2_exponent(x, direction: str = "down") -> int:
    """Integer ``z`` with ``2**z <= x < 2**(z+1)`` (down) or ``2**(z-1) < x <= 2**z`` (up)."""
    if direction not in ("down", "up"):
        raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")
    if isinstance(x, float):
        if not x > 0:
            raise FieldError("round_pow2 needs a positive value")
        m, e = math.frexp(x)  # x = m * 2^e, 0.5 <= m < 1
        z = e - 1
        if direction == "up" and m != 0.5:
            z += 1
        return z
    x = _as_exact(x)
    if x.sign() <= 0:
        raise FieldError("round_pow2 needs a positive value")
    a = approx(x, 8)
    if a > 0:
        z = a.numerator.bit_length() - a.denominator.bit_length()
    else:
        z = -8
    two = Fraction(2)
    while x < two ** z:
        z -= 1
    while x >= two ** (z + 1):
        z += 1
    if direction == "up" and x != two ** z:
        z += 1
    return z


def round_pow2(x, direction: str = "down"):
    """Power of two bracketing ``x``; exact for exact input."""
    z = pow2_exponent(x, direction)
    if isinstance(x, float):
        return math.ldexp(1.0, z)
    return Fraction(2) ** z


# ---------------------------------------------------------------------------
# backends

class ExactField:
    """Exact arithmetic in Q(sqrt(radicand)); never rounds."""

    exact = True

    def __init__(self, radicand: int = DEFAULT_RADICAND):
        if not _squarefree(radicand):
            raise ValueError(f"radicand {radicand} is not square-free")
        self.radicand = radicand
        self.zero = QuadraticScalar(0, 0, radicand)
        self.one = QuadraticScalar(1, 0, radicand)
        self.tol = 0

    def __call__(self, value) -> QuadraticScalar:
        if isinstance(value, QuadraticScalar):
            if value.radicand != self.radicand and not value.is_rational():
                raise FieldError(f"value in Q(sqrt({value.radicand})) used in "
                                 f"Q(sqrt({self.radicand})) context")
            if value.radicand != self.radicand:
                return QuadraticScalar(value.rat, 0, self.radicand)
            return value
        if isinstance(value, str):
            return parse_scalar(value, self.radicand)
        if isinstance(value, float):
            raise FieldError(f"float {value!r} cannot enter exact mode")
        return QuadraticScalar(Fraction(value), 0, self.radicand)

    def sqrt_radicand(self) -> QuadraticScalar:
        return QuadraticScalar(0, 1, self.radicand)

    def sign(self, x) -> int:
        if isinstance(x, QuadraticScalar):
            return x.sign()
        return (x > 0) - (x < 0)

    def is_zero(self, x) -> bool:
        return not x

    def to_float(self, x) -> float:
        return float(x)

    def parse(self, text: str) -> QuadraticScalar:
        return parse_scalar(text, self.radicand)

    def format(self, x) -> str:
        return format_scalar(x)

    def describe(self) -> dict:
        return {"mode": "exact", "radicand": self.radicand}

    def __repr__(self):
        return f"ExactField(radicand={self.radicand})"


class FloatField:
    """Float arithmetic; ``|x| <= tol`` counts as zero in every sign test."""

    exact = False

    def __init__(self, tol: float = DEFAULT_TOLERANCE, radicand: int = DEFAULT_RADICAND):
        if tol < 0:
            raise ValueError("tolerance must be nonnegative")
        self.tol = tol
        self.radicand = radicand
        self.zero = 0.0
        self.one = 1.0

    def __call__(self, value) -> float:
        if isinstance(value, str):
            return self.parse(value)
        return float(value)

    def sqrt_radicand(self) -> float:
        return math.sqrt(self.radicand)

    def sign(self, x) -> int:
        if x > self.tol:
            return 1
        if x < -self.tol:
            return -1
        return 0

    def is_zero(self, x) -> bool:
        return abs(x) <= self.tol

    def to_float(self, x) -> float:
        return float(x)

    def parse(self, text: str) -> float:
        s = re.sub(r"\s+", "", str(text))
        try:
            return float(s)
        except ValueError:
            return float(parse_scalar(s))

    def format(self, x) -> str:
        return repr(float(x))

    def describe(self) -> dict:
        return {"mode": "float", "tolerance": self.tol}

    def __repr__(self):
        return f"FloatField(tol={self.tol!r})"


def make_field(backend: str = "exact", tol: float = DEFAULT_TOLERANCE,
               radicand: int = DEFAULT_RADICAND):
    if backend == "exact":
        return ExactField(radicand)
    if backend == "float":
        return FloatField(tol, radicand)
    raise ValueError(f"unknown backend {backend!r}")


def bit_size(x) -> int:
    """Largest bit length among the integers representing ``x`` (0 for floats)."""
    if isinstance(x, QuadraticScalar):
        return max(abs(x._p).bit_length(), abs(x._q).bit_length(), x._den.bit_length())
    if isinstance(x, Fraction):
        return max(abs(x.numerator).bit_length(), x.denominator.bit_length())
    if isinstance(x, int):
        return abs(x).bit_length()
    return 0
