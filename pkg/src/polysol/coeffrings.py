"""Coefficient rings: double, exact rational, complex, and outward-rounded intervals.

Polynomials store plain Python numbers (``int``, ``float``, ``complex``,
:class:`fractions.Fraction`) or one of the two value types defined here,
:class:`Interval` and :class:`ComplexRational`.  Integers embed exactly, so
integer-only data is treated as rational.
"""

from __future__ import annotations

import enum
import math
import numbers
import re
import sys
from fractions import Fraction

from .errors import PolysolError, RingError

__all__ = [
    "ComplexRational",
    "Interval",
    "LiteralError",
    "PI_RATIONAL",
    "Ring",
    "common_ring",
    "format_literal",
    "imaginary_unit",
    "invertible",
    "is_positive",
    "magnitude",
    "parse_literal",
    "promote",
    "reciprocal",
    "ring_of",
]

# 80 correct digits; the rational below is within 1e-79 of pi.
_PI_DIGITS = (
    "3.1415926535897932384626433832795028841971693993751058209749445923078164062862"
)
PI_RATIONAL = Fraction(_PI_DIGITS)

_INF = math.inf
_MAX = sys.float_info.max


class LiteralError(PolysolError, ValueError):
    """A coefficient literal could not be parsed in the requested ring."""


# ---------------------------------------------------------------------------
# directed rounding helpers
#
# Python exposes no rounding-mode control, so each endpoint is computed with
# round-to-nearest and then stepped one ulp outward only when the rounding
# error is known to point inward.  The error sign is found exactly (TwoSum for
# addition, rational comparison otherwise), so exact results stay tight.


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _add_down(a: float, b: float) -> float:
    s = a + b
    if math.isinf(s):
        return -_INF if s < 0 or math.isinf(a) or math.isinf(b) else _MAX
    if _two_sum_err(a, b, s) < 0:
        return math.nextafter(s, -_INF)
    return s


def _add_up(a: float, b: float) -> float:
    return -_add_down(-a, -b)


def _exact_cmp(approx: float, exact: Fraction) -> int:
    diff = Fraction(approx) - exact
    return (diff > 0) - (diff < 0)


def _mul_down(a: float, b: float) -> float:
    if a == 0 or b == 0:
        return 0.0
    p = a * b
    if math.isinf(a) or math.isinf(b):
        return p
    if math.isinf(p):
        return -_INF if p < 0 else _MAX
    if _exact_cmp(p, Fraction(a) * Fraction(b)) > 0:
        return math.nextafter(p, -_INF)
    return p


def _mul_up(a: float, b: float) -> float:
    return -_mul_down(-a, b)


def _div_down(a: float, b: float) -> float:
    if a == 0:
        return 0.0
    q = a / b
    if math.isinf(a) or math.isinf(b):
        return q
    if math.isinf(q):
        return -_INF if q < 0 else _MAX
    if _exact_cmp(q, Fraction(a) / Fraction(b)) > 0:
        return math.nextafter(q, -_INF)
    return q


def _div_up(a: float, b: float) -> float:
    return -_div_down(-a, b)


def _enclose_rational(x: Fraction) -> tuple[float, float]:
    f = float(x)
    c = _exact_cmp(f, x)
    if c == 0:
        return f, f
    if c > 0:
        return math.nextafter(f, -_INF), f
    return f, math.nextafter(f, _INF)


class Interval:
    """Closed interval ``[lo, hi]`` of doubles with outward-rounded arithmetic.

    Every operation returns an interval containing all exact results of the
    operation applied to members of the operands.  Equality is structural;
    a degenerate interval compares equal to the scalar it holds.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"empty interval [{lo!r}, {hi!r}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    @classmethod
    def enclose(cls, x) -> Interval:
        """Tightest interval containing the exact value of ``x``."""
        if isinstance(x, Interval):
            return x
        if isinstance(x, float):
            return cls(x)
        if isinstance(x, numbers.Rational):
            return cls(*_enclose_rational(Fraction(x)))
        raise RingError(f"cannot enclose {type(x).__name__} in an interval")

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, Interval):
            return other
        if isinstance(other, (ComplexRational, complex)):
            raise RingError("interval coefficients cannot be mixed with complex values")
        if isinstance(other, (float, numbers.Rational)):
            return cls.enclose(other)
        return None

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Interval(_add_down(self.lo, o.lo), _add_up(self.hi, o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Interval(_add_down(self.lo, -o.hi), _add_up(self.hi, -o.lo))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return Interval(
            min(_mul_down(a, b) for a, b in pairs),
            max(_mul_up(a, b) for a, b in pairs),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.contains_zero():
            raise ZeroDivisionError(f"division by an interval containing zero: {o}")
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return Interval(
            min(_div_down(a, b) for a, b in pairs),
            max(_div_up(a, b) for a, b in pairs),
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        if n == 0:
            return Interval(1.0)
        lo, hi = self.lo, self.hi
        if lo >= 0:
            return Interval(_pow_down(lo, n), _pow_up(hi, n))
        if hi <= 0:
            if n % 2:
                return Interval(-_pow_up(-lo, n), -_pow_down(-hi, n))
            return Interval(_pow_down(-hi, n), _pow_up(-lo, n))
        if n % 2:
            return Interval(-_pow_up(-lo, n), _pow_up(hi, n))
        return Interval(0.0, _pow_up(max(-lo, hi), n))

    # queries --------------------------------------------------------------

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = Fraction(x)
        above = self.lo == -_INF or Fraction(self.lo) <= x
        below = self.hi == _INF or x <= Fraction(self.hi)
        return above and below

    @property
    def width(self) -> float:
        return _add_up(self.hi, -self.lo)

    @property
    def mid(self) -> float:
        return self.lo / 2 + self.hi / 2

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def __eq__(self, other):
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        if isinstance(other, (float, numbers.Rational)):
            return self.lo == self.hi == other
        return NotImplemented

    def __hash__(self):
        if self.lo == self.hi:
            return hash(self.lo)
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        return f"[{self.lo!r},{self.hi!r}]"


def _pow_down(x: float, n: int) -> float:
    r = 1.0
    for _ in range(n):
        r = _mul_down(r, x)
    return r


def _pow_up(x: float, n: int) -> float:
    r = 1.0
    for _ in range(n):
        r = _mul_up(r, x)
    return r


class ComplexRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        object.__setattr__(self, "real", Fraction(real))
        object.__setattr__(self, "imag", Fraction(imag))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexRational is immutable")

    @staticmethod
    def _coerce(other):
        if isinstance(other, ComplexRational):
            return other
        if isinstance(other, numbers.Rational):
            return ComplexRational(other)
        if isinstance(other, Interval):
            raise RingError("interval coefficients cannot be mixed with complex values")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other if isinstance(other, numbers.Complex) else NotImplemented
        return ComplexRational(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other if isinstance(other, numbers.Complex) else NotImplemented
        return ComplexRational(self.real - o.real, self.imag - o.imag)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self) if isinstance(other, numbers.Complex) else NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, numbers.Rational):
            return ComplexRational(self.real * other, self.imag * other)
        o = self._coerce(other)
        if o is None:
            return complex(self) * other if isinstance(other, numbers.Complex) else NotImplemented
        return ComplexRational(
            self.real * o.real - self.imag * o.imag,
            self.real * o.imag + self.imag * o.real,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Rational):
            if other == 0:
                raise ZeroDivisionError("complex division by zero")
            return ComplexRational(self.real / other, self.imag / other)
        o = self._coerce(other)
        if o is None:
            return complex(self) / other if isinstance(other, numbers.Complex) else NotImplemented
        den = o.real * o.real + o.imag * o.imag
        if den == 0:
            raise ZeroDivisionError("complex division by zero")
        return ComplexRational(
            (self.real * o.real + self.imag * o.imag) / den,
            (self.imag * o.real - self.real * o.imag) / den,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self) if isinstance(other, numbers.Complex) else NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ComplexRational(1) / self ** (-n)
        r = ComplexRational(1)
        for _ in range(n):
            r = r * self
        return r

    def __neg__(self):
        return ComplexRational(-self.real, -self.imag)

    def __pos__(self):
        return self

    def conjugate(self) -> ComplexRational:
        return ComplexRational(self.real, -self.imag)

    def __abs__(self) -> float:
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __eq__(self, other):
        if isinstance(other, ComplexRational):
            return self.real == other.real and self.imag == other.imag
        if isinstance(other, numbers.Complex) and not isinstance(other, Interval):
            return self.real == other.real and self.imag == other.imag
        return NotImplemented

    def __hash__(self):
        # mirrors CPython's complex hash so equal values hash alike
        if self.imag == 0:
            return hash(self.real)
        modulus = 1 << sys.hash_info.width
        h = (hash(self.real) + sys.hash_info.imag * hash(self.imag)) % modulus
        if h >= modulus >> 1:
            h -= modulus
        return -2 if h == -1 else h

    def __repr__(self):
        return f"ComplexRational({self.real!r}, {self.imag!r})"

    def __str__(self):
        return format_literal(self)


numbers.Complex.register(ComplexRational)


# ---------------------------------------------------------------------------
# ring identification and promotion


class Ring(str, enum.Enum):
    """Named coefficient rings; the values are the CLI mode names."""

    DOUBLE = "double"
    RATIONAL = "rational"
    RATIONAL_BIG = "rational-big"
    INTERVAL = "interval"
    COMPLEX = "complex"
    COMPLEX_RATIONAL = "complex-rational"

    @property
    def canonical(self) -> Ring:
        # Python integers are unbounded, so the big-rational mode is the same ring
        return Ring.RATIONAL if self is Ring.RATIONAL_BIG else self

    @property
    def is_exact(self) -> bool:
        return self.canonical in (Ring.RATIONAL, Ring.COMPLEX_RATIONAL)


def ring_of(value) -> Ring:
    if isinstance(value, bool):
        raise RingError("booleans are not coefficients")
    if isinstance(value, Interval):
        return Ring.INTERVAL
    if isinstance(value, ComplexRational):
        return Ring.COMPLEX_RATIONAL
    if isinstance(value, numbers.Rational):
        return Ring.RATIONAL
    if isinstance(value, numbers.Real):
        return Ring.DOUBLE
    if isinstance(value, numbers.Complex):
        return Ring.COMPLEX
    raise RingError(f"unsupported coefficient type {type(value).__name__}")


_JOIN = {
    frozenset({Ring.RATIONAL, Ring.DOUBLE}): Ring.DOUBLE,
    frozenset({Ring.RATIONAL, Ring.INTERVAL}): Ring.INTERVAL,
    frozenset({Ring.DOUBLE, Ring.INTERVAL}): Ring.INTERVAL,
    frozenset({Ring.RATIONAL, Ring.COMPLEX_RATIONAL}): Ring.COMPLEX_RATIONAL,
    frozenset({Ring.RATIONAL, Ring.COMPLEX}): Ring.COMPLEX,
    frozenset({Ring.DOUBLE, Ring.COMPLEX}): Ring.COMPLEX,
    frozenset({Ring.DOUBLE, Ring.COMPLEX_RATIONAL}): Ring.COMPLEX,
    frozenset({Ring.COMPLEX_RATIONAL, Ring.COMPLEX}): Ring.COMPLEX,
}


def common_ring(*rings: Ring) -> Ring:
    """Smallest ring into which every argument promotes."""
    out = Ring.RATIONAL
    for r in rings:
        r = Ring(r).canonical
        if r == out:
            continue
        try:
            out = _JOIN[frozenset({out, r})]
        except KeyError:
            raise RingError(f"no common ring for {out.value} and {r.value}") from None
    return out


def promote(value, ring) -> object:
    """Embed ``value`` into ``ring``.

    Allowed paths: integer -> rational -> double -> interval, and any real
    into the complex ring over the same base.  Complex values with zero
    imaginary part may drop back to the corresponding real ring.
    """
    ring = Ring(ring).canonical
    src = ring_of(value)
    if src is Ring.COMPLEX_RATIONAL:
        if ring is Ring.COMPLEX_RATIONAL:
            return value
        if ring is Ring.COMPLEX:
            return complex(value)
        if value.imag != 0:
            raise RingError(f"cannot map {value} with nonzero imaginary part into {ring.value}")
        return promote(value.real, ring)
    if src is Ring.COMPLEX:
        value = complex(value)
        if ring is Ring.COMPLEX:
            return value
        if ring in (Ring.DOUBLE, Ring.INTERVAL) and value.imag == 0:
            return promote(value.real, ring)
        raise RingError(f"cannot map complex value {value} into {ring.value}")
    if src is Ring.INTERVAL:
        if ring is Ring.INTERVAL:
            return value
        raise RingError(f"cannot map interval {value} into {ring.value}")
    if src is Ring.DOUBLE:
        value = float(value)
        if ring is Ring.DOUBLE:
            return value
        if ring is Ring.COMPLEX:
            return complex(value)
        if ring is Ring.INTERVAL:
            return Interval(value)
        raise RingError(f"cannot map double {value!r} into {ring.value} exactly")
    # rational (or integer)
    if ring is Ring.RATIONAL:
        return Fraction(value)
    if ring is Ring.DOUBLE:
        return float(Fraction(value))
    if ring is Ring.COMPLEX:
        return complex(float(Fraction(value)))
    if ring is Ring.COMPLEX_RATIONAL:
        return ComplexRational(value)
    return Interval.enclose(Fraction(value))


def imaginary_unit(ring):
    """The value ``i`` in the complex ring over the base of ``ring``."""
    ring = Ring(ring).canonical
    if ring in (Ring.RATIONAL, Ring.COMPLEX_RATIONAL):
        return ComplexRational(0, 1)
    if ring in (Ring.DOUBLE, Ring.COMPLEX):
        return 1j
    raise RingError("complex intervals are not supported")


# ---------------------------------------------------------------------------
# small scalar utilities used by the solvers


def reciprocal(x):
    """``1/x``; integers give an exact Fraction instead of a float."""
    if isinstance(x, int):
        return Fraction(1, x)
    return 1 / x


def invertible(x) -> bool:
    if isinstance(x, Interval):
        return not x.contains_zero()
    return x != 0


def is_positive(x):
    """True/False when ``x`` is real-orderable, None for genuinely complex values.

    Intervals count as positive only when every member is.
    """
    if isinstance(x, Interval):
        return x.lo > 0
    if isinstance(x, (ComplexRational, complex)):
        if x.imag != 0:
            return None
        x = x.real
    return x > 0


def magnitude(x) -> float:
    if isinstance(x, Interval):
        return x.mag
    if isinstance(x, Fraction):
        return float(abs(x))
    return float(abs(x))


# ---------------------------------------------------------------------------
# literal grammar: "3/8", "0.375", "2+3i", "[0.1,0.2]", "pi"

_REAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?")


def _real_from_text(text: str, ring: Ring):
    if not _REAL.fullmatch(text):
        raise LiteralError(f"malformed number {text!r}")
    if ring in (Ring.DOUBLE, Ring.COMPLEX):
        # go through float() directly so that "-0.0" keeps its sign
        return float(Fraction(text)) if "/" in text else float(text)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise LiteralError(f"zero denominator in {text!r}") from None


def _pi(ring: Ring):
    if ring is Ring.RATIONAL:
        return PI_RATIONAL
    if ring is Ring.DOUBLE:
        return math.pi
    if ring is Ring.COMPLEX:
        return complex(math.pi)
    if ring is Ring.COMPLEX_RATIONAL:
        return ComplexRational(PI_RATIONAL)
    return Interval.enclose(PI_RATIONAL)


def _split_complex(body: str) -> tuple[str, str]:
    for idx in range(len(body) - 1, 0, -1):
        if body[idx] in "+-" and body[idx - 1] not in "eE":
            return body[:idx], body[idx:]
    return "", body


def parse_literal(text: str, ring) -> object:
    """Parse a coefficient literal into a value of ``ring``."""
    ring = Ring(ring).canonical
    s = text.strip().replace(" ", "")
    if not s:
        raise LiteralError("empty coefficient literal")
    if s in ("pi", "+pi", "-pi"):
        v = _pi(ring)
        return -v if s[0] == "-" else v
    if s.startswith("["):
        if ring is not Ring.INTERVAL:
            raise LiteralError(f"interval literal {text!r} outside interval mode")
        m = re.fullmatch(r"\[([^,\]]+),([^,\]]+)\]", s)
        if not m:
            raise LiteralError(f"malformed interval literal {text!r}")
        lo, hi = (float(_real_from_text(e, Ring.RATIONAL)) for e in m.groups())
        if lo > hi:
            raise LiteralError(f"empty interval literal {text!r}")
        return Interval(lo, hi)
    if s[-1] in "ij":
        if ring not in (Ring.COMPLEX, Ring.COMPLEX_RATIONAL):
            raise LiteralError(f"complex literal {text!r} outside complex modes")
        re_s, im_s = _split_complex(s[:-1])
        if im_s in ("", "+", "-"):
            im_s += "1"
        re_v = _real_from_text(re_s, ring) if re_s else 0
        im_v = _real_from_text(im_s, ring)
        if ring is Ring.COMPLEX:
            return complex(float(re_v), float(im_v))
        return ComplexRational(re_v, im_v)
    value = _real_from_text(s, ring)
    if ring is Ring.INTERVAL:
        return Interval.enclose(value)
    if ring is Ring.COMPLEX:
        return complex(value)
    if ring is Ring.COMPLEX_RATIONAL:
        return ComplexRational(value)
    return value


def _fmt_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_signed_imag(im, fmt) -> str:
    neg = math.copysign(1.0, im) < 0 if isinstance(im, float) else im < 0
    return ("-" if neg else "+") + fmt(abs(im)) + "i"


def format_literal(value) -> str:
    """Render ``value`` in the literal grammar; parsing it back in the value's
    own ring reproduces it exactly."""
    if isinstance(value, Interval):
        return str(value)
    if isinstance(value, ComplexRational):
        return _fmt_rational(value.real) + _fmt_signed_imag(value.imag, _fmt_rational)
    if isinstance(value, bool):
        raise RingError("booleans are not coefficients")
    if isinstance(value, numbers.Rational):
        return _fmt_rational(value)
    if isinstance(value, numbers.Real):
        return repr(float(value))
    if isinstance(value, numbers.Complex):
        value = complex(value)
        return repr(value.real) + _fmt_signed_imag(value.imag, repr)
    raise RingError(f"unsupported coefficient type {type(value).__name__}")
