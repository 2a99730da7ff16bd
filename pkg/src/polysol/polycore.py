"""Sparse multivariate polynomials and the differential operators acting on them.

A polynomial is a map from exponent tuples (multi-indices) to coefficients.
Coefficients may be any value of a ring from :mod:`polysol.coeffrings`; zero
coefficients are never stored.  Polynomials and vectors of polynomials are
immutable, and every operation returns a new value.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from types import MappingProxyType

from .coeffrings import common_ring, format_literal, promote, ring_of
from .errors import DimensionMismatchError

__all__ = [
    "NEG_INF",
    "PdoSpec",
    "PolyVector",
    "Polynomial",
    "apply_pdo",
    "curl",
    "divergence",
    "evaluate",
    "gradient",
    "grlex_key",
    "homogeneous_decomposition",
    "laplacian",
    "partial_derivative",
]

#: Degree of the zero polynomial.
NEG_INF = -math.inf

_SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def grlex_key(exp: tuple[int, ...]):
    """Sort key: ascending total degree, then lexicographic in the exponents."""
    return (sum(exp), exp)


def variable_names(dim: int) -> list[str]:
    if dim <= 3:
        return ["x", "y", "z"][:dim]
    return [f"x{i + 1}" for i in range(dim)]


def _is_zero(c) -> bool:
    return c == 0


def _check_exponent(exp, dim):
    if not isinstance(exp, tuple):
        exp = tuple(exp)
    if len(exp) != dim:
        raise DimensionMismatchError(f"exponent {exp} does not have length {dim}")
    for e in exp:
        if not isinstance(e, int) or isinstance(e, bool) or e < 0:
            raise ValueError(f"exponents must be non-negative integers, got {exp}")
    return exp


class Polynomial:
    """Sparse polynomial in ``dim`` variables.

    >>> p = Polynomial({(2, 3, 1): 1})
    >>> print(p.laplacian())
    2*y^3*z + 6*x^2*y*z
    """

    __slots__ = ("_dim", "_terms")

    def __init__(self, terms: Mapping | Iterable = (), dim: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], object] = {}
        for exp, coef in items:
            if dim is None:
                dim = len(tuple(exp))
            exp = _check_exponent(exp, dim)
            acc[exp] = acc[exp] + coef if exp in acc else coef
        if dim is None:
            raise ValueError("the dimension of an empty polynomial must be given")
        if not isinstance(dim, int) or dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {dim!r}")
        self._dim = dim
        self._terms = {e: c for e, c in acc.items() if not _is_zero(c)}

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> Polynomial:
        # trusted constructor: keys already validated; prunes zeros
        p = object.__new__(cls)
        p._dim = dim
        p._terms = {e: c for e, c in terms.items() if not _is_zero(c)}
        return p

    # constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> Polynomial:
        return cls({}, dim)

    @classmethod
    def constant(cls, value, dim: int) -> Polynomial:
        return cls({(0,) * dim: value}, dim)

    @classmethod
    def variable(cls, axis: int, dim: int) -> Polynomial:
        """The coordinate polynomial ``x_axis`` (0-based axis)."""
        if not 0 <= axis < dim:
            raise DimensionMismatchError(f"axis {axis} out of range for dimension {dim}")
        exp = tuple(1 if i == axis else 0 for i in range(dim))
        return cls({exp: 1}, dim)

    @classmethod
    def radius_squared(cls, dim: int) -> Polynomial:
        """``x_1^2 + ... + x_d^2``."""
        return cls._raw(dim, {tuple(2 if i == j else 0 for i in range(dim)): 1 for j in range(dim)})

    # basic queries ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def items(self) -> list[tuple[tuple[int, ...], object]]:
        """Terms in graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]))

    def __getitem__(self, exp) -> object:
        return self._terms.get(tuple(exp), 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self):
        """Total degree; ``NEG_INF`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    @property
    def ring(self):
        return common_ring(*(ring_of(c) for c in self._terms.values()))

    # arithmetic -------------------------------------------------------------

    def _check_dim(self, other: Polynomial):
        if other._dim != self._dim:
            raise DimensionMismatchError(
                f"polynomials of dimension {self._dim} and {other._dim} cannot be combined"
            )

    def _as_poly(self, other):
        if isinstance(other, Polynomial):
            self._check_dim(other)
            return other
        if isinstance(other, (PolyVector, PdoSpec)):
            return None
        return Polynomial._raw(self._dim, {(0,) * self._dim: other})

    def __add__(self, other):
        o = self._as_poly(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            out[e] = out[e] + c if e in out else c
        return Polynomial._raw(self._dim, out)

    def __radd__(self, other):
        o = self._as_poly(other)
        if o is None:
            return NotImplemented
        return o + self

    def __neg__(self):
        return Polynomial._raw(self._dim, {e: -c for e, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._as_poly(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            out[e] = out[e] - c if e in out else -c
        return Polynomial._raw(self._dim, out)

    def __rsub__(self, other):
        o = self._as_poly(other)
        if o is None:
            return NotImplemented
        return o - self

    def scale(self, c) -> Polynomial:
        return Polynomial._raw(self._dim, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (PolyVector, PdoSpec)):
            return NotImplemented
        if not isinstance(other, Polynomial):
            return Polynomial._raw(self._dim, {e: v * other for e, v in self._terms.items()})
        self._check_dim(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                out[e] = out[e] + c if e in out else c
        return Polynomial._raw(self._dim, out)

    def __rmul__(self, other):
        if isinstance(other, (Polynomial, PolyVector, PdoSpec)):
            return NotImplemented
        return Polynomial._raw(self._dim, {e: other * v for e, v in self._terms.items()})

    def __truediv__(self, other):
        if isinstance(other, (Polynomial, PolyVector, PdoSpec)):
            return NotImplemented
        return Polynomial._raw(self._dim, {e: v / other for e, v in self._terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Polynomial.constant(1, self._dim)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._dim == other._dim and self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash((self._dim, frozenset(self._terms.items())))

    # calculus ---------------------------------------------------------------

    def diff(self, axis: int, order: int = 1) -> Polynomial:
        return partial_derivative(self, axis, order)

    def laplacian(self, iterations: int = 1) -> Polynomial:
        return laplacian(self, iterations)

    def homogeneous_parts(self) -> list[tuple[int, Polynomial]]:
        return homogeneous_decomposition(self)

    def __call__(self, *point):
        return evaluate(self, point)

    # conversion and rendering ----------------------------------------------

    def map_coefficients(self, fn) -> Polynomial:
        return Polynomial._raw(self._dim, {e: fn(c) for e, c in self._terms.items()})

    def astype(self, ring) -> Polynomial:
        """Promote every coefficient into ``ring``."""
        return self.map_coefficients(lambda c: promote(c, ring))

    def format(self, unicode: bool = False) -> str:
        return format_polynomial(self, unicode=unicode)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        body = ", ".join(f"{e}: {c!r}" for e, c in self.items())
        return f"Polynomial({{{body}}}, dim={self._dim})"


# ---------------------------------------------------------------------------
# rendering


def _monomial(exp, names, unicode):
    parts = []
    for name, k in zip(names, exp):
        if k == 0:
            continue
        if k == 1:
            parts.append(name)
        elif unicode:
            parts.append(name + str(k).translate(_SUPERSCRIPTS))
        else:
            parts.append(f"{name}^{k}")
    return ("" if unicode else "*").join(parts)


def _signed_coefficient(c):
    """Split ``c`` into (is_negative, text) when it has a real sign, else (False, "(c)")."""
    from fractions import Fraction

    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, (int, Fraction)):
        return c < 0, format_literal(abs(c))
    if isinstance(c, float):
        return math.copysign(1.0, c) < 0, format_literal(abs(c))
    return False, f"({format_literal(c)})"


def format_polynomial(p: Polynomial, unicode: bool = False) -> str:
    """Render in graded-lex order: ``0.375*y*z - 0.125*y^3*z`` (ASCII) or
    ``0.375yz - 0.125y³z`` (Unicode superscripts)."""
    if p.is_zero():
        return "0"
    names = variable_names(p.dim)
    out = []
    for i, (exp, c) in enumerate(p.items()):
        neg, text = _signed_coefficient(c)
        mono = _monomial(exp, names, unicode)
        if mono:
            exact_one = text == "1" and not isinstance(c, float)
            if exact_one:
                text = mono
            else:
                text = text + ("" if unicode else "*") + mono
        if i == 0:
            out.append(("-" if neg else "") + text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out)


# ---------------------------------------------------------------------------
# vectors of polynomials


class PolyVector:
    """Fixed-length tuple of polynomials sharing one dimension."""

    __slots__ = ("_components",)

    def __init__(self, components: Iterable[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a PolyVector needs at least one component")
        dim = comps[0].dim
        for c in comps:
            if not isinstance(c, Polynomial):
                raise TypeError(f"PolyVector components must be Polynomials, got {type(c).__name__}")
            if c.dim != dim:
                raise DimensionMismatchError("PolyVector components have different dimensions")
        self._components = comps

    @classmethod
    def zero(cls, count: int, dim: int) -> PolyVector:
        return cls(Polynomial.zero(dim) for _ in range(count))

    @property
    def dim(self) -> int:
        return self._components[0].dim

    @property
    def components(self) -> tuple[Polynomial, ...]:
        return self._components

    def __len__(self):
        return len(self._components)

    def __iter__(self):
        return iter(self._components)

    def __getitem__(self, i):
        return self._components[i]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self._components)

    @property
    def degree(self):
        return max(c.degree for c in self._components)

    def map(self, fn) -> PolyVector:
        return PolyVector(fn(c) for c in self._components)

    def _zip(self, other, fn):
        if not isinstance(other, PolyVector):
            return NotImplemented
        if len(other) != len(self):
            raise DimensionMismatchError(
                f"vectors of length {len(self)} and {len(other)} cannot be combined"
            )
        return PolyVector(fn(a, b) for a, b in zip(self, other))

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.map(lambda c: -c)

    def __mul__(self, scalar):
        if isinstance(scalar, PolyVector):
            return NotImplemented
        return self.map(lambda c: c * scalar)

    def __rmul__(self, scalar):
        if isinstance(scalar, PolyVector):
            return NotImplemented
        return self.map(lambda c: scalar * c)

    def __truediv__(self, scalar):
        return self.map(lambda c: c / scalar)

    def __eq__(self, other):
        if isinstance(other, PolyVector):
            return self._components == other._components
        return NotImplemented

    def __hash__(self):
        return hash(self._components)

    def astype(self, ring) -> PolyVector:
        return self.map(lambda c: c.astype(ring))

    def __repr__(self):
        return f"PolyVector({list(self._components)!r})"

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self._components) + ")"


# ---------------------------------------------------------------------------
# operators


def partial_derivative(p: Polynomial, axis: int, order: int = 1) -> Polynomial:
    """``d^order p / dx_axis^order`` with a 0-based ``axis``."""
    if not 0 <= axis < p.dim:
        raise DimensionMismatchError(f"axis {axis} out of range for dimension {p.dim}")
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    if order == 0:
        return p
    out = {}
    for exp, c in p._terms.items():
        k = exp[axis]
        if k < order:
            continue
        e = exp[:axis] + (k - order,) + exp[axis + 1:]
        out[e] = math.perm(k, order) * c
    return Polynomial._raw(p.dim, out)


def _laplacian_once(p: Polynomial) -> Polynomial:
    out: dict = {}
    for exp, c in p._terms.items():
        for i, k in enumerate(exp):
            if k < 2:
                continue
            e = exp[:i] + (k - 2,) + exp[i + 1:]
            v = (k * (k - 1)) * c
            out[e] = out[e] + v if e in out else v
    return Polynomial._raw(p.dim, out)


def laplacian(p: Polynomial, iterations: int = 1) -> Polynomial:
    """``Δ^iterations p``."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    for _ in range(iterations):
        if p.is_zero():
            break
        p = _laplacian_once(p)
    return p


def laplacian_powers(p: Polynomial) -> list[Polynomial]:
    """``[p, Δp, Δ²p, ...]`` up to the last nonzero iterate (empty for p = 0).

    The length minus one is the nilpotency index of ``p``.
    """
    out = []
    while not p.is_zero():
        out.append(p)
        p = _laplacian_once(p)
    return out


def gradient(p: Polynomial) -> PolyVector:
    return PolyVector(partial_derivative(p, i) for i in range(p.dim))


def divergence(v: PolyVector) -> Polynomial:
    if len(v) != v.dim:
        raise DimensionMismatchError(
            f"divergence needs as many components as dimensions ({len(v)} != {v.dim})"
        )
    out = Polynomial.zero(v.dim)
    for i, c in enumerate(v):
        out = out + partial_derivative(c, i)
    return out


def curl(v: PolyVector) -> PolyVector:
    if len(v) != 3 or v.dim != 3:
        raise DimensionMismatchError("curl is only defined for 3-component fields in 3D")
    d = partial_derivative
    return PolyVector([
        d(v[2], 1) - d(v[1], 2),
        d(v[0], 2) - d(v[2], 0),
        d(v[1], 0) - d(v[0], 1),
    ])


def homogeneous_decomposition(p: Polynomial) -> list[tuple[int, Polynomial]]:
    """Split ``p`` into its homogeneous parts, ordered by degree; empty parts are omitted."""
    buckets: dict[int, dict] = {}
    for exp, c in p._terms.items():
        buckets.setdefault(sum(exp), {})[exp] = c
    return [(n, Polynomial._raw(p.dim, buckets[n])) for n in sorted(buckets)]


def evaluate(p: Polynomial, point) -> object:
    """Value of ``p`` at ``point``; terms are summed in graded-lex order."""
    point = tuple(point)
    if len(point) != p.dim:
        raise DimensionMismatchError(f"point has {len(point)} coordinates, expected {p.dim}")
    total = 0
    for exp, c in p.items():
        term = c
        for x, k in zip(point, exp):
            if k:
                term = term * x**k
        total = total + term
    return total


class PdoSpec:
    """Constant-coefficient differential operator ``B(∂)``.

    ``symbol`` is a polynomial whose variable ``i`` stands for ``∂_i``; e.g.
    ``ξ_1² + ξ_2²`` is the 2D Laplacian.
    """

    __slots__ = ("symbol",)

    def __init__(self, symbol: Polynomial):
        if not isinstance(symbol, Polynomial):
            raise TypeError("the operator symbol must be a Polynomial")
        self.symbol = symbol

    @classmethod
    def laplacian(cls, dim: int) -> PdoSpec:
        return cls(Polynomial.radius_squared(dim))

    @classmethod
    def from_matrix(cls, matrix) -> PdoSpec:
        """Second-order operator ``Σ_ij M_ij ∂_i ∂_j``."""
        n = len(matrix)
        terms: dict = {}
        for i in range(n):
            for j in range(n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                e = tuple(e)
                terms[e] = terms[e] + matrix[i][j] if e in terms else matrix[i][j]
        return cls(Polynomial._raw(n, terms))

    @property
    def dim(self) -> int:
        return self.symbol.dim

    @property
    def constant_term(self):
        return self.symbol[(0,) * self.dim]

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply_pdo(self, p)

    def __eq__(self, other):
        if isinstance(other, PdoSpec):
            return self.symbol == other.symbol
        return NotImplemented

    def __hash__(self):
        return hash(self.symbol)

    def __repr__(self):
        return f"PdoSpec({self.symbol!r})"


def apply_pdo(op: PdoSpec, p: Polynomial) -> Polynomial:
    """``Σ_α c_α ∂^α p`` for the operator symbol ``Σ_α c_α ξ^α``."""
    if op.dim != p.dim:
        raise DimensionMismatchError(f"operator dimension {op.dim} != polynomial dimension {p.dim}")
    out: dict = {}
    for a, ca in op.symbol._terms.items():
        for b, cb in p._terms.items():
            if any(bi < ai for ai, bi in zip(a, b)):
                continue
            factor = 1
            for ai, bi in zip(a, b):
                factor *= math.perm(bi, ai)
            e = tuple(bi - ai for ai, bi in zip(a, b))
            v = ca * (factor * cb)
            out[e] = out[e] + v if e in out else v
    return Polynomial._raw(p.dim, out)
