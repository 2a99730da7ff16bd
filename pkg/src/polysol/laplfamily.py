"""Polynomial solutions for operators without a zeroth-order term.

The Poisson solve works one homogeneous part ``h`` of degree ``n`` at a time
with the ansatz ``u = Σ_ℓ c_ℓ r^{2ℓ+2} Δ^ℓ h``.  Euler's identity
``r·∇h = n h`` gives ``Δ(r^{2ℓ+2} h) = γ(ℓ, n) r^{2ℓ} h + r^{2ℓ+2} Δh`` with
``γ(ℓ, n) = 2(ℓ+1)(2ℓ+2n+d)``, from which the ``c_ℓ`` follow by a one-term
recursion.  The anisotropic operator ``div(A∇·)`` uses the same coefficients
with ``r²`` replaced by ``rᵀA⁻¹r``.  Bilaplacian, elastostatic and Stokes
solutions are built on top through Galerkin vector potentials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar

from .coeffrings import invertible, is_positive, reciprocal
from .errors import DimensionMismatchError, SolverPreconditionError
from .polycore import (
    PdoSpec,
    Polynomial,
    PolyVector,
    apply_pdo,
    divergence,
    gradient,
    homogeneous_decomposition,
    laplacian,
    laplacian_powers,
)

__all__ = [
    "AnisotropicPoissonParams",
    "AnisotropyMatrix",
    "BilaplaceParams",
    "ElastostaticsParams",
    "FactorizedAnisotropicParams",
    "PoissonParams",
    "StokesParams",
    "bilaplace_coefficients",
    "gamma",
    "poisson_coefficients",
    "solve_anisotropic_poisson",
    "solve_bilaplace",
    "solve_elastostatics",
    "solve_factorized_anisotropic",
    "solve_poisson",
    "solve_poisson_homogeneous",
    "solve_stokes",
    "transversely_isotropic_factors",
]


def gamma(ell: int, n: int, d: int) -> int:
    """``Δ(r^{2ℓ+2} h) - r^{2ℓ+2} Δh = gamma(ℓ, n, d) · r^{2ℓ} h`` for ``h`` of degree ``n``."""
    return 2 * (ell + 1) * (2 * ell + 2 * n + d)


def _positive(value: int) -> int:
    if value <= 0:
        raise ValueError(f"recursion denominator {value} is not positive")
    return value


def poisson_coefficients(n: int, d: int, m: int) -> list[Fraction]:
    """``c_0..c_m`` for a degree-``n`` source whose Laplacian vanishes after ``m + 1`` steps."""
    c = [Fraction(1, _positive(gamma(0, n, d)))]
    for ell in range(1, m + 1):
        c.append(-c[-1] / _positive(gamma(ell, n - 2 * ell, d)))
    return c


def bilaplace_coefficients(n: int, d: int, m: int) -> list[Fraction]:
    """``c_0..c_m`` such that ``Δ²(Σ c_ℓ r^{2ℓ+4} Δ^ℓ h) = h`` for ``h`` of degree ``n``.

    The mixed term of ``Δ²(r^{2ℓ+4} h)`` is ``(γ(ℓ+1, n) + γ(ℓ+1, n-2)) r^{2ℓ+2} Δh``.
    """
    c: list[Fraction] = []
    for ell in range(m + 1):
        k = n - 2 * ell
        den = _positive(gamma(ell, k, d) * gamma(ell + 1, k, d))
        if ell == 0:
            c.append(Fraction(1, den))
            continue
        mixed = gamma(ell, k + 2, d) + gamma(ell, k, d)
        num = mixed * c[ell - 1] + (c[ell - 2] if ell >= 2 else 0)
        c.append(-num / den)
    return c


def _radial_series(powers, coeffs, r2: Polynomial, shift: int) -> Polynomial:
    """``Σ_ℓ coeffs[ℓ] · r2^{ℓ+shift} · powers[ℓ]`` evaluated Horner-style in ``r2``."""
    acc = powers[-1] * coeffs[len(powers) - 1]
    for ell in range(len(powers) - 2, -1, -1):
        acc = powers[ell] * coeffs[ell] + r2 * acc
    for _ in range(shift):
        acc = r2 * acc
    return acc


def _check_homogeneous(h: Polynomial) -> int:
    degrees = {sum(e) for e in h.terms}
    if len(degrees) > 1:
        raise ValueError("input polynomial is not homogeneous")
    return degrees.pop()


def solve_poisson_homogeneous(h: Polynomial) -> Polynomial:
    """Solve ``Δu = h`` for homogeneous ``h`` of degree ``n``; ``u`` is homogeneous of degree ``n + 2``."""
    if h.is_zero():
        return h
    n = _check_homogeneous(h)
    powers = laplacian_powers(h)
    coeffs = poisson_coefficients(n, h.dim, len(powers) - 1)
    return _radial_series(powers, coeffs, Polynomial.radius_squared(h.dim), 1)


def solve_poisson(f: Polynomial) -> Polynomial:
    """A polynomial ``u`` with ``Δu = f`` and ``deg u <= deg f + 2``.

    Poisson solutions are only unique up to harmonic polynomials; this returns
    the representative built from the homogeneous-part recursion.
    """
    u = Polynomial.zero(f.dim)
    for _, h in homogeneous_decomposition(f):
        u = u + solve_poisson_homogeneous(h)
    return u


def _bilaplace_direct_homogeneous(h: Polynomial) -> Polynomial:
    n = _check_homogeneous(h)
    powers = laplacian_powers(h)
    coeffs = bilaplace_coefficients(n, h.dim, len(powers) - 1)
    return _radial_series(powers, coeffs, Polynomial.radius_squared(h.dim), 2)


def solve_bilaplace(f: Polynomial, method: str = "iterated") -> Polynomial:
    """A polynomial ``u`` with ``Δ²u = f``.

    ``method="iterated"`` applies the Poisson solve twice; ``"direct"`` uses a
    single radial series per homogeneous part.  The two answers differ by a
    biharmonic polynomial.
    """
    if method == "iterated":
        return solve_poisson(solve_poisson(f))
    if method == "direct":
        u = Polynomial.zero(f.dim)
        for _, h in homogeneous_decomposition(f):
            u = u + _bilaplace_direct_homogeneous(h)
        return u
    raise ValueError(f"unknown bilaplace method {method!r}")


# ---------------------------------------------------------------------------
# vector problems


@dataclass(frozen=True)
class PoissonParams:
    tag: ClassVar[str] = "poisson"


@dataclass(frozen=True)
class BilaplaceParams:
    method: str = "iterated"
    tag: ClassVar[str] = "bilaplace"

    def __post_init__(self):
        if self.method not in ("iterated", "direct"):
            raise SolverPreconditionError(f"unknown bilaplace method {self.method!r}")


@dataclass(frozen=True)
class ElastostaticsParams:
    """Poisson ratio ``nu`` in (0, 1/2).

    ``mu`` only labels the body force ``μf``; it does not enter the displacement.
    """

    nu: object
    mu: object = 1
    tag: ClassVar[str] = "elastostatics"

    def __post_init__(self):
        if False in (is_positive(self.nu), is_positive(Fraction(1, 2) - self.nu)):
            raise SolverPreconditionError(f"Poisson ratio must lie in (0, 1/2), got {self.nu}")
        if not invertible(1 - 2 * self.nu):
            raise SolverPreconditionError("Poisson ratio 1/2 makes the operator singular")
        if is_positive(self.mu) is False:
            raise SolverPreconditionError(f"shear modulus must be positive, got {self.mu}")


@dataclass(frozen=True)
class StokesParams:
    mu: object
    tag: ClassVar[str] = "stokes"

    def __post_init__(self):
        if not invertible(self.mu):
            raise SolverPreconditionError("viscosity must be nonzero")


def _as_vector(f) -> PolyVector:
    f = f if isinstance(f, PolyVector) else PolyVector(f)
    if len(f) != f.dim:
        raise DimensionMismatchError("vector problems need one force component per dimension")
    return f


def solve_elastostatics(f, *, nu, mu=1) -> PolyVector:
    """Displacement ``u`` with ``Δu + (1-2ν)^{-1}∇(div u) = f``.

    Uses the Galerkin vector ``g`` with ``Δ²g = f / (2(1-ν))`` (iterated
    bilaplace solve) and ``u = 2(1-ν)Δg - ∇(div g)``.
    """
    f = _as_vector(f)
    ElastostaticsParams(nu, mu)
    two_one_minus_nu = 2 * (1 - nu)
    g = f.map(lambda c: solve_bilaplace(c * reciprocal(two_one_minus_nu)))
    grad_div = gradient(divergence(g))
    return PolyVector(laplacian(gi) * two_one_minus_nu - gd for gi, gd in zip(g, grad_div))


def solve_stokes(f, *, mu) -> tuple[PolyVector, Polynomial]:
    """Velocity and pressure with ``μΔu - ∇p = f`` and ``div u = 0``.

    ``u = Δg - ∇(div g)`` and ``p = -μΔ(div g)`` for ``Δ²g = f/μ``; the
    velocity is divergence-free by construction.
    """
    f = _as_vector(f)
    StokesParams(mu)
    g = f.map(lambda c: solve_bilaplace(c * reciprocal(mu)))
    div_g = divergence(g)
    grad_div = gradient(div_g)
    u = PolyVector(laplacian(gi) - gd for gi, gd in zip(g, grad_div))
    p = -(laplacian(div_g) * mu)
    return u, p


# ---------------------------------------------------------------------------
# anisotropic problems


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


class AnisotropyMatrix:
    """Symmetric invertible conductivity matrix ``A`` of ``Δ_A = div(A∇·)``.

    The inverse is formed as adjugate over determinant, which is exact for
    rational entries.  Positive definiteness (all leading principal minors
    positive) is enforced whenever the entries are real-orderable.
    """

    __slots__ = ("rows", "inverse")

    def __init__(self, matrix):
        rows = tuple(tuple(r) for r in matrix)
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise DimensionMismatchError("anisotropy matrix must be square and non-empty")
        for i in range(d):
            for j in range(i + 1, d):
                if rows[i][j] != rows[j][i]:
                    raise SolverPreconditionError("anisotropy matrix must be symmetric")
        det = _det(rows)
        if not invertible(det):
            raise SolverPreconditionError("anisotropy matrix is singular")
        for k in range(1, d + 1):
            if is_positive(_det([r[:k] for r in rows[:k]])) is False:
                raise SolverPreconditionError("anisotropy matrix is not positive definite")
        inv_det = reciprocal(det)
        inverse = []
        for i in range(d):
            row = []
            for j in range(d):
                if d == 1:
                    cof = 1
                else:
                    minor = [r[:i] + r[i + 1:] for k, r in enumerate(rows) if k != j]
                    cof = _det(minor) if (i + j) % 2 == 0 else -_det(minor)
                row.append(cof * inv_det)
            inverse.append(tuple(row))
        self.rows = rows
        self.inverse = tuple(inverse)

    @classmethod
    def identity(cls, dim: int) -> AnisotropyMatrix:
        return cls.diagonal([1] * dim)

    @classmethod
    def diagonal(cls, values) -> AnisotropyMatrix:
        values = list(values)
        return cls([[v if i == j else 0 for j in range(len(values))] for i, v in enumerate(values)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def quadratic_form(self) -> Polynomial:
        """``r_A² = rᵀ A⁻¹ r`` as a degree-2 polynomial."""
        d = self.dim
        terms: dict = {}
        for i in range(d):
            for j in range(d):
                e = [0] * d
                e[i] += 1
                e[j] += 1
                e = tuple(e)
                c = self.inverse[i][j]
                terms[e] = terms[e] + c if e in terms else c
        return Polynomial(terms, d)

    def operator(self) -> PdoSpec:
        """``Δ_A = Σ_ij A_ij ∂_i ∂_j``."""
        return PdoSpec.from_matrix(self.rows)

    def __eq__(self, other):
        if isinstance(other, AnisotropyMatrix):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"AnisotropyMatrix({[list(r) for r in self.rows]!r})"


def _as_matrix(A) -> AnisotropyMatrix:
    return A if isinstance(A, AnisotropyMatrix) else AnisotropyMatrix(A)


@dataclass(frozen=True)
class AnisotropicPoissonParams:
    A: AnisotropyMatrix
    tag: ClassVar[str] = "anisotropic-poisson"

    def __post_init__(self):
        object.__setattr__(self, "A", _as_matrix(self.A))


@dataclass(frozen=True)
class FactorizedAnisotropicParams:
    factors: tuple
    tag: ClassVar[str] = "factorized-anisotropic"

    def __post_init__(self):
        factors = tuple(_as_matrix(A) for A in self.factors)
        if not factors:
            raise SolverPreconditionError("at least one anisotropic factor is required")
        if len({A.dim for A in factors}) != 1:
            raise DimensionMismatchError("anisotropic factors have different dimensions")
        object.__setattr__(self, "factors", factors)


def solve_anisotropic_poisson(f: Polynomial, A) -> Polynomial:
    """A polynomial ``u`` with ``div(A∇u) = f`` for symmetric invertible ``A``."""
    A = _as_matrix(A)
    if A.dim != f.dim:
        raise DimensionMismatchError(f"matrix dimension {A.dim} != polynomial dimension {f.dim}")
    op = A.operator()
    r2 = A.quadratic_form()
    u = Polynomial.zero(f.dim)
    for n, h in homogeneous_decomposition(f):
        powers = []
        p = h
        while not p.is_zero():
            powers.append(p)
            p = apply_pdo(op, p)
        u = u + _radial_series(powers, poisson_coefficients(n, f.dim, len(powers) - 1), r2, 1)
    return u


def solve_factorized_anisotropic(f: Polynomial, factors) -> Polynomial:
    """``g`` with ``Δ_{A_k} ··· Δ_{A_1} g = f``, chaining anisotropic Poisson solves in order.

    Covers operators whose symbol factors into quadratic forms, e.g. the
    transversely isotropic elastostatic determinant; the displacement is then
    recovered by applying the caller's adjugate operator with
    :func:`~polysol.polycore.apply_pdo`.
    """
    params = FactorizedAnisotropicParams(tuple(factors))
    g = f
    for A in params.factors:
        g = solve_anisotropic_poisson(g, A)
    return g


def transversely_isotropic_factors(a1, a2, a3) -> list[AnisotropyMatrix]:
    """The three factors ``diag(a_i, a_i, 1)`` of a transversely isotropic medium."""
    return [AnisotropyMatrix.diagonal([a, a, 1]) for a in (a1, a2, a3)]
