"""Polynomial solutions for operators with an invertible zeroth-order term.

All solvers here reduce to the finite Neumann series

    (α + B)^{-1} f = Σ_j (-1)^j α^{-j-1} B^j f,

which terminates because ``B`` lowers the degree of every polynomial it acts
on.  The vector problems (elastodynamics, Maxwell) are handled through
potential representations whose potentials solve scalar Helmholtz problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar

from .coeffrings import (
    common_ring,
    imaginary_unit,
    invertible,
    is_positive,
    magnitude,
    reciprocal,
    ring_of,
)
from .errors import DimensionMismatchError, SolverPreconditionError
from .polycore import (
    PdoSpec,
    Polynomial,
    PolyVector,
    apply_pdo,
    curl,
    divergence,
    gradient,
    laplacian,
    laplacian_powers,
)

__all__ = [
    "ElastodynamicsParams",
    "HelmholtzParams",
    "MaxwellParams",
    "ZerothOrderParams",
    "solve_elastodynamics",
    "solve_helmholtz",
    "solve_maxwell",
    "solve_zeroth_order",
]

_VANISHING = "zeroth-order term vanishes; use Poisson solver"


def _require_positive(name, value):
    if is_positive(value) is False:
        raise SolverPreconditionError(f"{name} must be positive, got {value}")


def _check_poisson_ratio(nu):
    inside = (is_positive(nu), is_positive(Fraction(1, 2) - nu))
    if False in inside:
        raise SolverPreconditionError(f"Poisson ratio must lie in (0, 1/2), got {nu}")
    if not invertible(1 - 2 * nu):
        raise SolverPreconditionError("Poisson ratio 1/2 makes the operator singular")


@dataclass(frozen=True)
class HelmholtzParams:
    """``(Δ + k²) u = f`` with wavenumber ``k``."""

    k: object
    tag: ClassVar[str] = "helmholtz"

    def __post_init__(self):
        if not invertible(self.k_squared):
            raise SolverPreconditionError(_VANISHING)

    @property
    def k_squared(self):
        return self.k**2


@dataclass(frozen=True)
class ZerothOrderParams:
    """``(B(∂) + α) u = f`` where ``B`` has no constant term."""

    alpha: object
    op: PdoSpec
    tag: ClassVar[str] = "zeroth-order"

    def __post_init__(self):
        if not invertible(self.alpha):
            raise SolverPreconditionError("alpha must be nonzero")
        if self.op.constant_term != 0:
            raise SolverPreconditionError("the operator B must have no zeroth-order term")


@dataclass(frozen=True)
class ElastodynamicsParams:
    """Isotropic time-harmonic elasticity: density, shear modulus, Poisson ratio, frequency."""

    rho: object
    mu: object
    nu: object
    omega: object
    tag: ClassVar[str] = "elastodynamics"

    def __post_init__(self):
        for name in ("rho", "mu", "omega"):
            _require_positive(name, getattr(self, name))
            if not invertible(getattr(self, name)):
                raise SolverPreconditionError(f"{name} must be nonzero")
        _check_poisson_ratio(self.nu)

    @property
    def k1_squared(self):
        """Compressional wavenumber squared, ``ω²ρ(1-2ν) / (2μ(1-ν))``."""
        nu = self.nu
        return self.omega**2 * self.rho * (1 - 2 * nu) * reciprocal(2 * self.mu * (1 - nu))

    @property
    def k2_squared(self):
        """Shear wavenumber squared, ``ω²ρ/μ``."""
        return self.omega**2 * self.rho * reciprocal(self.mu)


@dataclass(frozen=True)
class MaxwellParams:
    """Homogeneous isotropic medium; ``ε`` and ``ω`` default to one."""

    mu: object = 1
    eps: object = 1
    omega: object = 1
    tag: ClassVar[str] = "maxwell"

    def __post_init__(self):
        for name in ("mu", "eps", "omega"):
            if not invertible(getattr(self, name)):
                raise SolverPreconditionError(f"{name} must be nonzero")
        if not invertible(self.k_squared):
            raise SolverPreconditionError(_VANISHING)

    @property
    def k_squared(self):
        return self.omega**2 * self.eps * self.mu


def _as_vector(f) -> PolyVector:
    return f if isinstance(f, PolyVector) else PolyVector(f)


def _neumann(powers: list[Polynomial], inv, dim: int) -> Polynomial:
    """``Σ_j (-inv)^j · inv · powers[j]``."""
    u = Polynomial.zero(dim)
    factor = inv
    for j, p in enumerate(powers):
        if j:
            factor = -factor * inv
        u = u + p * factor
    return u


def helmholtz_k2(f: Polynomial, k2) -> Polynomial:
    """Solve ``(Δ + k2) u = f`` given the squared wavenumber directly."""
    if not invertible(k2):
        raise SolverPreconditionError(_VANISHING)
    return _neumann(laplacian_powers(f), reciprocal(k2), f.dim)


def solve_helmholtz(f: Polynomial, k) -> Polynomial:
    """Unique polynomial ``u`` with ``Δu + k²u = f``.

    ``deg u == deg f``.  Integer data yields exact rational coefficients; pass
    ``k=2.0`` for double precision or an :class:`~polysol.coeffrings.Interval`
    for rigorous enclosures.
    """
    params = HelmholtzParams(k)
    return helmholtz_k2(f, params.k_squared)


def solve_zeroth_order(f: Polynomial, alpha, op: PdoSpec) -> Polynomial:
    """Unique polynomial ``u`` with ``B(∂)u + αu = f``."""
    ZerothOrderParams(alpha, op)
    if op.dim != f.dim:
        raise DimensionMismatchError(f"operator dimension {op.dim} != polynomial dimension {f.dim}")
    powers = []
    p = f
    # each application drops the degree by at least one
    for _ in range(int(max(f.degree, -1)) + 2):
        if p.is_zero():
            break
        powers.append(p)
        p = apply_pdo(op, p)
    else:
        raise RuntimeError("operator series failed to terminate")
    return _neumann(powers, reciprocal(alpha), f.dim)


def _helmholtz_vector(f: PolyVector, k2) -> PolyVector:
    return f.map(lambda c: helmholtz_k2(c, k2))


def solve_elastodynamics(f, *, rho, mu, nu, omega) -> PolyVector:
    """Displacement ``u`` with ``Δu + (1-2ν)^{-1}∇(div u) + k₂²u = f``.

    The Somigliana potential ``g`` solves two Helmholtz problems in sequence
    (``k₁`` then ``k₂``) and ``u = 2(1-ν)(Δ + k₁²)g - ∇(div g)``.
    """
    f = _as_vector(f)
    if len(f) != f.dim:
        raise DimensionMismatchError("elastodynamics needs one force component per dimension")
    params = ElastodynamicsParams(rho, mu, nu, omega)
    k1s, k2s = params.k1_squared, params.k2_squared
    two_one_minus_nu = 2 * (1 - nu)
    q = _helmholtz_vector(f * reciprocal(two_one_minus_nu), k1s)
    g = _helmholtz_vector(q, k2s)
    grad_div = gradient(divergence(g))
    return PolyVector(
        (laplacian(gi) + gi * k1s) * two_one_minus_nu - gd for gi, gd in zip(g, grad_div)
    )


def _charge_conserving(J: PolyVector, rho: Polynomial, iw, rel_tol: float) -> bool:
    r = divergence(J) - rho * iw
    if r.is_zero():
        return True
    if rel_tol == 0:
        return False
    scale = max((magnitude(c) for c in divergence(J).terms.values()), default=0.0)
    scale = max(scale, max((magnitude(c) for c in rho.terms.values()), default=0.0))
    return max(magnitude(c) for c in r.terms.values()) <= rel_tol * max(scale, 1.0)


def solve_maxwell(J, *, mu=1, eps=1, omega=1, rho=None, return_potentials=False):
    """Time-harmonic fields ``(E, H)`` radiated by the current ``J`` in 3D.

    The charge density defaults to ``div J / (iω)``; a supplied ``rho`` must
    satisfy ``div J - iωρ = 0``.  The Lorenz-gauged potentials solve
    ``(Δ + k²)A = -μJ`` and ``(Δ + k²)φ = -ρ/ε``, and the fields follow from
    ``E = iωA - ∇φ``, ``H = rot A / μ``.  With ``return_potentials`` the
    result is ``(E, H, A, φ)``.
    """
    J = _as_vector(J)
    if len(J) != 3 or J.dim != 3:
        raise DimensionMismatchError("Maxwell sources are 3-component fields in 3D")
    params = MaxwellParams(mu, eps, omega)
    values = [c for comp in J for c in comp.terms.values()] + [mu, eps, omega]
    if rho is not None:
        values += list(rho.terms.values())
    ring = common_ring(*(ring_of(v) for v in values))
    iw = imaginary_unit(ring) * omega
    if rho is None:
        rho = divergence(J) * reciprocal(iw)
    elif not _charge_conserving(J, rho, iw, 0 if ring.is_exact else 1e-13):
        raise SolverPreconditionError("source not charge-conserving")
    k2 = params.k_squared
    A = _helmholtz_vector(J * (-mu), k2)
    phi = helmholtz_k2(rho * (-reciprocal(eps)), k2)
    E = A * iw - gradient(phi)
    H = curl(A) * reciprocal(mu)
    if return_potentials:
        return E, H, A, phi
    return E, H
