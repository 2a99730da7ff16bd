"""Residual oracles: apply each forward operator to a candidate solution.

Everything here is built from :func:`~polysol.polycore.partial_derivative`
and polynomial arithmetic only, so the checks share no code path with the
solvers they certify.

Floating-point data is lifted to the exact rational value of each double
before the operator is applied and the residual is rounded once at the end.
The oracle therefore adds no rounding of its own: a residual reported as zero
means the double-precision solution is exact, and a one-ulp change to any
coefficient shows up.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .coeffrings import (
    ComplexRational,
    Interval,
    common_ring,
    imaginary_unit,
    magnitude,
    reciprocal,
    ring_of,
)
from .errors import DimensionMismatchError
from .helmfamily import ElastodynamicsParams, HelmholtzParams, MaxwellParams, ZerothOrderParams
from .laplfamily import (
    AnisotropicPoissonParams,
    BilaplaceParams,
    ElastostaticsParams,
    AnisotropyMatrix,
    FactorizedAnisotropicParams,
    PoissonParams,
    StokesParams,
)
from .polycore import PdoSpec, Polynomial, PolyVector, partial_derivative

__all__ = ["DEFAULT_REL_TOL", "ResidualReport", "residual", "validate_maxwell_source"]

#: Relative tolerance for double-precision residuals, scaled by the largest rhs coefficient.
DEFAULT_REL_TOL = 1e-13


def _coefficients(obj):
    if isinstance(obj, Polynomial):
        yield from obj.terms.values()
    else:
        for c in obj:
            yield from _coefficients(c)


def _is_zero(obj) -> bool:
    if isinstance(obj, Polynomial):
        return obj.is_zero()
    return all(_is_zero(c) for c in obj)


@dataclass(frozen=True)
class ResidualReport:
    """Outcome of a residual check.

    ``residual`` is ``operator(solution) - rhs`` as a full polynomial (or
    vector), so a failure can be inspected term by term.
    """

    residual: Polynomial | PolyVector
    constraint_residuals: dict = field(default_factory=dict)
    rhs_scale: float = 0.0

    @property
    def exact_zero(self) -> bool:
        return _is_zero(self.residual)

    @property
    def constraints_zero(self) -> bool:
        return all(_is_zero(r) for r in self.constraint_residuals.values())

    @property
    def all_zero(self) -> bool:
        return self.exact_zero and self.constraints_zero

    def _all_coefficients(self):
        yield from _coefficients(self.residual)
        for r in self.constraint_residuals.values():
            yield from _coefficients(r)

    @property
    def max_coeff_magnitude(self) -> float:
        return max((magnitude(c) for c in self._all_coefficients()), default=0.0)

    def contains_zero(self) -> bool:
        """Every residual coefficient could be zero (meaningful for interval data)."""
        return all(
            c.contains_zero() if isinstance(c, Interval) else c == 0
            for c in self._all_coefficients()
        )

    def passed(self, rel_tol: float = DEFAULT_REL_TOL) -> bool:
        """Exact data must give a zero residual, intervals must contain zero,
        and floating data must stay within ``rel_tol`` times the rhs scale."""
        coeffs = list(self._all_coefficients())
        if not coeffs:
            return True
        ring = common_ring(*(ring_of(c) for c in coeffs))
        if ring.is_exact:
            return False
        if any(isinstance(c, Interval) for c in coeffs):
            return self.contains_zero()
        return self.max_coeff_magnitude <= rel_tol * self.rhs_scale


# ---------------------------------------------------------------------------
# operators rebuilt from partial derivatives


def _lap(p: Polynomial) -> Polynomial:
    out = Polynomial.zero(p.dim)
    for i in range(p.dim):
        out = out + partial_derivative(p, i, 2)
    return out


def _grad(p: Polynomial) -> PolyVector:
    return PolyVector(partial_derivative(p, i) for i in range(p.dim))


def _div(v: PolyVector) -> Polynomial:
    out = Polynomial.zero(v.dim)
    for i, c in enumerate(v):
        out = out + partial_derivative(c, i)
    return out


def _rot(v: PolyVector) -> PolyVector:
    d = partial_derivative
    return PolyVector([
        d(v[2], 1) - d(v[1], 2),
        d(v[0], 2) - d(v[2], 0),
        d(v[1], 0) - d(v[0], 1),
    ])


def _symbol_operator(symbol: Polynomial, p: Polynomial) -> Polynomial:
    out = Polynomial.zero(p.dim)
    for exp, c in symbol.terms.items():
        q = p
        for axis, k in enumerate(exp):
            if k:
                q = partial_derivative(q, axis, k)
        out = out + q * c
    return out


def _matrix_operator(rows, p: Polynomial) -> Polynomial:
    out = Polynomial.zero(p.dim)
    for i, row in enumerate(rows):
        for j, a in enumerate(row):
            out = out + partial_derivative(partial_derivative(p, i), j) * a
    return out


# ---------------------------------------------------------------------------
# error-free evaluation of floating data


class _Lifter:
    """Replace doubles by their exact rational values, remembering that it did."""

    def __init__(self):
        self.lifted = False

    def scalar(self, c):
        if isinstance(c, float) and math.isfinite(c):
            self.lifted = True
            return Fraction(c)
        if isinstance(c, complex) and math.isfinite(c.real) and math.isfinite(c.imag):
            self.lifted = True
            return ComplexRational(Fraction(c.real), Fraction(c.imag))
        return c

    def __call__(self, obj):
        if isinstance(obj, Polynomial):
            return obj.map_coefficients(self.scalar)
        if isinstance(obj, PolyVector):
            return obj.map(self)
        if isinstance(obj, PdoSpec):
            return PdoSpec(self(obj.symbol))
        if isinstance(obj, AnisotropyMatrix):
            return AnisotropyMatrix([[self.scalar(a) for a in row] for row in obj.rows])
        if isinstance(obj, (tuple, list)):
            return type(obj)(self(o) for o in obj)
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            values = {f.name: self(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
            return dataclasses.replace(obj, **values)
        return self.scalar(obj)


def _round(c):
    if isinstance(c, Fraction):
        return float(c)
    if isinstance(c, ComplexRational):
        return complex(float(c.real), float(c.imag))
    return c


def _round_all(obj):
    if isinstance(obj, Polynomial):
        return obj.map_coefficients(_round)
    return PolyVector(_round_all(c) for c in obj)


def _vec(obj) -> PolyVector:
    return obj if isinstance(obj, PolyVector) else PolyVector(obj)


def _require(cond: bool, msg: str):
    if not cond:
        raise DimensionMismatchError(msg)


def _scale(*objs) -> float:
    return max((magnitude(c) for o in objs for c in _coefficients(o)), default=0.0)


def _maxwell_unit(*objs):
    ring = common_ring(*(ring_of(c) for o in objs for c in _coefficients(o)))
    return imaginary_unit(ring)


def _maxwell(pde: MaxwellParams, solution, rhs) -> ResidualReport:
    if isinstance(rhs, PolyVector) or isinstance(rhs[0], Polynomial) and len(rhs) == 3:
        J, rho = _vec(rhs), None
    else:
        J, rho = _vec(rhs[0]), rhs[1]
    _require(len(J) == 3 and J.dim == 3, "Maxwell sources are 3-component fields in 3D")
    E, H = _vec(solution[0]), _vec(solution[1])
    potentials = solution[2:] if len(solution) == 4 else None
    i = _maxwell_unit(J, E, H, *([rho] if rho is not None else []))
    iw = i * pde.omega
    constraints = {}
    if rho is None:
        rho = _div(J) * reciprocal(iw)
    else:
        constraints["charge_conservation"] = _div(J) - rho * iw
    ampere = E * (iw * pde.eps) + _rot(H) - J
    constraints["faraday"] = _rot(E) - H * (iw * pde.mu)
    constraints["gauss_e"] = _div(E) * pde.eps - rho
    constraints["gauss_h"] = _div(H) * pde.mu
    if potentials is not None:
        A, phi = _vec(potentials[0]), potentials[1]
        constraints["lorenz_gauge"] = _div(A) - phi * (iw * pde.eps * pde.mu)
    return ResidualReport(ampere, constraints, _scale(J, [rho]))


def residual(pde, solution, rhs) -> ResidualReport:
    """Apply the forward operator of ``pde`` to ``solution`` and subtract ``rhs``.

    Shapes per family: scalar problems take polynomials; elastodynamics and
    elastostatics take vectors; Stokes takes ``(u, p)``; Maxwell takes
    ``(E, H)`` or ``(E, H, A, φ)`` as solution and ``J`` or ``(J, ρ)`` as rhs,
    reporting all four field equations plus the Lorenz gauge when the
    potentials are given.
    """
    lift = _Lifter()
    pde, solution, rhs = lift(pde), lift(solution), lift(rhs)
    report = _residual(pde, solution, rhs)
    if not lift.lifted:
        return report
    return ResidualReport(
        _round_all(report.residual),
        {k: _round_all(v) for k, v in report.constraint_residuals.items()},
        report.rhs_scale,
    )


def _residual(pde, solution, rhs) -> ResidualReport:
    if isinstance(pde, MaxwellParams):
        return _maxwell(pde, solution, rhs)

    if isinstance(pde, (ElastodynamicsParams, ElastostaticsParams, StokesParams)):
        f = _vec(rhs)
        _require(len(f) == f.dim, "vector problems need one component per dimension")
        if isinstance(pde, StokesParams):
            u, p = _vec(solution[0]), solution[1]
            _require(len(u) == len(f) and p.dim == f.dim, "Stokes solution shape mismatch")
            res = PolyVector(_lap(ui) * pde.mu - gp - fi for ui, gp, fi in zip(u, _grad(p), f))
            return ResidualReport(res, {"div_u": _div(u)}, _scale(f))
        u = _vec(solution)
        _require(len(u) == len(f) and u.dim == f.dim, "solution shape mismatch")
        lam = reciprocal(1 - 2 * pde.nu)
        gd = _grad(_div(u))
        if isinstance(pde, ElastodynamicsParams):
            k2s = pde.k2_squared
            res = PolyVector(_lap(ui) + g * lam + ui * k2s - fi for ui, g, fi in zip(u, gd, f))
        else:
            res = PolyVector(_lap(ui) + g * lam - fi for ui, g, fi in zip(u, gd, f))
        return ResidualReport(res, {}, _scale(f))

    u, f = solution, rhs
    _require(isinstance(u, Polynomial) and isinstance(f, Polynomial), "scalar problems take polynomials")
    _require(u.dim == f.dim, f"solution dimension {u.dim} != rhs dimension {f.dim}")
    if isinstance(pde, HelmholtzParams):
        lhs = _lap(u) + u * pde.k_squared
    elif isinstance(pde, ZerothOrderParams):
        lhs = _symbol_operator(pde.op.symbol, u) + u * pde.alpha
    elif isinstance(pde, PoissonParams):
        lhs = _lap(u)
    elif isinstance(pde, BilaplaceParams):
        lhs = _lap(_lap(u))
    elif isinstance(pde, AnisotropicPoissonParams):
        lhs = _matrix_operator(pde.A.rows, u)
    elif isinstance(pde, FactorizedAnisotropicParams):
        lhs = u
        for A in pde.factors:
            lhs = _matrix_operator(A.rows, lhs)
    else:
        raise TypeError(f"unknown PDE specification {pde!r}")
    return ResidualReport(lhs - f, {}, _scale(f))


def validate_maxwell_source(J, rho: Polynomial, pde: MaxwellParams, rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """True iff ``div J - iωρ`` vanishes (exactly, or within ``rel_tol`` for floating data)."""
    J = _vec(J)
    _require(len(J) == 3 and J.dim == 3 and rho.dim == 3, "Maxwell sources live in 3D")
    iw = _maxwell_unit(J, [rho], [Polynomial.constant(pde.omega, 3)]) * pde.omega
    report = ResidualReport(_div(J) - rho * iw, {}, _scale(J, [rho]))
    return report.exact_zero or report.passed(rel_tol)
