"""Closed-form polynomial particular solutions of linear constant-coefficient PDEs."""

from .coeffrings import ComplexRational, Interval, Ring, promote
from .errors import DimensionMismatchError, PolysolError, RingError, SolverPreconditionError
from .helmfamily import solve_elastodynamics, solve_helmholtz, solve_maxwell, solve_zeroth_order
from .laplfamily import (
    AnisotropyMatrix,
    solve_anisotropic_poisson,
    solve_bilaplace,
    solve_elastostatics,
    solve_factorized_anisotropic,
    solve_poisson,
    solve_poisson_homogeneous,
    solve_stokes,
    transversely_isotropic_factors,
)
from .polycore import PdoSpec, Polynomial, PolyVector
from .verify import ResidualReport, residual

__version__ = "0.1.0"

__all__ = [
    "AnisotropyMatrix",
    "ComplexRational",
    "DimensionMismatchError",
    "Interval",
    "PdoSpec",
    "PolyVector",
    "Polynomial",
    "PolysolError",
    "ResidualReport",
    "Ring",
    "RingError",
    "SolverPreconditionError",
    "promote",
    "residual",
    "solve_anisotropic_poisson",
    "solve_bilaplace",
    "solve_elastodynamics",
    "solve_elastostatics",
    "solve_factorized_anisotropic",
    "solve_helmholtz",
    "solve_maxwell",
    "solve_poisson",
    "solve_poisson_homogeneous",
    "solve_stokes",
    "solve_zeroth_order",
    "transversely_isotropic_factors",
]
