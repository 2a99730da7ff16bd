import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import polynomials, random_rational, random_vector
from polysol import (
    ComplexRational,
    DimensionMismatchError,
    Interval,
    PdoSpec,
    Polynomial,
    PolyVector,
    SolverPreconditionError,
    residual,
    solve_elastodynamics,
    solve_helmholtz,
    solve_maxwell,
    solve_zeroth_order,
)
from polysol.helmfamily import ElastodynamicsParams, HelmholtzParams, MaxwellParams, ZerothOrderParams
from polysol.polycore import divergence

F = Fraction
i = ComplexRational(0, 1)


def P(terms, dim=None):
    return Polynomial(terms, dim)


# --- Helmholtz ---------------------------------------------------------------


def test_helmholtz_constant():
    assert solve_helmholtz(P({(0, 0): 1}), 1) == P({(0, 0): 1})


def test_helmholtz_x_squared():
    # Δu + u = x² has the polynomial solution x² - 2
    u = solve_helmholtz(P({(2, 0): 1}), 1)
    assert u == P({(2, 0): 1, (0, 0): -2})
    assert residual(HelmholtzParams(1), u, P({(2, 0): 1})).all_zero


def test_helmholtz_integer_data_is_exact():
    u = solve_helmholtz(P({(2, 3, 1): 1}), 2)
    assert all(isinstance(c, Fraction) for c in u.terms.values())


def test_helmholtz_zero_rhs():
    assert solve_helmholtz(Polynomial.zero(3), 2).is_zero()


@pytest.mark.parametrize("k", [0, 0.0, Interval(-0.5, 0.5)])
def test_helmholtz_vanishing_wavenumber(k):
    with pytest.raises(SolverPreconditionError, match="zeroth-order term vanishes; use Poisson solver"):
        solve_helmholtz(P({(1, 0): 1}), k)


def test_helmholtz_complex_wavenumber():
    k = ComplexRational(1, 1)
    f = P({(2, 1): 1, (0, 3): 2})
    u = solve_helmholtz(f, k)
    assert residual(HelmholtzParams(k), u, f).all_zero


@settings(max_examples=50, deadline=None)
@given(polynomials(max_deg=8))
def test_helmholtz_degree_and_residual(f):
    u = solve_helmholtz(f, F(3, 2))
    assert u.degree == f.degree
    assert residual(HelmholtzParams(F(3, 2)), u, f).all_zero


def test_helmholtz_double_residual_within_tolerance():
    f = P({(3, 2, 1): 0.7, (1, 1, 0): -1.3})
    u = solve_helmholtz(f, 0.9)
    assert residual(HelmholtzParams(0.9), u, f).passed()


# --- zeroth order ------------------------------------------------------------


def test_advection_example():
    # (∂x + 1)u = x² is solved by x² - 2x + 2
    op = PdoSpec(P({(1,): 1}))
    u = solve_zeroth_order(P({(2,): 1}), 1, op)
    assert u == P({(2,): 1, (1,): -2, (0,): 2})


def test_zeroth_order_zero_rhs():
    op = PdoSpec.laplacian(2)
    assert solve_zeroth_order(Polynomial.zero(2), 3, op).is_zero()


def test_zeroth_order_rejects_constant_term():
    with pytest.raises(SolverPreconditionError):
        solve_zeroth_order(P({(1, 0): 1}), 1, PdoSpec(P({(0, 0): 1, (2, 0): 1})))


def test_zeroth_order_rejects_zero_alpha():
    with pytest.raises(SolverPreconditionError):
        solve_zeroth_order(P({(1, 0): 1}), 0, PdoSpec.laplacian(2))


def test_zeroth_order_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        solve_zeroth_order(P({(1, 0): 1}), 1, PdoSpec.laplacian(3))


def test_zeroth_order_random_operators():
    rng = random.Random(7)
    for _ in range(30):
        d = rng.choice((2, 3))
        op = PdoSpec(P({tuple(rng.randint(0, 2) for _ in range(d - 1)) + (1,): random_rational(rng)}, d))
        f = P({tuple(rng.randint(0, 3) for _ in range(d)): random_rational(rng)}, d)
        alpha = random_rational(rng)
        u = solve_zeroth_order(f, alpha, op)
        assert residual(ZerothOrderParams(alpha, op), u, f).all_zero


# --- elastodynamics ----------------------------------------------------------


def test_elastodynamics_zero_force():
    u = solve_elastodynamics(PolyVector.zero(2, 2), rho=1, mu=1, nu=F(1, 4), omega=1)
    assert u.is_zero()


def test_elastodynamics_constant_force():
    # a constant field has no derivatives, so k₂²u = f with k₂² = ω²ρ/μ = 1
    f = PolyVector([P({(0, 0): 1}), Polynomial.zero(2)])
    u = solve_elastodynamics(f, rho=1, mu=1, nu=F(1, 4), omega=1)
    assert u == f
    params = ElastodynamicsParams(1, 1, F(1, 4), 1)
    assert residual(params, u, f).all_zero


def test_elastodynamics_random_p6():
    rng = random.Random(11)
    for _ in range(20):
        f = random_vector(rng, 3, 3, max_deg=6, max_terms=3)
        kw = dict(rho=F(3, 2), mu=F(2, 3), nu=F(1, 3), omega=F(5, 4))
        u = solve_elastodynamics(f, **kw)
        assert residual(ElastodynamicsParams(**kw), u, f).all_zero


def test_elastodynamics_wavenumbers():
    p = ElastodynamicsParams(rho=2, mu=1, nu=F(1, 4), omega=3)
    assert p.k2_squared == 18
    assert p.k1_squared == F(9 * 2 * F(1, 2), 2 * F(3, 4))


@pytest.mark.parametrize(
    "kw",
    [
        dict(rho=1, mu=1, nu=F(1, 2), omega=1),
        dict(rho=1, mu=1, nu=0, omega=1),
        dict(rho=1, mu=-1, nu=F(1, 4), omega=1),
        dict(rho=0, mu=1, nu=F(1, 4), omega=1),
        dict(rho=1, mu=1, nu=F(1, 4), omega=0),
    ],
)
def test_elastodynamics_invalid_parameters(kw):
    with pytest.raises(SolverPreconditionError):
        solve_elastodynamics(PolyVector([P({(1, 0): 1}), P({(0, 1): 1})]), **kw)


def test_elastodynamics_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        solve_elastodynamics(PolyVector([P({(1, 0): 1})] * 3), rho=1, mu=1, nu=F(1, 4), omega=1)


# --- Maxwell -----------------------------------------------------------------

MAXWELL_J = PolyVector([P({(2, 1, 0): 1}), P({(1, 0, 0): 1}), P({(0, 0, 0): 1})])


def test_maxwell_double_golden():
    J = MAXWELL_J.map(lambda c: c.map_coefficients(float))
    E, H = solve_maxwell(J, mu=2.0)
    assert dict(E[0].terms) == {(2, 1, 0): -1j}
    assert dict(E[1].terms) == {(1, 0, 0): -2j}
    assert dict(E[2].terms) == {(0, 0, 0): -1j}
    assert H[0].is_zero() and H[1].is_zero()
    assert dict(H[2].terms) == {(0, 0, 0): -1.0, (2, 0, 0): 0.5}


def test_maxwell_complex_rational_golden():
    E, H = solve_maxwell(MAXWELL_J, mu=2)
    assert [dict(c.terms) for c in E] == [{(2, 1, 0): -i}, {(1, 0, 0): -2 * i}, {(0, 0, 0): -i}]
    assert dict(H[2].terms) == {(0, 0, 0): -1, (2, 0, 0): F(1, 2)}


def test_maxwell_intermediate_curl():
    # H = curl(A)/μ with A = (-x²y + y, -x, -1) up to the factor μ
    from polysol.polycore import curl
    A = PolyVector([P({(2, 1, 0): -1, (0, 1, 0): 1}), P({(1, 0, 0): -1}), P({(0, 0, 0): -1})])
    assert curl(A) == PolyVector([Polynomial.zero(3), Polynomial.zero(3), P({(2, 0, 0): 1, (0, 0, 0): -2})])


def test_maxwell_zero_source():
    E, H = solve_maxwell(PolyVector.zero(3, 3))
    assert E.is_zero() and H.is_zero()


def test_maxwell_supplied_charge_must_conserve():
    rho = P({(1, 1, 0): -2 * i})
    E, H = solve_maxwell(MAXWELL_J, mu=2, rho=rho)
    assert residual(MaxwellParams(2), (E, H), (MAXWELL_J, rho)).all_zero
    with pytest.raises(SolverPreconditionError, match="source not charge-conserving"):
        solve_maxwell(MAXWELL_J, mu=2, rho=P({(1, 1, 0): 2 * i}))


def test_maxwell_rejects_vanishing_wavenumber():
    with pytest.raises(SolverPreconditionError):
        solve_maxwell(MAXWELL_J, omega=0)


def test_maxwell_requires_3d():
    with pytest.raises(DimensionMismatchError):
        solve_maxwell(PolyVector([P({(1, 0): 1}), P({(0, 1): 1})]))


def test_maxwell_potentials_satisfy_gauge():
    rng = random.Random(3)
    for _ in range(20):
        J = random_vector(rng, 3, 3, max_deg=5)
        kw = dict(mu=F(3, 2), eps=F(1, 3), omega=F(2))
        E, H, A, phi = solve_maxwell(J, return_potentials=True, **kw)
        report = residual(MaxwellParams(**kw), (E, H, A, phi), J)
        assert report.all_zero
        assert "lorenz_gauge" in report.constraint_residuals
        assert divergence(A) == phi * (i * 2 * F(1, 3) * F(3, 2))
