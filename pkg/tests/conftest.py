import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from polysol import Polynomial, PolyVector


def random_rational(rng: random.Random, span: int = 9) -> Fraction:
    num = 0
    while num == 0:
        num = rng.randint(-span, span)
    return Fraction(num, rng.randint(1, span))


def random_exponent(rng: random.Random, dim: int, max_deg: int) -> tuple:
    total = rng.randint(0, max_deg)
    exp = [0] * dim
    for _ in range(total):
        exp[rng.randrange(dim)] += 1
    return tuple(exp)


def random_poly(rng: random.Random, dim: int, max_deg: int = 8, max_terms: int = 4) -> Polynomial:
    """Sparse random polynomial with rational coefficients and degree <= max_deg."""
    n = rng.randint(1, max_terms)
    terms = {random_exponent(rng, dim, max_deg): random_rational(rng) for _ in range(n)}
    return Polynomial(terms, dim)


def random_vector(rng, count, dim, max_deg=8, max_terms=3) -> PolyVector:
    return PolyVector(random_poly(rng, dim, max_deg, max_terms) for _ in range(count))


def random_spd(rng: random.Random, dim: int):
    """Symmetric positive-definite rational matrix M Mᵀ + I."""
    m = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(dim)] for _ in range(dim)]
    return [
        [sum(m[i][k] * m[j][k] for k in range(dim)) + (1 if i == j else 0) for j in range(dim)]
        for i in range(dim)
    ]


@pytest.fixture
def rng():
    return random.Random(20240611)


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def exponents(draw, dim, max_deg):
    exp, left = [], max_deg
    for _ in range(dim):
        e = draw(st.integers(0, left))
        exp.append(e)
        left -= e
    return tuple(exp)


@st.composite
def polynomials(draw, dim=None, max_deg=6, max_terms=5, coefficients=rationals):
    d = draw(st.sampled_from([2, 3])) if dim is None else dim
    terms = draw(st.dictionaries(exponents(d, max_deg), coefficients, max_size=max_terms))
    return Polynomial(terms, d)


# --- acceptance criterion reporting -------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = _CRITERIA_BY_NODE.get(report.nodeid)
    if crit is None:
        return
    prev = _CRITERIA.get(crit, True)
    _CRITERIA[crit] = prev and report.passed


_CRITERIA_BY_NODE = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA_BY_NODE[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), ok in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title}")
