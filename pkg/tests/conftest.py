import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from poissym.gbengine import Ideal, ModVec, SubModule
from poissym.poissoncore import PoissonStructure
from poissym.polyring import Poly, VarRing

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

PROBLEMS = Path(__file__).resolve().parents[1] / "src" / "poissym" / "problems"

R3 = VarRing(("x1", "x2", "x3"))
QP = VarRing(("q", "p"))


def cone_poisson(ring=R3):
    x1, x2, x3 = ring.gens()
    return PoissonStructure.from_upper(ring, {(0, 1): 4 * x3, (0, 2): 2 * x1, (1, 2): -2 * x2})


def cone_ideal(ring=R3):
    return Ideal(ring, (ring("x1*x2 - x3^2"),))


# fixed fields and matrices of the double cone, written out by hand
def cone_hamiltonians(ring=R3):
    z = ring.zero()
    x1, x2, x3 = ring.gens()
    return [ModVec([z, 4 * x3, 2 * x1]), ModVec([-4 * x3, z, -2 * x2]), ModVec([-2 * x1, 2 * x2, z])]


def cone_euler(ring=R3):
    x1, _, x3 = ring.gens()
    return ModVec([2 * x1, ring.zero(), x3])


CONE_GRAM = [
    ["0", "-4*x3", "-2*x1", "2*x1"],
    ["4*x3", "0", "2*x2", "0"],
    ["2*x1", "-2*x2", "0", "x3"],
    ["-2*x1", "0", "-x3", "0"],
]

# degree-1 differential of the resolution; columns are relations
CONE_RELATIONS = [
    ["x2", "0", "0", "-x3"],
    ["0", "x1", "x3", "0"],
    ["-2*x3", "0", "0", "2*x1"],
    ["-2*x3", "2*x3", "2*x2", "2*x1"],
]


def poly_matrix(rows, ring=R3):
    return [[ring(e) for e in row] for row in rows]


def column_module(rows, ring=R3):
    M = poly_matrix(rows, ring)
    cols = [ModVec([M[i][j] for i in range(len(M))]) for j in range(len(M[0]))]
    return SubModule(ring, len(M), tuple(cols))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        status, title = results[number]
        terminalreporter.write_line(f"ACCEPTANCE {number} {status}: {title}")


@pytest.fixture
def ring3():
    return R3


@pytest.fixture
def qp_ring():
    return QP


@pytest.fixture
def cone():
    return cone_ideal(), cone_poisson()


@pytest.fixture
def problems():
    return PROBLEMS


coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=3)


def exponents(nvars, max_degree):
    # a monomial is a multiset of at most max_degree variable indices
    return st.lists(st.integers(0, nvars - 1), max_size=max_degree).map(
        lambda idx: tuple(idx.count(i) for i in range(nvars)))


def polys(ring=R3, max_degree=4, max_terms=5):
    return st.dictionaries(exponents(ring.nvars, max_degree), coefficients, max_size=max_terms).map(
        lambda d: Poly(ring, d))


def nonzero_polys(ring=R3, max_degree=4, max_terms=5):
    return st.dictionaries(exponents(ring.nvars, max_degree), coefficients.filter(bool),
                           min_size=1, max_size=max_terms).map(lambda d: Poly(ring, d))


def int_polys(ring=R3, max_degree=3, max_terms=3):
    return st.dictionaries(exponents(ring.nvars, max_degree), st.integers(-3, 3).filter(bool),
                           min_size=1, max_size=max_terms).map(lambda d: Poly(ring, d))


def fields(ring=R3, max_degree=2, max_terms=2):
    return st.lists(polys(ring, max_degree, max_terms), min_size=ring.nvars, max_size=ring.nvars).map(ModVec)


def frac(x):
    return Fraction(x)
