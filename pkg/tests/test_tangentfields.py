import pytest
from hypothesis import given, settings

from conftest import QP, R3, cone_euler, cone_hamiltonians, cone_ideal, cone_poisson, fields, int_polys
from poissym.gbengine import Ideal, ModVec, SubModule, express_in_generators, module_equal
from poissym.poissoncore import PoissonStructure, apply_field
from poissym.polyring import GREVLEX, VarRing
from poissym.tangentfields import (
    DegenerateIdealError,
    NotPoissonIdealError,
    annihilator_fields,
    build_M,
    der_presentation,
    is_tangential,
    jacobian_ideal,
    primitive_field,
    tangent_derivations,
)

F = R3("x1*x2 - x3^2")


def test_jacobian_ideal_of_cone():
    J = jacobian_ideal(F)
    assert J.generators == (R3("x2"), R3("x1"), R3("-2*x3"))
    assert J.contains(F)


def test_build_M_shape_for_cone():
    M = build_M(cone_ideal())
    assert M == [[F, R3("x2"), R3("x1"), R3("-2*x3")]]
    with pytest.raises(DegenerateIdealError):
        build_M(Ideal(R3, ()))


def test_cone_tangent_derivations_generate_expected_module():
    I = cone_ideal()
    found = SubModule(R3, 3, tuple(tangent_derivations(I)))
    expected = SubModule(R3, 3, tuple(cone_hamiltonians() + [cone_euler()]))
    assert module_equal(found, expected, I)
    assert all(is_tangential(X, I) for X in found.generators)


def test_tangent_derivations_are_sorted_and_distinct():
    gens = tangent_derivations(cone_ideal())
    degrees = [g.degree() for g in gens]
    assert degrees == sorted(degrees)
    assert len(set(gens)) == len(gens)


def test_cusp_tangent_derivations():
    ring = VarRing(("x", "y"))
    I = Ideal(ring, (ring("y^2 - x^3"),))
    gens = tangent_derivations(I)
    assert all(is_tangential(X, I) for X in gens)
    # the Euler-type field 2x d_x + 3y d_y and the Hamiltonian 2y d_x + 3x^2 d_y are both tangent
    euler = ModVec([ring("2*x"), ring("3*y")])
    ham = ModVec([ring("2*y"), ring("3*x^2")])
    expected = SubModule(ring, 2, (euler, ham))
    assert module_equal(SubModule(ring, 2, tuple(gens)), expected, I)


def test_coordinate_hyperplane_tangent_derivations():
    I = Ideal(R3, (R3("x1"),))
    gens = SubModule(R3, 3, tuple(tangent_derivations(I)))
    expected = SubModule(R3, 3, (ModVec.unit(R3, 3, 1), ModVec.unit(R3, 3, 2),
                                  ModVec([R3("x1"), R3.zero(), R3.zero()])))
    assert module_equal(gens, expected)


def test_degenerate_ideals_raise():
    with pytest.raises(DegenerateIdealError):
        tangent_derivations(Ideal(R3, (R3.one(),)))
    with pytest.raises(DegenerateIdealError):
        annihilator_fields([R3("3")])
    with pytest.raises(DegenerateIdealError):
        annihilator_fields([])


def test_annihilator_fields_of_cone_relation():
    A = annihilator_fields([F])
    assert all(apply_field(X, F).is_zero() for X in A.generators)
    assert module_equal(A, SubModule(R3, 3, tuple(cone_hamiltonians())))


def test_annihilator_fields_of_two_functions():
    A = annihilator_fields([R3("x1"), R3("x2")])
    assert module_equal(A, SubModule(R3, 3, (ModVec.unit(R3, 3, 2),)))


def test_primitive_field_examples():
    v = ModVec([R3("4*x1"), R3("-6*x3")])
    assert primitive_field(v) == ModVec([R3("-2*x1"), R3("3*x3")])
    half = ModVec([R3("1/2*x1"), R3("1/3")])
    assert primitive_field(half) == ModVec([R3("3*x1"), R3("2")])
    z = ModVec.zero(R3, 2)
    assert primitive_field(z) == z


def test_cone_presentation():
    pres = der_presentation(cone_ideal(), cone_poisson())
    assert list(pres.generators) == cone_hamiltonians() + [cone_euler()]
    assert pres.hamiltonian_indices() == [0, 1, 2]
    assert pres.extra_indices() == [3]
    assert [str(lab) for lab in pres.labels[:3]] == ["hamiltonian(x1)", "hamiltonian(x2)", "hamiltonian(x3)"]


def test_presentation_relations_annihilate_generators():
    pres = der_presentation(cone_ideal(), cone_poisson())
    I = pres.ideal
    for r in pres.relations.generators:
        combo = sum((X * c for X, c in zip(pres.generators, r.entries)), ModVec.zero(R3, 3))
        assert all(I.contains(e) for e in combo.entries)
    assert not pres.relations.is_zero()


def test_presentation_without_poisson_structure():
    pres = der_presentation(cone_ideal())
    assert all(lab.kind == "extra" for lab in pres.labels)
    expected = SubModule(R3, 3, tuple(cone_hamiltonians() + [cone_euler()]))
    assert module_equal(SubModule(R3, 3, pres.generators), expected, cone_ideal())


def test_free_case_presentation():
    pi = PoissonStructure.canonical(QP)
    pres = der_presentation(Ideal(QP, ()), pi)
    assert pres.size == 2
    assert pres.extra_indices() == []
    assert pres.relations.is_zero()


def test_free_case_without_poisson_uses_unit_fields():
    pres = der_presentation(Ideal(QP, ()))
    assert list(pres.generators) == [ModVec.unit(QP, 2, 0), ModVec.unit(QP, 2, 1)]


def test_non_poisson_ideal_is_refused():
    with pytest.raises(NotPoissonIdealError):
        der_presentation(Ideal(R3, (R3("x1"),)), cone_poisson())


def test_bracket_coefficients_of_presentation():
    pres = der_presentation(cone_ideal(), cone_poisson())
    # [H1, X4] = -H1
    c = pres.bracket_coefficients(0, 3)
    combo = sum((X * k for X, k in zip(pres.generators, c)), ModVec.zero(R3, 3))
    assert all(pres.ideal.contains(e) for e in (combo + pres.generators[0]).entries)


@settings(max_examples=30)
@given(int_polys(max_degree=3, max_terms=3).filter(lambda f: not f.is_constant()))
def test_tangent_derivations_are_sound(f):
    I = Ideal(R3, (f,))
    for X in tangent_derivations(I):
        assert I.contains(apply_field(X, f))


@settings(max_examples=80)
@given(fields())
def test_primitive_field_is_idempotent_and_associate(X):
    P = primitive_field(X)
    assert primitive_field(P) == P
    if not X.is_zero():
        ratios = {(a * b.leading_term(GREVLEX)[1] - b * a.leading_term(GREVLEX)[1]).is_zero()
                  for a, b in zip(P.entries, X.entries) if not b.is_zero()}
        assert ratios == {True}


@settings(max_examples=30)
@given(fields(max_degree=2, max_terms=2))
def test_tangent_fields_contain_every_tangent_sample(X):
    # X * f is always tangent to (f); it must lie in the computed module
    I = cone_ideal()
    Y = X * F
    gens = tangent_derivations(I)
    assert express_in_generators(Y, gens, Ideal(R3, ())) is not None
