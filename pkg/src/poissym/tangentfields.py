"""Derivations of quotient rings: Der_I(P), annihilator fields, presentations of Der(P/I)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Optional

from .gbengine import (
    Ideal,
    ModVec,
    SubModule,
    express_in_generators,
    kernel_over_quotient,
    matrix_kernel,
    normal_form,
    with_ideal,
)
from .poissoncore import (
    PoissonStructure,
    apply_field,
    field_matrix,
    hamiltonian_field,
    lie_bracket,
    poisson_ideal_check,
)
from .polyring import GREVLEX, Poly, partial_derivative


class DegenerateIdealError(ValueError):
    """Raised for ideals whose Jacobian data carries no information."""


class NotPoissonIdealError(ValueError):
    pass


@dataclass(frozen=True)
class Label:
    """Tag of a presentation generator: ``hamiltonian`` (with its function) or ``extra``."""

    kind: str
    function: Optional[Poly] = None

    def __str__(self):
        if self.kind == "hamiltonian":
            return f"hamiltonian({self.function})"
        return self.kind


EXTRA = Label("extra")


@dataclass(eq=False)
class DerPresentation:
    """Generators of Der_I(P) (mod I·Der(P)) and the relations among them over P/I."""

    ideal: Ideal
    generators: tuple
    relations: SubModule
    labels: tuple
    poisson: Optional[PoissonStructure] = None

    @property
    def ring(self):
        return self.ideal.ring

    @property
    def size(self) -> int:
        return len(self.generators)

    def hamiltonian_indices(self) -> list:
        return [i for i, lab in enumerate(self.labels) if lab.kind == "hamiltonian"]

    def extra_indices(self) -> list:
        return [i for i, lab in enumerate(self.labels) if lab.kind != "hamiltonian"]

    def reduce(self, f: Poly) -> Poly:
        return normal_form(f, self.ideal)

    @cached_property
    def _bracket_cache(self) -> dict:
        return {}

    def bracket_coefficients(self, i: int, j: int):
        """Coefficients c with [X_i, X_j] ≡ sum_k c_k X_k mod I·P^n, or None."""
        cache = self._bracket_cache
        if (i, j) not in cache:
            v = lie_bracket(self.generators[i], self.generators[j])
            coeffs = express_in_generators(v, self.generators, self.ideal)
            cache[(i, j)] = None if coeffs is None else tuple(coeffs)
        return cache[(i, j)]


def jacobian_ideal(f: Poly) -> Ideal:
    """Ideal of all partial derivatives of ``f``."""
    parts = tuple(partial_derivative(f, i) for i in range(f.ring.nvars))
    return Ideal(f.ring, tuple(p for p in parts if not p.is_zero()))


def build_M(I: Ideal) -> list:
    """Rows [f_1 .. f_k | df_r/dx^1 .. df_r/dx^n] for r = 1..k."""
    gens = I.nonzero_generators
    if not gens:
        raise DegenerateIdealError("the ideal has no nonzero generators")
    n = I.ring.nvars
    return [list(gens) + [partial_derivative(f, j) for j in range(n)] for f in gens]


def _sort_key(X: ModVec):
    return (X.degree(), X.canonical())


def _dedup_sorted(vectors) -> list:
    seen = set()
    out = []
    for v in vectors:
        if v.is_zero() or v in seen:
            continue
        seen.add(v)
        out.append(v)
    out.sort(key=_sort_key)
    return out


def tangent_derivations(I: Ideal) -> list:
    """Generators of Der_I(P) from the kernel of :func:`build_M`.

    Sorted by (degree, canonical string); zero vectors and duplicates removed.
    """
    gens = I.nonzero_generators
    if not gens:
        raise DegenerateIdealError("the ideal has no nonzero generators")
    for f in gens:
        if f.is_constant():
            raise DegenerateIdealError(f"constant generator {f} has an empty Jacobian")
    k = len(gens)
    K = matrix_kernel(build_M(I))
    return _dedup_sorted(primitive_field(ModVec(g.entries[k:])) for g in K.generators)


def annihilator_fields(fs) -> SubModule:
    """Fields X with X(f) = 0 for every f in ``fs``: the intersection of Syz(Jac f)."""
    fs = [f for f in fs if not f.is_zero()]
    if not fs:
        raise DegenerateIdealError("need at least one nonzero polynomial")
    ring = fs[0].ring
    n = ring.nvars
    # all constraints at once: X annihilates every f iff the stacked gradient matrix kills X
    M = [[partial_derivative(f, j) for j in range(n)] for f in fs]
    if all(e.is_zero() for row in M for e in row):
        raise DegenerateIdealError("all polynomials are constant")
    K = matrix_kernel(M)
    return SubModule(ring, n, tuple(_dedup_sorted(primitive_field(g) for g in K.generators)))


def _in_span(v: ModVec, span: list, I: Ideal) -> bool:
    if not span:
        return all(I.contains(e) for e in v.entries)
    return express_in_generators(v, span, I) is not None


def primitive_field(r: ModVec) -> ModVec:
    """Integer-primitive associate, positive leading coefficient under POT."""
    nonzero = [e for e in r.entries if not e.is_zero()]
    if not nonzero:
        return r
    num, den = 0, 0
    for e in nonzero:
        c = e.content()
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator) if den else c.denominator
    scale = Fraction(den, num)
    # POT: the leading entry is the last nonzero position
    if nonzero[-1].leading_term(GREVLEX)[1] < 0:
        scale = -scale
    return r * scale


def _normalize_extra(v: ModVec, span: list, I: Ideal) -> ModVec:
    """Canonical representative of v modulo span + I·P^n, made integer-primitive."""
    W = with_ideal(SubModule(v.ring, v.rank, tuple(span)), I)
    return primitive_field(normal_form(v, W) if W.generators else v)


def der_presentation(I: Ideal, pi: Optional[PoissonStructure] = None) -> DerPresentation:
    """Presentation of Der(P/I) on generators of Der_I(P).

    With a Poisson structure, the Hamiltonian fields of the coordinates come
    first and the remaining classes are filled greedily with computed
    generators, each reduced to a canonical representative modulo the span of
    the fields already chosen.
    """
    ring = I.ring
    n = ring.nvars
    if pi is not None:
        ok, witness = poisson_ideal_check(I, pi)
        if not ok:
            i, mu = witness.failures[0]
            raise NotPoissonIdealError(
                f"{{{ring.variables[i]}, {I.generators[mu]}}} is not in the ideal")
    if I.is_zero():
        computed = [ModVec.unit(ring, n, j) for j in range(n)]
    else:
        computed = tangent_derivations(I)

    chosen, labels = [], []
    if pi is not None:
        for i in range(n):
            xi = ring.gen(i)
            chosen.append(hamiltonian_field(xi, pi))
            labels.append(Label("hamiltonian", xi))
        extras = []
        for X in computed:
            if not _in_span(X, chosen + extras, I):
                extras.append(_normalize_extra(X, chosen + extras, I))
        chosen += extras
        labels += [EXTRA] * len(extras)
    else:
        for X in computed:
            if not _in_span(X, chosen, I):
                chosen.append(X)
                labels.append(EXTRA)

    relations = primitive_relations(kernel_over_quotient(field_matrix(chosen), I))
    return DerPresentation(I, tuple(chosen), relations, tuple(labels), pi)


def primitive_relations(K: SubModule) -> SubModule:
    """Same module with integer-primitive generators."""
    return SubModule(K.ring, K.rank, tuple(primitive_field(r) for r in K.generators))


def is_tangential(X: ModVec, I: Ideal) -> bool:
    """X(f) ∈ I for every generator f of I."""
    return all(I.contains(apply_field(X, f)) for f in I.nonzero_generators)
