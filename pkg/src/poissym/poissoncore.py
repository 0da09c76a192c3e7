"""Poisson brackets on polynomial rings, Poisson ideals and Hamiltonian fields.

Sign convention: ``{a, }`` is the derivation ``b -> {a, b}``, so the j-th
component of the Hamiltonian field of ``a`` is ``{a, x^j}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, NamedTuple, Optional, Sequence

from .gbengine import Ideal, ModVec, ideal_membership
from .polyring import Poly, VarRing, partial_derivative


class PoissonStructureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PoissonStructure:
    """Antisymmetric matrix ``pi[i][j] = {x^i, x^j}`` over ``ring``."""

    ring: VarRing
    pi: tuple

    def __post_init__(self):
        n = self.ring.nvars
        pi = tuple(tuple(row) for row in self.pi)
        if len(pi) != n or any(len(row) != n for row in pi):
            raise PoissonStructureError(f"Poisson matrix must be {n}x{n}")
        for i in range(n):
            if not pi[i][i].is_zero():
                raise PoissonStructureError(f"diagonal entry ({i}, {i}) is nonzero")
            for j in range(i + 1, n):
                if pi[i][j] != -pi[j][i]:
                    raise PoissonStructureError(f"entries ({i}, {j}) and ({j}, {i}) are not opposite")
        object.__setattr__(self, "pi", pi)

    @classmethod
    def from_upper(cls, ring: VarRing, entries: Mapping) -> "PoissonStructure":
        """Build from ``{(i, j): Poly}`` with i < j; missing entries are zero."""
        n = ring.nvars
        pi = [[ring.zero() for _ in range(n)] for _ in range(n)]
        for (i, j), v in entries.items():
            if not i < j:
                raise PoissonStructureError(f"upper-triangular entry expected, got ({i}, {j})")
            pi[i][j] = v
            pi[j][i] = -v
        return cls(ring, pi)

    @classmethod
    def canonical(cls, ring: VarRing) -> "PoissonStructure":
        """{q_i, p_i} = 1 for variables ordered (q_1..q_m, p_1..p_m)."""
        n = ring.nvars
        if n % 2:
            raise PoissonStructureError("canonical structure needs an even number of variables")
        m = n // 2
        return cls.from_upper(ring, {(i, i + m): ring.one() for i in range(m)})

    @property
    def n(self) -> int:
        return self.ring.nvars

    def __eq__(self, other):
        return isinstance(other, PoissonStructure) and self.ring == other.ring and self.pi == other.pi

    def __hash__(self):
        return hash((self.ring, self.pi))


def bracket(a: Poly, b: Poly, pi: PoissonStructure) -> Poly:
    """{a, b} = sum_ij pi^ij (da/dx^i)(db/dx^j)."""
    n = pi.n
    da = [partial_derivative(a, i) for i in range(n)]
    db = [partial_derivative(b, j) for j in range(n)]
    acc = pi.ring.zero()
    for i in range(n):
        if da[i].is_zero():
            continue
        for j in range(n):
            if db[j].is_zero() or pi.pi[i][j].is_zero():
                continue
            acc = acc + pi.pi[i][j] * da[i] * db[j]
    return acc


class JacobiResult(NamedTuple):
    ok: bool
    triple: Optional[tuple] = None
    residual: Optional[Poly] = None


def jacobiator(pi: PoissonStructure, i: int, j: int, k: int) -> Poly:
    """{x^i,{x^j,x^k}} + {x^j,{x^k,x^i}} + {x^k,{x^i,x^j}}."""
    P = pi.pi
    acc = pi.ring.zero()
    for l in range(pi.n):
        acc = acc + P[i][l] * partial_derivative(P[j][k], l)
        acc = acc + P[j][l] * partial_derivative(P[k][i], l)
        acc = acc + P[k][l] * partial_derivative(P[i][j], l)
    return acc


def jacobi_check(pi: PoissonStructure) -> JacobiResult:
    """Check the Jacobi identity on all coordinate triples i < j < k."""
    for i, j, k in combinations(range(pi.n), 3):
        r = jacobiator(pi, i, j, k)
        if not r.is_zero():
            return JacobiResult(False, (i, j, k), r)
    return JacobiResult(True)


@dataclass(frozen=True)
class PoissoffelWitness:
    """symbols[i][mu][nu] with {x^i, f_mu} = sum_nu symbols[i][mu][nu] f_nu.

    ``failures`` lists (i, mu) for which no witness exists.
    """

    symbols: tuple
    failures: tuple = ()

    def all_zero(self) -> bool:
        return all(z.is_zero() for row in self.symbols for zs in row if zs for z in zs)


def poisson_ideal_check(I: Ideal, pi: PoissonStructure):
    """Return (ok, PoissoffelWitness); ok iff {x^i, f_mu} lies in I for all i, mu."""
    ring = pi.ring
    gens = I.generators
    symbols = []
    failures = []
    for i in range(pi.n):
        row = []
        xi = ring.gen(i)
        for mu, f in enumerate(gens):
            member, coeffs = ideal_membership(bracket(xi, f, pi), I)
            if member:
                row.append(tuple(coeffs))
            else:
                row.append(None)
                failures.append((i, mu))
        symbols.append(tuple(row))
    return not failures, PoissoffelWitness(tuple(symbols), tuple(failures))


def hamiltonian_field(a: Poly, pi: PoissonStructure) -> ModVec:
    """The field {a, } with components {a, x^j}."""
    n = pi.n
    da = [partial_derivative(a, i) for i in range(n)]
    entries = []
    for j in range(n):
        acc = pi.ring.zero()
        for i in range(n):
            if not da[i].is_zero():
                acc = acc + pi.pi[i][j] * da[i]
        entries.append(acc)
    return ModVec(entries)


def apply_field(X: ModVec, a: Poly) -> Poly:
    """X(a) = sum_j X^j da/dx^j."""
    if X.rank != a.ring.nvars:
        raise ValueError("field rank does not match the number of variables")
    acc = a.ring.zero()
    for j, c in enumerate(X.entries):
        if not c.is_zero():
            acc = acc + c * partial_derivative(a, j)
    return acc


def lie_bracket(X: ModVec, Y: ModVec) -> ModVec:
    """Commutator [X, Y] with components X(Y^j) - Y(X^j)."""
    if X.rank != Y.rank:
        raise ValueError("rank mismatch")
    return ModVec([apply_field(X, y) - apply_field(Y, x) for x, y in zip(X.entries, Y.entries)])


def field_matrix(fields: Sequence[ModVec]) -> list:
    """n x g matrix whose columns are the given fields."""
    n = fields[0].rank
    return [[X.entries[i] for X in fields] for i in range(n)]
