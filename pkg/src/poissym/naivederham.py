"""Naive de Rham complex on a presentation of Der(P/I).

Cochains are stored by their values on tuples of presentation generators and
extended A-multilinearly.  Brackets of generators are rewritten in the
generators through module membership; those lifts are not unique, which is
harmless once :func:`check_descends` has passed (the form then kills the
relation module).  Run descent before closedness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .gbengine import (
    ModVec,
    SubModule,
    express_in_generators,
    kernel_over_quotient,
    normal_form,
    with_ideal,
)
from .poissoncore import apply_field, hamiltonian_field, jacobi_check
from .polyring import Poly
from .tangentfields import DerPresentation, Label


class InexpressibleBracketError(ValueError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"bracket of generators {pair[0]} and {pair[1]} is not in their span")


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass
class Evidence:
    """One residual that must lie in the ideal for the certificate to hold.

    ``expression`` is the unsimplified sum the residual was computed from, so a
    verifier can re-expand it independently.
    """

    inputs: tuple
    residual: Poly
    expression: Optional[str] = None
    exact: bool = False  # residual must be identically zero, not just zero mod the ideal


@dataclass
class Certificate:
    kind: str
    passed: bool
    evidence: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


def _certify(kind, evidence, ideal, notes=()) -> Certificate:
    passed = all(e.residual.is_zero() if e.exact else normal_form(e.residual, ideal).is_zero()
                 for e in evidence)
    return Certificate(kind, passed, list(evidence), list(notes))


def _paren(p: Poly) -> str:
    return f"({p})"


# ---------------------------------------------------------------------------
# 2-forms given by Gram matrices
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GramForm:
    """gram[i][j] = ω(X_i, X_j) on the presentation generators, read mod I."""

    presentation: DerPresentation
    gram: tuple
    notes: tuple = ()

    @property
    def size(self) -> int:
        return len(self.gram)

    def matrix(self) -> list:
        return [list(r) for r in self.gram]

    def replace(self, i: int, j: int, value: Poly, antisymmetric: bool = True) -> "GramForm":
        """Copy with entry (i, j) replaced (and (j, i) negated when asked)."""
        rows = self.matrix()
        rows[i][j] = value
        if antisymmetric and i != j:
            rows[j][i] = -value
        return GramForm(self.presentation, tuple(tuple(r) for r in rows), self.notes)


def generator_names(pres: DerPresentation) -> list:
    names = []
    for k, lab in enumerate(pres.labels):
        if lab.kind == "hamiltonian":
            names.append(f"{{{lab.function}, }}")
        else:
            names.append(f"X{k + 1}")
    return names


def omega_ham(pres: DerPresentation) -> GramForm:
    """Gram matrix of ω with ω(H_a, X) = X(a); extras are mutually isotropic."""
    ham = pres.hamiltonian_indices()
    if not ham:
        raise PreconditionError("presentation has no hamiltonian generators")
    g = pres.size
    zero = pres.ring.zero()
    gram = [[zero] * g for _ in range(g)]
    labels = pres.labels
    for i in range(g):
        for j in range(g):
            if labels[i].kind == "hamiltonian":
                gram[i][j] = pres.reduce(apply_field(pres.generators[j], labels[i].function))
            elif labels[j].kind == "hamiltonian":
                gram[i][j] = -pres.reduce(apply_field(pres.generators[i], labels[j].function))
    notes = ()
    if len(pres.extra_indices()) >= 2:
        notes = ("isotropic extension: ω(extra, extra) set to 0 for "
                 f"{len(pres.extra_indices())} extra generators",)
    return GramForm(pres, tuple(tuple(r) for r in gram), notes)


def check_descends(omega: GramForm) -> Certificate:
    """ω is antisymmetric and kills every relation: gram^T · R ≡ 0 mod I."""
    pres = omega.presentation
    names = generator_names(pres)
    G = omega.gram
    g = omega.size
    evidence = []
    for i in range(g):
        for j in range(i, g):
            r = G[i][j] + G[j][i]
            evidence.append(Evidence(("antisymmetry", names[i], names[j]), r,
                                     f"{_paren(G[i][j])} + {_paren(G[j][i])}"))
    for c, rel in enumerate(pres.relations.generators):
        for j in range(g):
            acc = pres.ring.zero()
            parts = []
            for k in range(g):
                if rel[k].is_zero() or G[k][j].is_zero():
                    continue
                acc = acc + G[k][j] * rel[k]
                parts.append(f"{_paren(G[k][j])}*{_paren(rel[k])}")
            evidence.append(Evidence((f"relation {c + 1}", names[j]), acc,
                                     " + ".join(parts) or "0"))
    return _certify("descent", evidence, pres.ideal)


def form_kernel(omega: GramForm) -> SubModule:
    """Vectors v with gram · v ≡ 0 mod I."""
    return kernel_over_quotient(omega.matrix(), omega.presentation.ideal)


def nondegeneracy_check(omega: GramForm) -> Certificate:
    """ker ω equals the relation module, so ω is injective on Der(A).

    Evidence: each kernel generator minus a combination of relations (entries
    in I), and gram · r for each relation r (entries in I).
    """
    pres = omega.presentation
    I = pres.ideal
    K = form_kernel(omega)
    rels = list(pres.relations.generators)
    g = omega.size
    evidence = []
    for a, k in enumerate(K.generators):
        coeffs = express_in_generators(k, rels, I) if rels else None
        if coeffs is None:
            W = with_ideal(SubModule(pres.ring, g, tuple(rels)), I)
            rem = normal_form(k, W) if W.generators else k
            for e, r in enumerate(rem.entries):
                evidence.append(Evidence((f"kernel {a + 1}", f"entry {e + 1}", "not a relation"), r, None))
            continue
        for e in range(g):
            acc = k[e]
            parts = [_paren(k[e])]
            for c, rel in zip(coeffs, rels):
                if c.is_zero() or rel[e].is_zero():
                    continue
                acc = acc - c * rel[e]
                parts.append(f"- {_paren(c)}*{_paren(rel[e])}")
            evidence.append(Evidence((f"kernel {a + 1}", f"entry {e + 1}"), acc, " ".join(parts)))
    G = omega.gram
    for c, rel in enumerate(rels):
        for i in range(g):
            acc = pres.ring.zero()
            parts = []
            for k in range(g):
                if G[i][k].is_zero() or rel[k].is_zero():
                    continue
                acc = acc + G[i][k] * rel[k]
                parts.append(f"{_paren(G[i][k])}*{_paren(rel[k])}")
            evidence.append(Evidence((f"relation {c + 1}", f"row {i + 1}", "in kernel"), acc,
                                     " + ".join(parts) or "0"))
    return _certify("nondegeneracy", evidence, I)


def gram_determinant(omega: GramForm):
    """Exact determinant over P and its normal form mod I."""
    det = determinant(omega.matrix())
    return det, omega.presentation.reduce(det)


def determinant(M: list) -> Poly:
    """Laplace expansion along rows with memoized minors."""
    n = len(M)
    if n == 0 or any(len(r) != n for r in M):
        raise ValueError("determinant needs a non-empty square matrix")
    ring = M[0][0].ring
    memo = {}

    def minor(row: int, cols: tuple) -> Poly:
        if row == n:
            return ring.one()
        if cols in memo:
            return memo[cols]
        acc = ring.zero()
        for pos, c in enumerate(cols):
            a = M[row][c]
            if a.is_zero():
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            acc = acc + a * sub if pos % 2 == 0 else acc - a * sub
        memo[cols] = acc
        return acc

    return minor(0, tuple(range(n)))


# ---------------------------------------------------------------------------
# cochains and the Koszul differential
# ---------------------------------------------------------------------------

def _sort_sign(idx: tuple):
    """(sorted tuple, sign) or (None, 0) on a repeated index."""
    if len(set(idx)) != len(idx):
        return None, 0
    arr = list(idx)
    sign = 1
    for a in range(len(arr)):
        for b in range(len(arr) - 1 - a):
            if arr[b] > arr[b + 1]:
                arr[b], arr[b + 1] = arr[b + 1], arr[b]
                sign = -sign
    return tuple(arr), sign


@dataclass(eq=False)
class Cochain:
    """Alternating form of arity p, stored on increasing generator index tuples."""

    arity: int
    size: int
    values: dict
    ring: object = None

    def __post_init__(self):
        if self.ring is None:
            first = next(iter(self.values.values()), None)
            if first is None:
                raise ValueError("cannot infer ring of an empty cochain")
            self.ring = first.ring

    def value(self, idx) -> Poly:
        idx = tuple(idx)
        if len(idx) != self.arity:
            raise ValueError(f"arity {self.arity} cochain evaluated on {len(idx)} arguments")
        key, sign = _sort_sign(idx)
        if key is None:
            return self.ring.zero()
        v = self.values.get(key)
        if v is None:
            return self.ring.zero()
        return v if sign > 0 else -v

    @classmethod
    def function(cls, a: Poly, size: int) -> "Cochain":
        return cls(0, size, {(): a}, a.ring)

    @classmethod
    def from_gram(cls, omega: GramForm) -> "Cochain":
        g = omega.size
        return cls(2, g, {(i, j): omega.gram[i][j] for i in range(g) for j in range(i + 1, g)},
                   omega.presentation.ring)


def _bracket_coeffs(pres: DerPresentation, i: int, j: int):
    c = pres.bracket_coefficients(i, j)
    if c is None:
        raise InexpressibleBracketError((i, j))
    return c


def koszul_terms(omega: Cochain, pres: DerPresentation, idx: tuple) -> list:
    """Summands of (d omega)(X_idx0, ..., X_idxp) before reduction."""
    terms = []
    p1 = len(idx)
    gens = pres.generators
    for a in range(p1):
        rest = idx[:a] + idx[a + 1:]
        t = apply_field(gens[idx[a]], omega.value(rest))
        terms.append(t if a % 2 == 0 else -t)
    for a in range(p1):
        for b in range(a + 1, p1):
            coeffs = _bracket_coeffs(pres, idx[a], idx[b])
            rest = idx[:a] + idx[a + 1:b] + idx[b + 1:]
            acc = pres.ring.zero()
            for k, c in enumerate(coeffs):
                if not c.is_zero():
                    acc = acc + c * omega.value((k,) + rest)
            terms.append(acc if (a + b) % 2 == 0 else -acc)
    return terms


def d_naive(omega: Cochain, pres: DerPresentation) -> Cochain:
    """Koszul differential; values reduced mod I."""
    g = pres.size
    values = {}
    for idx in combinations(range(g), omega.arity + 1):
        total = sum(koszul_terms(omega, pres, idx), pres.ring.zero())
        values[idx] = pres.reduce(total)
    return Cochain(omega.arity + 1, g, values, pres.ring)


def closedness_check(omega: GramForm) -> Certificate:
    """Every value of d ω on generator triples lies in I."""
    pres = omega.presentation
    names = generator_names(pres)
    c = Cochain.from_gram(omega)
    evidence = []
    for idx in combinations(range(omega.size), 3):
        terms = koszul_terms(c, pres, idx)
        evidence.append(Evidence(tuple(names[i] for i in idx), sum(terms, pres.ring.zero()),
                                 " + ".join(_paren(t) for t in terms)))
    return _certify("closedness", evidence, pres.ideal)


def hamiltonian_presentation(pres: DerPresentation) -> DerPresentation:
    """The sub Lie-Rinehart algebra spanned by the coordinate Hamiltonian fields."""
    pi = pres.poisson
    ring = pres.ring
    gens = tuple(hamiltonian_field(ring.gen(i), pi) for i in range(ring.nvars))
    labels = tuple(Label("hamiltonian", ring.gen(i)) for i in range(ring.nvars))
    return DerPresentation(pres.ideal, gens, SubModule(ring, len(gens), ()), labels, pi)


def delta_ham_check(pres: DerPresentation) -> Certificate:
    """δ^Ham ω^Ham = 0 on all triples of coordinate Hamiltonian fields."""
    pi = pres.poisson
    if pi is None:
        raise PreconditionError("delta_ham_check needs a Poisson structure")
    jac = jacobi_check(pi)
    if not jac.ok:
        i, j, k = jac.triple
        v = pi.ring.variables
        raise PreconditionError(f"Jacobi identity fails on ({v[i]}, {v[j]}, {v[k]}): {jac.residual}")
    hp = hamiltonian_presentation(pres)
    n = hp.size
    values = {(i, j): hp.reduce(apply_field(hp.generators[j], hp.labels[i].function))
              for i in range(n) for j in range(i + 1, n)}
    c = Cochain(2, n, values, hp.ring)
    names = generator_names(hp)
    evidence = []
    for idx in combinations(range(n), 3):
        terms = koszul_terms(c, hp, idx)
        evidence.append(Evidence(tuple(names[i] for i in idx), sum(terms, hp.ring.zero()),
                                 " + ".join(_paren(t) for t in terms)))
    return _certify("delta_ham", evidence, pres.ideal)


def compatibility_check(omega: GramForm) -> Certificate:
    """ω(H_{x^i}, X_j) ≡ X_j(x^i) for every coordinate Hamiltonian and generator."""
    pres = omega.presentation
    pi = pres.poisson
    if pi is None:
        raise PreconditionError("compatibility_check needs a Poisson structure")
    names = generator_names(pres)
    ring = pres.ring
    evidence = []
    for i in range(ring.nvars):
        xi = ring.gen(i)
        H = hamiltonian_field(xi, pi)
        coeffs = express_in_generators(H, pres.generators, pres.ideal)
        if coeffs is None:
            for e, r in enumerate(H.entries):
                evidence.append(Evidence((f"{{{xi}, }}", f"entry {e + 1}", "not in span"), r, None))
            continue
        for j in range(omega.size):
            target = apply_field(pres.generators[j], xi)
            acc = -target
            parts = [f"- {_paren(target)}"]
            for k, c in enumerate(coeffs):
                if not c.is_zero() and not omega.gram[k][j].is_zero():
                    acc = acc + c * omega.gram[k][j]
                    parts.append(f"+ {_paren(c)}*{_paren(omega.gram[k][j])}")
            evidence.append(Evidence((f"{{{xi}, }}", names[j]), acc, " ".join(parts)))
    return _certify("compatibility", evidence, pres.ideal)


def _shuffles(p: int, q: int):
    """(first-block positions, rest, sign) over all (p, q)-shuffles."""
    n = p + q
    for first in combinations(range(n), p):
        rest = tuple(i for i in range(n) if i not in first)
        inversions = sum(f - k for k, f in enumerate(first))
        yield first, rest, (-1) ** inversions


def cup_product(omega: Cochain, eta: Cochain, pres: DerPresentation) -> Cochain:
    """Shuffle product of an arity-p and an arity-q cochain."""
    p, q = omega.arity, eta.arity
    g = pres.size
    values = {}
    for idx in combinations(range(g), p + q):
        acc = pres.ring.zero()
        for first, rest, sign in _shuffles(p, q):
            term = omega.value(tuple(idx[i] for i in first)) * eta.value(tuple(idx[i] for i in rest))
            acc = acc + term if sign > 0 else acc - term
        values[idx] = pres.reduce(acc)
    return Cochain(p + q, g, values, pres.ring)


def gram_residual_vector(omega: GramForm, v: ModVec) -> list:
    """gram · v reduced mod I."""
    G = omega.gram
    return [omega.presentation.reduce(sum((G[i][k] * v[k] for k in range(omega.size)),
                                          omega.presentation.ring.zero()))
            for i in range(omega.size)]
