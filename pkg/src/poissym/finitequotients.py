"""Finite group quotients: Reynolds averaging, invariants, and pushing symplectic data down.

Two kinds of groups are supported.  :class:`MatrixGroup` takes rational
matrices and enumerates the group by closure.  :class:`DiagonalCyclicGroup`
describes Z_m acting by z_i -> ζ^{w_i} z_i for a primitive m-th root of unity
ζ; its Reynolds operator keeps exactly the monomials of total weight 0 mod m,
so it stays exact over QQ although ζ itself is not rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Optional, Sequence

from .gbengine import (
    Ideal,
    ModVec,
    SubModule,
    express_in_generators,
    graph_ideal_basis,
    kernel_over_quotient,
    ring_map_kernel,
    _Reducer,
    _term_key,
    _vec_from_poly,
    _poly_from_vec,
)
from .naivederham import Certificate, Evidence, GramForm, _certify, _paren
from .poissoncore import PoissonStructure, apply_field, bracket, field_matrix
from .polyring import GREVLEX, Poly, VarRing
from .tangentfields import DerPresentation, Label, primitive_field, primitive_relations

DEFAULT_ORDER_CAP = 10_000


class GroupOrderError(RuntimeError):
    """The group closure exceeded the order cap."""


class NotInSubalgebraError(ValueError):
    pass


def _monomials(n: int, d: int):
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        yield tuple(e)


def _mat_mul(A, B):
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _mat_inv(A):
    n = len(A)
    M = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return tuple(tuple(row[n:]) for row in M)


def _as_matrix(rows, n):
    mat = tuple(tuple(Fraction(x) for x in row) for row in rows)
    if len(mat) != n or any(len(r) != n for r in mat):
        raise ValueError(f"group generators must be {n}x{n} matrices")
    return mat


class MatrixGroup:
    """Finite group of rational matrices acting linearly on the variables of ``ring``.

    An element g acts on polynomials by (g*f)(z) = f(g z) and on fields by
    X -> g · (X ∘ g^{-1}).
    """

    def __init__(self, ring: VarRing, generators: Sequence, order_cap: int = DEFAULT_ORDER_CAP):
        n = ring.nvars
        self.ring = ring
        self.generators = tuple(_as_matrix(g, n) for g in generators)
        for g in self.generators:
            _mat_inv(g)  # raises on singular input
        identity = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        elements = [identity]
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for a in frontier:
                for g in self.generators:
                    b = _mat_mul(g, a)
                    if b not in seen:
                        if len(elements) >= order_cap:
                            raise GroupOrderError(f"group order exceeds the cap {order_cap}")
                        seen.add(b)
                        elements.append(b)
                        nxt.append(b)
            frontier = nxt
        self.elements = tuple(elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def _images(self, g):
        z = self.ring.gens()
        return [sum((z[j] * g[i][j] for j in range(self.ring.nvars) if g[i][j]), self.ring.zero())
                for i in range(self.ring.nvars)]

    @cached_property
    def _element_images(self):
        return [self._images(g) for g in self.elements]

    @cached_property
    def _inverse_images(self):
        return [self._images(_mat_inv(g)) for g in self.elements]

    def act(self, f: Poly, k: int) -> Poly:
        return f.compose(self._element_images[k], self.ring)

    def act_field(self, X: ModVec, k: int) -> ModVec:
        g = self.elements[k]
        inv = self._inverse_images[k]
        moved = [x.compose(inv, self.ring) for x in X.entries]
        n = self.ring.nvars
        return ModVec([sum((moved[j] * g[i][j] for j in range(n) if g[i][j]), self.ring.zero())
                       for i in range(n)])

    def reynolds(self, f: Poly) -> Poly:
        acc = self.ring.zero()
        for k in range(self.order):
            acc = acc + self.act(f, k)
        return acc * Fraction(1, self.order)

    def reynolds_field(self, X: ModVec) -> ModVec:
        acc = ModVec.zero(self.ring, self.ring.nvars)
        for k in range(self.order):
            acc = acc + self.act_field(X, k)
        return acc * Fraction(1, self.order)

    def is_invariant(self, f: Poly) -> bool:
        ring = self.ring
        return all(f.compose(self._images(g), ring) == f for g in self.generators)

    def is_invariant_field(self, X: ModVec) -> bool:
        idx = {g: k for k, g in enumerate(self.elements)}
        return all(self.act_field(X, idx[g]) == X for g in self.generators)


class DiagonalCyclicGroup:
    """Z_m acting by z_i -> ζ^{weights[i]} z_i, ζ a primitive m-th root of unity."""

    def __init__(self, ring: VarRing, modulus: int, weights: Sequence[int]):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        if len(weights) != ring.nvars:
            raise ValueError("need one weight per variable")
        self.ring = ring
        self.modulus = modulus
        self.weights = tuple(int(w) % modulus for w in weights)

    @property
    def order(self) -> int:
        return self.modulus

    def _weight(self, m) -> int:
        return sum(a * w for a, w in zip(m, self.weights)) % self.modulus

    def reynolds(self, f: Poly) -> Poly:
        return Poly(self.ring, {m: c for m, c in f.terms.items() if self._weight(m) == 0})

    def reynolds_field(self, X: ModVec) -> ModVec:
        out = []
        for i, x in enumerate(X.entries):
            w = self.weights[i]
            out.append(Poly(self.ring, {m: c for m, c in x.terms.items()
                                        if (self._weight(m) - w) % self.modulus == 0}))
        return ModVec(out)

    def is_invariant(self, f: Poly) -> bool:
        return self.reynolds(f) == f

    def is_invariant_field(self, X: ModVec) -> bool:
        return self.reynolds_field(X) == X


def trivial_group(ring: VarRing) -> MatrixGroup:
    n = ring.nvars
    return MatrixGroup(ring, [[[int(i == j) for j in range(n)] for i in range(n)]])


def cotangent_lift(ring: VarRing, matrices: Sequence, order_cap: int = DEFAULT_ORDER_CAP) -> MatrixGroup:
    """Group on k[q_1..q_m, p_1..p_m] acting by A on q and A^{-T} on p."""
    if ring.nvars % 2:
        raise ValueError("cotangent lift needs variables (q_1..q_m, p_1..p_m)")
    m = ring.nvars // 2
    lifted = []
    for A in matrices:
        A = _as_matrix(A, m)
        Ainv = _mat_inv(A)
        big = [[Fraction(0)] * (2 * m) for _ in range(2 * m)]
        for i in range(m):
            for j in range(m):
                big[i][j] = A[i][j]
                big[m + i][m + j] = Ainv[j][i]
        lifted.append(big)
    return MatrixGroup(ring, lifted, order_cap)


def reynolds(f: Poly, G) -> Poly:
    """Average of f over the group."""
    return G.reynolds(f)


# ---------------------------------------------------------------------------
# invariants and the Hilbert embedding
# ---------------------------------------------------------------------------

class _Subalgebra:
    """Membership and rewriting in k[u_1..u_k] via the graph ideal."""

    def __init__(self, invariants: Sequence[Poly], source_ring: VarRing):
        self.invariants = tuple(invariants)
        self.source_ring = source_ring
        self.big, self.order, self.gb = graph_ideal_basis(self.invariants, source_ring)
        self.m = self.invariants[0].ring.nvars
        key = _term_key(self.order)
        self.reducer = _Reducer([_vec_from_poly(g) for g in self.gb], key)

    def rewrite(self, f: Poly) -> Optional[Poly]:
        nf = _poly_from_vec(self.reducer.reduce(_vec_from_poly(f.embed(self.big))), self.big)
        if any(any(mono[:self.m]) for mono in nf.terms):
            return None
        return Poly._raw(self.source_ring, {mono[self.m:]: c for mono, c in nf.terms.items()})


def _default_names(k: int, avoid) -> VarRing:
    stem = "x"
    while any(f"{stem}{i + 1}" in avoid for i in range(k)):
        stem = "u" if stem == "x" else stem + "_"
    return [f"{stem}{i + 1}" for i in range(k)]


def _monomial_sort_key(m):
    # pure powers before mixed monomials, then decreasing grevlex
    return (sum(1 for e in m if e), tuple(-x for x in GREVLEX.key(m)[1]))


def fundamental_invariants(G, degree_bound: int = None) -> list:
    """Greedy generating set of the invariant ring up to ``degree_bound`` (default |G|)."""
    bound = G.order if degree_bound is None else degree_bound
    if bound < 1:
        raise ValueError("degree bound must be at least 1")
    ring = G.ring
    found = []
    sub = None
    for d in range(1, bound + 1):
        for m in sorted(_monomials(ring.nvars, d), key=_monomial_sort_key):
            r = G.reynolds(Poly(ring, {m: 1}))
            if r.is_zero():
                continue
            if sub is not None and sub.rewrite(r) is not None:
                continue
            found.append(r.primitive())
            names = _default_names(len(found), ring.variables)
            sub = _Subalgebra(found, VarRing(tuple(names)))
    return found


@dataclass(eq=False)
class HilbertData:
    """Fundamental invariants u_i, the quotient ring P = k[x_1..x_k] and the relation ideal."""

    group: object
    invariants: tuple
    ring: VarRing = None
    relation_ideal: Ideal = field(default=None, repr=False)

    def __post_init__(self):
        self.invariants = tuple(self.invariants)
        if not self.invariants:
            raise ValueError("need at least one invariant")
        for u in self.invariants:
            if not self.group.is_invariant(u):
                raise ValueError(f"{u} is not invariant")
        if self.ring is None:
            names = _default_names(len(self.invariants), self.group.ring.variables)
            weights = tuple(max(1, u.degree()) for u in self.invariants)
            self.ring = VarRing(tuple(names), weights)
        self._sub = _Subalgebra(self.invariants, self.ring)
        if self.relation_ideal is None:
            self.relation_ideal = ring_map_kernel(self.invariants, source_ring=self.ring)

    @classmethod
    def compute(cls, G, degree_bound: int = None, names: Sequence[str] = None) -> "HilbertData":
        inv = fundamental_invariants(G, degree_bound)
        ring = None
        if names is not None:
            ring = VarRing(tuple(names), tuple(max(1, u.degree()) for u in inv))
        return cls(G, inv, ring)

    @property
    def ambient(self) -> VarRing:
        return self.group.ring

    def rewrite(self, f: Poly) -> Poly:
        """Express an invariant of the ambient ring as a polynomial in the x_i."""
        r = self._sub.rewrite(f)
        if r is None:
            raise NotInSubalgebraError(f"{f} is not in the subalgebra generated by the invariants")
        return r

    def pull_back(self, g: Poly) -> Poly:
        """Substitute x_i -> u_i."""
        return g.compose(list(self.invariants), self.ambient)


def relations(H: HilbertData) -> Ideal:
    return H.relation_ideal


def _u_monomials(degrees: Sequence[int], target: int):
    """Exponent vectors a with sum a_i * degrees[i] == target."""
    k = len(degrees)

    def rec(i, left):
        if i == k:
            if left == 0:
                yield ()
            return
        d = degrees[i]
        for a in range(left // d + 1):
            for rest in rec(i + 1, left - a * d):
                yield (a,) + rest

    yield from rec(0, target)


class _Echelon:
    """Incremental row echelon form over QQ for sparse vectors given as dicts."""

    def __init__(self):
        self.rows = {}  # pivot key -> row with that pivot normalized to 1

    def reduce(self, vec: dict) -> dict:
        v = dict(vec)
        while v:
            pivots = [k for k in v if k in self.rows]
            if not pivots:
                break
            k = max(pivots)
            c = v[k]
            for kk, cc in self.rows[k].items():
                nv = v.get(kk, 0) - c * cc
                if nv:
                    v[kk] = nv
                else:
                    v.pop(kk, None)
        return v

    def add(self, vec: dict) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        # pivot: largest key not already a pivot
        k = max(v)
        inv = 1 / v[k]
        row = {kk: cc * inv for kk, cc in v.items()}
        for pk, prow in self.rows.items():
            if k in prow:
                c = prow[k]
                for kk, cc in row.items():
                    nv = prow.get(kk, 0) - c * cc
                    if nv:
                        prow[kk] = nv
                    else:
                        prow.pop(kk, None)
        self.rows[k] = row
        return True


def _field_vector(X: ModVec) -> dict:
    return {(j, m): c for j, e in enumerate(X.entries) for m, c in e.terms.items()}


def invariant_derivations(G, H: HilbertData, degree_bound: int = None) -> list:
    """Greedy generators of Der(R)^G over R^G with coefficient degree up to the bound.

    Fields are homogeneous, so membership in the R^G-span of the fields kept so
    far is decided degree by degree with linear algebra over QQ.
    """
    bound = G.order if degree_bound is None else degree_bound
    ring = G.ring
    n = ring.nvars
    inv = H.invariants
    inv_deg = [u.degree() for u in inv]
    kept = []  # (field, coefficient degree)
    for d in range(bound + 1):
        ech = _Echelon()
        for X, dx in kept:
            for a in _u_monomials(inv_deg, d - dx) if d >= dx else ():
                coeff = ring.one()
                for u, e in zip(inv, a):
                    if e:
                        coeff = coeff * u ** e
                ech.add(_field_vector(X * coeff))
        for m in sorted(_monomials(n, d), key=lambda m: GREVLEX.key(m), reverse=True):
            for j in range(n):
                seed = ModVec.unit(ring, n, j) * Poly(ring, {m: 1})
                Y = G.reynolds_field(seed)
                if Y.is_zero():
                    continue
                Y = primitive_field(Y)
                if ech.add(_field_vector(Y)):
                    kept.append((Y, d))
    return [X for X, _ in kept]


def push_derivation(X: ModVec, H: HilbertData) -> ModVec:
    """Field on P with components X(u_i) rewritten in the x_i."""
    if X.is_zero():
        return ModVec.zero(H.ring, len(H.invariants))
    return ModVec([H.rewrite(apply_field(X, u)) for u in H.invariants])


def induced_poisson(H: HilbertData, pi_ambient: PoissonStructure) -> PoissonStructure:
    """Bracket on P with {x_i, x_j} the rewrite of {u_i, u_j}."""
    k = len(H.invariants)
    entries = {}
    for i in range(k):
        for j in range(i + 1, k):
            entries[(i, j)] = H.rewrite(bracket(H.invariants[i], H.invariants[j], pi_ambient))
    return PoissonStructure.from_upper(H.ring, entries)


def _constant_inverse(pi: PoissonStructure):
    n = pi.n
    for row in pi.pi:
        for e in row:
            if not e.is_constant():
                raise ValueError("ambient Poisson structure must be constant")
    mat = tuple(tuple(e.constant_value() for e in row) for row in pi.pi)
    return _mat_inv(mat)


def symplectic_pairing(X: ModVec, Y: ModVec, pi: PoissonStructure) -> Poly:
    """ω0(X, Y) = X^T ω Y with ω the inverse of the constant Poisson matrix.

    With this normalization ω0({a, }, Y) = Y(a).
    """
    w = _constant_inverse(pi)
    ring = X.ring
    acc = ring.zero()
    for a, xa in enumerate(X.entries):
        if xa.is_zero():
            continue
        for b, yb in enumerate(Y.entries):
            if w[a][b] and not yb.is_zero():
                acc = acc + xa * yb * w[a][b]
    return acc


def pushed_presentation(H: HilbertData, fields: Sequence[ModVec],
                        pi_ambient: PoissonStructure = None) -> DerPresentation:
    pushed = tuple(push_derivation(X, H) for X in fields)
    I = H.relation_ideal
    rels = primitive_relations(kernel_over_quotient(field_matrix(pushed), I))
    pi = induced_poisson(H, pi_ambient) if pi_ambient is not None else None
    labels = tuple(Label("pushed") for _ in pushed)
    return DerPresentation(I, pushed, rels, labels, pi)


def pushed_symplectic(G, H: HilbertData, pi_ambient: PoissonStructure,
                      fields: Sequence[ModVec] = None) -> GramForm:
    """Gram form on the pushed invariant fields: entry (i, j) rewrites ω0(X_i, X_j)."""
    if fields is None:
        fields = invariant_derivations(G, H)
    pres = pushed_presentation(H, fields, pi_ambient)
    g = len(fields)
    gram = [[H.ring.zero()] * g for _ in range(g)]
    for i in range(g):
        for j in range(i + 1, g):
            v = pres.reduce(H.rewrite(symplectic_pairing(fields[i], fields[j], pi_ambient)))
            gram[i][j] = v
            gram[j][i] = -v
    return GramForm(pres, tuple(tuple(r) for r in gram))


def verify_base_change(H: HilbertData, fields: Sequence[ModVec], target: DerPresentation,
                       base_change=None, relation_matrix=None) -> Certificate:
    """Check pushed fields · B ≡ target generators, and that relations vanish upstairs.

    ``base_change`` (len(fields) x target.size) is computed by module
    membership when omitted; ``relation_matrix`` defaults to the target's
    relation module (columns are relations).
    """
    I = target.ideal
    pushed = [push_derivation(X, H) for X in fields]
    n = H.ring.nvars
    g = target.size
    evidence = []
    notes = []
    if base_change is None:
        cols = []
        for t in target.generators:
            c = express_in_generators(t, pushed, I) if pushed else None
            if c is None:
                return Certificate("base_change", False, [], [f"generator {t.canonical()} is not hit"])
            cols.append(c)
        B = [[cols[j][k] for j in range(g)] for k in range(len(fields))]
        notes.append("base change computed by module membership")
    else:
        B = [[b if isinstance(b, Poly) else H.ring.const(b) for b in row] for row in base_change]
    for i in range(n):
        for j in range(g):
            acc = -target.generators[j][i]
            parts = [f"- {_paren(target.generators[j][i])}"]
            for k in range(len(fields)):
                if not B[k][j].is_zero() and not pushed[k][i].is_zero():
                    acc = acc + pushed[k][i] * B[k][j]
                    parts.append(f"+ {_paren(pushed[k][i])}*{_paren(B[k][j])}")
            evidence.append(Evidence(("generator", j + 1, "row", i + 1), acc, " ".join(parts)))
    if relation_matrix is None:
        rel_cols = [list(r.entries) for r in target.relations.generators]
    else:
        rel_cols = [[relation_matrix[i][c] for i in range(len(relation_matrix))]
                    for c in range(len(relation_matrix[0]))]
    amb = H.ambient
    for c, r in enumerate(rel_cols):
        coeffs = [sum((B[k][j] * r[j] for j in range(g)), H.ring.zero()) for k in range(len(fields))]
        up = [H.pull_back(x) for x in coeffs]
        for e in range(amb.nvars):
            acc = amb.zero()
            parts = []
            for k, X in enumerate(fields):
                if not up[k].is_zero() and not X[e].is_zero():
                    acc = acc + up[k] * X[e]
                    parts.append(f"{_paren(up[k])}*{_paren(X[e])}")
            evidence.append(Evidence(("relation upstairs", c + 1, amb.variables[e]), acc,
                                     " + ".join(parts) or "0", exact=True))
    cert = _certify("base_change", evidence, I, notes)
    cert.base_change = B
    return cert
