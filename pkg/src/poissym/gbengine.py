"""Gröbner bases for ideals and submodules of free modules over QQ[x].

Everything runs on one engine working with module vectors stored as dicts
``{(position, exponents): coefficient}`` under a position-over-term order in
which a higher position index is the larger position.  Ideals are the rank-1
case.  Syzygies and cofactors come from the same computation: each input
vector ``v_k`` is augmented to ``e_k (+) v_k`` with the tracking block placed in
the low positions, so the original coordinates dominate and the Gröbner basis
of the augmented module splits into a Gröbner basis of the input span and a
Gröbner basis of the syzygy module.

Coefficient lifts (cofactors, membership witnesses) are produced by the
deterministic division order and are NOT unique; callers must not rely on a
particular lift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .polyring import GREVLEX, MonomialOrder, Poly, VarRing


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

class ModVec:
    """Element of a free module P^m, stored as a tuple of polynomials."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[Poly]):
        entries = tuple(entries)
        if not entries:
            raise ValueError("a module vector needs at least one entry")
        ring = entries[0].ring
        if any(e.ring != ring for e in entries):
            raise ValueError("module vector entries live in different rings")
        self.entries = entries

    @classmethod
    def zero(cls, ring: VarRing, rank: int) -> "ModVec":
        return cls([ring.zero()] * rank)

    @classmethod
    def unit(cls, ring: VarRing, rank: int, i: int) -> "ModVec":
        entries = [ring.zero()] * rank
        entries[i] = ring.one()
        return cls(entries)

    @property
    def ring(self) -> VarRing:
        return self.entries[0].ring

    @property
    def rank(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def degree(self) -> int:
        return max(e.degree() for e in self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __add__(self, other: "ModVec") -> "ModVec":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        return ModVec([a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "ModVec") -> "ModVec":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        return ModVec([a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return ModVec([-a for a in self.entries])

    def __mul__(self, c) -> "ModVec":
        return ModVec([a * c for a in self.entries])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ModVec) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def canonical(self) -> str:
        return "[" + ", ".join(str(e) for e in self.entries) + "]"

    def __repr__(self):
        return f"ModVec({self.canonical()})"


@dataclass(eq=False)
class Ideal:
    """Ideal of a polynomial ring given by generators; Gröbner bases are cached."""

    ring: VarRing
    generators: tuple = ()
    _gb_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if any(g.ring != self.ring for g in gens):
            raise ValueError("ideal generators must live in the ideal's ring")
        self.generators = gens

    @property
    def nonzero_generators(self) -> tuple:
        return tuple(g for g in self.generators if not g.is_zero())

    def is_zero(self) -> bool:
        return not self.nonzero_generators

    def gb(self, order: MonomialOrder = GREVLEX) -> list:
        if order not in self._gb_cache:
            self._gb_cache[order] = buchberger(list(self.nonzero_generators), order) if not self.is_zero() else []
        return self._gb_cache[order]

    def normal_form(self, f: Poly, order: MonomialOrder = GREVLEX) -> Poly:
        return normal_form(f, self, order)

    def contains(self, f: Poly) -> bool:
        return self.normal_form(f).is_zero()

    def __contains__(self, f):
        return self.contains(f)

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.generators)})"


@dataclass(eq=False)
class SubModule:
    """Submodule of P^rank generated by finitely many vectors."""

    ring: VarRing
    rank: int
    generators: tuple = ()
    _gb_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        for g in gens:
            if g.rank != self.rank:
                raise ValueError(f"generator of rank {g.rank} in a rank-{self.rank} module")
        self.generators = gens

    def gb(self, order: MonomialOrder = GREVLEX) -> list:
        """Reduced module Gröbner basis (POT over ``order``) as ModVecs."""
        if order not in self._gb_cache:
            vecs = [_vec_from_modvec(g) for g in self.generators]
            basis = _groebner([v for v in vecs if v], _term_key(order), ideal_mode=False)
            self._gb_cache[order] = [_modvec_from_vec(b, self.ring, self.rank) for b in basis]
        return self._gb_cache[order]

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.generators)

    def __repr__(self):
        return f"SubModule(rank={self.rank}, {[g.canonical() for g in self.generators]})"


# ---------------------------------------------------------------------------
# engine internals
# ---------------------------------------------------------------------------

def _term_key(order: MonomialOrder):
    base = order.key
    cache = {}

    def key(t):
        k = cache.get(t)
        if k is None:
            k = cache[t] = (t[0], base(t[1]))
        return k

    return key


def _vec_from_poly(f: Poly, pos: int = 0) -> dict:
    return {(pos, m): c for m, c in f.terms.items()}


def _vec_from_modvec(v: ModVec, offset: int = 0) -> dict:
    out = {}
    for i, e in enumerate(v.entries):
        for m, c in e.terms.items():
            out[(offset + i, m)] = c
    return out


def _modvec_from_vec(vec: dict, ring: VarRing, rank: int, offset: int = 0) -> ModVec:
    parts = [dict() for _ in range(rank)]
    for (pos, m), c in vec.items():
        if offset <= pos < offset + rank:
            parts[pos - offset][m] = c
    return ModVec([Poly._raw(ring, p) for p in parts])


def _poly_from_vec(vec: dict, ring: VarRing, pos: int = 0) -> Poly:
    return Poly._raw(ring, {m: c for (p, m), c in vec.items() if p == pos})


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _shift_sub(target: dict, vec: dict, mono, coef):
    """target -= coef * x^mono * vec, in place."""
    for (p, m), c in vec.items():
        t = (p, tuple(x + y for x, y in zip(m, mono)))
        v = target.get(t, 0) - coef * c
        if v:
            target[t] = v
        else:
            target.pop(t, None)


def _leading(vec: dict, key):
    return max(vec, key=key)


class _Reducer:
    """Division by a fixed list of monic vectors, indexed by leading position."""

    def __init__(self, basis: list, key):
        self.key = key
        self.by_pos = {}
        for b in basis:
            lt = _leading(b, key)
            self.by_pos.setdefault(lt[0], []).append((lt[1], b))

    def find(self, term):
        for mono, b in self.by_pos.get(term[0], ()):
            if _divides(mono, term[1]):
                return mono, b
        return None

    def reduce(self, vec: dict, min_pos: int = None, full: bool = True,
               quotients: dict = None) -> dict:
        """Remainder of ``vec``; stops at terms with position below ``min_pos``.

        ``quotients`` (optional) accumulates id(basis element) -> quotient terms.
        """
        f = dict(vec)
        rem = {}
        key = self.key
        while f:
            t = _leading(f, key)
            if min_pos is not None and t[0] < min_pos:
                rem.update(f)
                break
            hit = self.find(t)
            if hit is None:
                if not full:
                    rem.update(f)
                    break
                rem[t] = f.pop(t)
                continue
            mono, b = hit
            c = f[t]
            shift = _mono_div(t[1], mono)
            _shift_sub(f, b, shift, c)
            if quotients is not None:
                q = quotients.setdefault(id(b), {})
                q[shift] = q.get(shift, 0) + c
        return rem


def _monic(vec: dict, key) -> dict:
    lc = vec[_leading(vec, key)]
    if lc == 1:
        return vec
    inv = 1 / lc
    return {t: c * inv for t, c in vec.items()}


def _groebner(vecs: list, key, ideal_mode: bool) -> list:
    """Reduced Gröbner basis via Buchberger with Gebauer-Möller pair pruning."""
    basis = []   # monic vectors
    lts = []     # leading terms (pos, mono)
    G = []       # indices of the current basis
    B = []       # pairs (i, j, lcm_term)

    def disjoint(i, j):
        return ideal_mode and all(not (a and b) for a, b in zip(lts[i][1], lts[j][1]))

    def lcm_term(i, j):
        return (lts[i][0], _lcm(lts[i][1], lts[j][1]))

    def term_divides(a, b):
        return a[0] == b[0] and _divides(a[1], b[1])

    def update(h):
        nonlocal G, B
        lt_h = lts[h]
        C = [g for g in G if lts[g][0] == lt_h[0]]
        D = []
        while C:
            g1 = C.pop(0)
            l1 = lcm_term(h, g1)
            if disjoint(h, g1) or (
                not any(term_divides(lcm_term(h, g2), l1) for g2 in C)
                and not any(term_divides(lcm_term(h, g2), l1) for g2 in D)
            ):
                D.append(g1)
        E = [g for g in D if not disjoint(h, g)]
        B_new = []
        for (g1, g2, l) in B:
            if not (term_divides(lt_h, l) and lcm_term(g1, h) != l and lcm_term(g2, h) != l):
                B_new.append((g1, g2, l))
        B_new.extend((g, h, lcm_term(h, g)) for g in E)
        G = [g for g in G if not term_divides(lt_h, lts[g])] + [h]
        B = B_new

    def add(vec):
        vec = _monic(vec, key)
        basis.append(vec)
        lts.append(_leading(vec, key))
        update(len(basis) - 1)

    for v in sorted((v for v in vecs if v), key=lambda v: key(_leading(v, key))):
        r = _Reducer([basis[g] for g in G], key).reduce(v)
        if r:
            add(r)

    while B:
        idx = min(range(len(B)), key=lambda k: key(B[k][2]))
        i, j, l = B.pop(idx)
        s = {}
        for a in (i, j):
            shift = _mono_div(l[1], lts[a][1])
            sign = 1 if a == i else -1
            for (p, m), c in basis[a].items():
                t = (p, tuple(x + y for x, y in zip(m, shift)))
                v = s.get(t, 0) + sign * c
                if v:
                    s[t] = v
                else:
                    s.pop(t, None)
        if not s:
            continue
        r = _Reducer([basis[g] for g in G], key).reduce(s)
        if r:
            add(r)

    # interreduce to the unique reduced basis
    final = [basis[g] for g in G]
    final_lts = [lts[g] for g in G]
    keep = []
    for a, lt_a in enumerate(final_lts):
        if not any(b != a and term_divides(final_lts[b], lt_a) and
                   (final_lts[b] != lt_a or b < a) for b in range(len(final))):
            keep.append(final[a])
    reduced = []
    for a, v in enumerate(keep):
        others = [w for b, w in enumerate(keep) if b != a]
        lt = _leading(v, key)
        tail = dict(v)
        c = tail.pop(lt)
        r = _Reducer(others, key).reduce(tail)
        r[lt] = c
        reduced.append(_monic(r, key))
    reduced.sort(key=lambda v: key(_leading(v, key)))
    return reduced


# ---------------------------------------------------------------------------
# public API: ideals
# ---------------------------------------------------------------------------

def buchberger(gens: Sequence[Poly], order: MonomialOrder = GREVLEX) -> list:
    """Reduced Gröbner basis of the ideal generated by ``gens``.

    The result is sorted by increasing leading term and is identical for any
    permutation of the input.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    ring = gens[0].ring
    basis = _groebner([_vec_from_poly(g) for g in gens], _term_key(order), ideal_mode=True)
    return [_poly_from_vec(b, ring) for b in basis]


def normal_form(f, G, order: MonomialOrder = GREVLEX):
    """Fully reduced remainder of a Poly (against an Ideal) or ModVec (SubModule)."""
    key = _term_key(order)
    if isinstance(f, Poly):
        if isinstance(G, Ideal):
            basis = G.gb(order)
        else:
            basis = buchberger(list(G), order)
        if not basis:
            return f
        rem = _Reducer([_vec_from_poly(b) for b in basis], key).reduce(_vec_from_poly(f))
        return _poly_from_vec(rem, f.ring)
    if isinstance(f, ModVec):
        if not isinstance(G, SubModule):
            raise TypeError("module vectors reduce against a SubModule")
        if f.rank != G.rank:
            raise ValueError("rank mismatch")
        basis = G.gb(order)
        if not basis:
            return f
        rem = _Reducer([_vec_from_modvec(b) for b in basis], key).reduce(_vec_from_modvec(f))
        return _modvec_from_vec(rem, f.ring, f.rank)
    raise TypeError(f"cannot reduce {type(f).__name__}")


class _TrackedBasis:
    """Gröbner basis of e_k (+) v_k, for lifts and syzygies of ``vectors``."""

    def __init__(self, vectors: Sequence[ModVec], order: MonomialOrder):
        self.vectors = list(vectors)
        self.s = len(self.vectors)
        self.rank = self.vectors[0].rank
        self.ring = self.vectors[0].ring
        self.key = _term_key(order)
        aug = []
        one = (0,) * self.ring.nvars
        for k, v in enumerate(self.vectors):
            w = _vec_from_modvec(v, offset=self.s)
            w[(k, one)] = Fraction(1)
            aug.append(w)
        self.basis = _groebner(aug, self.key, ideal_mode=False)
        self.reducer = _Reducer(self.basis, self.key)

    def syzygy_vectors(self) -> list:
        out = []
        for b in self.basis:
            if _leading(b, self.key)[0] < self.s:
                out.append(_modvec_from_vec(b, self.ring, self.s))
        return out

    def image_basis(self) -> list:
        out = []
        for b in self.basis:
            if _leading(b, self.key)[0] >= self.s:
                out.append((_modvec_from_vec(b, self.ring, self.rank, offset=self.s),
                            _modvec_from_vec(b, self.ring, self.s)))
        return out

    def lift(self, v: ModVec) -> Optional[list]:
        """Coefficients c with v = sum c_k vectors_k, or None if v is not in the span."""
        rem = self.reducer.reduce(_vec_from_modvec(v, offset=self.s), min_pos=self.s)
        if any(p >= self.s for (p, _m) in rem):
            return None
        t = _modvec_from_vec(rem, self.ring, self.s)
        return [-e for e in t.entries]


@lru_cache(maxsize=256)
def _tracked(vectors: tuple, order: MonomialOrder) -> _TrackedBasis:
    return _TrackedBasis(vectors, order)


def gb_with_cofactors(gens: Sequence[Poly], order: MonomialOrder = GREVLEX):
    """Reduced Gröbner basis together with a cofactor matrix.

    Returns ``(gb, cofactors)`` where ``cofactors[i][k]`` is the coefficient of
    ``gens[k]`` in ``gb[i]``, i.e. ``gb[i] == sum_k cofactors[i][k] * gens[k]``.
    """
    gens = list(gens)
    if not gens:
        return [], []
    ring = gens[0].ring
    tb = _tracked(tuple(ModVec([g]) for g in gens), order)
    basis = tb.image_basis()
    return [img[0] for img, _ in basis], [list(track.entries) for _, track in basis]


def ideal_membership(f: Poly, I: Ideal, order: MonomialOrder = GREVLEX):
    """Return ``(True, cofactors)`` with f = sum cofactors[k]*I.generators[k], else ``(False, None)``."""
    if f.is_zero():
        return True, [f.ring.zero() for _ in I.generators]
    if I.is_zero() or not normal_form(f, I, order).is_zero():
        return False, None
    tb = _tracked(tuple(ModVec([g]) for g in I.generators), order)
    coeffs = tb.lift(ModVec([f]))
    if coeffs is None:  # pragma: no cover - contradicts the normal form test
        raise ArithmeticError("membership witness not found")
    return True, coeffs


def ideal_equal(I: Ideal, J: Ideal, order: MonomialOrder = GREVLEX) -> bool:
    return [tuple(sorted(p.terms.items())) for p in I.gb(order)] == \
           [tuple(sorted(p.terms.items())) for p in J.gb(order)]


def _fresh_name(ring: VarRing, stem: str) -> str:
    name, k = stem, 0
    while name in ring.variables:
        k += 1
        name = f"{stem}{k}"
    return name


def ideal_intersection(I: Ideal, J: Ideal) -> Ideal:
    """I ∩ J via elimination of t from t*I + (1-t)*J."""
    if I.ring != J.ring:
        raise ValueError("ideals live in different rings")
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return Ideal(ring, ())
    t = _fresh_name(ring, "t")
    big = VarRing((t,) + ring.variables)
    tv = big.gen(0)
    gens = [tv * g.embed(big) for g in I.nonzero_generators]
    gens += [(1 - tv) * g.embed(big) for g in J.nonzero_generators]
    gb = buchberger(gens, MonomialOrder.elimination(1))
    out = [Poly._raw(ring, {m[1:]: c for m, c in g.terms.items()})
           for g in gb if all(m[0] == 0 for m in g.terms)]
    return Ideal(ring, tuple(out))


def default_source_ring(k: int) -> VarRing:
    return VarRing(tuple(f"x{i + 1}" for i in range(k)))


def graph_ideal_basis(images: Sequence[Poly], source_ring: VarRing):
    """Combined ring, elimination order and reduced GB of (x_i - image_i)."""
    target = images[0].ring
    clash = set(target.variables) & set(source_ring.variables)
    if clash:
        raise ValueError(f"source and target rings share variables {sorted(clash)}")
    big = VarRing(target.variables + source_ring.variables,
                  target.weights + source_ring.weights)
    order = MonomialOrder.elimination(target.nvars)
    gens = [Poly(big, {(0,) * target.nvars + tuple(int(j == i) for j in range(source_ring.nvars)): 1})
            - img.embed(big) for i, img in enumerate(images)]
    return big, order, buchberger(gens, order)


def ring_map_kernel(images: Sequence[Poly], target_ring: VarRing = None,
                    source_ring: VarRing = None) -> Ideal:
    """Kernel of k[x1..xk] -> target, x_i -> images[i], by graph-ideal elimination."""
    images = list(images)
    if target_ring is not None:
        images = [img.embed(target_ring) for img in images]
    source_ring = source_ring or default_source_ring(len(images))
    if source_ring.nvars != len(images):
        raise ValueError("need one image per source variable")
    big, _order, gb = graph_ideal_basis(images, source_ring)
    m = images[0].ring.nvars
    out = [Poly._raw(source_ring, {mono[m:]: c for mono, c in g.terms.items()})
           for g in gb if all(not any(mono[:m]) for mono in g.terms)]
    return Ideal(source_ring, tuple(out))


# ---------------------------------------------------------------------------
# public API: modules
# ---------------------------------------------------------------------------

def syzygies(vectors: Sequence[ModVec], order: MonomialOrder = GREVLEX) -> SubModule:
    """Generators of {a : sum_k a_k vectors_k = 0} inside P^len(vectors)."""
    vectors = tuple(vectors)
    if not vectors:
        raise ValueError("need at least one vector")
    ring = vectors[0].ring
    if any(v.rank != vectors[0].rank for v in vectors):
        raise ValueError("vectors have different ranks")
    tb = _tracked(vectors, order)
    return SubModule(ring, len(vectors), tuple(tb.syzygy_vectors()))


def _columns(M: Sequence[Sequence[Poly]]) -> list:
    rows = [list(r) for r in M]
    if not rows or not rows[0]:
        raise ValueError("empty matrix")
    q = len(rows[0])
    if any(len(r) != q for r in rows):
        raise ValueError("ragged matrix")
    return [ModVec([r[j] for r in rows]) for j in range(q)]


def matrix_kernel(M: Sequence[Sequence[Poly]], order: MonomialOrder = GREVLEX) -> SubModule:
    """Kernel of the P-linear map P^q -> P^p given by the p x q matrix ``M``."""
    return syzygies(_columns(M), order)


def _ideal_multiples(I: Ideal, rank: int) -> list:
    ring = I.ring
    out = []
    for i in range(rank):
        for f in I.nonzero_generators:
            entries = [ring.zero()] * rank
            entries[i] = f
            out.append(ModVec(entries))
    return out


def kernel_over_quotient(M: Sequence[Sequence[Poly]], I: Ideal,
                         order: MonomialOrder = GREVLEX) -> SubModule:
    """Vectors v over P with M v ≡ 0 mod I, generating ker(M mod I) over P/I."""
    cols = _columns(M)
    q = len(cols)
    if I.is_zero():
        return matrix_kernel(M, order)
    extra = _ideal_multiples(I, cols[0].rank)
    syz = syzygies(cols + extra, order)
    ring = cols[0].ring
    gens = []
    seen = set()
    for s in syz.generators:
        v = ModVec(s.entries[:q])
        if not v.is_zero() and v not in seen:
            seen.add(v)
            gens.append(v)
    return SubModule(ring, q, tuple(gens))


def with_ideal(V: SubModule, I: Ideal) -> SubModule:
    """V + I·P^rank as an explicit submodule."""
    return SubModule(V.ring, V.rank, tuple(V.generators) + tuple(_ideal_multiples(I, V.rank)))


def module_contains(V: SubModule, v: ModVec, I: Ideal = None) -> bool:
    W = with_ideal(V, I) if I is not None else V
    if not W.generators:
        return v.is_zero()
    return normal_form(v, W).is_zero()


def module_equal(U: SubModule, V: SubModule, I: Ideal = None) -> bool:
    """Mutual containment of U and V modulo I·P^m."""
    if U.rank != V.rank:
        raise ValueError(f"rank mismatch: {U.rank} vs {V.rank}")
    return (all(module_contains(V, u, I) for u in U.generators)
            and all(module_contains(U, v, I) for v in V.generators))


def express_in_generators(v: ModVec, gens: Sequence[ModVec], I: Ideal = None,
                          order: MonomialOrder = GREVLEX) -> Optional[list]:
    """Coefficients c with v ≡ sum c_k gens_k modulo I·P^m, or None.

    The lift is deterministic but not unique.
    """
    gens = tuple(gens)
    if not gens:
        return None if not v.is_zero() else []
    if any(g.rank != v.rank for g in gens):
        raise ValueError("rank mismatch")
    extra = tuple(_ideal_multiples(I, v.rank)) if I is not None else ()
    tb = _tracked(gens + extra, order)
    coeffs = tb.lift(v)
    if coeffs is None:
        return None
    return coeffs[:len(gens)]
