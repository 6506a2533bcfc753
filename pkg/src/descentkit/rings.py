"""Finite unital rings, ring homomorphisms, units and local decompositions.

A ring is stored by its additive coordinates: the additive group is
Z/d_0 + ... + Z/d_{m-1} with basis e_0..e_{m-1}, and multiplication is given
by structure constants ``struct[i, j] = coords(e_i * e_j)``.  Element indices
are the little-endian mixed-radix encodings of coordinate vectors, so for
Z/n the index of a residue is the residue itself.  Full addition and
multiplication tables are materialized lazily when the order is within the
table bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import gcd, prod
from typing import Sequence

import numpy as np

from .abelian import abelian_basis
from .errors import BoundExceeded, NotComposable, NotIrreducible, NotPrime
from .linalg import subgroup_structure

DEFAULT_BOUND = 4096
AUDIT_FULL = 256


class Coordinates:
    """Mixed-radix indexing of a finite abelian group prod Z/moduli."""

    def __init__(self, moduli: Sequence[int]):
        self.moduli = tuple(int(d) for d in moduli)
        if any(d < 1 for d in self.moduli):
            raise ValueError("moduli must be positive")
        self.m = len(self.moduli)
        self.order = prod(self.moduli)
        radix, acc = [], 1
        for d in self.moduli:
            radix.append(acc)
            acc *= d
        self._radix = np.array(radix, dtype=np.int64)
        self._mods = np.array(self.moduli, dtype=np.int64)

    def coords(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self._radix) % self._mods

    def index(self, vec) -> np.ndarray | int:
        vec = np.asarray(vec, dtype=np.int64) % self._mods
        out = vec @ self._radix if self.m else np.zeros(vec.shape[:-1], dtype=np.int64)
        return int(out) if np.ndim(out) == 0 else out

    def reduce(self, vec) -> np.ndarray:
        return np.asarray(vec, dtype=np.int64) % self._mods

    @cached_property
    def all_coords(self) -> np.ndarray:
        return self.coords(np.arange(self.order, dtype=np.int64)).reshape(self.order, self.m)

    def add(self, a, b):
        return self.index(self.coords(a) + self.coords(b))

    def neg(self, a):
        return self.index(-self.coords(a))


class FiniteRing(Coordinates):
    """A finite unital ring in structure-constant form."""

    def __init__(self, moduli, struct, one, *, name: str | None = None,
                 labels: Sequence[str] | None = None, bound: int = DEFAULT_BOUND):
        super().__init__(moduli)
        m = self.m
        struct = np.asarray(struct, dtype=np.int64).reshape(m, m, m)
        self.struct = struct % self._mods if m else struct
        self.one_coords = self.reduce(np.asarray(one, dtype=np.int64).reshape(m))
        self.one = self.index(self.one_coords)
        self.zero = 0
        self.name = name
        self.labels = list(labels) if labels is not None else None
        self.bound = bound

    def __repr__(self):
        return f"FiniteRing({self.name or ''} order={self.order})"

    # element arithmetic (vectorized over numpy index arrays)
    def mul_coords(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if not self.m:
            return np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=np.int64)
        return np.einsum("...i,...j,ijk->...k", x, y, self.struct) % self._mods

    def mul(self, a, b):
        if "mul_table" in self.__dict__:
            return self.mul_table[a, b] if np.ndim(a) or np.ndim(b) else int(self.mul_table[a, b])
        return self.index(self.mul_coords(self.coords(a), self.coords(b)))

    def inverse(self, a: int) -> int:
        hits = np.nonzero(np.asarray(self.mul(np.full(self.order, a, dtype=np.int64),
                                              np.arange(self.order, dtype=np.int64))) == self.one)[0]
        if len(hits) == 0:
            raise ZeroDivisionError("element is not a unit")
        return int(hits[0])

    def left_matrix(self, x) -> np.ndarray:
        """Matrix of y -> x*y acting on coordinate row vectors."""
        return np.einsum("i,ijk->jk", np.asarray(x, dtype=np.int64), self.struct) % self._mods

    def right_matrix(self, x) -> np.ndarray:
        """Matrix of y -> y*x acting on coordinate row vectors."""
        return np.einsum("j,ijk->ik", np.asarray(x, dtype=np.int64), self.struct) % self._mods

    def _check_bound(self):
        if self.order > self.bound:
            raise BoundExceeded(f"ring of order {self.order} exceeds table bound {self.bound}")

    @cached_property
    def add_table(self) -> np.ndarray:
        self._check_bound()
        c = self.all_coords
        return self.index(c[:, None, :] + c[None, :, :])

    @cached_property
    def mul_table(self) -> np.ndarray:
        self._check_bound()
        c = self.all_coords
        n = self.order
        out = np.empty((n, n), dtype=np.int64)
        step = max(1, 2_000_000 // max(1, n * max(1, self.m)))
        for lo in range(0, n, step):
            out[lo:lo + step] = self.index(self.mul_coords(c[lo:lo + step, None, :], c[None, :, :]))
        return out

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self.index(-self.all_coords)

    @cached_property
    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.struct, self.struct.transpose(1, 0, 2)))

    def audit(self, seed: int = 0) -> None:
        """Check the ring axioms; raises AssertionError on failure.

        The structure constants are checked exactly on basis triples, which
        is complete by multilinearity.  Small rings are additionally checked
        by enumerating every triple of the tables; larger ones on a seeded
        random sample of triples.
        """
        m, S, d = self.m, self.struct, self._mods
        for i, j in product(range(m), repeat=2):
            g = gcd(self.moduli[i], self.moduli[j])
            assert not np.any((g * S[i, j]) % d), "product not well defined"
        if m:
            lhs = np.einsum("ijp,pkq->ijkq", S, S) % d
            rhs = np.einsum("jkp,ipq->ijkq", S, S) % d
            assert np.array_equal(lhs, rhs), "multiplication not associative"
            eye = np.eye(m, dtype=np.int64)
            assert np.array_equal(self.left_matrix(self.one_coords), eye % d), "one is not a left identity"
            assert np.array_equal(self.right_matrix(self.one_coords), eye % d), "one is not a right identity"
        if self.order <= AUDIT_FULL:
            A, M = self.add_table, self.mul_table
            n = self.order
            assert np.all(A[0] == np.arange(n)) and np.all(A == A.T)
            assert np.all(M[self.one] == np.arange(n)) and np.all(M[:, self.one] == np.arange(n))
            for a in range(n):
                assert np.array_equal(A[A[a]], A[a][A]), "addition not associative"
                assert np.array_equal(M[M[a]], M[a][M]), "multiplication not associative"
                assert np.array_equal(M[a][A], A[M[a][:, None], M[a][None, :]]), "left distributivity"
                assert np.array_equal(M[:, a][A], A[M[:, a][:, None], M[:, a][None, :]]), "right distributivity"
            assert (bool(np.array_equal(M, M.T))) == self.is_commutative
        else:
            rng = np.random.default_rng(seed)
            x, y, z = (rng.integers(0, self.order, 10_000) for _ in range(3))
            left = self.mul(self.mul(x, y), z)
            right = self.mul(x, self.mul(y, z))
            assert np.array_equal(left, right), "sampled associativity failure"
            assert np.array_equal(self.mul(x, self.add(y, z)),
                                  self.add(self.mul(x, y), self.mul(x, z))), "sampled distributivity"

    def is_unit(self, a: int) -> bool:
        if self.order <= self.bound:
            return bool(np.any(self.mul_table[a] == self.one))
        L = self.left_matrix(self.coords(a))
        orders, _ = subgroup_structure(L.tolist(), self.moduli)
        return prod(orders) == self.order

    @cached_property
    def unit_elements(self) -> list[int]:
        if self.order <= self.bound:
            hits = np.any(self.mul_table == self.one, axis=1)
            return [int(i) for i in np.nonzero(hits)[0]]
        return [a for a in range(self.order) if self.is_unit(a)]

    @cached_property
    def idempotents(self) -> list[int]:
        M = self.mul_table
        return [int(i) for i in range(self.order) if M[i, i] == i]

    def canonical_json(self) -> dict:
        return {"order": self.order,
                "add": self.add_table.tolist(),
                "mul": self.mul_table.tolist(),
                "zero": self.zero, "one": self.one}


# ---------------------------------------------------------------------------
# constructors


def mk_zmod(n: int, bound: int = DEFAULT_BOUND) -> FiniteRing:
    if n < 1:
        raise ValueError("n must be positive")
    if n > bound:
        raise BoundExceeded(f"Z/{n} exceeds bound {bound}")
    if n == 1:
        return FiniteRing((), np.zeros((0, 0, 0)), (), name="Z/1", bound=bound)
    return FiniteRing((n,), [[[1]]], (1,), name=f"Z/{n}",
                      labels=[str(i) for i in range(n)], bound=bound)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic f, coefficients constant term first."""
    a = [c % p for c in a]
    d = len(f) - 1
    for k in range(len(a) - 1, d - 1, -1):
        c = a[k]
        if c:
            for i in range(d + 1):
                a[k - d + i] = (a[k - d + i] - c * f[i]) % p
    return (a[:d] + [0] * d)[:d]


def _divides(g: list[int], f: list[int], p: int) -> bool:
    return not any(_poly_mod(f, g, p))


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(f)/2."""
    f = [c % p for c in f]
    d = len(f) - 1
    for k in range(1, d // 2 + 1):
        for low in product(range(p), repeat=k):
            if _divides(list(low) + [1], f, p):
                return False
    return True


def mk_galois_field(p: int, poly: Sequence[int], bound: int = DEFAULT_BOUND) -> FiniteRing:
    """The field F_p[x]/(f); ``poly`` lists coefficients from the constant term up."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    f = [int(c) % p for c in poly]
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    d = len(f) - 1
    if d < 1 or f[-1] != 1:
        raise NotIrreducible("polynomial must be monic of degree at least 1")
    if not is_irreducible(f, p):
        raise NotIrreducible(f"{list(poly)} is reducible over F_{p}")
    if p ** d > bound:
        raise BoundExceeded(f"F_{p}^{d} exceeds bound {bound}")
    struct = np.zeros((d, d, d), dtype=np.int64)
    for i, j in product(range(d), repeat=2):
        mono = [0] * (i + j) + [1]
        struct[i, j] = _poly_mod(mono, f, p)
    one = [1] + [0] * (d - 1)
    return FiniteRing((p,) * d, struct, one, name=f"F_{p ** d}", bound=bound)


@dataclass(frozen=True)
class ProductRing:
    ring: FiniteRing
    projections: tuple["RingHom", "RingHom"]


def mk_product(R: FiniteRing, S: FiniteRing, bound: int = DEFAULT_BOUND) -> ProductRing:
    if R.order * S.order > bound:
        raise BoundExceeded(f"product of order {R.order * S.order} exceeds bound {bound}")
    m, n = R.m, S.m
    struct = np.zeros((m + n, m + n, m + n), dtype=np.int64)
    struct[:m, :m, :m] = R.struct
    struct[m:, m:, m:] = S.struct
    one = np.concatenate([R.one_coords, S.one_coords])
    P = FiniteRing(R.moduli + S.moduli, struct, one,
                   name=f"({R.name}x{S.name})", bound=bound)
    eye = np.eye(m + n, dtype=np.int64)
    p1 = RingHom(P, R, eye[:, :m])
    p2 = RingHom(P, S, eye[:, m:])
    return ProductRing(P, (p1, p2))


def mk_product_many(factors: Sequence[FiniteRing], bound: int = DEFAULT_BOUND) -> FiniteRing:
    if not factors:
        return mk_zmod(1, bound)
    acc = factors[0]
    for F in factors[1:]:
        acc = mk_product(acc, F, bound).ring
    return acc


def ring_from_tables(add: Sequence[Sequence[int]], mul: Sequence[Sequence[int]],
                     bound: int = DEFAULT_BOUND) -> FiniteRing:
    """Build a ring from explicit tables; elements are re-indexed by coordinates.

    The returned ring carries ``labels`` naming the original index of every
    element and an ``input_index`` map from original to new indices.
    """
    add = np.asarray(add, dtype=np.int64)
    mul = np.asarray(mul, dtype=np.int64)
    n = add.shape[0]
    if n > bound:
        raise BoundExceeded(f"table ring of order {n} exceeds bound {bound}")
    if add.shape != (n, n) or mul.shape != (n, n):
        raise ValueError("tables must be square and of equal size")
    zeros = [z for z in range(n) if np.all(add[z] == np.arange(n))]
    if len(zeros) != 1:
        raise ValueError("addition table has no unique identity")
    zero = zeros[0]
    ones = [u for u in range(n) if np.all(mul[u] == np.arange(n)) and np.all(mul[:, u] == np.arange(n))]
    if len(ones) != 1:
        raise ValueError("multiplication table has no identity")
    moduli, basis, coords = abelian_basis(list(range(n)), lambda a, b: int(add[a, b]), zero)
    m = len(moduli)
    C = Coordinates(moduli)
    struct = np.zeros((m, m, m), dtype=np.int64)
    for i, j in product(range(m), repeat=2):
        struct[i, j] = coords[int(mul[basis[i], basis[j]])]
    R = FiniteRing(moduli, struct, coords[ones[0]], name="tables", bound=bound)
    new_index = {x: C.index(np.array(c, dtype=np.int64).reshape(m)) for x, c in coords.items()}
    labels = [""] * n
    for old, new in new_index.items():
        labels[new] = str(old)
    R.labels = labels
    R.input_index = new_index
    # the re-indexed tables must reproduce the input tables
    perm = np.array([new_index[x] for x in range(n)])
    if n <= bound:
        assert np.array_equal(R.add_table[perm[:, None], perm[None, :]], perm[add]), "addition mismatch"
        if not np.array_equal(R.mul_table[perm[:, None], perm[None, :]], perm[mul]):
            raise ValueError("multiplication table is not bilinear over the addition")
    return R


def subring_on(R: FiniteRing, elements: Sequence[int], one: int, name: str | None = None):
    """The ring carried by a subset closed under + and *, with its own unit.

    Returns (ring, to_sub) where ``to_sub`` maps R-indices of the subset to
    indices of the new ring.  Used for corners eR of idempotents.
    """
    A, M = R.add_table, R.mul_table
    elements = sorted(int(x) for x in elements)
    moduli, basis, coords = abelian_basis(elements, lambda a, b: int(A[a, b]), R.zero)
    m = len(moduli)
    C = Coordinates(moduli)
    struct = np.zeros((m, m, m), dtype=np.int64)
    for i, j in product(range(m), repeat=2):
        struct[i, j] = coords[int(M[basis[i], basis[j]])]
    S = FiniteRing(moduli, struct, coords[one], name=name, bound=R.bound)
    to_sub = {x: int(C.index(np.array(c, dtype=np.int64).reshape(m))) for x, c in coords.items()}
    return S, to_sub


# ---------------------------------------------------------------------------
# homomorphisms


class RingHom:
    """Additive map given on basis elements; ``matrix[i]`` = coords of image of e_i."""

    def __init__(self, source: FiniteRing, target: FiniteRing, matrix):
        self.source, self.target = source, target
        mat = np.asarray(matrix, dtype=np.int64).reshape(source.m, target.m)
        self.matrix = mat % target._mods if target.m else mat

    def __call__(self, a):
        c = self.source.coords(a)
        return self.target.index(c @ self.matrix)

    def apply_coords(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.int64) @ self.matrix % self.target._mods

    @cached_property
    def table(self) -> np.ndarray:
        return np.asarray(self(np.arange(self.source.order)))

    def check(self) -> bool:
        """Well defined, unital and multiplicative (exact, via bilinearity)."""
        S, T, F = self.source, self.target, self.matrix
        for i, d in enumerate(S.moduli):
            if np.any((d * F[i]) % T._mods):
                return False
        if not np.array_equal(self.apply_coords(S.one_coords), T.one_coords):
            return False
        lhs = np.einsum("ijk,kl->ijl", S.struct, F) % T._mods
        rhs = np.einsum("ia,jb,abl->ijl", F, F, T.struct) % T._mods
        return bool(np.array_equal(lhs, rhs))

    def is_injective(self) -> bool:
        orders, _ = subgroup_structure(self.matrix.tolist(), self.target.moduli)
        return prod(orders) == self.source.order

    def equals(self, other: "RingHom") -> bool:
        return (self.source is other.source and self.target is other.target
                and np.array_equal(self.matrix, other.matrix))

    @staticmethod
    def from_images(source: FiniteRing, target: FiniteRing, images: Sequence[int]) -> "RingHom":
        """Hom determined by the target indices of the source basis elements."""
        return RingHom(source, target, target.coords(np.asarray(images, dtype=np.int64)).reshape(source.m, target.m))

    @staticmethod
    def identity(R: FiniteRing) -> "RingHom":
        return RingHom(R, R, np.eye(R.m, dtype=np.int64))


def compose(g: RingHom, f: RingHom) -> RingHom:
    """g after f."""
    if f.target is not g.source:
        raise NotComposable("target of the first map is not the source of the second")
    return RingHom(f.source, g.target, f.matrix @ g.matrix)


def canonical_hom(source: FiniteRing, target: FiniteRing) -> RingHom:
    """The unique unital map out of a ring whose additive group is generated by 1."""
    if source.m == 0:
        return RingHom(source, target, np.zeros((0, target.m)))
    if source.m != 1 or source.one_coords[0] % source.moduli[0] == 0:
        raise ValueError("source is not additively generated by its unit")
    u = int(source.one_coords[0])
    if gcd(u, source.moduli[0]) != 1:
        raise ValueError("source is not additively generated by its unit")
    # e_0 = u^{-1} * 1
    k = pow(u, -1, source.moduli[0]) if source.moduli[0] > 1 else 0
    h = RingHom(source, target, (k * target.one_coords).reshape(1, target.m))
    if not h.check():
        raise ValueError("characteristic mismatch: no unital map exists")
    return h


def diagonal(R: FiniteRing, bound: int = DEFAULT_BOUND) -> RingHom:
    P = mk_product(R, R, bound).ring
    return RingHom(R, P, np.concatenate([np.eye(R.m, dtype=np.int64)] * 2, axis=1))


# ---------------------------------------------------------------------------
# units and local decomposition


def units(R: FiniteRing):
    """Units of R as a FiniteGroup; the group's elements are R-indices."""
    from .groups import FiniteGroup

    G = FiniteGroup(R.unit_elements, R.mul, R.one, name=f"U({R.name or 'R'})")
    if R.is_commutative:
        G._abelian = True
    return G


def units_functor_on_hom(h: RingHom):
    from .groups import GroupHom

    src, tgt = units(h.source), units(h.target)
    return GroupHom(src, tgt, [int(h(x)) for x in src.elements])


@dataclass
class IdempotentDecomposition:
    idempotents: list[int]
    factors: list[FiniteRing]
    product: FiniteRing
    iso: np.ndarray           # R-index -> product-index
    local: list[bool]

    def verify(self, R: FiniteRing) -> bool:
        n = R.order
        if len(set(self.iso.tolist())) != n or self.product.order != n:
            return False
        A, M = R.add_table, R.mul_table
        PA, PM = self.product.add_table, self.product.mul_table
        f = self.iso
        return bool(np.array_equal(f[A], PA[f[:, None], f[None, :]])
                    and np.array_equal(f[M], PM[f[:, None], f[None, :]])
                    and f[R.one] == self.product.one)


def is_local(R: FiniteRing) -> bool:
    """Non-units form an ideal (closed under + and under multiplication)."""
    if R.order == 1:
        return False
    nonunits = np.array(sorted(set(range(R.order)) - set(R.unit_elements)), dtype=np.int64)
    mask = np.zeros(R.order, dtype=bool)
    mask[nonunits] = True
    if not np.all(mask[R.add_table[np.ix_(nonunits, nonunits)]]):
        return False
    return bool(np.all(mask[R.mul_table[:, nonunits]]) and np.all(mask[R.mul_table[nonunits, :]]))


def local_decomposition(R: FiniteRing) -> IdempotentDecomposition:
    if not R.is_commutative:
        from .errors import NotCommutative
        raise NotCommutative("local decomposition needs a commutative ring")
    M = R.mul_table
    ids = [e for e in R.idempotents if e != R.zero]
    # primitive: no idempotent strictly below e
    prim = [e for e in ids if not any(f != e and M[e, f] == f for f in ids)]
    factors, maps = [], []
    for e in prim:
        elems = sorted(set(int(x) for x in M[e]))
        S, to_sub = subring_on(R, elems, e, name=f"{R.name}e{e}")
        factors.append(S)
        maps.append(to_sub)
    P = mk_product_many(factors, max(R.bound, R.order))
    # product index is little-endian over factors
    iso = np.zeros(R.order, dtype=np.int64)
    for r in range(R.order):
        idx, w = 0, 1
        for e, S, to_sub in zip(prim, factors, maps):
            idx += w * to_sub[int(M[e, r])]
            w *= S.order
        iso[r] = idx
    return IdempotentDecomposition(prim, factors, P, iso, [is_local(S) for S in factors])
