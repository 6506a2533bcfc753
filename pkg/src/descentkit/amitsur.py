"""The Amitsur complex of a map of commutative rings A -> B, its units, and
low-degree cohomology; the coring B (x)_A B and its automorphisms.

Level n is B^(x)(n+1) over A.  Face i: level n-1 -> level n inserts 1 into
slot n-i, so on level 0 the first face is b -> b (x) 1 and the second is
b -> 1 (x) b.  Degeneracy j: level n -> level n-1 multiplies slots n-1-j
and n-j.  This is the usual convention read with the slots reversed, so all
cosimplicial identities hold in their standard form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

import numpy as np

from .errors import BoundExceeded, NotCommutative
from .groups import (AmbientGroup, FiniteGroup, GroupHom, PointedSet, image, kernel,
                     quotient_abelian, subgroup)
from .modules import (solution_matrices, FiniteModule, ModuleHom, MultiTensor, aut_group, algebra_module,
                      hom_solutions, multilinear, single)
from .rings import DEFAULT_BOUND, FiniteRing, RingHom, units

CORING_BOUND = 256
LEVEL_BOUND = 1 << 16


# ---------------------------------------------------------------------------
# levels, faces and degeneracies


def level_layout(iota: RingHom, n: int) -> MultiTensor:
    B = iota.target
    Bm = algebra_module(B, iota, iota, name=B.name or "B")
    return MultiTensor(iota.source, [Bm] * (n + 1), [Bm.right] * (n + 1), [Bm.left] * (n + 1))


def level_ring(iota: RingHom, layout: MultiTensor, bound: int = DEFAULT_BOUND, name: str = "") -> FiniteRing:
    """Factorwise multiplication on B (x) ... (x) B."""
    B = iota.target
    n = layout.nslots
    E, Q = layout.E, layout.Q
    letters = "abcdefghijkl"
    a, b, c = letters[:n], letters[n:2 * n], "mnopqrsvwxyz"[:n]
    terms = [f"t{a}", f"s{b}"] + [f"{a[i]}{b[i]}{c[i]}" for i in range(n)] + [f"{c}u"]
    st = np.einsum(",".join(terms) + "->tsu", E, E, *([B.struct] * n), Q, optimize=True)
    one = layout.encode([B.one_coords] * n)
    return FiniteRing(layout.moduli, st, one, name=name, bound=bound)


def insert_unit(src: MultiTensor, dst: MultiTensor, slot: int, one) -> np.ndarray:
    blocks = [(np.eye(len(src.slot_moduli[s]), dtype=np.int64), [s], [s if s < slot else s + 1])
              for s in range(src.nslots)]
    blocks.append((np.asarray(one, dtype=np.int64), [], [slot]))
    return multilinear(src, dst, blocks)


def merge_slots(src: MultiTensor, dst: MultiTensor, slot: int, struct: np.ndarray) -> np.ndarray:
    """Multiply slots ``slot`` and ``slot+1``."""
    blocks = []
    for s in range(src.nslots):
        if s == slot:
            blocks.append((struct, [slot, slot + 1], [slot]))
        elif s == slot + 1:
            continue
        else:
            blocks.append((np.eye(len(src.slot_moduli[s]), dtype=np.int64), [s], [s if s < slot else s - 1]))
    return multilinear(src, dst, blocks)


@dataclass
class IdentityCheck:
    name: str
    holds: bool


class AmitsurComplex:
    def __init__(self, iota: RingHom, n_max: int = 2, bound: int = DEFAULT_BOUND,
                 level_bound: int = LEVEL_BOUND):
        A, B = iota.source, iota.target
        if not (A.is_commutative and B.is_commutative):
            raise NotCommutative("the Amitsur complex needs commutative rings")
        self.iota, self.A, self.B, self.n_max, self.bound = iota, A, B, n_max, bound
        self.layouts: list[MultiTensor] = []
        self.levels: list[FiniteRing] = []
        for n in range(n_max + 1):
            lay = level_layout(iota, n)
            # levels past ``bound`` exist without element tables
            if lay.order > level_bound:
                raise BoundExceeded(f"level {n} has {lay.order} elements, bound {level_bound}")
            self.layouts.append(lay)
            self.levels.append(level_ring(iota, lay, bound, name=f"{B.name}^{n + 1}"))
        self.faces: dict[tuple[int, int], RingHom] = {}
        self.degeneracies: dict[tuple[int, int], RingHom] = {}
        for n in range(1, n_max + 1):
            for i in range(n + 1):
                mat = insert_unit(self.layouts[n - 1], self.layouts[n], n - i, B.one_coords)
                self.faces[n, i] = RingHom(self.levels[n - 1], self.levels[n], mat)
            for j in range(n):
                mat = merge_slots(self.layouts[n], self.layouts[n - 1], n - 1 - j, B.struct)
                self.degeneracies[n, j] = RingHom(self.levels[n], self.levels[n - 1], mat)

    def face(self, n: int, i: int) -> RingHom:
        """Face i from level n-1 to level n."""
        return self.faces[n, i]

    def degeneracy(self, n: int, j: int) -> RingHom:
        """Degeneracy j from level n to level n-1."""
        return self.degeneracies[n, j]

    def check_homs(self) -> bool:
        return all(h.check() for h in list(self.faces.values()) + list(self.degeneracies.values()))

    def check_identities(self) -> list[IdentityCheck]:
        d, s = self.face, self.degeneracy
        out = []

        def same(f1, f2):
            return bool(np.array_equal((f1[0].matrix @ f1[1].matrix) % f1[1].target._mods,
                                       (f2[0].matrix @ f2[1].matrix) % f2[1].target._mods))

        for n in range(1, self.n_max):
            # d^{n+1}_j d^n_i = d^{n+1}_i d^n_{j-1} for i < j
            for j in range(n + 2):
                for i in range(j):
                    out.append(IdentityCheck(f"d{j}d{i}=d{i}d{j - 1}@{n}",
                                             same((d(n, i), d(n + 1, j)), (d(n, j - 1), d(n + 1, i)))))
        for n in range(1, self.n_max + 1):
            # s^n_j d^n_i : level n-1 -> level n-1
            for j in range(n):
                for i in range(n + 1):
                    lhs = (d(n, i), s(n, j))
                    if i < j:
                        holds = same(lhs, (s(n - 1, j - 1), d(n - 1, i)))
                    elif i in (j, j + 1):
                        comp = (lhs[0].matrix @ lhs[1].matrix) % self.levels[n - 1]._mods
                        holds = bool(np.array_equal(comp, np.eye(self.levels[n - 1].m, dtype=np.int64) % self.levels[n - 1]._mods))
                    else:
                        holds = same(lhs, (s(n - 1, j), d(n - 1, i - 1)))
                    out.append(IdentityCheck(f"s{j}d{i}@{n}", holds))
        for n in range(2, self.n_max + 1):
            # s^{n-1}_j s^n_i = s^{n-1}_i s^n_{j+1} for i <= j
            for j in range(n - 1):
                for i in range(j + 1):
                    out.append(IdentityCheck(f"s{j}s{i}=s{i}s{j + 1}@{n}",
                                             same((s(n, i), s(n - 1, j)), (s(n, j + 1), s(n - 1, i)))))
        return out

    def identities_hold(self) -> bool:
        return all(c.holds for c in self.check_identities())

    def json(self) -> dict:
        return {"levels": [L.order for L in self.levels]}


def build_amitsur(iota: RingHom, n_max: int = 2, bound: int = DEFAULT_BOUND,
                  level_bound: int = LEVEL_BOUND) -> AmitsurComplex:
    return AmitsurComplex(iota, n_max, bound, level_bound)


# ---------------------------------------------------------------------------
# units


def _ring_units_group(L: FiniteRing, bound: int) -> AmbientGroup:
    if L.order <= bound:
        return units(L)
    return AmbientGroup(L.mul, L.one, name=f"U({L.name})")


class UnitsCosimplicial:
    """Units of every level; levels above ``enum_bound`` are left unenumerated."""

    def __init__(self, C: AmitsurComplex, enum_bound: int = DEFAULT_BOUND):
        self.complex = C
        self.groups = [_ring_units_group(L, enum_bound) for L in C.levels]

    def coface(self, n: int, i: int) -> GroupHom:
        h = self.complex.face(n, i)
        return GroupHom(self.groups[n - 1], self.groups[n], [int(h(x)) for x in self.groups[n - 1].elements])

    def codegeneracy(self, n: int, j: int) -> GroupHom:
        h = self.complex.degeneracy(n, j)
        return GroupHom(self.groups[n], self.groups[n - 1], [int(h(x)) for x in self.groups[n].elements])


def units_cosimplicial(C: AmitsurComplex) -> UnitsCosimplicial:
    return UnitsCosimplicial(C)


def _alternating(C: AmitsurComplex, n: int, xs: Sequence[int]) -> list[int]:
    L = C.levels[n]
    out = []
    for x in xs:
        acc = L.one
        for i in range(n + 1):
            y = int(C.face(n, i)(x))
            acc = L.mul(acc, y if i % 2 == 0 else L.inverse(y))
        out.append(int(acc))
    return out


def delta_n(U: UnitsCosimplicial, n: int) -> GroupHom:
    """The alternating product of the cofaces, from units of level n-1 to level n."""
    src = U.groups[n - 1]
    return GroupHom(src, U.groups[n], _alternating(U.complex, n, src.elements), name=f"Delta{n}")


def z1(U: UnitsCosimplicial) -> list[int]:
    """Cocycles: units x of level 1 with d1(x) = d2(x) d0(x)."""
    C = U.complex
    L2 = C.levels[2]
    d0, d1, d2 = (C.face(2, i) for i in range(3))
    xs = np.array(U.groups[1].elements, dtype=np.int64)
    lhs = np.asarray(d1(xs))
    rhs = np.asarray(L2.mul(np.asarray(d2(xs)), np.asarray(d0(xs))))
    return [int(x) for x, a, b in zip(xs, lhs, rhs) if a == b]


@dataclass
class H1Result:
    cocycles: list[int]
    classes: list[list[int]]          # coboundary orbits, the identity's first
    group: FiniteGroup | None
    pointed: PointedSet

    @property
    def order(self) -> int:
        return len(self.classes)

    def class_of(self, x: int) -> int:
        for i, c in enumerate(self.classes):
            if x in c:
                return i
        raise KeyError(x)


def h1(U: UnitsCosimplicial) -> H1Result:
    """Orbits of Z^1 under x -> d1(y) x d0(y)^-1 for y a unit of B."""
    C = U.complex
    L1 = C.levels[1]
    cocycles = z1(U)
    zset = set(cocycles)
    d0, d1 = C.face(1, 0), C.face(1, 1)
    ys = U.groups[0].elements
    left = [int(d1(y)) for y in ys]
    right = [int(L1.inverse(int(d0(y)))) for y in ys]
    seen, classes = set(), []
    order = [L1.one] + [x for x in cocycles if x != L1.one]
    for x in order:
        if x in seen:
            continue
        orbit = sorted({int(L1.mul(L1.mul(a, x), b)) for a, b in zip(left, right)})
        if not set(orbit) <= zset:
            raise AssertionError("coboundary action leaves the cocycles")
        seen |= set(orbit)
        classes.append(orbit)
    group = None
    if isinstance(U.groups[1], FiniteGroup):
        G1 = U.groups[1]
        Z = subgroup(G1, [G1.index(x) for x in cocycles], name="Z1")
        Bd = image(delta_n(U, 1))
        Bsub = subgroup(Z, [Z.index(x) for x in Bd.elements], name="B1")
        group, _ = quotient_abelian(Z, Bsub)
    pointed = PointedSet([c[0] for c in classes], 0, name="H1")
    return H1Result(cocycles, classes, group, pointed)


@dataclass
class CohomologyGroup:
    n: int
    group: FiniteGroup
    cycles: FiniteGroup
    boundaries: FiniteGroup


def hn_abelian(U: UnitsCosimplicial, n: int) -> CohomologyGroup:
    """ker Delta_{n+1} / im Delta_n (Delta_0 trivial), abelian coefficients."""
    if n + 1 > U.complex.n_max:
        raise ValueError("complex not built high enough")
    Gn = U.groups[n]
    if not isinstance(Gn, FiniteGroup):
        raise BoundExceeded(f"units of level {n} not enumerated")
    Z = kernel(delta_n(U, n + 1))
    if n == 0:
        Bpos = [Z.identity]
    else:
        Bd = image(delta_n(U, n))
        Bpos = [Z.index(x) for x in Bd.elements]
    Bsub = subgroup(Z, Bpos, name=f"B{n}")
    Q, _ = quotient_abelian(Z, Bsub)
    Q.name = f"H{n}"
    return CohomologyGroup(n, Q, Z, Bsub)


def h0_equalizer(C: AmitsurComplex) -> list[int]:
    """Elements of B on which the two cofaces of level 0 agree."""
    d0, d1 = C.face(1, 0).table, C.face(1, 1).table
    return [int(b) for b in np.nonzero(d0 == d1)[0]]


# ---------------------------------------------------------------------------
# the coring A (x)_k A


class CoringCe:
    """A (x)_k A with comultiplication a (x) b -> a (x) 1 (x) b and counit
    the multiplication, for a unit map e: k -> A of commutative rings."""

    def __init__(self, e: RingHom, bound: int = DEFAULT_BOUND):
        self.e = e
        self.A = e.target
        self.complex = AmitsurComplex(e, 2, bound)
        self.ring = self.complex.levels[1]
        A = self.A
        idA = RingHom.identity(A)
        self.module = FiniteModule(self.ring.moduli, None, None, name=f"{A.name}(x){A.name}")
        lay = self.complex.layouts[1]
        left = lay.slot_action(0, algebra_module(A, idA).left)
        right = lay.slot_action(1, algebra_module(A, None, idA).right)
        self.module = FiniteModule(self.ring.moduli, left, right, name=self.module.name)
        # comultiplication into level 2, which is C (x)_A C
        self.comultiplication = self.complex.face(2, 1)
        self.counit = RingHom(self.ring, A, merge_slots(lay, single(algebra_module(A)), 0, A.struct))

    def simple(self, a: int, b: int) -> int:
        A = self.A
        return int(self.complex.layouts[1].index_of([A.coords(a), A.coords(b)]))

    def comultiply_pair(self, phi_left: int, phi_right: int) -> int:
        """(x (x)_A y) in C (x)_A C as an element of level 2."""
        L2 = self.complex.levels[2]
        return int(L2.mul(int(self.complex.face(2, 0)(phi_left)), int(self.complex.face(2, 2)(phi_right))))

    def check_laws(self) -> dict:
        """Coassociativity through level 3 and both counit laws, as matrices."""
        C = self.complex
        lay3 = level_layout(self.e, 3)
        one = self.A.one_coords
        l1, l2 = C.layouts[1], C.layouts[2]
        c1 = insert_unit(l1, l2, 1, one)
        left = (c1 @ insert_unit(l2, lay3, 1, one)) % np.array(lay3.moduli)
        right = (c1 @ insert_unit(l2, lay3, 2, one)) % np.array(lay3.moduli)
        ident = np.eye(l1.m, dtype=np.int64) % np.array(l1.moduli)
        cl = (c1 @ merge_slots(l2, l1, 0, self.A.struct)) % np.array(l1.moduli)
        cr = (c1 @ merge_slots(l2, l1, 1, self.A.struct)) % np.array(l1.moduli)
        return {"coassociative": bool(np.array_equal(left, right)),
                "counit_left": bool(np.array_equal(cl, ident)),
                "counit_right": bool(np.array_equal(cr, ident))}

    def is_coring_map(self, phi: ModuleHom) -> bool:
        A, n = self.A, self.A.order
        eps = self.counit
        gens = A.all_coords
        basis = [A.index(v) for v in np.eye(A.m, dtype=np.int64)] if A.m else []
        for a in basis:
            for b in basis:
                x = self.simple(a, b)
                if int(eps(int(phi(x)))) != int(eps(x)):
                    return False
                lhs = int(self.comultiplication(int(phi(x))))
                rhs = self.comultiply_pair(int(phi(self.simple(a, A.one))), int(phi(self.simple(A.one, b))))
                if lhs != rhs:
                    return False
        return True


@dataclass
class CoringAutomorphisms:
    group: FiniteGroup            # elements are matrices on C
    endomorphisms: list[ModuleHom]
    end_equals_aut: bool
    coring: CoringCe


def coring_automorphisms(e: RingHom, bound: int = CORING_BOUND) -> CoringAutomorphisms:
    C = CoringCe(e)
    M = C.module
    if M.order > bound:
        raise BoundExceeded(f"|A (x) A| = {M.order} exceeds {bound}")
    sol = hom_solutions(M, M, ("left", "right"))
    endos = [f for f in (ModuleHom(M, M, F) for F in solution_matrices(sol, M.m, M.m)) if C.is_coring_map(f)]
    auts = [f for f in endos if f.is_bijective()]
    d = M._mods
    G = FiniteGroup([f.matrix for f in auts], lambda F, G_: (G_ @ F) % d,
                    np.eye(M.m, dtype=np.int64) % d, name="Aut_cor")
    return CoringAutomorphisms(G, endos, len(auts) == len(endos), C)


def regular_auts(A: FiniteRing, bound: int = DEFAULT_BOUND) -> FiniteGroup:
    """Automorphisms of A as a right module over itself (matrices)."""
    return aut_group(algebra_module(A, None, RingHom.identity(A), name=A.name), name=f"Aut({A.name}_A)")


def unit_of(lam: np.ndarray, A: FiniteRing) -> int:
    """lam(1) for a right-module automorphism given by its matrix."""
    return int(A.index(A.one_coords @ lam))


def kappa(lam: np.ndarray, C: CoringCe) -> ModuleHom:
    """a (x) a' -> lam(a) (x) lam^{-1}(a')."""
    A = C.A
    u = unit_of(lam, A)
    inv = A.right_matrix(A.coords(A.inverse(u)))
    lay = C.complex.layouts[1]
    mat = multilinear(lay, lay, [(np.asarray(lam), [0], [0]), (inv, [1], [1])])
    return ModuleHom(C.module, C.module, mat)


def kappa_matches_delta(lam: np.ndarray, C: CoringCe, U: UnitsCosimplicial) -> bool:
    """kappa(lam) equals multiplication by Delta1(lam(1)) on the whole carrier."""
    u = unit_of(lam, C.A)
    L1 = C.ring
    d = _alternating(U.complex, 1, [u])[0]
    k = kappa(lam, C)
    mult = L1.mul(np.full(L1.order, d, dtype=np.int64), np.arange(L1.order, dtype=np.int64))
    return bool(np.array_equal(k.table, np.asarray(mult)))
