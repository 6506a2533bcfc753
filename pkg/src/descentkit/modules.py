"""Finite modules and bimodules, their homomorphisms, tensor products and
invertible submodules.

A module has additive coordinates like a ring.  An action of a ring R is
stored as one matrix per additive basis element g_k of R: row i of
``mats[k]`` holds the coordinates of g_k acting on e_i.  Matrices act on
coordinate row vectors from the right, so for a left action the matrix of
``r*s`` is ``L_s @ L_r`` and for a right action it is ``R_r @ R_s``.

Tensor products are computed as cokernels: the free abelian group on pairs
of basis elements modulo order and balancing relations, diagonalized by
Smith normal form.  Iterated tensor products keep, for every basis element,
its expansion into simple tensors of basis elements (array ``E``) and the
coordinates of every simple basis tensor (array ``Q``); multilinear maps are
then single einsum contractions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import gcd, prod
from string import ascii_letters
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BoundExceeded, NotInjective
from .groups import FiniteGroup
from .linalg import AffineSystem, SolutionSet, cokernel_basis, cokernel_structure, rank_field, subgroup_structure
from .rings import DEFAULT_BOUND, Coordinates, FiniteRing, RingHom, is_prime
from .abelian import abelian_basis

HOM_BOUND = 256
_LET = "".join(c for c in ascii_letters if c not in "tuz")
SUBMODULE_BOUND = 256
INVERTIBLE_BOUND = 64


@dataclass(frozen=True)
class Action:
    ring: FiniteRing
    mats: np.ndarray  # (ring.m, m, m)


class FiniteModule(Coordinates):
    def __init__(self, moduli, left: Action | None = None, right: Action | None = None, name: str = ""):
        super().__init__(moduli)
        self.left = self._fix(left)
        self.right = self._fix(right)
        self.name = name

    def _fix(self, act):
        if act is None:
            return None
        mats = np.asarray(act.mats, dtype=np.int64).reshape(act.ring.m, self.m, self.m)
        return Action(act.ring, mats % self._mods if self.m else mats)

    def __repr__(self):
        return f"FiniteModule({self.name} order={self.order})"

    def action(self, side: str) -> Action | None:
        return self.left if side == "left" else self.right

    def with_actions(self, left="keep", right="keep", name=None) -> "FiniteModule":
        return FiniteModule(self.moduli, self.left if left == "keep" else left,
                            self.right if right == "keep" else right, name or self.name)

    def action_matrix(self, side: str, r) -> np.ndarray:
        """Matrix of x -> r*x (left) or x -> x*r (right) for ring coordinates r."""
        act = self.action(side)
        r = np.asarray(r, dtype=np.int64)
        return np.einsum("k,kij->ij", r, act.mats) % self._mods

    def act(self, side: str, r: int, x):
        act = self.action(side)
        M = self.action_matrix(side, act.ring.coords(r))
        return self.index(self.coords(x) @ M)

    def action_table(self, side: str, k: int) -> np.ndarray:
        """Element table of the k-th basis element of the ring acting."""
        act = self.action(side)
        return self.index(self.all_coords @ act.mats[k])

    @cached_property
    def add_table(self) -> np.ndarray:
        c = self.all_coords
        return self.index(c[:, None, :] + c[None, :, :])

    @cached_property
    def invariant_factors(self) -> list[int]:
        return cokernel_structure([[d if i == j else 0 for j in range(self.m)] for i, d in enumerate(self.moduli)], self.m)

    def audit(self) -> None:
        d = self._mods
        eye = np.eye(self.m, dtype=np.int64) % d if self.m else np.zeros((0, 0), dtype=np.int64)
        for side in ("left", "right"):
            act = self.action(side)
            if act is None:
                continue
            R, L = act.ring, act.mats
            for i, di in enumerate(self.moduli):
                assert not np.any((di * L[:, i, :]) % d), "action not additive"
            for k, dk in enumerate(R.moduli):
                assert not np.any((dk * L[k]) % d), "action not well defined on the ring"
            prodmats = np.einsum("klc,cij->klij", R.struct, L) % d
            for k, l in product(range(R.m), repeat=2):
                expect = (L[l] @ L[k]) if side == "left" else (L[k] @ L[l])
                assert np.array_equal(prodmats[k, l], expect % d), f"{side} action not associative"
            assert np.array_equal(self.action_matrix(side, R.one_coords), eye), "unit acts nontrivially"
        if self.left is not None and self.right is not None:
            for a, b in product(self.left.mats, self.right.mats):
                assert np.array_equal((a @ b) % d, (b @ a) % d), "actions do not commute"


# ---------------------------------------------------------------------------
# constructors


def algebra_module(B: FiniteRing, left: RingHom | None = None, right: RingHom | None = None,
                   name: str = "") -> FiniteModule:
    """B as a module through ring maps into B (``RingHom.identity`` for regular)."""
    la = ra = None
    if left is not None:
        la = Action(left.source, np.stack([B.left_matrix(v) for v in left.matrix]) if left.source.m else np.zeros((0, B.m, B.m)))
    if right is not None:
        ra = Action(right.source, np.stack([B.right_matrix(v) for v in right.matrix]) if right.source.m else np.zeros((0, B.m, B.m)))
    return FiniteModule(B.moduli, la, ra, name or B.name or "")


def regular(R: FiniteRing, sides: str = "lr") -> FiniteModule:
    idh = RingHom.identity(R)
    return algebra_module(R, idh if "l" in sides else None, idh if "r" in sides else None, R.name or "R")


def restrict(M: FiniteModule, h: RingHom, side: str) -> FiniteModule:
    """Restriction of scalars along h: X -> R for the action on ``side``."""
    act = M.action(side)
    if act is None or act.ring is not h.target:
        raise ValueError("restriction needs an action of the target ring")
    mats = np.einsum("kl,lij->kij", h.matrix, act.mats) if h.source.m else np.zeros((0, M.m, M.m))
    new = Action(h.source, mats)
    return M.with_actions(**{side: new})


def symmetric(M: FiniteModule, side: str = "left") -> FiniteModule:
    """Copy the action on ``side`` to both sides (modules over commutative rings)."""
    act = M.action(side)
    return M.with_actions(left=act, right=act)


def direct_sum(M: FiniteModule, N: FiniteModule, name: str = "") -> FiniteModule:
    def blk(a, b):
        if a is None or b is None:
            return None
        if a.ring is not b.ring:
            raise ValueError("direct sum needs the same acting rings")
        k = a.ring.m
        mats = np.zeros((k, M.m + N.m, M.m + N.m), dtype=np.int64)
        mats[:, :M.m, :M.m] = a.mats
        mats[:, M.m:, M.m:] = b.mats
        return Action(a.ring, mats)
    return FiniteModule(M.moduli + N.moduli, blk(M.left, N.left), blk(M.right, N.right), name)


def zero_module(left: FiniteRing | None = None, right: FiniteRing | None = None) -> FiniteModule:
    la = Action(left, np.zeros((left.m, 0, 0))) if left is not None else None
    ra = Action(right, np.zeros((right.m, 0, 0))) if right is not None else None
    return FiniteModule((), la, ra, "0")


# ---------------------------------------------------------------------------
# homomorphisms


class ModuleHom:
    """Additive map given on basis elements; ``matrix[i]`` = coords of f(e_i)."""

    def __init__(self, source: FiniteModule, target: FiniteModule, matrix):
        self.source, self.target = source, target
        mat = np.asarray(matrix, dtype=np.int64).reshape(source.m, target.m)
        self.matrix = mat % target._mods if target.m else mat

    def __call__(self, x):
        return self.target.index(self.source.coords(x) @ self.matrix)

    @cached_property
    def table(self) -> np.ndarray:
        return np.asarray(self.target.index(self.source.all_coords @ self.matrix)).reshape(self.source.order)

    @property
    def key(self):
        return self.matrix.tobytes()

    def image_order(self) -> int:
        return image_order(self.matrix, self.target.moduli)

    def is_injective(self) -> bool:
        return self.image_order() == self.source.order

    def is_bijective(self) -> bool:
        return self.source.order == self.target.order and self.is_injective()

    def is_equivariant(self, sides=("left", "right")) -> bool:
        S, T, F, d = self.source, self.target, self.matrix, self.target._mods
        for side in sides:
            a, b = S.action(side), T.action(side)
            if a is None or b is None:
                continue
            for La, Lb in zip(a.mats, b.mats):
                if not np.array_equal((La @ F) % d, (F @ Lb) % d):
                    return False
        return True

    def equals(self, other: "ModuleHom") -> bool:
        return np.array_equal(self.matrix, other.matrix)


def image_order(matrix: np.ndarray, target_moduli: Sequence[int]) -> int:
    mods = set(target_moduli)
    if not target_moduli:
        return 1
    if len(mods) == 1 and is_prime(next(iter(mods))):
        p = next(iter(mods))
        return p ** rank_field(np.asarray(matrix).tolist(), p, len(target_moduli))
    orders, _ = subgroup_structure(np.asarray(matrix).tolist(), target_moduli)
    return prod(orders)


def compose(g: ModuleHom, f: ModuleHom) -> ModuleHom:
    """g after f."""
    return ModuleHom(f.source, g.target, f.matrix @ g.matrix)


def identity_map(M: FiniteModule) -> ModuleHom:
    return ModuleHom(M, M, np.eye(M.m, dtype=np.int64))


def _sides(M: FiniteModule, N: FiniteModule, sides):
    if sides is None:
        sides = [s for s in ("left", "right") if M.action(s) is not None and N.action(s) is not None]
    for s in sides:
        a, b = M.action(s), N.action(s)
        if a is None or b is None or a.ring is not b.ring:
            raise ValueError(f"{s} actions missing or over different rings")
    return list(sides)


def hom_system(M: FiniteModule, N: FiniteModule, sides=None) -> AffineSystem:
    """Congruences cutting out Hom(M, N); unknown (i, j) is entry i*N.m + j."""
    sides = _sides(M, N, sides)
    mN = N.m
    sys = AffineSystem([N.moduli[j] for i in range(M.m) for j in range(mN)])
    for i, di in enumerate(M.moduli):
        for j, dj in enumerate(N.moduli):
            sys.add({i * mN + j: di}, dj)
    for side in sides:
        A, B = M.action(side).mats, N.action(side).mats
        for k in range(A.shape[0]):
            for i in range(M.m):
                for jj, dj in enumerate(N.moduli):
                    coeffs: dict[int, int] = {}
                    for l in range(M.m):
                        c = int(A[k, i, l])
                        if c:
                            coeffs[l * mN + jj] = coeffs.get(l * mN + jj, 0) + c
                    for j in range(mN):
                        c = int(B[k, j, jj])
                        if c:
                            coeffs[i * mN + j] = coeffs.get(i * mN + j, 0) - c
                    sys.add(coeffs, dj)
    return sys


def hom_solutions(M: FiniteModule, N: FiniteModule, sides=None, extra: Callable | None = None) -> SolutionSet:
    sys = hom_system(M, N, sides)
    if extra is not None:
        extra(sys)
    return sys.solve()


def solution_matrices(sol: SolutionSet, rows: int, cols: int) -> np.ndarray:
    """All solutions of a Hom system as an array of (rows x cols) matrices."""
    return np.asarray(sol.array(), dtype=np.int64).reshape(len(sol), rows, cols)


def hom_enumerate(M: FiniteModule, N: FiniteModule, sides=None, bound: int = HOM_BOUND,
                  extra: Callable | None = None) -> list[ModuleHom]:
    """All equivariant additive maps M -> N, in a deterministic order."""
    if M.order > bound:
        raise BoundExceeded(f"Hom enumeration limited to |M| <= {bound}")
    sol = hom_solutions(M, N, sides, extra)
    arr = solution_matrices(sol, M.m, N.m)
    return [ModuleHom(M, N, F) for F in arr]


def aut_group(M: FiniteModule, sides=None, bound: int = HOM_BOUND, name: str = "") -> FiniteGroup:
    """Invertible endomorphisms under composition; elements are matrices."""
    auts = [f.matrix for f in hom_enumerate(M, M, sides, bound) if f.is_bijective()]
    d = M._mods

    def op(F, G):  # F after G
        return (G @ F) % d

    ident = np.eye(M.m, dtype=np.int64) % d if M.m else np.zeros((0, 0), dtype=np.int64)
    return FiniteGroup(auts, op, ident, name=name or f"Aut({M.name})")


def is_isomorphic_modules(M: FiniteModule, N: FiniteModule, sides=None, bound: int = HOM_BOUND):
    """(flag, witness ModuleHom or None)."""
    if M.order != N.order or M.invariant_factors != N.invariant_factors:
        return False, None
    if M.order > bound:
        raise BoundExceeded(f"isomorphism search limited to |M| <= {bound}")
    sol = hom_solutions(M, N, sides)
    for F in solution_matrices(sol, M.m, N.m):
        f = ModuleHom(M, N, F)
        if f.is_bijective():
            return True, f
    return False, None


# ---------------------------------------------------------------------------
# tensor products


def _balanced_presentation(modsM, modsN, right_mats, left_mats):
    """Cokernel presenting X (x)_R Y on pairs (i, j) of basis elements."""
    mM, mN = len(modsM), len(modsN)
    rel = []
    for i, j in product(range(mM), range(mN)):
        row = [0] * (mM * mN)
        row[i * mN + j] = gcd(modsM[i], modsN[j])
        rel.append(row)
    for k in range(right_mats.shape[0]):
        for i, j in product(range(mM), range(mN)):
            row = [0] * (mM * mN)
            for l in range(mM):
                row[l * mN + j] += int(right_mats[k, i, l])
            for l in range(mN):
                row[i * mN + l] -= int(left_mats[k, j, l])
            if any(row):
                rel.append(row)
    return cokernel_basis(rel, mM * mN)


class MultiTensor:
    """X_0 (x)_R X_1 (x)_R ... (x)_R X_n, built left to right.

    ``right_actions[s]`` is the R-action on X_s used when X_s sits on the
    left of a tensor sign (slots 0..n-1) and ``left_actions[s]`` the one used
    when it sits on the right (slots 1..n).
    """

    def __init__(self, R: FiniteRing, factors: Sequence[FiniteModule],
                 right_actions: Sequence[Action | None], left_actions: Sequence[Action | None]):
        self.ring = R
        self.factors = list(factors)
        self.slot_moduli = [F.moduli for F in factors]
        X0 = factors[0]
        mods = X0.moduli
        E = np.eye(X0.m, dtype=np.int64)
        Q = np.eye(X0.m, dtype=np.int64)
        right = right_actions[0]
        for s in range(1, len(factors)):
            Xs = factors[s]
            la = left_actions[s]
            if right is None or la is None or right.ring is not R or la.ring is not R:
                raise ValueError("tensor factors need actions of the base ring")
            pres = _balanced_presentation(mods, Xs.moduli, right.mats, la.mats)
            k = len(pres.moduli)
            proj = np.array(pres.proj, dtype=np.int64).reshape(len(mods), Xs.m, k)
            lift = np.array(pres.lift, dtype=np.int64).reshape(k, len(mods), Xs.m)
            E = np.einsum("tuj,u...->t...j", lift, E)
            Q = np.einsum("...u,ujt->...jt", Q, proj)
            mods = pres.moduli
            Q = Q % np.array(mods, dtype=np.int64) if k else Q
            E = self._reduce_expansion(E, s + 1)
            # the R-action of the new tensor, carried by slot s
            if s < len(factors) - 1:
                ra = right_actions[s]
                right = self._slot_action_partial(E, Q, ra, s, mods) if ra is not None else None
        self.moduli = tuple(mods)
        self.module = FiniteModule(self.moduli, name=" (x) ".join(F.name or "?" for F in factors))
        self.E = E
        self.Q = Q
        self.nslots = len(factors)

    def _reduce_expansion(self, E, nslots):
        grids = np.meshgrid(*[np.array(self.slot_moduli[s], dtype=np.int64) for s in range(nslots)], indexing="ij")
        g = grids[0]
        for x in grids[1:]:
            g = np.gcd(g, x)
        return E % g[None, ...] if g.size else E

    def _slot_action_partial(self, E, Q, action, slot, mods):
        k = len(mods)
        d = np.array(mods, dtype=np.int64)
        n = E.ndim - 1
        letters = _LET[:n]
        src = "t" + letters
        dst = letters[:slot] + "z" + letters[slot + 1:]
        mats = []
        for A in action.mats:
            M = np.einsum(f"{src},{letters[slot]}z,{dst}u->tu", E, A, Q, optimize=True)
            mats.append(M % d if k else M)
        return Action(action.ring, np.array(mats).reshape(len(mats), k, k))

    @property
    def m(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return prod(self.moduli)

    def slot_action(self, slot: int, action: Action) -> Action:
        """Action on the tensor induced by acting on one slot."""
        return self._slot_action_partial(self.E, self.Q, action, slot, self.moduli)

    def encode(self, vectors: Sequence) -> np.ndarray:
        """Coordinates of x_0 (x) ... (x) x_n for coordinate vectors x_s."""
        n = self.nslots
        letters = _LET[:n]
        subs = ",".join(letters) + "," + letters + "u->u"
        res = np.einsum(subs, *[np.asarray(v, dtype=np.int64) for v in vectors], self.Q, optimize=True)
        return res % np.array(self.moduli, dtype=np.int64) if self.m else res

    def index_of(self, vectors: Sequence) -> int:
        return self.module.index(self.encode(vectors))

    def expand(self, coords) -> np.ndarray:
        """Simple-tensor expansion of an element given by coordinates."""
        return np.tensordot(np.asarray(coords, dtype=np.int64), self.E, axes=([0], [0]))


def single(M: FiniteModule) -> MultiTensor:
    """A one-slot tensor, so plain modules can take part in multilinear maps."""
    T = MultiTensor.__new__(MultiTensor)
    T.ring = None
    T.factors = [M]
    T.slot_moduli = [M.moduli]
    T.moduli = M.moduli
    T.module = M
    T.E = np.eye(M.m, dtype=np.int64)
    T.Q = np.eye(M.m, dtype=np.int64)
    T.nslots = 1
    return T


def multilinear(src: MultiTensor, dst: MultiTensor, blocks: Sequence[tuple]) -> np.ndarray:
    """Matrix (src basis -> dst coords) of a map defined on simple tensors.

    Each block is ``(array, src_slots, dst_slots)``: the array has one axis
    per listed source slot followed by one axis per listed destination slot
    and gives the coefficient of the destination simple tensor.  Every slot
    of either side must occur in exactly one block.  Well-definedness on the
    tensor (balancing) is the caller's responsibility.
    """
    ns, nd = src.nslots, dst.nslots
    sl = _LET[:ns]
    dl = _LET[ns:ns + nd]
    terms, ops = ["t" + sl], [src.E]
    used_s, used_d = [], []
    for arr, ss, ds in blocks:
        terms.append("".join(sl[s] for s in ss) + "".join(dl[d] for d in ds))
        ops.append(np.asarray(arr, dtype=np.int64))
        used_s += list(ss)
        used_d += list(ds)
    if sorted(used_s) != list(range(ns)) or sorted(used_d) != list(range(nd)):
        raise ValueError("every slot must be used exactly once")
    terms.append(dl + "u")
    ops.append(dst.Q)
    subs = ",".join(terms) + "->tu"
    M = np.einsum(subs, *ops, optimize=True)
    M = M.reshape(src.m, dst.m)
    return M % np.array(dst.moduli, dtype=np.int64) if dst.m else M


def eye(M: FiniteModule) -> np.ndarray:
    return np.eye(M.m, dtype=np.int64)


class BilinearWitness:
    """The canonical balanced map q: M x N -> M (x)_R N."""

    def __init__(self, M: FiniteModule, N: FiniteModule, T: FiniteModule, Q: np.ndarray):
        self.M, self.N, self.T, self.Q = M, N, T, Q

    def coords(self, x, y) -> np.ndarray:
        r = np.einsum("...i,...j,iju->...u", np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64), self.Q)
        return r % self.T._mods if self.T.m else r

    def __call__(self, a, b):
        return self.T.index(self.coords(self.M.coords(a), self.N.coords(b)))

    @cached_property
    def table(self) -> np.ndarray:
        cm, cn = self.M.all_coords, self.N.all_coords
        return np.asarray(self.T.index(self.coords(cm[:, None, :], cn[None, :, :]))).reshape(self.M.order, self.N.order)


@dataclass
class Tensor:
    """Result of ``tensor_over``: the module, its witness q and the layout."""

    module: FiniteModule
    q: BilinearWitness
    layout: MultiTensor


def tensor_over(R: FiniteRing, M: FiniteModule, N: FiniteModule, bound: int = DEFAULT_BOUND) -> Tensor:
    """M (x)_R N for a right R-module M and a left R-module N.

    Outer actions (left action of M, right action of N) pass to the result.
    """
    if M.right is None or M.right.ring is not R or N.left is None or N.left.ring is not R:
        raise ValueError("M must be a right and N a left module over R")
    if M.order * N.order > bound:
        raise BoundExceeded(f"|M|*|N| = {M.order * N.order} exceeds {bound}")
    layout = MultiTensor(R, [M, N], [M.right, None], [None, N.left])
    T = layout.module
    left = layout.slot_action(0, M.left) if M.left is not None else None
    right = layout.slot_action(1, N.right) if N.right is not None else None
    T = FiniteModule(T.moduli, left, right, name=f"{M.name} (x) {N.name}")
    layout.module = T
    return Tensor(T, BilinearWitness(M, N, T, layout.Q), layout)


def tensor_of_maps(src: Tensor, dst: Tensor, f: ModuleHom, g: ModuleHom) -> ModuleHom:
    """f (x) g between two tensor products."""
    mat = multilinear(src.layout, dst.layout, [(f.matrix, [0], [0]), (g.matrix, [1], [1])])
    return ModuleHom(src.module, dst.module, mat)


# ---------------------------------------------------------------------------
# submodules and quotients


def _closure(M: FiniteModule, seeds: Iterable[int], tables: list[np.ndarray]) -> frozenset:
    A = M.add_table
    elems = {0}
    frontier = [int(s) for s in seeds]
    while frontier:
        nxt = []
        for y in frontier:
            if y in elems:
                continue
            cur = list(elems)
            elems.add(y)
            for s in cur:
                z = int(A[s, y])
                if z not in elems:
                    nxt.append(z)
            nxt.append(int(A[y, y]))
            for t in tables:
                z = int(t[y])
                if z not in elems:
                    nxt.append(z)
        frontier = nxt
    return frozenset(elems)


def _action_tables(M: FiniteModule, sides=None) -> list[np.ndarray]:
    out = []
    for side in (sides or ("left", "right")):
        act = M.action(side)
        if act is not None:
            out += [M.action_table(side, k) for k in range(act.ring.m)]
    return out


def generated_submodule(M: FiniteModule, seeds: Iterable[int], sides=None) -> frozenset:
    return _closure(M, seeds, _action_tables(M, sides))


def submodules(M: FiniteModule, sides=None, bound: int = SUBMODULE_BOUND) -> list[frozenset]:
    """All action-closed subgroups, as frozensets of element indices."""
    if M.order > bound:
        raise BoundExceeded(f"submodule enumeration limited to |M| <= {bound}")
    tables = _action_tables(M, sides)
    cyclic = {_closure(M, [x], tables) for x in range(M.order)}
    A = M.add_table
    found = {frozenset([0])} | cyclic
    frontier = list(found)
    while frontier:
        nxt = []
        for S in frontier:
            s = np.array(sorted(S), dtype=np.int64)
            for C in cyclic:
                if C <= S:
                    continue
                c = np.array(sorted(C), dtype=np.int64)
                J = frozenset(int(z) for z in np.unique(A[np.ix_(s, c)]))
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    return sorted(found, key=lambda S: (len(S), sorted(S)))


@dataclass
class Submodule:
    elements: frozenset
    module: FiniteModule
    inclusion: ModuleHom


def submodule_module(M: FiniteModule, elements: Iterable[int], name: str = "") -> Submodule:
    """The subset as a module in its own coordinates, with its inclusion."""
    elements = frozenset(int(x) for x in elements)
    A = M.add_table
    moduli, basis, coords = abelian_basis(sorted(elements), lambda a, b: int(A[a, b]), 0)
    m = len(moduli)
    incl = M.coords(np.array(basis, dtype=np.int64)).reshape(m, M.m)

    def transport(act, side):
        if act is None:
            return None
        mats = np.zeros((act.ring.m, m, m), dtype=np.int64)
        for k in range(act.ring.m):
            tab = M.action_table(side, k)
            for b, x in enumerate(basis):
                y = int(tab[x])
                if y not in coords:
                    raise ValueError("subset is not closed under the action")
                mats[k, b] = coords[y]
        return Action(act.ring, mats)

    J = FiniteModule(moduli, transport(M.left, "left"), transport(M.right, "right"), name)
    return Submodule(elements, J, ModuleHom(J, M, incl))


def quotient_module(M: FiniteModule, elements: Iterable[int], name: str = ""):
    """M / J with the projection ModuleHom."""
    gens = [M.coords(x).tolist() for x in elements]
    rel = [[d if i == j else 0 for j in range(M.m)] for i, d in enumerate(M.moduli)] + gens
    pres = cokernel_basis(rel, M.m)
    k = len(pres.moduli)
    proj = np.array(pres.proj, dtype=np.int64).reshape(M.m, k)
    lift = np.array(pres.lift, dtype=np.int64).reshape(k, M.m)

    def transport(act):
        if act is None:
            return None
        return Action(act.ring, np.stack([lift @ L @ proj for L in act.mats]) if act.ring.m else np.zeros((0, k, k)))

    Qm = FiniteModule(pres.moduli, transport(M.left), transport(M.right), name)
    return Qm, ModuleHom(M, Qm, proj)


# ---------------------------------------------------------------------------
# invertible submodules of an algebra


def base_bimodule(iota: RingHom, left: str = "base", right: str = "base") -> FiniteModule:
    """S = target of iota with left/right actions of the base ring or of S."""
    S = iota.target
    idS = RingHom.identity(S)
    return algebra_module(S, iota if left == "base" else idS, iota if right == "base" else idS)


def _mult_block(S: FiniteRing, J_incl_left: np.ndarray | None, J_incl_right: np.ndarray | None) -> np.ndarray:
    """Simple-tensor coefficients of (x, y) -> x*y with optional inclusions."""
    st = S.struct
    if J_incl_left is not None:
        st = np.einsum("bi,ijk->bjk", J_incl_left, st)
    if J_incl_right is not None:
        st = np.einsum("bj,ijk->ibk", J_incl_right, st)
    return st


@dataclass
class XiResult:
    tensor: Tensor
    map: ModuleHom
    iso: bool


def xi_left(iota: RingHom, sub: Submodule) -> XiResult:
    """S (x)_R J -> S, s (x) j -> s*j."""
    R, S = iota.source, iota.target
    Sm = base_bimodule(iota, left="S", right="base")
    J = sub.module
    T = tensor_over(R, Sm, J, bound=max(DEFAULT_BOUND, Sm.order * J.order))
    W = _mult_block(S, None, sub.inclusion.matrix)
    target = algebra_module(S, RingHom.identity(S), iota)
    mat = multilinear(T.layout, single(target), [(W, [0, 1], [0])])
    f = ModuleHom(T.module, target, mat)
    return XiResult(T, f, f.is_bijective())


def xi_right(iota: RingHom, sub: Submodule) -> XiResult:
    """J (x)_R S -> S, j (x) s -> j*s."""
    R, S = iota.source, iota.target
    Sm = base_bimodule(iota, left="base", right="S")
    J = sub.module
    T = tensor_over(R, J, Sm, bound=max(DEFAULT_BOUND, Sm.order * J.order))
    W = _mult_block(S, sub.inclusion.matrix, None)
    target = algebra_module(S, iota, RingHom.identity(S))
    mat = multilinear(T.layout, single(target), [(W, [0, 1], [0])])
    f = ModuleHom(T.module, target, mat)
    return XiResult(T, f, f.is_bijective())


def _check_injective(iota: RingHom):
    if len(set(iota.table.tolist())) != iota.source.order:
        raise NotInjective("ring map is not injective")


def product_of_submodules(S: FiniteRing, J: Iterable[int], K: Iterable[int]) -> frozenset:
    """Additive closure of all products j*k."""
    M = S.mul_table
    prods = {int(M[j, k]) for j in J for k in K}
    A = S.add_table
    elems = {0}
    frontier = list(prods)
    while frontier:
        nxt = []
        for y in frontier:
            if y in elems:
                continue
            cur = list(elems)
            elems.add(y)
            nxt += [int(A[s, y]) for s in cur]
        frontier = [z for z in nxt if z not in elems]
    return frozenset(elems)


@dataclass
class InvertibleSubmoduleGroup:
    group: FiniteGroup           # elements are frozensets of S-indices
    submodules: dict             # frozenset -> Submodule
    identity: frozenset
    candidates: list             # every sub-bimodule with its two verdicts


def invertible_submodule_group(iota: RingHom, bound: int = INVERTIBLE_BOUND) -> InvertibleSubmoduleGroup:
    R, S = iota.source, iota.target
    _check_injective(iota)
    if S.order > bound:
        raise BoundExceeded(f"invertible submodules limited to |S| <= {bound}")
    Sb = base_bimodule(iota)
    subs, cands = {}, []
    for J in submodules(Sb):
        sm = submodule_module(Sb, J)
        l, r = xi_left(iota, sm).iso, xi_right(iota, sm).iso
        cands.append((J, l, r))
        if l and r:
            subs[J] = sm
    unit = frozenset(int(x) for x in iota.table)
    elements = sorted(subs, key=lambda J: sorted(J))

    def op(J, K):
        P = product_of_submodules(S, J, K)
        if P not in subs:
            raise AssertionError("product of invertible submodules is not invertible")
        return P

    G = FiniteGroup(elements, op, unit, key=lambda J: tuple(sorted(J)), name=f"Inv({R.name},{S.name})")
    return InvertibleSubmoduleGroup(G, subs, unit, cands)


def product_via_tensor(iota: RingHom, J: Submodule, K: Submodule) -> frozenset:
    """Image of J (x)_R K -> S under multiplication (the oracle for J*K)."""
    R, S = iota.source, iota.target
    T = tensor_over(R, J.module, K.module, bound=max(DEFAULT_BOUND, J.module.order * K.module.order))
    W = _mult_block(S, J.inclusion.matrix, K.inclusion.matrix)
    mat = multilinear(T.layout, single(algebra_module(S)), [(W, [0, 1], [0])])
    f = ModuleHom(T.module, algebra_module(S), mat)
    return frozenset(int(x) for x in np.unique(f.table))


def lambda_to_submodule(lam: ModuleHom, iota: RingHom) -> frozenset:
    """The pullback {a : lam(a) in iota(R)}."""
    unit = set(int(x) for x in iota.table)
    return frozenset(a for a in range(lam.source.order) if int(lam.table[a]) in unit)
