"""Finite-dimensional coalgebras over finite fields, comodules, cotensor
products and the Amitsur complex of a coalgebra surjection.

Field elements are stored as indices of a Galois field ring (for a prime
field, the index is the residue itself).  Arrays of field elements are
contracted with ``FiniteField.einsum``.

A coalgebra of dimension d has ``delta[i, j, k]`` = coefficient of
e_j (x) e_k in delta(e_i) and ``counit[i]`` = eps(e_i).  A right comodule V
has ``rho[v, w, c]`` = coefficient of e_w (x) c in rho(e_v), a left one
``lam[v, c, w]``.  Maps are matrices acting on row vectors.

Level n of the Amitsur complex of phi: D -> C is D cotensored with itself
n+1 times over C, realized as a subspace of the tensor power with a basis in
reduced echelon form.  Faces contract one slot with the counit, degeneracies
duplicate one slot with the comultiplication.  Comodule automorphisms of a
level, as a right comodule over itself, are the maps
sigma_chi = (chi (x) id) delta for convolution-invertible functionals chi,
so the automorphism groups are stored as functionals.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from string import ascii_letters
from typing import Sequence

import numpy as np

from .errors import BoundExceeded, DimensionBound, HypothesisUnverified, NotIrreducible, NotPrime
from .groups import FiniteGroup
from .linalg import kernel_basis_field, rank_field, rref_field
from .rings import FiniteRing, is_irreducible, is_prime, mk_galois_field, mk_zmod

DIM_BOUND = 4096
AUT_BOUND = 1 << 15


# ---------------------------------------------------------------------------
# fields


class FiniteField:
    def __init__(self, p: int, poly: Sequence[int] | None = None):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if poly is None or len(poly) <= 2:
            self.ring: FiniteRing = mk_zmod(p)
            self.r = 1
        else:
            self.ring = mk_galois_field(p, poly)
            self.r = len(poly) - 1
        self.p = p
        self.poly = list(poly) if poly is not None else None
        self.q = self.ring.order
        self.zero, self.one = 0, int(self.ring.one)
        R = self.ring
        self._add = R.add_table
        self._mul = R.mul_table
        self._neg = R.neg_table
        self._inv = np.zeros(self.q, dtype=np.int64)
        for a in range(1, self.q):
            self._inv[a] = int(np.nonzero(self._mul[a] == self.one)[0][0])
        self.mats = np.stack([R.left_matrix(R.coords(a)) for a in range(self.q)])
        self.name = f"F_{self.q}"

    @property
    def prime(self) -> bool:
        return self.r == 1

    # scalar protocol used by the echelon routines
    def add(self, a, b):
        return int(self._add[a, b])

    def mul(self, a, b):
        return int(self._mul[a, b])

    def neg(self, a):
        return int(self._neg[a])

    def inverse(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self._inv[a])

    @property
    def solver(self):
        return self.p if self.prime else self

    # arrays
    def asarray(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.int64)

    def add_arr(self, a, b) -> np.ndarray:
        return self._add[self.asarray(a), self.asarray(b)]

    def neg_arr(self, a) -> np.ndarray:
        return self._neg[self.asarray(a)]

    def sub_arr(self, a, b) -> np.ndarray:
        return self.add_arr(a, self.neg_arr(b))

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64) * self.one

    def einsum(self, subs: str, *ops) -> np.ndarray:
        ops = [self.asarray(o) for o in ops]
        if self.prime:
            return np.einsum(subs, *ops, optimize=True) % self.p
        ins, out = subs.split("->")
        terms = ins.split(",")
        free = [c for c in ascii_letters if c not in subs]
        chain = free[:len(terms) + 1]
        new = [t + chain[k] + chain[k + 1] for k, t in enumerate(terms)]
        res = np.einsum(",".join(new) + "->" + out + chain[0] + chain[-1],
                        *[self.mats[o] for o in ops], optimize=True) % self.p
        coords = np.einsum("i,...ij->...j", self.ring.one_coords, res) % self.p
        return np.asarray(self.ring.index(coords))

    def matmul(self, A, B) -> np.ndarray:
        return self.einsum("ij,jk->ik", A, B)

    def kernel(self, A: np.ndarray, ncols: int) -> np.ndarray:
        """Basis (rows) of {x : A x = 0}."""
        basis = kernel_basis_field(np.asarray(A).tolist(), self.solver, ncols)
        return np.array(basis, dtype=np.int64).reshape(len(basis), ncols)

    def rank(self, A: np.ndarray) -> int:
        A = np.asarray(A)
        return rank_field(A.tolist(), self.solver, A.shape[1] if A.ndim == 2 else 0)

    def _gauss_jordan(self, mats: np.ndarray):
        """Batched elimination of [M | I] through the field tables."""
        M = self.asarray(mats)
        N, n = len(M), M.shape[-1]
        A = np.concatenate([M, np.broadcast_to(self.eye(n), (N, n, n))], axis=2)
        ok = np.ones(N, dtype=bool)
        rows = np.arange(N)
        for col in range(n):
            sub = A[:, col:, col] != 0
            ok &= sub.any(axis=1)
            piv = col + np.argmax(sub, axis=1)
            tmp = A[rows, piv].copy()
            A[rows, piv] = A[rows, col]
            A[rows, col] = tmp
            A[:, col] = self._mul[self._inv[A[:, col, col]][:, None], A[:, col]]
            factors = A[:, :, col].copy()
            factors[:, col] = 0
            A = self._add[A, self._neg[self._mul[factors[:, :, None], A[:, col][:, None, :]]]]
        return ok, A[:, :, n:]

    def invertible_mask(self, mats: np.ndarray) -> np.ndarray:
        """Which square matrices of a batch are invertible."""
        return self._gauss_jordan(mats)[0]

    def inverses(self, mats: np.ndarray) -> np.ndarray:
        ok, inv = self._gauss_jordan(mats)
        if not ok.all():
            raise ZeroDivisionError("singular matrix in batch")
        return inv

    def json(self) -> dict:
        return {"p": self.p, "poly": self.poly} if self.poly else {"p": self.p}


def field_of_order(q: int) -> FiniteField:
    """F_q with the first monic irreducible modulus in lexicographic order."""
    for p in range(2, q + 1):
        if q % p == 0:
            break
    r, x = 0, q
    while x % p == 0:
        x //= p
        r += 1
    if x != 1 or not is_prime(p):
        raise NotPrime(f"{q} is not a prime power")
    if r == 1:
        return FiniteField(p)
    for tail in product(range(p), repeat=r):
        poly = list(tail) + [1]
        if is_irreducible(poly, p):
            return FiniteField(p, poly)
    raise NotIrreducible("no irreducible polynomial found")


# ---------------------------------------------------------------------------
# coalgebras and morphisms


class FiniteCoalgebra:
    def __init__(self, fld: FiniteField, delta, counit, name: str = "", labels=None):
        self.field = fld
        self.delta = fld.asarray(delta)
        self.counit = fld.asarray(counit)
        self.dim = len(self.counit)
        if self.delta.shape != (self.dim,) * 3:
            raise ValueError("comultiplication must be dim x dim x dim")
        self.name = name
        self.labels = labels

    @cached_property
    def cocommutative(self) -> bool:
        return bool(np.array_equal(self.delta, self.delta.transpose(0, 2, 1)))

    def audit(self) -> None:
        F, d, e = self.field, self.delta, self.counit
        lhs = F.einsum("ijc,jab->iabc", d, d)
        rhs = F.einsum("iak,kbc->iabc", d, d)
        assert np.array_equal(lhs, rhs), "comultiplication not coassociative"
        I = F.eye(self.dim)
        assert np.array_equal(F.einsum("ijk,j->ik", d, e), I), "left counit law fails"
        assert np.array_equal(F.einsum("ijk,k->ij", d, e), I), "right counit law fails"

    def grouplikes(self) -> list[int]:
        """Basis elements e with delta(e) = e (x) e and eps(e) = 1."""
        out = []
        for i in range(self.dim):
            t = np.zeros((self.dim, self.dim), dtype=np.int64)
            t[i, i] = self.field.one
            if np.array_equal(self.delta[i], t) and self.counit[i] == self.field.one:
                out.append(i)
        return out

    @property
    def is_grouplike(self) -> bool:
        return len(self.grouplikes()) == self.dim

    def json(self) -> dict:
        return {"field": self.field.json(), "dim": self.dim,
                "delta": self.delta.reshape(self.dim, -1).tolist(), "counit": self.counit.tolist()}


def grouplike_coalgebra(n: int, fld: FiniteField | int, name: str = "") -> FiniteCoalgebra:
    """The coalgebra spanned by n group-like elements."""
    F = fld if isinstance(fld, FiniteField) else field_of_order(fld)
    if n * F.q > DIM_BOUND:
        raise BoundExceeded("group-like coalgebra too large")
    delta = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        delta[i, i, i] = F.one
    return FiniteCoalgebra(F, delta, np.full(n, F.one, dtype=np.int64), name or f"k[{n}]")


class CoalgebraMorphism:
    def __init__(self, source: FiniteCoalgebra, target: FiniteCoalgebra, matrix):
        self.source, self.target = source, target
        self.matrix = source.field.asarray(matrix).reshape(source.dim, target.dim)

    def check(self) -> bool:
        F, S, T, M = self.source.field, self.source, self.target, self.matrix
        lhs = F.einsum("ij,jab->iab", M, T.delta)
        rhs = F.einsum("ikl,ka,lb->iab", S.delta, M, M)
        return bool(np.array_equal(lhs, rhs)) and bool(np.array_equal(F.einsum("ij,j->i", M, T.counit), S.counit))

    def is_surjective(self) -> bool:
        return self.source.field.rank(self.matrix) == self.target.dim

    @staticmethod
    def from_set_map(source: FiniteCoalgebra, target: FiniteCoalgebra, mapping: Sequence[int]) -> "CoalgebraMorphism":
        M = np.zeros((source.dim, target.dim), dtype=np.int64)
        for i, j in enumerate(mapping):
            M[i, j] = source.field.one
        return CoalgebraMorphism(source, target, M)

    @staticmethod
    def identity(C: FiniteCoalgebra) -> "CoalgebraMorphism":
        return CoalgebraMorphism(C, C, C.field.eye(C.dim))


def compose_coalgebra(g: CoalgebraMorphism, f: CoalgebraMorphism) -> CoalgebraMorphism:
    """g after f."""
    return CoalgebraMorphism(f.source, g.target, f.source.field.matmul(f.matrix, g.matrix))


# ---------------------------------------------------------------------------
# comodules and cotensor products


class Comodule:
    def __init__(self, coalg: FiniteCoalgebra, coaction, side: str = "right", name: str = ""):
        self.coalgebra, self.side, self.name = coalg, side, name
        self.coaction = coalg.field.asarray(coaction)
        self.dim = self.coaction.shape[0] if self.coaction.ndim == 3 else 0
        if self.coaction.ndim != 3:
            self.coaction = self.coaction.reshape(0, 0, coalg.dim) if side == "right" else self.coaction.reshape(0, coalg.dim, 0)

    @property
    def rho(self) -> np.ndarray:
        """Coaction in right layout [v, w, c] whatever the side."""
        return self.coaction if self.side == "right" else self.coaction.transpose(0, 2, 1)

    def audit(self) -> None:
        C, F = self.coalgebra, self.coalgebra.field
        r = self.rho
        if self.side == "right":
            lhs = F.einsum("vwc,wxb->vxbc", r, r)
            rhs = F.einsum("vxa,abc->vxbc", r, C.delta)
        else:
            lhs = F.einsum("vwb,wxc->vxbc", r, r)
            rhs = F.einsum("vxa,abc->vxbc", r, C.delta)
        assert np.array_equal(lhs, rhs), "coaction not coassociative"
        assert np.array_equal(F.einsum("vwc,c->vw", r, C.counit), F.eye(self.dim)), "counit law fails"


def regular_comodule(C: FiniteCoalgebra, side: str = "right") -> Comodule:
    co = C.delta if side == "right" else C.delta.transpose(0, 2, 1)
    return Comodule(C, co, side, name=C.name)


def graded_comodule(C: FiniteCoalgebra, dims: Sequence[int], side: str = "right") -> Comodule:
    """For a group-like coalgebra: the space graded by its basis."""
    gl = C.grouplikes()
    if len(gl) != C.dim:
        raise ValueError("graded comodules need a group-like coalgebra")
    grades = [g for g, k in zip(gl, dims) for _ in range(k)]
    n = len(grades)
    rho = np.zeros((n, n, C.dim), dtype=np.int64)
    for v, g in enumerate(grades):
        rho[v, v, g] = C.field.one
    co = rho if side == "right" else rho.transpose(0, 2, 1)
    return Comodule(C, co, side, name=f"graded{list(dims)}")


def corestrict(D: FiniteCoalgebra, phi: CoalgebraMorphism, side: str) -> Comodule:
    """D as a C-comodule through phi."""
    F = D.field
    if side == "right":
        co = F.einsum("dab,bc->dac", D.delta, phi.matrix)
    else:
        co = F.einsum("dab,ac->dcb", D.delta, phi.matrix)
    return Comodule(phi.target, co, side, name=D.name)


@dataclass
class Cotensor:
    basis: np.ndarray        # rows: vectors of the tensor product, echelon form
    pivots: list[int]
    shape: tuple[int, int]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, vectors: np.ndarray, F: FiniteField) -> np.ndarray:
        """Coordinates of vectors known to lie in the span."""
        return np.asarray(vectors)[..., self.pivots]


def _echelon(K: np.ndarray, F: FiniteField, ncols: int):
    if len(K) == 0:
        return np.zeros((0, ncols), dtype=np.int64), []
    R, piv = rref_field(K.tolist(), F.solver, ncols)
    return np.array(R, dtype=np.int64).reshape(len(R), ncols), piv


def cotensor(X: Comodule, Y: Comodule) -> Cotensor:
    """X cotensor Y: kernel of rho (x) 1 - 1 (x) lam on X (x) Y."""
    C = X.coalgebra
    if Y.coalgebra is not C or X.side != "right" or Y.side != "left":
        raise ValueError("need a right and a left comodule over the same coalgebra")
    F = C.field
    dx, dy, dc = X.dim, Y.dim, C.dim
    if dx * dy * dc > DIM_BOUND * 16:
        raise DimensionBound("cotensor too large")
    t1 = F.einsum("vwc,yz->vywcz", X.coaction, F.eye(dy))
    t2 = F.einsum("vw,ycz->vywcz", F.eye(dx), Y.coaction)
    M = F.sub_arr(t1, t2).reshape(dx * dy, dx * dc * dy)
    K = F.kernel(M.T, dx * dy)
    B, piv = _echelon(K, F, dx * dy)
    return Cotensor(B, piv, (dx, dy))


def change_of_cobase(X: Comodule, phi: CoalgebraMorphism) -> Comodule:
    """X cotensor_C D as a right D-comodule."""
    D = phi.source
    F = D.field
    Dl = corestrict(D, phi, "left")
    ct = cotensor(X, Dl)
    if ct.dim == 0:
        return Comodule(D, np.zeros((0, 0, D.dim), dtype=np.int64), "right", name="0")
    dx = X.dim
    K = ct.basis.reshape(ct.dim, dx, D.dim)
    W = F.einsum("txd,dab->txab", K, D.delta).reshape(ct.dim, dx * D.dim, D.dim)
    rho = W[:, ct.pivots, :]
    back = F.einsum("tuc,ux->txc", rho, ct.basis)
    if not np.array_equal(back, W.transpose(0, 1, 2)):
        raise AssertionError("coaction leaves the cotensor product")
    return Comodule(D, rho, "right", name=f"{X.name}[]D")


def colinear_space(X: Comodule, Y: Comodule) -> np.ndarray:
    """Basis of comodule maps X -> Y as flattened (dx*dy) rows."""
    C, F = X.coalgebra, X.coalgebra.field
    dx, dy = X.dim, Y.dim
    rx, ry = X.rho, Y.rho
    # sum_w s[v,w] ry[w,x,c] - sum_u rx[v,u,c] s[u,x]  for all v, x, c
    t1 = F.einsum("vV,Wxc->vxcVW", F.eye(dx), ry)
    t2 = F.einsum("vVc,Wx->vxcVW", rx, F.eye(dy))
    M = F.sub_arr(t1, t2).reshape(dx * dy * C.dim, dx * dy)
    return F.kernel(M, dx * dy)


def comodule_aut_group(X: Comodule, bound: int = AUT_BOUND) -> FiniteGroup:
    """Invertible comodule endomorphisms (matrices) under composition."""
    F = X.coalgebra.field
    n = X.dim
    if n == 0:
        z = np.zeros((0, 0), dtype=np.int64)
        return FiniteGroup([z], lambda a, b: a, z, name="Aut(0)")
    basis = colinear_space(X, X)
    k = len(basis)
    if F.q ** k > bound:
        raise BoundExceeded(f"{F.q}^{k} candidate endomorphisms exceed {bound}")
    coeffs = np.array(list(product(range(F.q), repeat=k)), dtype=np.int64).reshape(-1, k)
    mats = F.einsum("nk,kx->nx", coeffs, basis).reshape(-1, n, n)
    mats = mats[F.invertible_mask(mats)]
    G = FiniteGroup(list(mats), lambda a, b: F.matmul(b, a), F.eye(n), name=f"Aut({X.name})")
    return G


# ---------------------------------------------------------------------------
# convolution units


def convolve(E: FiniteCoalgebra, chi, psi) -> np.ndarray:
    return E.field.einsum("xab,...a,...b->...x", E.delta, chi, psi)


def aut_matrix(E: FiniteCoalgebra, chi) -> np.ndarray:
    """sigma_chi = (chi (x) id) delta as a matrix."""
    return E.field.einsum("xab,a->xb", E.delta, chi)


def convolution_units(E: FiniteCoalgebra, bound: int = AUT_BOUND) -> FiniteGroup:
    """Convolution-invertible functionals on E, the automorphisms of E as a
    right comodule over itself."""
    F = E.field
    if F.q ** E.dim > bound:
        raise BoundExceeded(f"{F.q}^{E.dim} functionals exceed {bound}")
    chis = np.array(list(product(range(F.q), repeat=E.dim)), dtype=np.int64).reshape(-1, E.dim)[:, ::-1]
    mats = F.einsum("xab,na->nxb", E.delta, chis)
    keep = chis[F.invertible_mask(mats)]
    G = FiniteGroup(list(keep), lambda a, b: convolve(E, a, b), E.counit.copy(), name=f"U({E.name}*)")
    if E.cocommutative:
        G._abelian = True
    return G


def induced_functional(f: CoalgebraMorphism, chi) -> np.ndarray:
    """Functional of the automorphism induced along f (precomposition)."""
    return f.source.field.einsum("ij,j->i", f.matrix, chi)


def induced_aut_matrix(f: CoalgebraMorphism, sigma: np.ndarray) -> np.ndarray:
    """(eps (x) id)(sigma (x) id)(f (x) id) delta' on the source of f."""
    F = f.source.field
    return F.einsum("xab,ac,ce,e->xb", f.source.delta, f.matrix, sigma, f.target.counit)


def check_abelian_functionals(E: FiniteCoalgebra, G: FiniteGroup, sample: int = 1024) -> bool:
    X = np.array(G.elements[:sample], dtype=np.int64)
    T = E.field.einsum("xab,ia,jb->ijx", E.delta, X, X)
    return bool(np.array_equal(T, T.transpose(1, 0, 2)))


# ---------------------------------------------------------------------------
# the Amitsur complex of phi: D -> C


@dataclass
class CoalgLevel:
    coalgebra: FiniteCoalgebra
    basis: np.ndarray          # (dim, d^(n+1)) echelon rows
    pivots: list[int]


class CoalgAmitsurComplex:
    def __init__(self, phi: CoalgebraMorphism, n_max: int = 2):
        D, C = phi.source, phi.target
        if not (D.cocommutative and C.cocommutative):
            raise ValueError("the complex needs cocommutative coalgebras")
        self.phi, self.D, self.C, self.n_max = phi, D, C, n_max
        F = D.field
        self.field = F
        d = D.dim
        self.levels: list[CoalgLevel] = []
        rho = corestrict(D, phi, "right").coaction
        lam = corestrict(D, phi, "left").coaction
        for n in range(n_max + 1):
            slots = n + 1
            N = d ** slots
            if N * C.dim > DIM_BOUND * 64:
                raise DimensionBound(f"level {n} too large")
            rows = []
            for s in range(n):
                # rho at slot s minus lam at slot s+1, into (..., c, ...) after slot s
                rows.append(self._pair_condition(rho, lam, slots, s).reshape(N, -1))
            if rows:
                M = np.concatenate(rows, axis=1)
                K = F.kernel(M.T, N)
            else:
                K = F.eye(N)
            B, piv = _echelon(K, F, N)
            delta = self._level_delta(B, piv, slots)
            eps = F.einsum("t" + ascii_letters[:slots] + "," + ",".join(ascii_letters[:slots]) + "->t",
                           B.reshape((len(B),) + (d,) * slots), *([D.counit] * slots)) if len(B) else np.zeros(0, dtype=np.int64)
            E = FiniteCoalgebra(F, delta, eps, name=f"{D.name}^{slots}")
            self.levels.append(CoalgLevel(E, B, piv))
        self.faces: dict[tuple[int, int], CoalgebraMorphism] = {}
        self.degeneracies: dict[tuple[int, int], CoalgebraMorphism] = {}
        for n in range(1, n_max + 1):
            for i in range(n + 1):
                self.faces[n, i] = self._face(n, i)
        for n in range(0, n_max):
            for j in range(n + 1):
                self.degeneracies[n, j] = self._degeneracy(n, j)

    def _pair_condition(self, rho, lam, slots, s):
        F, d, dc = self.field, self.D.dim, self.C.dim
        L = ascii_letters
        src = L[:slots]
        out1, out2 = list(L[slots:2 * slots]), list(L[slots:2 * slots])
        ops1, ops2, terms1, terms2 = [], [], [], []
        for k in range(slots):
            if k == s:
                terms1.append(src[k] + out1[k] + "z")
                ops1.append(rho)
                terms2.append(src[k] + out2[k])
                ops2.append(F.eye(d))
            elif k == s + 1:
                terms1.append(src[k] + out1[k])
                ops1.append(F.eye(d))
                terms2.append(src[k] + "z" + out2[k])
                ops2.append(lam)
            else:
                terms1.append(src[k] + out1[k])
                ops1.append(F.eye(d))
                terms2.append(src[k] + out2[k])
                ops2.append(F.eye(d))
        out = "".join(out1[:s + 1]) + "z" + "".join(out1[s + 1:])
        a = F.einsum(",".join(terms1) + "->" + src + out, *ops1)
        b = F.einsum(",".join(terms2) + "->" + src + out, *ops2)
        return F.sub_arr(a, b)

    def _level_delta(self, B, piv, slots):
        F, d = self.field, self.D.dim
        k = len(B)
        if k == 0:
            return np.zeros((0, 0, 0), dtype=np.int64)
        L = ascii_letters
        a, b, c = L[:slots], L[slots:2 * slots], L[2 * slots:3 * slots]
        terms = ["t" + a] + [a[s] + b[s] + c[s] for s in range(slots)]
        W = F.einsum(",".join(terms) + "->t" + b + c, B.reshape((k,) + (d,) * slots), *([self.D.delta] * slots))
        N = d ** slots
        W = W.reshape(k, N, N)
        delta = W[:, piv][:, :, piv]
        back = F.einsum("tuv,ux,vy->txy", delta, B, B)
        if not np.array_equal(back, W):
            raise AssertionError("comultiplication leaves the cotensor power")
        return delta

    def _coords(self, level: int, vectors: np.ndarray) -> np.ndarray:
        lv = self.levels[level]
        coords = vectors[:, lv.pivots]
        back = self.field.einsum("tu,ux->tx", coords, lv.basis) if len(lv.pivots) else np.zeros_like(vectors)
        if not np.array_equal(back, vectors):
            raise AssertionError("map leaves the cotensor power")
        return coords

    def _face(self, n: int, i: int) -> CoalgebraMorphism:
        """Level n -> level n-1, contracting slot i with the counit."""
        F, d = self.field, self.D.dim
        src = self.levels[n]
        L = ascii_letters
        a = L[:n + 1]
        out = a[:i] + a[i + 1:]
        V = F.einsum("t" + a + "," + a[i] + "->t" + out, src.basis.reshape((len(src.basis),) + (d,) * (n + 1)), self.D.counit)
        V = V.reshape(len(src.basis), d ** n)
        return CoalgebraMorphism(src.coalgebra, self.levels[n - 1].coalgebra, self._coords(n - 1, V))

    def _degeneracy(self, n: int, j: int) -> CoalgebraMorphism:
        """Level n -> level n+1, duplicating slot j."""
        F, d = self.field, self.D.dim
        src = self.levels[n]
        L = ascii_letters
        a = L[:n + 1]
        out = a[:j] + "yz" + a[j + 1:]
        V = F.einsum("t" + a + "," + a[j] + "yz->t" + out, src.basis.reshape((len(src.basis),) + (d,) * (n + 1)), self.D.delta)
        V = V.reshape(len(src.basis), d ** (n + 2))
        return CoalgebraMorphism(src.coalgebra, self.levels[n + 1].coalgebra, self._coords(n + 1, V))

    def face(self, n: int, i: int) -> CoalgebraMorphism:
        return self.faces[n, i]

    def degeneracy(self, n: int, j: int) -> CoalgebraMorphism:
        return self.degeneracies[n, j]

    def check_identities(self) -> list[tuple[str, bool]]:
        F = self.field
        d, s = self.face, self.degeneracy

        def comp(*maps):  # apply left to right
            M = maps[0].matrix
            for f in maps[1:]:
                M = F.matmul(M, f.matrix)
            return M

        out = []
        for n in range(2, self.n_max + 1):
            for j in range(n + 1):
                for i in range(j):
                    out.append((f"d{i}d{j}=d{j - 1}d{i}@{n}",
                                bool(np.array_equal(comp(d(n, j), d(n - 1, i)), comp(d(n, i), d(n - 1, j - 1))))))
        for n in range(0, self.n_max):
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = comp(s(n, j), d(n + 1, i))
                    if i < j:
                        rhs = comp(d(n, i), s(n - 1, j - 1))
                    elif i in (j, j + 1):
                        rhs = F.eye(self.levels[n].coalgebra.dim)
                    else:
                        rhs = comp(d(n, i - 1), s(n - 1, j))
                    out.append((f"d{i}s{j}@{n}", bool(np.array_equal(lhs, rhs))))
        for n in range(0, self.n_max - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    out.append((f"s{i}s{j}=s{j + 1}s{i}@{n}",
                                bool(np.array_equal(comp(s(n, j), s(n + 1, i)), comp(s(n, i), s(n + 1, j + 1))))))
        return out

    def identities_hold(self) -> bool:
        return all(ok for _, ok in self.check_identities())

    def check_morphisms(self) -> bool:
        return all(f.check() for f in list(self.faces.values()) + list(self.degeneracies.values()))

    def dims(self) -> list[int]:
        return [lv.coalgebra.dim for lv in self.levels]


def coalg_amitsur(phi: CoalgebraMorphism, n_max: int = 2) -> CoalgAmitsurComplex:
    return CoalgAmitsurComplex(phi, n_max)


# ---------------------------------------------------------------------------
# H^1 and Hilbert 90


@dataclass
class CoalgH1Result:
    order: int
    cocycles: int
    boundaries: int
    orbits: int
    group: FiniteGroup
    group_orders: list
    abelian: list[bool]
    d2d1_trivial: bool

    def json(self) -> dict:
        return {"h1_order": self.order, "cocycles": self.cocycles, "coboundaries": self.boundaries,
                "orbits": self.orbits, "aut_orders": self.group_orders, "abelian": self.abelian,
                "delta2_delta1_trivial": self.d2d1_trivial}


def inverse_functionals(E: FiniteCoalgebra, chis: np.ndarray) -> np.ndarray:
    """Convolution inverses: chi^-1 = eps . sigma_chi^-1."""
    F = E.field
    sig = F.einsum("xab,na->nxb", E.delta, chis)
    return F.einsum("nxb,b->nx", F.inverses(sig), E.counit)


def delta_n(X: CoalgAmitsurComplex, n: int, chis: np.ndarray, inverses: np.ndarray) -> np.ndarray:
    """Alternating convolution product of the functionals induced along the
    faces into level n."""
    E = X.levels[n].coalgebra
    acc = np.tile(E.counit, (len(chis), 1))
    for i in range(n + 1):
        src = chis if i % 2 == 0 else inverses
        acc = convolve(E, acc, X.field.einsum("ij,nj->ni", X.face(n, i).matrix, src))
    return acc


def h1_coalg(phi: CoalgebraMorphism, X: CoalgAmitsurComplex | None = None) -> CoalgH1Result:
    X = X or coalg_amitsur(phi, 2)
    E0, E1, E2 = (lv.coalgebra for lv in X.levels[:3])
    G0, G1 = convolution_units(E0), convolution_units(E1)
    c0 = np.array(G0.elements, dtype=np.int64).reshape(G0.order, E0.dim)
    c1 = np.array(G1.elements, dtype=np.int64).reshape(G1.order, E1.dim)
    i0, i1 = inverse_functionals(E0, c0), inverse_functionals(E1, c1)
    d1 = delta_n(X, 1, c0, i0)
    d1_inv = delta_n(X, 1, i0, c0)
    d2 = delta_n(X, 2, c1, i1)
    z = [i for i in range(G1.order) if np.array_equal(d2[i], E2.counit)]
    b = sorted({G1.index(v) for v in d1})
    trivial21 = bool(np.all(delta_n(X, 2, d1, d1_inv) == E2.counit))
    # cosets of the coboundaries inside the cocycles
    zset = set(z)
    rep: dict[int, int] = {}
    reps: list[int] = []
    for i in z:
        if i in rep:
            continue
        members = sorted(G1.index(v) for v in convolve(E1, np.tile(c1[i], (len(b), 1)), c1[b]))
        if not set(members) <= zset:
            raise AssertionError("coboundaries are not cocycles")
        for m in members:
            rep[m] = len(reps)
        reps.append(members[0])

    def op(x, y):
        return rep[G1.index(convolve(E1, c1[reps[x]], c1[reps[y]]))]

    H = FiniteGroup(list(range(len(reps))), op, rep[G1.index(E1.counit)], name="H1")
    # orbits of y . x = Delta1(y) * x on the cocycles, counted independently
    orbits, seen = 0, set()
    for i in z:
        if i not in seen:
            orbits += 1
            seen |= {G1.index(v) for v in convolve(E1, np.tile(c1[i], (len(d1), 1)), d1)}
    ab = [check_abelian_functionals(E0, G0), check_abelian_functionals(E1, G1)]
    return CoalgH1Result(H.order, len(z), len(b), orbits, H, [G0.order, G1.order], ab, trivial21)


@dataclass
class Hilbert90Verdict:
    passed: bool
    h1: CoalgH1Result
    hypotheses: list[dict]
    counterexample: dict | None = None
    complex: CoalgAmitsurComplex | None = None

    @property
    def advisory(self) -> bool:
        return any(h["status"] != "verified" for h in self.hypotheses)

    def json(self) -> dict:
        return {"passed": self.passed, "h1": self.h1.json(),
                "hypotheses": self.hypotheses, "counterexample": self.counterexample}


def monadicity_surrogate(phi: CoalgebraMorphism, max_dim: int = 3) -> dict:
    """Surjectivity, a group-like base and faithful exact change of cobase
    on every graded comodule of dimension <= max_dim."""
    C, D = phi.target, phi.source
    surj = phi.is_surjective()
    grouplike = C.is_grouplike and D.is_grouplike
    tested, ok = 0, surj and grouplike
    if ok:
        fibres = np.asarray(phi.matrix != 0).sum(axis=0)
        for dims in product(range(max_dim + 1), repeat=C.dim):
            if sum(dims) > max_dim:
                continue
            Xg = graded_comodule(C, dims)
            Y = change_of_cobase(Xg, phi)
            expect = int(sum(k * f for k, f in zip(dims, fibres)))
            ok &= Y.dim == expect and (Y.dim > 0 or sum(dims) == 0)
            tested += 1
    return {"name": "monadic change of cobase (surrogate)", "status": "verified" if ok else "unverified",
            "detail": {"surjective": surj, "grouplike": grouplike, "graded_comodules_tested": tested}}


def hilbert90_check(phi: CoalgebraMorphism, strict: bool = False) -> Hilbert90Verdict:
    """H^1 triviality for phi.  With strict=True an unverified hypothesis
    raises instead of producing an advisory verdict."""
    hyp = monadicity_surrogate(phi)
    if strict and hyp["status"] != "verified":
        raise HypothesisUnverified(hyp["name"])
    X = coalg_amitsur(phi, 2)
    res = h1_coalg(phi, X)
    passed = res.order == 1 and res.orbits == 1
    cex = None if passed else {"h1_order": res.order, "orbits": res.orbits}
    return Hilbert90Verdict(passed, res, [hyp], cex, X)
