"""Exact linear algebra over the integers, over Z/n and over finite fields.

Integer matrices are plain lists of rows holding Python ints, so Smith normal
form intermediates never overflow.  Solution sets of congruence systems are
returned in a structured form (particular solution plus a basis of the
homogeneous solutions with their orders) so callers can enumerate them
without hashing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import prod
from typing import Iterator, Protocol, Sequence

import numpy as np

from .errors import NoSolution

Matrix = list[list[int]]


@dataclass(frozen=True)
class SnfResult:
    U: Matrix
    D: Matrix
    V: Matrix
    diag: list[int]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _shape(M: Sequence[Sequence[int]], ncols: int | None) -> tuple[int, int]:
    rows = len(M)
    if ncols is None:
        ncols = len(M[0]) if rows else 0
    for row in M:
        if len(row) != ncols:
            raise ValueError("ragged integer matrix")
    return rows, ncols


class _Snf:
    """Smith normal form with optional tracking of U, V and V^-1."""

    def __init__(self, M, ncols=None, track_u=True, track_v=True, track_vinv=False):
        self.r, self.c = _shape(M, ncols)
        self.D = [[int(x) for x in row] for row in M]
        self.U = _identity(self.r) if track_u else None
        self.V = _identity(self.c) if track_v else None
        self.Vinv = _identity(self.c) if track_vinv else None
        self._run()

    # elementary operations, mirrored on the transforms
    def _swap_rows(self, a, b):
        D = self.D
        D[a], D[b] = D[b], D[a]
        if self.U is not None:
            self.U[a], self.U[b] = self.U[b], self.U[a]

    def _swap_cols(self, a, b):
        for row in self.D:
            row[a], row[b] = row[b], row[a]
        if self.V is not None:
            for row in self.V:
                row[a], row[b] = row[b], row[a]
        if self.Vinv is not None:
            self.Vinv[a], self.Vinv[b] = self.Vinv[b], self.Vinv[a]

    def _add_row(self, dst, src, q):
        # row_dst += q * row_src
        rd, rs = self.D[dst], self.D[src]
        for j in range(self.c):
            if rs[j]:
                rd[j] += q * rs[j]
        if self.U is not None:
            ud, us = self.U[dst], self.U[src]
            for j in range(self.r):
                if us[j]:
                    ud[j] += q * us[j]

    def _add_col(self, dst, src, q):
        # col_dst += q * col_src
        for row in self.D:
            if row[src]:
                row[dst] += q * row[src]
        if self.V is not None:
            for row in self.V:
                if row[src]:
                    row[dst] += q * row[src]
        if self.Vinv is not None:
            vs, vd = self.Vinv[src], self.Vinv[dst]
            for j in range(self.c):
                if vd[j]:
                    vs[j] -= q * vd[j]

    def _negate_row(self, i):
        self.D[i] = [-x for x in self.D[i]]
        if self.U is not None:
            self.U[i] = [-x for x in self.U[i]]

    def _run(self):
        D, r, c = self.D, self.r, self.c
        t = 0
        while t < min(r, c):
            # minimal absolute value pivot, row-major tie-break
            piv, best = None, 0
            for i in range(t, r):
                row = D[i]
                for j in range(t, c):
                    v = row[j]
                    if v and (piv is None or abs(v) < best):
                        piv, best = (i, j), abs(v)
                        if best == 1:
                            break
                if best == 1:
                    break
            if piv is None:
                break
            if piv[0] != t:
                self._swap_rows(t, piv[0])
            if piv[1] != t:
                self._swap_cols(t, piv[1])
            while True:
                p = D[t][t]
                dirty = False
                for i in range(t + 1, r):
                    if D[i][t]:
                        q = D[i][t] // p
                        if q:
                            self._add_row(i, t, -q)
                        if D[i][t]:
                            dirty = True
                for j in range(t + 1, c):
                    if D[t][j]:
                        q = D[t][j] // p
                        if q:
                            self._add_col(j, t, -q)
                        if D[t][j]:
                            dirty = True
                if dirty:
                    cand, best = None, abs(p)
                    for i in range(t + 1, r):
                        if D[i][t] and abs(D[i][t]) < best:
                            cand, best = ("r", i), abs(D[i][t])
                    for j in range(t + 1, c):
                        if D[t][j] and abs(D[t][j]) < best:
                            cand, best = ("c", j), abs(D[t][j])
                    if cand[0] == "r":
                        self._swap_rows(t, cand[1])
                    else:
                        self._swap_cols(t, cand[1])
                    continue
                bad = None
                for i in range(t + 1, r):
                    row = D[i]
                    for j in range(t + 1, c):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                self._add_row(t, bad, 1)
            if D[t][t] < 0:
                self._negate_row(t)
            t += 1

    @property
    def diag(self) -> list[int]:
        return [self.D[i][i] for i in range(min(self.r, self.c))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d)


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> SnfResult:
    """Return U, D, V with U*M*V = D diagonal and d1 | d2 | ... (zeros last)."""
    s = _Snf(M, ncols)
    return SnfResult(s.U, s.D, s.V, s.diag)


def cokernel_structure(M: Sequence[Sequence[int]], ncols: int | None = None) -> list[int]:
    """Invariant factors of Z^cols / (row span of M); 0 marks a free summand."""
    s = _Snf(M, ncols, track_u=False, track_v=False)
    nonzero = [d for d in s.diag if d]
    return [d for d in nonzero if d != 1] + [0] * (s.c - len(nonzero))


@dataclass(frozen=True)
class Presentation:
    """A finite quotient Z^n / L in diagonal coordinates.

    ``moduli[t]`` is the order of new generator t, ``proj[g]`` gives the new
    coordinates of old generator g and ``lift[t]`` writes new generator t as
    an integer combination of the old ones.
    """

    moduli: tuple[int, ...]
    proj: Matrix
    lift: Matrix

    @property
    def order(self) -> int:
        return prod(self.moduli)

    def reduce(self, old: Sequence[int]) -> tuple[int, ...]:
        """New coordinates of an integer combination of old generators."""
        out = [0] * len(self.moduli)
        for g, a in enumerate(old):
            if a:
                row = self.proj[g]
                for t in range(len(out)):
                    out[t] += a * row[t]
        return tuple(x % m for x, m in zip(out, self.moduli))


def cokernel_basis(relations: Sequence[Sequence[int]], ngens: int) -> Presentation:
    """Diagonalize Z^ngens modulo the row span of ``relations``.

    The quotient must be finite.
    """
    s = _Snf(relations, ngens, track_u=False, track_v=True, track_vinv=True)
    diag = s.diag + [0] * (ngens - len(s.diag))
    if any(d == 0 for d in diag):
        raise ValueError("cokernel is infinite")
    keep = [t for t, d in enumerate(diag) if d != 1]
    moduli = tuple(diag[t] for t in keep)
    proj = [[s.V[g][t] % diag[t] for t in keep] for g in range(ngens)]
    lift = [list(s.Vinv[t]) for t in keep]
    return Presentation(moduli, proj, lift)


def integer_kernel(M: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """A Z-basis of {z : M z = 0}."""
    s = _Snf(M, ncols, track_u=False, track_v=True)
    rank = s.rank
    return [[s.V[i][j] for i in range(s.c)] for j in range(rank, s.c)]


def integer_solve(M: Sequence[Sequence[int]], b: Sequence[int], ncols: int | None = None):
    """One integer solution of M z = b, or None."""
    s = _Snf(M, ncols, track_u=True, track_v=True)
    ub = [sum(u * x for u, x in zip(row, b)) for row in s.U]
    rank = s.rank
    w = [0] * s.c
    for i in range(rank):
        d = s.D[i][i]
        if ub[i] % d:
            return None
        w[i] = ub[i] // d
    if any(ub[i] for i in range(rank, s.r)):
        return None
    return [sum(s.V[i][j] * w[j] for j in range(s.c)) for i in range(s.c)]


def solve_linear_mod(A: Sequence[Sequence[int]], b: Sequence[int], n: int) -> list[int]:
    """Solve A x = b (mod n); raises NoSolution when inconsistent."""
    if n < 1:
        raise ValueError("modulus must be positive")
    rows, cols = _shape(A, None)
    if len(b) != rows:
        raise ValueError("right-hand side has wrong length")
    big = [list(A[i]) + [-n if k == i else 0 for k in range(rows)] for i in range(rows)]
    z = integer_solve(big, b, cols + rows)
    if z is None:
        raise NoSolution(f"no solution modulo {n}")
    return [x % n for x in z[:cols]]


# ---------------------------------------------------------------------------
# finite fields


class FieldLike(Protocol):
    zero: int
    one: int

    def add(self, a: int, b: int) -> int: ...
    def mul(self, a: int, b: int) -> int: ...
    def neg(self, a: int) -> int: ...
    def inverse(self, a: int) -> int: ...


class PrimeField:
    """Arithmetic in Z/p on plain ints."""

    def __init__(self, p: int):
        self.p = p
        self.zero, self.one = 0, 1 % p

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inverse(self, a):
        return pow(a, -1, self.p)


def _as_field(fld) -> FieldLike:
    return PrimeField(fld) if isinstance(fld, int) else fld


def rref_field(A: Sequence[Sequence[int]], fld, ncols: int | None = None):
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    F = _as_field(fld)
    _, c = _shape(A, ncols)
    R = [list(row) for row in A]
    pivots: list[int] = []
    r = 0
    for col in range(c):
        sel = next((i for i in range(r, len(R)) if R[i][col] != F.zero), None)
        if sel is None:
            continue
        R[r], R[sel] = R[sel], R[r]
        inv = F.inverse(R[r][col])
        R[r] = [F.mul(inv, x) for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][col] != F.zero:
                f = F.neg(R[i][col])
                R[i] = [F.add(x, F.mul(f, y)) for x, y in zip(R[i], R[r])]
        pivots.append(col)
        r += 1
        if r == len(R):
            break
    return R[:r], pivots


def kernel_basis_field(A: Sequence[Sequence[int]], fld, ncols: int | None = None) -> list[list[int]]:
    """Basis of the null space {x : A x = 0} over a finite field.

    ``fld`` is a prime p or a field object (for instance a Galois field ring).
    """
    F = _as_field(fld)
    _, c = _shape(A, ncols)
    R, pivots = rref_field(A, F, c)
    free = [j for j in range(c) if j not in pivots]
    basis = []
    for f in free:
        v = [F.zero] * c
        v[f] = F.one
        for row, pc in zip(R, pivots):
            v[pc] = F.neg(row[f])
        basis.append(v)
    return basis


def rank_field(A: Sequence[Sequence[int]], fld, ncols: int | None = None) -> int:
    return len(rref_field(A, fld, ncols)[1])


# ---------------------------------------------------------------------------
# congruence systems over finite abelian groups


@dataclass
class SolutionSet:
    """Affine solution set ``particular + span(basis)`` inside prod Z/moduli.

    Every solution is ``particular + sum a_t basis[t]`` for a unique choice of
    ``0 <= a_t < orders[t]``.
    """

    moduli: tuple[int, ...]
    particular: tuple[int, ...]
    basis: list[tuple[int, ...]]
    orders: list[int]

    def __len__(self) -> int:
        return prod(self.orders)

    def array(self) -> np.ndarray:
        """All solutions as rows of an int64 array, in enumeration order."""
        nvar = len(self.moduli)
        if not self.basis:
            return np.array([self.particular], dtype=np.int64).reshape(1, nvar)
        grids = np.indices(self.orders, dtype=np.int64).reshape(len(self.orders), -1).T
        B = np.array(self.basis, dtype=np.int64).reshape(len(self.basis), nvar)
        out = grids @ B + np.array(self.particular, dtype=np.int64)
        return out % np.array(self.moduli, dtype=np.int64)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for coeffs in product(*(range(e) for e in self.orders)):
            x = list(self.particular)
            for a, h in zip(coeffs, self.basis):
                if a:
                    for i, hi in enumerate(h):
                        x[i] += a * hi
            yield tuple(v % m for v, m in zip(x, self.moduli))


def subgroup_structure(gens: Sequence[Sequence[int]], moduli: Sequence[int]):
    """Diagonal basis of the subgroup of prod Z/moduli generated by ``gens``.

    Returns (orders, basis) with every element written uniquely as
    sum a_t basis[t], 0 <= a_t < orders[t].
    """
    v = len(moduli)
    gens = [list(g) for g in gens]
    r = len(gens)
    if r == 0:
        return [], []
    # relations among the generators: c with sum c_j g_j in (moduli) Z^v
    M = [[gens[j][i] for j in range(r)] + [moduli[i] if k == i else 0 for k in range(v)]
         for i in range(v)]
    rel = [z[:r] for z in integer_kernel(M, r + v)]
    pres = cokernel_basis(rel, r)
    basis = []
    for row in pres.lift:
        h = [0] * v
        for j, a in enumerate(row):
            if a:
                for i in range(v):
                    h[i] += a * gens[j][i]
        basis.append(tuple(x % m for x, m in zip(h, moduli)))
    return list(pres.moduli), basis


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


class AffineSystem:
    """Linear congruences in unknowns x_i taken modulo ``moduli[i]``.

    Each equation is ``sum c_i x_i = rhs (mod m)``; it must be well defined on
    the unknowns, i.e. ``c_i * moduli[i]`` divisible by ``m``.
    """

    def __init__(self, moduli: Sequence[int]):
        self.moduli = tuple(int(m) for m in moduli)
        self.rows: list[dict[int, int]] = []
        self.mods: list[int] = []
        self.rhs: list[int] = []

    @property
    def nvars(self) -> int:
        return len(self.moduli)

    def add(self, coeffs: dict[int, int], modulus: int, rhs: int = 0) -> None:
        modulus = int(modulus)
        if modulus == 1:
            return
        row = {}
        for i, c in coeffs.items():
            c = int(c) % modulus
            if c:
                if c * self.moduli[i] % modulus:
                    raise ValueError("equation is not well defined on the unknowns")
                row[i] = c
        rhs = int(rhs) % modulus
        if not row and not rhs:
            return
        self.rows.append(row)
        self.mods.append(modulus)
        self.rhs.append(rhs)

    def solve(self) -> SolutionSet:
        v = self.nvars
        ps = set(self.moduli) | set(self.mods)
        if len(ps) == 1 and _is_prime(next(iter(ps))):
            return self._solve_prime(next(iter(ps)))
        if len(ps) == 0:
            return SolutionSet((), (), [], [])
        return self._solve_general()

    def _solve_prime(self, p: int) -> SolutionSet:
        v = self.nvars
        A = [[row.get(i, 0) for i in range(v)] + [b] for row, b in zip(self.rows, self.rhs)]
        R, pivots = rref_field(A, p, v + 1)
        if v in pivots:
            raise NoSolution("inconsistent system over a prime field")
        x0 = [0] * v
        for row, pc in zip(R, pivots):
            x0[pc] = row[v]
        free = [j for j in range(v) if j not in pivots]
        basis = []
        for f in free:
            h = [0] * v
            h[f] = 1
            for row, pc in zip(R, pivots):
                h[pc] = -row[f] % p
            basis.append(tuple(h))
        return SolutionSet(self.moduli, tuple(x0), basis, [p] * len(basis))

    def _solve_general(self) -> SolutionSet:
        v, e = self.nvars, len(self.rows)
        big = [[row.get(i, 0) for i in range(v)] + [-m if k == j else 0 for k in range(e)]
               for j, (row, m) in enumerate(zip(self.rows, self.mods))]
        z = integer_solve(big, self.rhs, v + e) if e else [0] * v
        if z is None:
            raise NoSolution("inconsistent congruence system")
        x0 = tuple(a % m for a, m in zip(z[:v], self.moduli))
        gens = [k[:v] for k in integer_kernel(big, v + e)] if e else \
            [[int(i == j) for i in range(v)] for j in range(v)]
        orders, basis = subgroup_structure(gens, self.moduli)
        return SolutionSet(self.moduli, x0, basis, orders)
