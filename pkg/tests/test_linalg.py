import itertools
from math import prod

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors as sympy_factors

from descentkit.errors import NoSolution
from descentkit.linalg import (AffineSystem, cokernel_basis, cokernel_structure, integer_kernel,
                               integer_solve, kernel_basis_field, rank_field, rref_field,
                               smith_normal_form, solve_linear_mod, subgroup_structure)
from descentkit.rings import mk_galois_field


def matmul(A, B):
    return [[sum(a * b for a, b in zip(r, c)) for c in zip(*B)] for r in A]


def det(M):
    return round(np.linalg.det(np.array(M, dtype=float))) if M else 1


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-10, 10), min_size=c, max_size=c), min_size=r, max_size=r)))


# values frozen from sympy's invariant_factors
@pytest.mark.parametrize("M, factors", [
    ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], [2, 6, 12]),
    ([[4, 6]], [2]),
    ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], [1, 3, 0]),
    ([[6, 0], [0, 4]], [2, 12]),
    ([[12, 18], [6, 9], [0, 3]], [3, 6]),
])
def test_snf_frozen(M, factors):
    assert smith_normal_form(M).diag == factors


def test_snf_zero_and_empty():
    assert smith_normal_form([[0, 0], [0, 0]]).diag == [0, 0]
    assert cokernel_structure([], 3) == [0, 0, 0]


@given(matrices)
def test_snf_properties(M):
    r, c = len(M), len(M[0])
    s = smith_normal_form(M)
    assert matmul(matmul(s.U, M), s.V) == s.D
    assert abs(det(s.U)) == 1 and abs(det(s.V)) == 1
    nz = [d for d in s.diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert s.diag[len(nz):] == [0] * (len(s.diag) - len(nz))
    assert all(s.D[i][j] == 0 for i in range(r) for j in range(c) if i != j)


@given(matrices)
def test_snf_matches_sympy(M):
    ours = [d for d in smith_normal_form(M).diag]
    theirs = [abs(int(d)) for d in sympy_factors(Matrix(M), domain=ZZ)]
    assert sorted(d for d in ours if d) == sorted(d for d in theirs if d)


@given(matrices)
def test_cokernel_order_against_box_count(M):
    """Cokernel of a small full-rank lattice, counted by reducing a box of
    representatives modulo the lattice."""
    c = len(M[0])
    fac = cokernel_structure(M, c)
    if 0 in fac or prod(fac) > 200 or c > 3:
        return
    n = prod(fac) if fac else 1
    # every coset meets the box [0, n)^c since n kills the quotient
    pres = cokernel_basis(M, c)
    classes = {pres.reduce(v) for v in itertools.product(range(n), repeat=c)}
    assert len(classes) == n == pres.order


@given(matrices)
def test_integer_kernel(M):
    c = len(M[0])
    K = integer_kernel(M, c)
    for z in K:
        assert all(sum(a * b for a, b in zip(row, z)) == 0 for row in M)
    rank = sum(1 for d in smith_normal_form(M).diag if d)
    assert len(K) == c - rank


@given(matrices, st.lists(st.integers(-20, 20), min_size=5, max_size=5))
def test_integer_solve(M, b):
    b = b[:len(M)]
    z = integer_solve(M, b)
    if z is not None:
        assert [sum(a * x for a, x in zip(row, z)) for row in M] == b


def test_solve_linear_mod():
    x = solve_linear_mod([[2, 3], [1, 1]], [1, 2], 7)
    assert (2 * x[0] + 3 * x[1]) % 7 == 1 and (x[0] + x[1]) % 7 == 2
    with pytest.raises(NoSolution):
        solve_linear_mod([[2]], [1], 4)


@given(st.lists(st.lists(st.integers(0, 4), min_size=4, max_size=4), min_size=1, max_size=4))
def test_kernel_basis_prime(A):
    K = kernel_basis_field(A, 5, 4)
    for v in K:
        assert all(sum(a * x for a, x in zip(row, v)) % 5 == 0 for row in A)
    assert len(K) + rank_field(A, 5, 4) == 4
    # brute force: the null space has 5^dim elements
    count = sum(1 for v in itertools.product(range(5), repeat=4)
                if all(sum(a * x for a, x in zip(row, v)) % 5 == 0 for row in A))
    assert count == 5 ** len(K)


def test_rref_galois_field():
    F4 = mk_galois_field(2, [1, 1, 1])

    class Fld:
        zero, one = 0, F4.one
        add = staticmethod(lambda a, b: int(F4.add(a, b)))
        mul = staticmethod(lambda a, b: int(F4.mul(a, b)))
        neg = staticmethod(lambda a: int(F4.neg(a)))
        inverse = staticmethod(F4.inverse)

    a = 2
    R, piv = rref_field([[1, a], [a, int(F4.mul(a, a))]], Fld, 2)
    assert piv == [0]
    assert len(kernel_basis_field([[1, a]], Fld, 2)) == 1


@given(st.lists(st.tuples(st.integers(0, 11), st.integers(0, 3)), min_size=0, max_size=3))
def test_subgroup_structure(gens):
    moduli = (12, 4)
    orders, basis = subgroup_structure([list(g) for g in gens], moduli)
    elems = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = ((x[0] + g[0]) % 12, (x[1] + g[1]) % 4)
            if y not in elems:
                elems.add(y)
                frontier.append(y)
    assert prod(orders) == len(elems)


def test_affine_system_mixed_moduli():
    # x in Z/4, y in Z/2 with 2x = 2 (mod 4)
    S = AffineSystem((4, 2))
    S.add({0: 2}, 4, 2)
    sol = S.solve()
    got = sorted(tuple(int(v) for v in row) for row in sol.array())
    assert got == [(1, 0), (1, 1), (3, 0), (3, 1)]
    assert len(sol) == 4 and sorted(sol) == got


def test_affine_system_rejects_ill_defined():
    S = AffineSystem((2,))
    with pytest.raises(ValueError):
        S.add({0: 1}, 4)


def test_affine_system_inconsistent():
    S = AffineSystem((3, 3))
    S.add({0: 1}, 3, 1)
    S.add({0: 1}, 3, 2)
    with pytest.raises(NoSolution):
        S.solve()
