import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from descentkit.errors import BoundExceeded, NotIrreducible, NotPrime
from descentkit.rings import (RingHom, canonical_hom, compose, diagonal, is_irreducible, is_local,
                              local_decomposition, mk_galois_field, mk_product, mk_product_many,
                              mk_zmod, ring_from_tables, units)


def brute_irreducible(f, p):
    """No root-free factorization check: enumerate all products of two monics."""
    d = len(f) - 1
    target = [c % p for c in f]
    for k in range(1, d):
        for a in itertools.product(range(p), repeat=k):
            for b in itertools.product(range(p), repeat=d - k):
                g, h = list(a) + [1], list(b) + [1]
                prod = [0] * (d + 1)
                for i, x in enumerate(g):
                    for j, y in enumerate(h):
                        prod[i + j] = (prod[i + j] + x * y) % p
                if prod == target:
                    return False
    return True


def test_zmod_tables():
    R = mk_zmod(6)
    assert R.order == 6
    assert [int(R.add(a, b)) for a, b in [(4, 5), (3, 3)]] == [3, 0]
    assert int(R.mul(4, 5)) == 2
    assert sorted(R.unit_elements) == [1, 5]
    R.audit()


def test_zmod_trivial_ring():
    R = mk_zmod(1)
    assert R.order == 1 and R.one == R.zero


def test_gf4_is_a_field():
    F = mk_galois_field(2, [1, 1, 1])
    F.audit()
    assert F.order == 4 and F.is_commutative
    assert len(F.unit_elements) == 3
    for a in range(1, 4):
        assert int(F.mul(a, F.inverse(a))) == F.one
    with pytest.raises(ZeroDivisionError):
        F.inverse(0)


def test_gf9_units_cyclic_of_order_8():
    F = mk_galois_field(3, [1, 0, 1])
    U = units(F)
    assert U.order == 8
    assert max(U.element_order(i) for i in range(8)) == 8


@pytest.mark.parametrize("p, d", [(2, 2), (2, 3), (3, 2), (2, 4)])
def test_irreducibility_matches_factor_enumeration(p, d):
    for low in itertools.product(range(p), repeat=d):
        f = list(low) + [1]
        assert is_irreducible(f, p) == brute_irreducible(f, p)


def test_gf_rejections():
    with pytest.raises(NotIrreducible):
        mk_galois_field(2, [1, 0, 1])
    with pytest.raises(NotPrime):
        mk_galois_field(4, [1, 1, 1])
    with pytest.raises(BoundExceeded):
        mk_galois_field(2, [1, 1, 0, 0, 1], bound=8)
    with pytest.raises(BoundExceeded):
        mk_zmod(10, bound=5)


def test_product_and_projections():
    P = mk_product(mk_zmod(2), mk_zmod(3))
    R = P.ring
    assert R.order == 6
    R.audit()
    for pr in P.projections:
        assert pr.check()
    assert len(R.idempotents) == 4


def test_tables_round_trip():
    R = mk_zmod(4)
    S = ring_from_tables(R.add_table.tolist(), R.mul_table.tolist())
    assert S.order == 4
    perm = np.array([S.input_index[x] for x in range(4)])
    assert np.array_equal(S.mul_table[perm[:, None], perm[None, :]], perm[R.mul_table])


def test_tables_reject_non_bilinear():
    add = [[(a + b) % 3 for b in range(3)] for a in range(3)]
    mul = [[0, 0, 0], [0, 1, 2], [0, 2, 2]]
    with pytest.raises((ValueError, AssertionError)):
        ring_from_tables(add, mul)


def test_canonical_and_diagonal_homs():
    F2, F4 = mk_zmod(2), mk_galois_field(2, [1, 1, 1])
    h = canonical_hom(F2, F4)
    assert h.check() and h.is_injective()
    d = diagonal(F2)
    assert d.check() and d.target.order == 4
    assert compose(RingHom.identity(F4), h).equals(h)
    with pytest.raises(ValueError):
        canonical_hom(mk_zmod(3), F4)


def test_frobenius_is_a_ring_automorphism():
    F4 = mk_galois_field(2, [1, 1, 1])
    frob = RingHom.from_images(F4, F4, [int(F4.mul(x, x)) for x in [F4.index(v) for v in np.eye(2, dtype=int)]])
    assert frob.check()
    assert sorted(frob.table.tolist()) == [0, 1, 2, 3]
    assert not np.array_equal(frob.table, np.arange(4))


@given(st.integers(2, 40))
def test_zmod_units_are_coprime_residues(n):
    from math import gcd
    R = mk_zmod(n)
    assert sorted(R.unit_elements) == [a for a in range(n) if gcd(a, n) == 1]


@given(st.lists(st.sampled_from([2, 3, 4, 5]), min_size=1, max_size=3))
def test_local_decomposition_of_products(ns):
    R = mk_product_many([mk_zmod(n) for n in ns])
    dec = local_decomposition(R)
    assert dec.verify(R)
    assert all(dec.local)
    assert len(dec.factors) == len(ns)


def test_is_local():
    assert is_local(mk_zmod(4)) and is_local(mk_zmod(9))
    assert not is_local(mk_zmod(6))
