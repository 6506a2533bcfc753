import itertools
from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st

from descentkit.errors import BoundExceeded, NotInjective
from descentkit.groups import invariant_factors
from descentkit.modules import (Action, FiniteModule, ModuleHom, aut_group, base_bimodule, direct_sum,
                                hom_enumerate, invertible_submodule_group, is_isomorphic_modules,
                                lambda_to_submodule, product_of_submodules, product_via_tensor,
                                quotient_module, regular, submodule_module, submodules, tensor_over,
                                xi_left, xi_right, zero_module)
from descentkit.rings import RingHom, canonical_hom, mk_galois_field, mk_product, mk_zmod


def cyclic_module(n, R, sides="lr"):
    """Z/n as a module over Z/N with the generator 1 of R acting as 1."""
    act = Action(R, np.ones((R.m, 1, 1), dtype=np.int64))
    return FiniteModule((n,), act if "l" in sides else None, act if "r" in sides else None, f"Z/{n}")


def f2_f4():
    return canonical_hom(mk_zmod(2), mk_galois_field(2, [1, 1, 1]))


def f3_f9():
    return canonical_hom(mk_zmod(3), mk_galois_field(3, [1, 0, 1]))


def test_cyclic_tensor_value():
    R = mk_zmod(12)
    T = tensor_over(R, cyclic_module(4, R, "r"), cyclic_module(6, R, "l"))
    assert T.module.invariant_factors == [2]


@given(st.integers(1, 12), st.integers(1, 12))
def test_cyclic_tensor_is_gcd(a, b):
    N = a * b // gcd(a, b)
    R = mk_zmod(N)
    T = tensor_over(R, cyclic_module(a, R, "r"), cyclic_module(b, R, "l"))
    assert T.module.order == gcd(a, b)
    # the witness is bilinear and hits a generator
    q = T.q.table
    for x, y, z in itertools.product(range(a), range(b), range(b)):
        assert q[x, (y + z) % b] == T.module.add_table[q[x, y], q[x, z]]
    assert len(set(q.ravel().tolist())) == gcd(a, b)


def test_field_tensor_order():
    F4 = mk_galois_field(2, [1, 1, 1])
    iota = canonical_hom(mk_zmod(2), F4)
    S = base_bimodule(iota)
    T = tensor_over(iota.source, S, S)
    assert T.module.order == 16
    with pytest.raises(BoundExceeded):
        tensor_over(iota.source, S, S, bound=8)


@given(st.integers(1, 10), st.integers(1, 10))
def test_hom_count_matches_brute_force(a, b):
    R = mk_zmod(a * b)
    M, N = cyclic_module(a, R, "l"), cyclic_module(b, R, "l")
    # additive maps Z/a -> Z/b are fixed by the image of 1, which needs a*y = 0
    brute = [y for y in range(b) if (a * y) % b == 0]
    homs = hom_enumerate(M, N)
    assert len(homs) == len(brute) == gcd(a, b)
    assert sorted(int(h(1)) for h in homs) == brute


def test_hom_over_field_extension():
    iota = f2_f4()
    S = regular(iota.target, "l")
    assert len(hom_enumerate(S, S)) == 4


def test_aut_group_of_klein_four():
    R = mk_zmod(2)
    V = direct_sum(cyclic_module(2, R, "l"), cyclic_module(2, R, "l"))
    A = aut_group(V)
    assert A.order == 6 and not A.abelian


def test_isomorphism_of_modules():
    R = mk_zmod(6)
    M = cyclic_module(6, R, "l")
    N = direct_sum(cyclic_module(2, R, "l"), cyclic_module(3, R, "l"))
    ok, f = is_isomorphic_modules(M, N)
    assert ok and f.is_bijective() and f.is_equivariant()
    assert not is_isomorphic_modules(M, direct_sum(cyclic_module(3, R, "l"), cyclic_module(3, R, "l")))[0]


def test_submodule_counts():
    R4 = mk_zmod(4)
    assert len(submodules(cyclic_module(4, R4, "l"))) == 3
    P = mk_product(mk_zmod(2), mk_zmod(2)).ring
    assert len(submodules(regular(P, "l"))) == 4


def test_quotient_and_sub():
    R = mk_zmod(12)
    M = cyclic_module(12, R, "l")
    J = frozenset(range(0, 12, 3))
    Q, proj = quotient_module(M, J)
    assert Q.order == 3 and proj.is_equivariant(("left",))
    assert {int(proj(x)) for x in J} == {0}
    sub = submodule_module(M, J)
    assert sub.module.order == 4 and sub.inclusion.is_injective()
    with pytest.raises(ValueError):
        submodule_module(regular(mk_galois_field(2, [1, 1, 1]), "l"), [0, 1])


def test_zero_module():
    Z = zero_module(mk_zmod(3))
    assert Z.order == 1
    Z.audit()


@pytest.mark.parametrize("make, order", [(f2_f4, 3), (f3_f9, 4)])
def test_invertible_group_orders(make, order):
    iota = make()
    inv = invertible_submodule_group(iota)
    assert inv.group.order == order
    inv.group.audit()
    # every invertible submodule satisfies both xi maps
    for J, sm in inv.submodules.items():
        assert xi_left(iota, sm).iso and xi_right(iota, sm).iso


@pytest.mark.parametrize("make", [f2_f4, f3_f9])
def test_products_agree_with_tensor_image(make):
    iota = make()
    inv = invertible_submodule_group(iota)
    for J, K in itertools.product(inv.submodules, repeat=2):
        P = product_of_submodules(iota.target, J, K)
        assert P == product_via_tensor(iota, inv.submodules[J], inv.submodules[K])


def test_invertible_rejects_non_injective():
    with pytest.raises(NotInjective):
        invertible_submodule_group(canonical_hom(mk_zmod(4), mk_zmod(2)))


def test_lambda_pullback():
    iota = f2_f4()
    S = regular(iota.target, "l")
    g = 2  # a generator of F4^*
    lam = ModuleHom(S, S, iota.target.left_matrix(iota.target.coords(g)))
    assert sorted(lambda_to_submodule(lam, iota)) == [0, 3]
