import numpy as np
import pytest
from hypothesis import given, strategies as st

from descentkit.errors import NotAbelian, NotComposable
from descentkit.groups import (FiniteGroup, GroupHom, PointedMap, PointedSet, are_isomorphic, image,
                               invariant_factors, is_exact, kernel, quotient_abelian, subgroup)


def sym3():
    from itertools import permutations
    els = list(permutations(range(3)))
    return FiniteGroup(els, lambda a, b: tuple(a[b[i]] for i in range(3)), (0, 1, 2), name="S3")


def test_cyclic_and_products():
    G = FiniteGroup.direct_product(FiniteGroup.cyclic(4), FiniteGroup.cyclic(6))
    G.audit()
    assert G.order == 24 and invariant_factors(G) == [2, 12]


def test_non_abelian():
    S = sym3()
    S.audit()
    assert not S.abelian
    with pytest.raises(NotAbelian):
        invariant_factors(S)


@given(st.lists(st.integers(2, 6), min_size=1, max_size=3))
def test_invariant_factors_divisibility(ns):
    G = FiniteGroup.cyclic(ns[0])
    for n in ns[1:]:
        G = FiniteGroup.direct_product(G, FiniteGroup.cyclic(n))
    f = invariant_factors(G)
    assert np.prod(f) == G.order
    assert all(b % a == 0 for a, b in zip(f, f[1:]))


def test_isomorphism_abelian_and_not():
    C6 = FiniteGroup.cyclic(6)
    C2C3 = FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(3))
    ok, w = are_isomorphic(C6, C2C3)
    assert ok and sorted(w) == list(range(6))
    assert not are_isomorphic(C6, sym3())[0]
    assert are_isomorphic(sym3(), sym3())[0]


def test_kernel_image_quotient():
    G = FiniteGroup.cyclic(12)
    h = GroupHom(G, FiniteGroup.cyclic(4), [x % 4 for x in range(12)])
    assert h.check()
    K = kernel(h)
    assert K.order == 3 and image(h).order == 4
    Q, proj = quotient_abelian(G, K)
    assert Q.order == 4 and proj.check()
    H = subgroup(G, [0, 6])
    Q2, _ = quotient_abelian(G, H)
    assert invariant_factors(Q2) == [6]


def test_exactness_report():
    C4, C2 = FiniteGroup.cyclic(4), FiniteGroup.cyclic(2)
    inc = GroupHom(C2, C4, [0, 2])
    proj = GroupHom(C4, C2, [x % 2 for x in range(4)])
    rep = is_exact([inc, proj], left_trivial=True, right_trivial=True)
    assert rep.overall
    assert [p.exact for p in rep.positions] == [True, True, True]
    bad = GroupHom(C4, C2, [0] * 4)
    assert not is_exact([inc, bad]).overall
    js = rep.json()
    assert js["groups"][1]["invariant_factors"] == [4]
    with pytest.raises(NotComposable):
        is_exact([inc, inc])


def test_pointed_positions():
    C2 = FiniteGroup.cyclic(2)
    S = PointedSet(["*", "x"], 0)
    m = PointedMap(C2, S, np.array([0, 1]))
    f = GroupHom(FiniteGroup.cyclic(1), C2, [0])
    rep = is_exact([f, m], pointed=True)
    assert rep.overall
