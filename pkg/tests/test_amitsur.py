import numpy as np
import pytest

from descentkit.amitsur import (CoringCe, UnitsCosimplicial, build_amitsur, coring_automorphisms, delta_n,
                                h0_equalizer, h1, hn_abelian, kappa_matches_delta, regular_auts, z1)
from descentkit.errors import NotCommutative
from descentkit.groups import FiniteGroup, image, kernel
from descentkit.rings import RingHom, canonical_hom, diagonal, mk_galois_field, mk_product, mk_zmod, ring_from_tables


def f2_f4():
    return canonical_hom(mk_zmod(2), mk_galois_field(2, [1, 1, 1]))


def f3_f9():
    return canonical_hom(mk_zmod(3), mk_galois_field(3, [1, 0, 1]))


def z2_z2xz2():
    return diagonal(mk_zmod(2))


def id_f4():
    return RingHom.identity(mk_galois_field(2, [1, 1, 1]))


CASES = {"f2_f4": f2_f4, "f3_f9": f3_f9, "z2_z2xz2": z2_z2xz2, "id_f4": id_f4}

# level orders, unit orders (None where not enumerated), |Z^1|, |H^1|, |H^0|, |equalizer|
EXPECTED = {
    "f2_f4": ([4, 16, 256], [3, 9, 81], 3, 1, 1, 2),
    "f3_f9": ([9, 81, 6561], [8, 64, None], 4, 1, 2, 3),
    "z2_z2xz2": ([4, 16, 256], [1, 1, 1], 1, 1, 1, 2),
    "id_f4": ([4, 4, 4], [3, 3, 3], 1, 1, 3, 4),
}


@pytest.fixture(scope="module", params=sorted(CASES))
def case(request):
    iota = CASES[request.param]()
    C = build_amitsur(iota, 2)
    return request.param, iota, C, UnitsCosimplicial(C)


def test_level_and_unit_orders(case):
    name, _, C, U = case
    levels, unit_orders, *_ = EXPECTED[name]
    assert [L.order for L in C.levels] == levels
    assert [G.order if isinstance(G, FiniteGroup) else None for G in U.groups] == unit_orders


def test_cosimplicial_identities(case):
    _, _, C, _ = case
    checks = C.check_identities()
    assert checks and all(c.holds for c in checks)
    assert all(h.check() for h in C.faces.values())
    assert all(h.check() for h in C.degeneracies.values())


def test_h1_values(case):
    name, _, C, U = case
    _, _, nz, nh, nh0, neq = EXPECTED[name]
    H = h1(U)
    assert len(H.cocycles) == nz
    assert H.order == nh
    assert hn_abelian(U, 0).group.order == nh0
    assert len(h0_equalizer(C)) == neq


def test_class_count_times_boundaries(case):
    _, _, _, U = case
    H = h1(U)
    B = image(delta_n(U, 1))
    assert H.order * B.order == len(H.cocycles)
    assert H.group.order == H.order
    # classes partition the cocycles
    flat = sorted(x for c in H.classes for x in c)
    assert flat == sorted(H.cocycles)


def test_cocycles_match_alternating_kernel(case):
    """The cocycle condition written as d1 = d2 d0 against the kernel of
    the alternating coboundary d0 d1^-1 d2."""
    _, _, C, U = case
    if not isinstance(U.groups[2], FiniteGroup):
        U = UnitsCosimplicial(C, enum_bound=1 << 13)
    K = kernel(delta_n(U, 2))
    assert sorted(K.elements) == sorted(z1(U))


def test_boundaries_are_cocycles(case):
    _, _, _, U = case
    assert set(image(delta_n(U, 1)).elements) <= set(z1(U))


@pytest.mark.parametrize("make", [f2_f4, f3_f9, z2_z2xz2, id_f4])
def test_coring(make):
    e = make()
    C = CoringCe(e)
    assert all(C.check_laws().values())
    auts = coring_automorphisms(e)
    assert auts.end_equals_aut
    U = UnitsCosimplicial(C.complex)
    assert auts.group.order == len(z1(U))
    for lam in regular_auts(e.target).elements:
        assert kappa_matches_delta(lam, C, U)


def test_non_commutative_rejected():
    # upper triangular 2x2 matrices over F2 as a ring of order 8
    els = [(a, b, d) for a in range(2) for b in range(2) for d in range(2)]
    idx = {x: i for i, x in enumerate(els)}
    add = [[idx[tuple((u + v) % 2 for u, v in zip(x, y))] for y in els] for x in els]
    mul = [[idx[(x[0] * y[0] % 2, (x[0] * y[1] + x[1] * y[2]) % 2, x[2] * y[2] % 2)] for y in els] for x in els]
    T = ring_from_tables(add, mul)
    assert not T.is_commutative
    with pytest.raises(NotCommutative):
        build_amitsur(canonical_hom(mk_zmod(2), T), 1)
