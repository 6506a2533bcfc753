import pytest

from descentkit.amitsur import UnitsCosimplicial, build_amitsur, z1
from descentkit.descent import (DescentSetting, b_module, brb_correspondence, canonical_datum, coalgebra_morphism,
                                cocycle_to_module, comonad_coalgebras, comonadicity, datum_morphism, descended,
                                descent_data, is_faithfully_flat, is_separable, pic_kernel, verify_dual_sequence,
                                verify_invertible_sequence, verify_seq5)
from descentkit.errors import NotMono
from descentkit.modules import ModuleHom, identity_map, is_isomorphic_modules, regular
from descentkit.rings import RingHom, canonical_hom, diagonal, mk_galois_field, mk_zmod


def f2_f4():
    return canonical_hom(mk_zmod(2), mk_galois_field(2, [1, 1, 1]))


def f3_f9():
    return canonical_hom(mk_zmod(3), mk_galois_field(3, [1, 0, 1]))


def z2_z2xz2():
    return diagonal(mk_zmod(2))


def id_f4():
    return RingHom.identity(mk_galois_field(2, [1, 1, 1]))


def gl_order(n, q):
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def test_flatness_certificates():
    bad = canonical_hom(mk_zmod(4), mk_zmod(2))
    cert = is_faithfully_flat(bad)
    assert not cert.flat and not cert.faithfully_flat
    assert not is_separable(bad).separable
    assert comonadicity(bad).status == "unverified"
    for make in (f2_f4, f3_f9, z2_z2xz2):
        assert is_faithfully_flat(make()).faithfully_flat
        assert is_separable(make()).separable
        assert comonadicity(make()).status == "verified"


@pytest.mark.parametrize("copies", [0, 1, 2])
def test_brb_counts_f2_f4(copies):
    iota = f2_f4()
    rep = brb_correspondence(b_module(iota, copies), iota)
    # Galois descent: data on F4^k are the F2-forms, a torsor quotient GL_k(F4)/GL_k(F2)
    expected = gl_order(copies, 4) // gl_order(copies, 2)
    assert rep.data == rep.coalgebras == expected
    assert rep.bijective and rep.round_trip


def test_brb_count_f3_f9():
    iota = f3_f9()
    rep = brb_correspondence(b_module(iota, 1), iota)
    assert rep.data == gl_order(1, 9) // gl_order(1, 3) == 4
    assert rep.bijective and rep.round_trip


def test_morphisms_of_data():
    iota = f2_f4()
    M = b_module(iota, 1)
    st = DescentSetting(iota, M)
    data, coalgs = descent_data(st), comonad_coalgebras(st)
    one, zero = identity_map(M), ModuleHom(M, M, [[0] * M.m] * M.m)
    for d in data:
        assert datum_morphism(one, d, d) and datum_morphism(zero, d, data[0])
    for c in coalgs:
        assert coalgebra_morphism(one, c, c)
    # distinct data are not related by the identity
    assert sum(datum_morphism(one, d, e) for d in data for e in data) == len(data)


@pytest.mark.parametrize("make", [f2_f4, f3_f9, z2_z2xz2])
def test_canonical_datum_descends_back(make):
    iota = make()
    N = regular(iota.source)
    d = canonical_datum(N, iota)
    assert d.valid
    P = descended(d)
    assert P.module.order == N.order
    assert is_isomorphic_modules(P.module, N, ("left", "right"))[0]


@pytest.mark.parametrize("make, modules", [
    (f2_f4, [[0, 1], [0, 3], [0, 2]]),
    (f3_f9, [[0, 1, 2], [0, 5, 7], [0, 4, 8], [0, 3, 6]]),
    (z2_z2xz2, [[0, 3]]),
])
def test_cocycle_modules(make, modules):
    iota = make()
    C = build_amitsur(iota, 2)
    us = z1(UnitsCosimplicial(C))
    got = [sorted(cocycle_to_module(u, C).elements) for u in us]
    assert got == modules
    # every P_u is a copy of the base ring
    for P in got:
        assert len(P) == iota.source.order


SEQ = {
    "f2_f4": ([1, 3, 3, 1, 1], [1, 3, 3, 1], [3, 3, 2, 2]),
    "f3_f9": ([2, 8, 4, 1, 1], [2, 8, 4, 1], [8, 8, 2, 2]),
    "z2_z2xz2": ([1, 1, 1, 1, 1], [1, 1, 1, 1], [1, 1, 2, 2]),
    "id_f4": ([3, 3, 1, 1, 1], [3, 3, 1, 1], [3, 3, 1, 1]),
}
MAKERS = {"f2_f4": f2_f4, "f3_f9": f3_f9, "z2_z2xz2": z2_z2xz2, "id_f4": id_f4}


def orders(rep):
    return [g["order"] for g in rep.json()["groups"]]


@pytest.mark.parametrize("name", sorted(SEQ))
def test_seq5(name):
    rep = verify_seq5(MAKERS[name]())
    assert orders(rep) == SEQ[name][0]
    assert rep.overall
    assert all(rep.extra["o_certified"]) and rep.extra["end_equals_aut"] and rep.extra["homomorphisms"]


@pytest.mark.parametrize("name", sorted(SEQ))
def test_invertible_sequence(name):
    rep = verify_invertible_sequence(MAKERS[name]())
    assert orders(rep) == SEQ[name][1]
    assert rep.overall and rep.extra["pullbacks_invertible"]


@pytest.mark.parametrize("name", sorted(SEQ))
def test_dual_sequence(name):
    rep = verify_dual_sequence(MAKERS[name]())
    assert orders(rep) == SEQ[name][2]
    assert rep.overall and rep.extra["distinct_kernels"]


def test_seq5_needs_mono():
    with pytest.raises(NotMono):
        verify_seq5(canonical_hom(mk_zmod(4), mk_zmod(2)))


@pytest.mark.parametrize("make", [f2_f4, f3_f9, z2_z2xz2])
def test_pic_kernel(make):
    r = pic_kernel(make())
    assert r.verdict and not r.advisory
    assert r.h1.order == len(r.modules) == 1
