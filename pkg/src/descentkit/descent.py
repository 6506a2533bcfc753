"""Descent data, comonad coalgebras, descended modules, Picard class sets,
comonadicity certificates and the exact-sequence verifiers.

Conventions for a map iota: A -> B of commutative rings and a B-module M:

* ``B (x)_A M`` and ``M (x)_A B`` are (B, B)-bimodules: the left B acts on
  slot 0 and the right B on slot 1 (through M's action where M sits).
* A twist is a bimodule map theta: B (x) M -> M (x) B.  It is normalized
  when multiplying out theta(1 (x) m) gives m back, and a cocycle when
  d0*(theta) . d2*(theta) = d1*(theta) on B (x) B (x) M.
* A coalgebra structure is a B-linear sigma: M -> B (x) M (B on the left
  factor) with counit and coassociativity laws for the comonad B (x)_A -.
* The two correspond by sigma(m) = swap(theta(1 (x) m)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .amitsur import (AmitsurComplex, CoringCe, H1Result, UnitsCosimplicial, build_amitsur,
                      coring_automorphisms, h1, insert_unit, kappa, regular_auts)
from .errors import BoundExceeded, HypothesisUnverified, NotInjective, NotMono
from .groups import ExactnessReport, FiniteGroup, GroupHom, is_exact
from .modules import (solution_matrices, Action, FiniteModule, ModuleHom, MultiTensor, Submodule, Tensor, aut_group,
                      algebra_module, direct_sum, hom_solutions, invertible_submodule_group,
                      is_isomorphic_modules, lambda_to_submodule, multilinear, quotient_module,
                      regular, restrict, single, submodule_module, submodules, tensor_over,
                      xi_left, xi_right, zero_module)
from .rings import DEFAULT_BOUND, FiniteRing, RingHom, is_local, local_decomposition, units

FLAT_BOUND = 64
BRB_BOUND = 64


# ---------------------------------------------------------------------------
# module shapes


def b_as(iota: RingHom, left: str, right: str, name: str = "") -> FiniteModule:
    """B with the left/right action of A ('A') or of B ('B')."""
    B = iota.target
    idB = RingHom.identity(B)
    pick = {"A": iota, "B": idB, None: None}
    return algebra_module(B, pick[left], pick[right], name or B.name or "B")


def module_as(M: FiniteModule, iota: RingHom, left: str, right: str) -> FiniteModule:
    """A B-module (left action) with actions of A ('A') or B ('B') on either side."""
    rest = restrict(M, iota, "left").left
    pick = {"A": rest, "B": M.left, None: None}
    return FiniteModule(M.moduli, pick[left], pick[right], M.name)


def b_module(iota: RingHom, copies: int) -> FiniteModule:
    """B^copies as a left B-module."""
    B = iota.target
    if copies == 0:
        return zero_module(left=B)
    M = b_as(iota, "B", None)
    for _ in range(copies - 1):
        M = direct_sum(M, b_as(iota, "B", None))
    M.name = f"{B.name}^{copies}"
    return M


def _act_array(M: FiniteModule) -> np.ndarray:
    """arr[b, m, out]: basis element b of the ring acting on basis m."""
    return M.left.mats


# ---------------------------------------------------------------------------
# descent data and coalgebras


class DescentSetting:
    """Everything needed to state descent data on one B-module M."""

    def __init__(self, iota: RingHom, M: FiniteModule):
        if M.left is None or M.left.ring is not iota.target:
            raise ValueError("M must be a left B-module")
        A, B = iota.source, iota.target
        self.iota, self.A, self.B, self.M = iota, A, B, M
        bound = max(DEFAULT_BOUND, B.order * M.order)
        self.T1 = tensor_over(A, b_as(iota, "B", "A"), module_as(M, iota, "A", "B"), bound=bound)
        self.T2 = tensor_over(A, module_as(M, iota, "B", "A"), b_as(iota, "A", "B"), bound=bound)
        # T1 with only the left B action: the comonad value G(M)
        self.GM = FiniteModule(self.T1.module.moduli, self.T1.module.left, None, name=f"B(x){M.name}")
        BA = b_as(iota, "A", "A")
        MA = module_as(M, iota, "A", "A")

        def lay(factors):
            return MultiTensor(A, factors, [f.right for f in factors], [f.left for f in factors])

        self.L_BBM = lay([BA, BA, MA])
        self.L_BMB = lay([BA, MA, BA])
        self.L_MBB = lay([MA, BA, BA])
        act = _act_array(M)
        one = B.one_coords
        eyeM = np.eye(M.m, dtype=np.int64)
        # 1 (x) m for the basis of M, in T1 coordinates
        self.unit_m = np.einsum("a,mb,abu->mu", one, eyeM, self.T1.layout.Q) % self.T1.module._mods
        self.mu = multilinear(self.T2.layout, single(M), [(act.transpose(1, 0, 2), [0, 1], [0])])
        self.counit = multilinear(self.T1.layout, single(M), [(act, [0, 1], [0])])
        self.swap = multilinear(self.T2.layout, self.T1.layout,
                                [(eyeM, [0], [1]), (np.eye(B.m, dtype=np.int64), [1], [0])])
        self.delta = insert_unit(self.T1.layout, self.L_BBM, 1, one)

    # -- twists
    def theta_block(self, F: np.ndarray) -> np.ndarray:
        """theta on simple tensors: [b, m, m', b']."""
        return np.einsum("bma,ac,cpq->bmpq", self.T1.layout.Q, F, self.T2.layout.E, optimize=True)

    def is_normalized(self, F: np.ndarray) -> bool:
        got = (self.unit_m @ F @ self.mu) % self.M._mods if self.M.m else np.zeros((0, 0))
        return bool(np.array_equal(got, np.eye(self.M.m, dtype=np.int64) % self.M._mods)) if self.M.m else True

    def cocycle_maps(self, F: np.ndarray):
        Th = self.theta_block(F)
        eB = np.eye(self.B.m, dtype=np.int64)
        d2 = multilinear(self.L_BBM, self.L_BMB, [(eB, [0], [0]), (Th, [1, 2], [1, 2])])
        d0 = multilinear(self.L_BMB, self.L_MBB, [(Th, [0, 1], [0, 1]), (eB, [2], [2])])
        d1 = multilinear(self.L_BBM, self.L_MBB, [(Th, [0, 2], [0, 2]), (eB, [1], [1])])
        return d0, d1, d2

    def is_cocycle(self, F: np.ndarray) -> bool:
        d0, d1, d2 = self.cocycle_maps(F)
        mods = np.array(self.L_MBB.moduli, dtype=np.int64)
        if not len(mods):
            return True
        return bool(np.array_equal((d2 @ d0) % mods, d1 % mods))

    def twist_system(self, sys):
        """Add the normalization constraints to a Hom(T1, T2) system."""
        M = self.M
        k1, k2 = self.T1.module.m, self.T2.module.m
        for l in range(M.m):
            for j, dj in enumerate(M.moduli):
                coeffs: dict[int, int] = {}
                for a in range(k1):
                    va = int(self.unit_m[l, a])
                    if not va:
                        continue
                    for b in range(k2):
                        c = va * int(self.mu[b, j])
                        if c:
                            coeffs[a * k2 + b] = coeffs.get(a * k2 + b, 0) + c
                sys.add(coeffs, dj, 1 if l == j else 0)

    # -- coalgebras
    def sigma_block(self, S: np.ndarray) -> np.ndarray:
        """sigma on basis elements as simple tensors: [m, b, m']."""
        return np.einsum("ma,abn->mbn", S, self.T1.layout.E, optimize=True)

    def is_counital(self, S: np.ndarray) -> bool:
        if not self.M.m:
            return True
        return bool(np.array_equal((S @ self.counit) % self.M._mods, np.eye(self.M.m, dtype=np.int64) % self.M._mods))

    def is_coassociative(self, S: np.ndarray) -> bool:
        mods = np.array(self.L_BBM.moduli, dtype=np.int64)
        if not len(mods):
            return True
        Sb = self.sigma_block(S)
        Gs = multilinear(self.T1.layout, self.L_BBM, [(np.eye(self.B.m, dtype=np.int64), [0], [0]), (Sb, [1], [1, 2])])
        return bool(np.array_equal((S @ Gs) % mods, (S @ self.delta) % mods))

    def counit_system(self, sys):
        M = self.M
        k1 = self.T1.module.m
        for l in range(M.m):
            for j, dj in enumerate(M.moduli):
                coeffs = {l * k1 + a: int(self.counit[a, j]) for a in range(k1) if int(self.counit[a, j])}
                sys.add(coeffs, dj, 1 if l == j else 0)

    # -- the correspondence
    def sigma_of_theta(self, F: np.ndarray) -> np.ndarray:
        out = self.unit_m @ F @ self.swap
        return out % self.T1.module._mods if self.T1.module.m else out

    def theta_of_sigma(self, S: np.ndarray) -> np.ndarray:
        Sb = self.sigma_block(S)
        W = np.einsum("myn,xnp->xmpy", Sb, _act_array(self.M), optimize=True)
        return multilinear(self.T1.layout, self.T2.layout, [(W, [0, 1], [0, 1])])


@dataclass
class DescentDatum:
    setting: DescentSetting
    theta: ModuleHom

    @property
    def module(self) -> FiniteModule:
        return self.setting.M

    def normalized(self) -> bool:
        return self.setting.is_normalized(self.theta.matrix)

    def cocycle(self) -> bool:
        return self.setting.is_cocycle(self.theta.matrix)

    def valid(self) -> bool:
        return self.theta.is_bijective() and self.normalized() and self.cocycle()


@dataclass
class ComonadCoalgebra:
    setting: DescentSetting
    sigma: ModuleHom

    def counital(self) -> bool:
        return self.setting.is_counital(self.sigma.matrix)

    def coassociative(self) -> bool:
        return self.setting.is_coassociative(self.sigma.matrix)

    def valid(self) -> bool:
        return self.counital() and self.coassociative()


def descent_data(st: DescentSetting) -> list[DescentDatum]:
    T1, T2 = st.T1.module, st.T2.module
    sol = hom_solutions(T1, T2, ("left", "right"), extra=st.twist_system)
    out = []
    for F in solution_matrices(sol, T1.m, T2.m):
        d = DescentDatum(st, ModuleHom(T1, T2, F))
        if d.cocycle() and d.theta.is_bijective():
            out.append(d)
    return out


def comonad_coalgebras(st: DescentSetting) -> list[ComonadCoalgebra]:
    M, GM = st.M, st.GM
    sol = hom_solutions(M, GM, ("left",), extra=st.counit_system)
    out = []
    for S in solution_matrices(sol, M.m, GM.m):
        c = ComonadCoalgebra(st, ModuleHom(M, GM, S))
        if c.coassociative():
            out.append(c)
    return out


@dataclass
class BrbReport:
    module: str
    data: int
    coalgebras: int
    pairs: list[tuple[int, int]]
    bijective: bool
    round_trip: bool

    def json(self) -> dict:
        return {"module": self.module, "descent_data": self.data, "coalgebras": self.coalgebras,
                "pairs": [list(p) for p in self.pairs], "bijective": self.bijective,
                "round_trip": self.round_trip}


def brb_correspondence(M: FiniteModule, iota: RingHom, bound: int = BRB_BOUND) -> BrbReport:
    if M.order > bound:
        raise BoundExceeded(f"|M| = {M.order} exceeds {bound}")
    st = DescentSetting(iota, M)
    data = descent_data(st)
    coalgs = comonad_coalgebras(st)
    pos = {c.sigma.key: i for i, c in enumerate(coalgs)}
    pairs, round_trip = [], True
    for i, d in enumerate(data):
        S = st.sigma_of_theta(d.theta.matrix)
        j = pos.get(ModuleHom(st.M, st.GM, S).key, -1)
        pairs.append((i, j))
        back = st.theta_of_sigma(S)
        round_trip &= bool(np.array_equal(back, d.theta.matrix))
    for c in coalgs:
        F = st.theta_of_sigma(c.sigma.matrix)
        round_trip &= bool(np.array_equal(st.sigma_of_theta(F), c.sigma.matrix))
    targets = [j for _, j in pairs]
    bij = (len(data) == len(coalgs) and -1 not in targets and len(set(targets)) == len(targets))
    return BrbReport(M.name, len(data), len(coalgs), pairs, bij, round_trip)


def datum_morphism(f: ModuleHom, d: DescentDatum, e: DescentDatum) -> bool:
    """theta_e . (B (x) f) = (f (x) B) . theta_d."""
    s, t = d.setting, e.setting
    eB = np.eye(s.B.m, dtype=np.int64)
    Bf = multilinear(s.T1.layout, t.T1.layout, [(eB, [0], [0]), (f.matrix, [1], [1])])
    fB = multilinear(s.T2.layout, t.T2.layout, [(f.matrix, [0], [0]), (eB, [1], [1])])
    mods = t.T2.module._mods
    return bool(np.array_equal((Bf @ e.theta.matrix) % mods, (d.theta.matrix @ fB) % mods))


def coalgebra_morphism(f: ModuleHom, c: ComonadCoalgebra, e: ComonadCoalgebra) -> bool:
    """(B (x) f) . sigma_c = sigma_e . f."""
    s, t = c.setting, e.setting
    Bf = multilinear(s.T1.layout, t.T1.layout, [(np.eye(s.B.m, dtype=np.int64), [0], [0]), (f.matrix, [1], [1])])
    mods = t.T1.module._mods
    return bool(np.array_equal((c.sigma.matrix @ Bf) % mods, (f.matrix @ e.sigma.matrix) % mods))


def canonical_datum(N: FiniteModule, iota: RingHom) -> DescentDatum:
    """The datum on B (x)_A N swapping the two copies of B."""
    A, B = iota.source, iota.target
    Ns = FiniteModule(N.moduli, N.left, N.left, N.name) if N.right is None else N
    E = tensor_over(A, b_as(iota, "B", "A"), Ns, bound=max(DEFAULT_BOUND, B.order * N.order))
    M = FiniteModule(E.module.moduli, E.module.left, None, name=f"B(x){N.name}")
    st = DescentSetting(iota, M)
    EM, QM = E.layout.E, E.layout.Q
    Th = np.einsum("tyn,xnp->xtpy", EM, QM, optimize=True)
    F = multilinear(st.T1.layout, st.T2.layout, [(Th, [0, 1], [0, 1])])
    return DescentDatum(st, ModuleHom(st.T1.module, st.T2.module, F))


def descended(d: DescentDatum) -> Submodule:
    """{m : theta(1 (x) m) = m (x) 1} as an A-module."""
    st = d.setting
    M = st.M
    onem = np.einsum("ma,b,abu->mu", np.eye(M.m, dtype=np.int64), st.B.one_coords, st.T2.layout.Q)
    # element tables of m -> theta(1 (x) m) and m -> m (x) 1
    lhs = M.all_coords @ (st.unit_m @ d.theta.matrix)
    rhs = M.all_coords @ np.asarray(onem).reshape(M.m, st.T2.module.m)
    a = st.T2.module.index(lhs)
    b = st.T2.module.index(rhs)
    elems = [int(x) for x in np.nonzero(np.asarray(a) == np.asarray(b))[0]] if M.m else [0]
    MA = module_as(M, st.iota, "A", "A")
    return submodule_module(MA, elems, name="P")


# ---------------------------------------------------------------------------
# cocycles to modules


def _complex(c) -> AmitsurComplex:
    return c if isinstance(c, AmitsurComplex) else build_amitsur(c, 1)


def cocycle_to_module(u: int, C) -> Submodule:
    """P_u = {b in B : u * d1(b) = d0(b)} as an A-submodule of B."""
    C = _complex(C)
    L1 = C.levels[1]
    bs = np.arange(C.B.order, dtype=np.int64)
    lhs = np.asarray(L1.mul(np.full(len(bs), u, dtype=np.int64), np.asarray(C.face(1, 1)(bs))))
    rhs = np.asarray(C.face(1, 0)(bs))
    elems = [int(b) for b in bs[lhs == rhs]]
    return submodule_module(b_as(C.iota, "A", "A"), elems, name=f"P[{u}]")


# ---------------------------------------------------------------------------
# flatness and separability


@dataclass
class FlatnessCertificate:
    flat: bool
    faithful: bool
    ideals: list[dict]

    @property
    def faithfully_flat(self) -> bool:
        return self.flat and self.faithful

    def json(self) -> dict:
        return {"flat": self.flat, "faithful": self.faithful, "ideals": self.ideals}


def is_faithfully_flat(iota: RingHom, bound: int = FLAT_BOUND) -> FlatnessCertificate:
    A, B = iota.source, iota.target
    if A.order > bound or B.order > bound:
        raise BoundExceeded(f"flatness check limited to rings of order <= {bound}")
    RA = regular(A)
    flat, faithful, rows = True, True, []
    for J in submodules(RA):
        sub = submodule_module(RA, J)
        Jm = sub.module
        T = tensor_over(A, Jm, b_as(iota, "A", None), bound=max(DEFAULT_BOUND, Jm.order * B.order))
        Jb = (sub.inclusion.matrix @ iota.matrix) % B._mods
        W = np.einsum("ja,abc->jbc", Jb, B.struct)
        f = ModuleHom(T.module, algebra_module(B), multilinear(T.layout, single(algebra_module(B)), [(W, [0, 1], [0])]))
        inj = f.is_injective()
        row = {"ideal_order": len(J), "tensor_order": T.module.order, "injective": inj}
        flat &= inj
        if len(J) < A.order:
            Q, _ = quotient_module(RA, J)
            TQ = tensor_over(A, b_as(iota, None, "A"), Q)
            row["quotient_tensor_order"] = TQ.module.order
            faithful &= TQ.module.order > 1
        rows.append(row)
    return FlatnessCertificate(flat, faithful, rows)


@dataclass
class SeparabilityResult:
    separable: bool
    retractions: list[ModuleHom]


def is_separable(iota: RingHom, bound: int = FLAT_BOUND) -> SeparabilityResult:
    """Search for an A-bimodule retraction r: B -> A of iota."""
    A, B = iota.source, iota.target
    if B.order > bound:
        raise BoundExceeded(f"separability search limited to |B| <= {bound}")
    src, tgt = b_as(iota, "A", "A"), regular(A)
    found = []
    for r in (ModuleHom(src, tgt, F) for F in solution_matrices(hom_solutions(src, tgt, ("left", "right")), B.m, A.m)):
        if np.array_equal(r.table[iota.table], np.arange(A.order)):
            found.append(r)
    return SeparabilityResult(bool(found), found)


@dataclass
class Hypothesis:
    name: str
    status: str          # "verified" | "unverified"
    detail: dict = field(default_factory=dict)

    def json(self) -> dict:
        return {"name": self.name, "status": self.status, **({"detail": self.detail} if self.detail else {})}


def comonadicity(iota: RingHom) -> Hypothesis:
    ff = is_faithfully_flat(iota)
    sep = is_separable(iota)
    ok = ff.faithfully_flat or sep.separable
    return Hypothesis("comonadic base change", "verified" if ok else "unverified",
                      {"faithfully_flat": ff.faithfully_flat, "separable": sep.separable})


# ---------------------------------------------------------------------------
# Picard class sets


class PicardClassSet:
    """Isomorphism classes of invertible modules found so far, with the
    distinguished class of the unit object at index 0."""

    def __init__(self, ring: FiniteRing, unit: FiniteModule, sides=("left", "right"), name: str = "Pic"):
        self.ring, self.sides, self.name = ring, tuple(sides), name
        self.representatives: list[FiniteModule] = [unit]
        self.distinguished = 0
        self._table: dict[tuple[int, int], int] = {}

    def find(self, M: FiniteModule) -> int | None:
        for i, R in enumerate(self.representatives):
            if is_isomorphic_modules(M, R, self.sides)[0]:
                return i
        return None

    def classify(self, M: FiniteModule) -> int:
        i = self.find(M)
        if i is None:
            self.representatives.append(M)
            i = len(self.representatives) - 1
        return i

    def product(self, i: int, j: int) -> int:
        if (i, j) not in self._table:
            P, Q = self.representatives[i], self.representatives[j]
            T = tensor_over(self.ring, P, Q, bound=max(DEFAULT_BOUND, P.order * Q.order))
            self._table[i, j] = self.classify(T.module)
        return self._table[i, j]

    def close(self, max_classes: int = 16) -> FiniteGroup:
        """Close under tensor products and return the class group."""
        done = False
        while not done:
            n = len(self.representatives)
            for i in range(n):
                for j in range(n):
                    self.product(i, j)
            if len(self.representatives) > max_classes:
                raise BoundExceeded("too many Picard classes")
            done = len(self.representatives) == n
        n = len(self.representatives)
        for i in range(n):
            if not any(self._table[i, j] == 0 for j in range(n)):
                raise AssertionError(f"class {i} has no inverse among the representatives")
        table = [[self._table[i, j] for j in range(n)] for i in range(n)]
        G = FiniteGroup(list(range(n)), lambda a, b: table[a][b], 0, name=self.name)
        return G

    def json(self) -> dict:
        return {"classes": len(self.representatives),
                "orders": [R.order for R in self.representatives]}


def symmetric_over(M: FiniteModule, R: FiniteRing, side: str = "left") -> FiniteModule:
    act = M.action(side)
    return FiniteModule(M.moduli, act, act, M.name)


@dataclass
class TrivialityCertificate:
    ring: str
    factors: list[int]
    local: list[bool]
    checked_modules: list[bool]

    @property
    def holds(self) -> bool:
        return all(self.local) and all(self.checked_modules)

    def json(self) -> dict:
        return {"ring": self.ring, "local_factor_orders": self.factors, "local": self.local,
                "checked_modules_free": self.checked_modules, "holds": self.holds}


def pic_triviality_certificate(R: FiniteRing, modules: Iterable[FiniteModule] = ()) -> TrivialityCertificate:
    dec = local_decomposition(R)
    reg = regular(R)
    checks = [is_isomorphic_modules(M, reg, ("left", "right"))[0] for M in modules]
    return TrivialityCertificate(R.name or "R", [F.order for F in dec.factors], list(dec.local), checks)


# ---------------------------------------------------------------------------
# H^1 versus the Picard kernel


@dataclass
class PicKernelResult:
    h1: H1Result
    modules: list[FiniteModule]          # P_u per class
    classes: PicardClassSet
    well_defined: bool
    injective: bool
    in_kernel: bool
    hypotheses: list[Hypothesis]
    product_checks: list[bool]

    @property
    def verdict(self) -> bool:
        return self.well_defined and self.injective and self.in_kernel and \
            len(self.classes.representatives) >= self.h1.order and all(self.product_checks)

    @property
    def advisory(self) -> bool:
        return any(h.status != "verified" for h in self.hypotheses)

    def json(self) -> dict:
        return {"h1_order": self.h1.order, "cocycles": len(self.h1.cocycles),
                "kernel_classes": len(self.modules), "well_defined": self.well_defined,
                "injective": self.injective, "in_kernel": self.in_kernel,
                "products": self.product_checks, "verdict": self.verdict,
                "hypotheses": [h.json() for h in self.hypotheses]}


def pic_kernel(iota: RingHom, C: AmitsurComplex | None = None) -> PicKernelResult:
    A, B = iota.source, iota.target
    C = C or build_amitsur(iota, 2)
    U = UnitsCosimplicial(C)
    H = h1(U)
    hyp = [comonadicity(iota)]
    unitA = regular(A)
    pics = PicardClassSet(A, unitA, name=f"Pic({A.name})")
    modules, well, inj, kern = [], True, True, True
    regB = b_as(iota, "B", None)
    seen = []
    for cls in H.classes:
        P = cocycle_to_module(cls[0], C).module
        modules.append(P)
        for x in cls[1:]:
            well &= is_isomorphic_modules(cocycle_to_module(x, C).module, P, ("left", "right"))[0]
        idx = pics.classify(P)
        inj &= idx not in seen
        seen.append(idx)
        T = tensor_over(A, b_as(iota, "B", "A"), P, bound=max(DEFAULT_BOUND, B.order * P.order))
        BP = FiniteModule(T.module.moduli, T.module.left, None)
        kern &= is_isomorphic_modules(BP, regB, ("left",))[0]
    # products on representatives: P_u (x) P_v against P_{uv}
    prods = []
    L1 = C.levels[1]
    for i, ci in enumerate(H.classes):
        for j, cj in enumerate(H.classes):
            uv = int(L1.mul(ci[0], cj[0]))
            lhs = tensor_over(A, modules[i], modules[j], bound=max(DEFAULT_BOUND, modules[i].order * modules[j].order)).module
            prods.append(is_isomorphic_modules(lhs, cocycle_to_module(uv, C).module, ("left", "right"))[0])
    return PicKernelResult(H, modules, pics, well, inj, kern, hyp, prods)


# ---------------------------------------------------------------------------
# the five-term sequence for a unit map e: k -> A


def _require_mono(e: RingHom):
    if len(set(e.table.tolist())) != e.source.order:
        raise NotMono("unit map is not injective")


@dataclass
class Seq5Extra:
    o_certified: list[bool]
    end_equals_aut: bool
    kappa_coring: list[bool]
    pic_certificate: TrivialityCertificate


def descended_from_coring(phi: np.ndarray, C: CoringCe) -> list[int]:
    """J = {j in A : phi(j (x) 1) = 1 (x) j}."""
    A = C.A
    aa = np.arange(A.order, dtype=np.int64)
    L1 = C.ring
    left = np.asarray(C.complex.face(1, 0)(aa))
    right = np.asarray(C.complex.face(1, 1)(aa))
    img = np.asarray(L1.index(L1.coords(left) @ phi))
    return [int(j) for j in aa[img == right]]


def gamma_of_submodule(sub: Submodule, C: CoringCe) -> np.ndarray | None:
    """The coring map (A (x) xi_r) . (xi_l^{-1} (x) A) on A (x)_k A."""
    e, A = C.e, C.A
    xl = xi_left(e, sub)
    if not xl.iso:
        return None
    T = xl.tensor
    tab = xl.map.table
    inv = np.empty(A.order, dtype=np.int64)
    inv[tab] = np.arange(T.module.order)
    basis = [A.index(v) for v in np.eye(A.m, dtype=np.int64)]
    invmat = T.module.coords(inv[basis]).reshape(A.m, T.module.m)
    X = np.einsum("at,tij->aij", invmat, T.layout.E)
    W = np.einsum("aij,jc,cbq->abiq", X, sub.inclusion.matrix, A.struct, optimize=True)
    lay = C.complex.layouts[1]
    return multilinear(lay, lay, [(W, [0, 1], [0, 1])])


def verify_seq5(e: RingHom) -> ExactnessReport:
    k, A = e.source, e.target
    _require_mono(e)
    hyp = [comonadicity(e)]
    G0 = units(k)
    G0.name = f"Aut({k.name})"
    G1 = regular_auts(A)
    cor = coring_automorphisms(e)
    G2, C = cor.group, cor.coring
    Ak = b_as(e, "A", "A")
    # o_A: coring automorphism -> class of its descended k-module
    pic_k = PicardClassSet(k, regular(k), name=f"Pic({k.name})")
    o_images, certified, descended_mods = [], [], []
    for phi in G2.elements:
        J = descended_from_coring(phi, C)
        sub = submodule_module(Ak, J, name="J")
        descended_mods.append(sub.module)
        o_images.append(pic_k.classify(sub.module))
        g = gamma_of_submodule(sub, C)
        certified.append(g is not None and bool(np.array_equal(g, phi)))
    cert = pic_triviality_certificate(k, descended_mods)
    hyp.append(Hypothesis(f"Pic({k.name}) materialized", "verified" if cert.holds else "unverified", cert.json()))
    G3 = pic_k.close()
    pic_A = PicardClassSet(A, regular(A), name=f"Pic({A.name})")
    ext_images = []
    for P in pic_k.representatives:
        T = tensor_over(k, b_as(e, "B", "A"), P, bound=max(DEFAULT_BOUND, A.order * P.order))
        ext_images.append(pic_A.classify(symmetric_over(T.module, A)))
    G4 = pic_A.close()
    d = A._mods

    def mult(u):
        return A.right_matrix(A.coords(int(e(u))))

    w0 = GroupHom(G0, G1, [mult(u) for u in G0.elements], name="w0")
    kap = GroupHom(G1, G2, [kappa(lam, C).matrix for lam in G1.elements], name="kappa")
    oA = GroupHom(G2, G3, o_images, name="o_A")
    pe = GroupHom(G3, G4, ext_images, name="Pic(e)")
    rep = is_exact([w0, kap, oA, pe], left_trivial=True, name="seq5")
    rep.hypotheses = [h.json() for h in hyp]
    kc = [C.is_coring_map(kappa(lam, C)) for lam in G1.elements]
    homs_ok = all(h.check() for h in (w0, kap, oA, pe))
    rep.extra = {"o_certified": certified, "end_equals_aut": cor.end_equals_aut,
                 "kappa_coring": kc, "homomorphisms": homs_ok}
    return rep


# ---------------------------------------------------------------------------
# invertible submodules: 1 -> Aut(R) -> Aut(S_R) -> Inv_R(S) -> Pic(R)


def verify_invertible_sequence(iota: RingHom) -> ExactnessReport:
    R, S = iota.source, iota.target
    if len(set(iota.table.tolist())) != R.order:
        raise NotInjective("ring map is not injective")
    G0 = aut_group(regular(R), name=f"Aut({R.name})")
    SR = b_as(iota, "B", "A")
    G1 = aut_group(SR, name=f"Aut({S.name}_{R.name})")
    inv = invertible_submodule_group(iota)
    G2 = inv.group
    pic = PicardClassSet(R, regular(R), name=f"Pic({R.name})")
    pic_images = [pic.classify(inv.submodules[J].module) for J in G2.elements]
    G3 = pic.close()

    def induced(phi):
        u = R.index(R.one_coords @ phi)
        return S.right_matrix(S.coords(int(iota(u))))

    f0 = GroupHom(G0, G1, [induced(phi) for phi in G0.elements], name="induce")
    lam_images = []
    for lam in G1.elements:
        J = lambda_to_submodule(ModuleHom(SR, SR, lam), iota)
        lam_images.append(J)
    f1 = GroupHom(G1, G2, lam_images, name="pullback")
    f2 = GroupHom(G2, G3, pic_images, name="class")
    rep = is_exact([f0, f1, f2], pointed=[False, False, False, True], left_trivial=True, name="invertible")
    in_group = all(J in G2 for J in lam_images)
    rep.hypotheses = []
    rep.extra = {"pullbacks_invertible": in_group,
                 "homomorphisms": all(h.check() for h in (f0, f1, f2)),
                 "candidates": [{"order": len(J), "xi_left": l, "xi_right": r} for J, l, r in inv.candidates]}
    return rep


# ---------------------------------------------------------------------------
# the dual sequence: 1 -> Aut(S_S) -> Aut(S_R) -> Aut_R-ring(S) -> Pic(S)


def ring_automorphisms_over(iota: RingHom) -> FiniteGroup:
    """Ring automorphisms of S fixing iota(R) pointwise (matrices)."""
    R, S = iota.source, iota.target
    src = b_as(iota, "A", None)
    found = []
    for F in solution_matrices(hom_solutions(src, src, ("left",)), S.m, S.m):
        h = RingHom(S, S, F)
        if h.check() and len(set(h.table.tolist())) == S.order and np.array_equal(h.table[iota.table], iota.table):
            found.append(h.matrix)
    d = S._mods
    return FiniteGroup(found, lambda F, G: (G @ F) % d, np.eye(S.m, dtype=np.int64) % d, name=f"Aut_{R.name}-ring({S.name})")


def twisted(S: FiniteRing, g: np.ndarray, name: str = "") -> FiniteModule:
    """S with left regular action and right action through g."""
    return algebra_module(S, RingHom.identity(S), RingHom(S, S, g), name or "S_g")


def verify_dual_sequence(iota: RingHom) -> ExactnessReport:
    R, S = iota.source, iota.target
    G0 = aut_group(regular(S), name=f"Aut({S.name}_{S.name})")
    SR = b_as(iota, "B", "A")
    G1 = aut_group(SR, name=f"Aut({S.name}_{R.name})")
    G2 = ring_automorphisms_over(iota)
    # kernels K_g of s (x) t -> s g(t) on S (x)_R S
    T = tensor_over(R, b_as(iota, "B", "A"), b_as(iota, "A", "B"))
    Sreg = algebra_module(S)

    def kernel_of(block):
        f = ModuleHom(T.module, Sreg, multilinear(T.layout, single(Sreg), [(block, [0, 1], [0])]))
        return frozenset(int(x) for x in np.nonzero(f.table == 0)[0])

    K = {}
    for g in G2.elements:
        K[kernel_of(np.einsum("tb,abc->atc", g, S.struct))] = g
    distinct_kernels = len(K) == G2.order

    def collapse(sig):
        # kernel of s (x) t -> sigma^{-1}(s) t
        F = ModuleHom(SR, SR, sig)
        tab = F.table
        back = np.empty(S.order, dtype=np.int64)
        back[tab] = np.arange(S.order)
        basis = [S.index(v) for v in np.eye(S.m, dtype=np.int64)]
        sinv = S.coords(back[basis]).reshape(S.m, S.m)
        Kd = kernel_of(np.einsum("as,stc->atc", sinv, S.struct))
        return K[Kd]

    pic = PicardClassSet(S, regular(S), name=f"Pic({S.name})")
    pic_images = [pic.classify(twisted(S, g)) for g in G2.elements]
    G3 = pic.close()
    f0 = GroupHom(G0, G1, list(G0.elements), name="restrict")
    f1 = GroupHom(G1, G2, [collapse(s) for s in G1.elements], name="collapse")
    f2 = GroupHom(G2, G3, pic_images, name="twist")
    rep = is_exact([f0, f1, f2], pointed=[False, False, False, True], left_trivial=True, name="dual")
    rep.hypotheses = []
    rep.extra = {"distinct_kernels": distinct_kernels,
                 "homomorphisms": all(h.check() for h in (f0, f1, f2))}
    return rep
