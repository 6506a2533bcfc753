"""Finite groups given by their elements and a law, with kernels, images,
quotients, invariant factors, isomorphism tests and exactness verdicts.

Group elements are arbitrary payloads (ring indices, matrices, ...); a key
function turns a payload into something hashable.  Everything else works on
positions ``0..order-1`` in the element list.  Operation tables are built
lazily.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Any, Callable, Sequence

import numpy as np

from .abelian import abelian_basis
from .errors import BoundExceeded, NotAbelian, NotComposable, NotNormal


def _default_key(x):
    if isinstance(x, np.ndarray):
        return (x.shape, x.tobytes())
    return x


class AmbientGroup:
    """A group law without an enumerated carrier (used as a map target)."""

    def __init__(self, op: Callable, identity: Any, key: Callable = _default_key, name: str = ""):
        self.op = op
        self.identity_element = identity
        self.key = key
        self.name = name

    def is_identity(self, x) -> bool:
        return self.key(x) == self.key(self.identity_element)


class FiniteGroup(AmbientGroup):
    def __init__(self, elements: Sequence, op: Callable, identity: Any,
                 key: Callable = _default_key, name: str = "",
                 labels: Sequence[str] | None = None):
        super().__init__(op, identity, key, name)
        self.elements = list(elements)
        self._pos = {}
        for i, x in enumerate(self.elements):
            k = key(x)
            if k in self._pos:
                raise ValueError("duplicate group element")
            self._pos[k] = i
        if key(identity) not in self._pos:
            raise ValueError("identity is not among the elements")
        self.identity = self._pos[key(identity)]
        self.labels = list(labels) if labels is not None else None
        self.embedding: list[int] | None = None
        self.ambient: FiniteGroup | None = None
        self._abelian: bool | None = None

    def __repr__(self):
        return f"FiniteGroup({self.name} order={self.order})"

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, x) -> int:
        return self._pos[self.key(x)]

    def __contains__(self, x) -> bool:
        return self.key(x) in self._pos

    @cached_property
    def table(self) -> np.ndarray:
        n = self.order
        T = np.empty((n, n), dtype=np.int64)
        for i, x in enumerate(self.elements):
            for j, y in enumerate(self.elements):
                T[i, j] = self._pos[self.key(self.op(x, y))]
        return T

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    @cached_property
    def inv(self) -> np.ndarray:
        T = self.table
        inv = np.empty(self.order, dtype=np.int64)
        for i in range(self.order):
            inv[i] = int(np.nonzero(T[i] == self.identity)[0][0])
        return inv

    @property
    def abelian(self) -> bool:
        if self._abelian is None:
            self._abelian = bool(np.array_equal(self.table, self.table.T))
        return self._abelian

    def check_abelian_flag(self) -> bool:
        return self.abelian == bool(np.array_equal(self.table, self.table.T))

    def audit(self) -> None:
        T, n, e = self.table, self.order, self.identity
        assert np.all(T[e] == np.arange(n)) and np.all(T[:, e] == np.arange(n)), "identity"
        for a in range(n):
            assert np.array_equal(T[T[a]], T[a][T]), "associativity"
            assert np.any(T[a] == e), "inverse"
        assert self.check_abelian_flag()

    def power(self, i: int, k: int) -> int:
        acc = self.identity
        for _ in range(k):
            acc = self.mul(acc, i)
        return acc

    def element_order(self, i: int) -> int:
        k, y = 1, i
        while y != self.identity:
            y = self.mul(y, i)
            k += 1
        return k

    def exponent(self) -> int:
        from math import lcm
        out = 1
        for i in range(self.order):
            out = lcm(out, self.element_order(i))
        return out

    def json(self) -> dict:
        return {"order": self.order, "op": self.table.tolist(), "identity": self.identity}

    @staticmethod
    def from_table(table: Sequence[Sequence[int]], identity: int | None = None, name: str = "") -> "FiniteGroup":
        T = np.asarray(table, dtype=np.int64)
        n = T.shape[0]
        if identity is None:
            identity = next(e for e in range(n) if np.all(T[e] == np.arange(n)))
        G = FiniteGroup(list(range(n)), lambda a, b: int(T[a, b]), identity, name=name)
        G.__dict__["table"] = T
        return G

    @staticmethod
    def cyclic(n: int, name: str = "") -> "FiniteGroup":
        return FiniteGroup(list(range(n)), lambda a, b: (a + b) % n, 0, name=name or f"C{n}")

    @staticmethod
    def direct_product(G: "FiniteGroup", H: "FiniteGroup", name: str = "") -> "FiniteGroup":
        els = [(g, h) for g in range(G.order) for h in range(H.order)]
        return FiniteGroup(els, lambda a, b: (G.mul(a[0], b[0]), H.mul(a[1], b[1])),
                           (G.identity, H.identity), name=name or f"{G.name}x{H.name}")


def trivial_group(name: str = "1") -> FiniteGroup:
    return FiniteGroup([0], lambda a, b: 0, 0, name=name)


class GroupHom:
    """A homomorphism; ``images`` lists target payloads in source order."""

    def __init__(self, source: FiniteGroup, target: AmbientGroup, images: Sequence, name: str = ""):
        if len(images) != source.order:
            raise ValueError("one image per source element required")
        self.source, self.target = source, target
        self.images = list(images)
        self.name = name

    @staticmethod
    def from_function(source: FiniteGroup, target: AmbientGroup, fn: Callable, name: str = "") -> "GroupHom":
        return GroupHom(source, target, [fn(x) for x in source.elements], name)

    @cached_property
    def table(self) -> np.ndarray:
        """Target positions of the images (target must be enumerated)."""
        return np.array([self.target.index(y) for y in self.images], dtype=np.int64)

    @property
    def target_point(self) -> int:
        return self.target.identity

    def check(self) -> bool:
        S = self.source
        if not self.target.is_identity(self.images[S.identity]):
            return False
        key, op = self.target.key, self.target.op
        for i, j in product(range(S.order), repeat=2):
            if key(self.images[S.mul(i, j)]) != key(op(self.images[i], self.images[j])):
                return False
        return True

    def is_trivial(self) -> bool:
        return all(self.target.is_identity(y) for y in self.images)


def compose_homs(g: GroupHom, f: GroupHom) -> GroupHom:
    if f.target is not g.source:
        raise NotComposable("maps are not composable")
    return GroupHom(f.source, g.target, [g.images[g.source.index(y)] for y in f.images])


def identity_hom(G: FiniteGroup) -> GroupHom:
    return GroupHom(G, G, list(G.elements))


def _subgroup(G: FiniteGroup, positions: Sequence[int], name: str) -> FiniteGroup:
    positions = sorted(set(int(p) for p in positions))
    H = FiniteGroup([G.elements[p] for p in positions], G.op, G.elements[G.identity], G.key, name=name)
    H.embedding = positions
    H.ambient = G
    table = G.table
    pos = {p: i for i, p in enumerate(positions)}
    sub = np.array([[pos.get(int(table[a, b]), -1) for b in positions] for a in positions], dtype=np.int64)
    if np.any(sub < 0):
        raise ValueError("subset is not closed under the group law")
    H.__dict__["table"] = sub
    if G._abelian:
        H._abelian = True
    return H


def subgroup(G: FiniteGroup, positions: Sequence[int], name: str = "") -> FiniteGroup:
    return _subgroup(G, positions, name)


def kernel(h: GroupHom) -> FiniteGroup:
    S = h.source
    pos = [i for i, y in enumerate(h.images) if h.target.is_identity(y)]
    return _subgroup(S, pos, f"ker {h.name}")


def image(h: GroupHom) -> FiniteGroup:
    T = h.target
    if isinstance(T, FiniteGroup):
        return _subgroup(T, set(h.table.tolist()), f"im {h.name}")
    seen, els = set(), []
    for y in h.images:
        k = T.key(y)
        if k not in seen:
            seen.add(k)
            els.append(y)
    return FiniteGroup(els, T.op, T.identity_element, T.key, name=f"im {h.name}")


def generated_subgroup(G: FiniteGroup, gens: Sequence[int]) -> list[int]:
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def quotient_abelian(G: FiniteGroup, H: FiniteGroup):
    """G/H as a group, with the projection GroupHom.

    H must be a subgroup of G (its ``embedding`` is used).  For non-abelian G
    normality is checked and NotNormal raised on failure.
    """
    if H.ambient is not G:
        raise ValueError("H must be a subgroup of G")
    T = G.table
    hs = np.array(H.embedding, dtype=np.int64)
    if not G.abelian:
        hset = set(hs.tolist())
        inv = G.inv
        for g in range(G.order):
            if any(int(T[T[g, h], inv[g]]) not in hset for h in hs):
                raise NotNormal("subgroup is not normal")
    rep = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for g in range(G.order):
        if rep[g] < 0:
            coset = T[g, hs]
            r = int(coset.min())
            rep[coset] = r
            reps.append(r)
    reps.sort()
    Q = FiniteGroup(reps, lambda a, b: int(rep[T[a, b]]), int(rep[G.identity]), name=f"{G.name}/{H.name}")
    if G._abelian:
        Q._abelian = True
    proj = GroupHom(G, Q, [int(rep[g]) for g in range(G.order)], name="projection")
    return Q, proj


def _require_abelian(G: FiniteGroup):
    if not G.abelian:
        raise NotAbelian(f"{G.name} is not abelian")


def abelian_structure(G: FiniteGroup):
    """(invariant factors, basis positions, coords by position) of an abelian group."""
    _require_abelian(G)
    moduli, basis, coords = abelian_basis(range(G.order), G.mul, G.identity)
    return list(moduli), basis, coords


def invariant_factors(G: FiniteGroup) -> list[int]:
    return abelian_structure(G)[0]


def _minimal_generators(G: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = {G.identity}
    for x in sorted(range(G.order), key=lambda i: -G.element_order(i)):
        if x not in span:
            gens.append(x)
            span = set(generated_subgroup(G, gens))
        if len(span) == G.order:
            break
    return gens


def are_isomorphic(G: FiniteGroup, H: FiniteGroup, bound: int = 64):
    """Decide G = H; returns (flag, witness) where witness lists H-positions of G's elements."""
    if G.order != H.order:
        return False, None
    if G.abelian != H.abelian:
        return False, None
    if G.abelian:
        fg, bg, cg = abelian_structure(G)
        fh, bh, ch = abelian_structure(H)
        if fg != fh:
            return False, None
        by_coords = {c: x for x, c in ch.items()}
        witness = [by_coords[cg[x]] for x in range(G.order)]
        return True, witness
    if G.order > bound:
        raise BoundExceeded(f"non-abelian isomorphism search limited to order {bound}")
    gens = _minimal_generators(G)
    orders = [G.element_order(g) for g in gens]
    cands = [[y for y in range(H.order) if H.element_order(y) == o] for o in orders]

    def extend(assign):
        # build the map by breadth first search over words in the generators
        phi = {G.identity: H.identity}
        frontier = [G.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g, y in zip(gens, assign):
                    gx, hy = G.mul(x, g), H.mul(phi[x], y)
                    if gx in phi:
                        if phi[gx] != hy:
                            return None
                    else:
                        phi[gx] = hy
                        nxt.append(gx)
            frontier = nxt
        if len(set(phi.values())) != G.order:
            return None
        for a, b in product(range(G.order), repeat=2):
            if phi[G.mul(a, b)] != H.mul(phi[a], phi[b]):
                return None
        return [phi[x] for x in range(G.order)]

    def search(k, assign):
        if k == len(gens):
            return extend(assign)
        for y in cands[k]:
            out = search(k + 1, assign + [y])
            if out is not None:
                return out
        return None

    witness = search(0, [])
    return witness is not None, witness


# ---------------------------------------------------------------------------
# exactness


@dataclass
class PointedSet:
    """A finite pointed set; elements are labels, ``point`` a position."""

    elements: list
    point: int
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.elements)


@dataclass
class PointedMap:
    source: Any
    target: PointedSet
    table: np.ndarray
    name: str = ""

    @property
    def target_point(self) -> int:
        return self.target.point


@dataclass
class PositionVerdict:
    at: str
    image: list[int]
    kernel: list[int]
    exact: bool
    pointed: bool = False

    @property
    def image_order(self) -> int:
        return len(self.image)

    @property
    def kernel_order(self) -> int:
        return len(self.kernel)

    def json(self) -> dict:
        return {"at": self.at, "image_order": self.image_order,
                "kernel_order": self.kernel_order, "exact": self.exact}


@dataclass
class ExactnessReport:
    sequence: str
    groups: list[FiniteGroup]
    positions: list[PositionVerdict]
    hypotheses: list[dict] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(p.exact for p in self.positions)

    def json(self) -> dict:
        groups = []
        for G in self.groups:
            entry = {"name": G.name, "order": G.order}
            try:
                entry["invariant_factors"] = invariant_factors(G) if isinstance(G, FiniteGroup) else None
            except NotAbelian:
                entry["invariant_factors"] = None
            groups.append(entry)
        return {"sequence": self.sequence, "groups": groups,
                "positions": [p.json() for p in self.positions],
                "hypotheses": list(self.hypotheses), "exact": self.overall}


def _source_point(m) -> int:
    S = m.source
    return S.identity if isinstance(S, FiniteGroup) else S.point


def is_exact(seq: Sequence, pointed: bool | Sequence[bool] = False,
             left_trivial: bool = False, right_trivial: bool = False,
             name: str = "") -> ExactnessReport:
    """Exactness verdicts for G0 -> G1 -> ... -> Gk.

    Interior positions compare the image of the incoming map with the
    kernel (preimage of the point) of the outgoing one.  ``left_trivial``
    adds injectivity of the first map, ``right_trivial`` surjectivity of the
    last.  ``pointed`` may be a flag per interior position.
    """
    for f, g in zip(seq, seq[1:]):
        if f.target is not g.source:
            raise NotComposable("consecutive maps do not share a group")
    n = len(seq)
    if isinstance(pointed, bool):
        pointed = [pointed] * (n + 1)
    positions: list[PositionVerdict] = []
    if left_trivial and n:
        f = seq[0]
        src_pt = _source_point(f)
        ker = [i for i, y in enumerate(f.table) if y == f.target_point]
        positions.append(PositionVerdict(_name(f.source), [src_pt], ker, ker == [src_pt], pointed[0]))
    for k in range(n - 1):
        f, g = seq[k], seq[k + 1]
        im = sorted(set(int(y) for y in f.table))
        ker = [i for i, y in enumerate(g.table) if y == g.target_point]
        positions.append(PositionVerdict(_name(f.target), im, ker, im == ker, pointed[k + 1]))
    if right_trivial and n:
        f = seq[-1]
        im = sorted(set(int(y) for y in f.table))
        everything = list(range(f.target.order))
        positions.append(PositionVerdict(_name(f.target), im, everything, im == everything, pointed[n]))
    groups = [seq[0].source] + [m.target for m in seq] if n else []
    return ExactnessReport(name, groups, positions)


def _name(G) -> str:
    return getattr(G, "name", "") or "?"
