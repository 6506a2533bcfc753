"""Diagonal coordinates for a finite abelian group given by an operation."""
from __future__ import annotations

from typing import Callable, Sequence

from .linalg import cokernel_basis


def _power(op, identity, x, k):
    acc = identity
    base = x
    while k:
        if k & 1:
            acc = op(acc, base)
        base = op(base, base)
        k >>= 1
    return acc


def abelian_basis(elements: Sequence[int], op: Callable[[int, int], int], identity: int):
    """Find a basis g_1..g_r with orders d_1 | d_2 | ... for an abelian group.

    ``elements`` lists the carrier (hashable items), ``op`` is the group law.
    Returns ``(moduli, basis, coords)`` where ``coords`` maps every element to
    its unique coordinate tuple with respect to ``basis``.
    """
    gens: list = []
    span = {identity: ()}
    relations: list[list[int]] = []
    for x in elements:
        if x in span:
            continue
        # smallest t > 0 with t*x inside the current span
        t, y = 1, x
        while y not in span:
            y = op(y, x)
            t += 1
        k = len(gens)
        rel = list(span[y]) + [0] * (k - len(span[y]))
        rel = [-c for c in rel] + [t]
        relations.append(rel)
        new_span = {}
        step = identity
        for j in range(t):
            for s, c in span.items():
                new_span[op(s, step)] = tuple(c) + (0,) * (k - len(c)) + (j,)
            step = op(step, x)
        span = new_span
        gens.append(x)
    r = len(gens)
    if r == 0:
        return (), [], {identity: ()}
    relations = [row + [0] * (r - len(row)) for row in relations]
    pres = cokernel_basis(relations, r)
    basis = []
    for row in pres.lift:
        acc = identity
        for g, a in zip(gens, row):
            acc = op(acc, _power(op, identity, g, a % _order(op, identity, g)))
        basis.append(acc)
    coords = {x: pres.reduce(c + (0,) * (r - len(c))) for x, c in span.items()}
    return pres.moduli, basis, coords


def _order(op, identity, x):
    k, y = 1, x
    while y != identity:
        y = op(y, x)
        k += 1
    return k
