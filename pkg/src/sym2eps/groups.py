"""Decomposition of small finite abelian groups given by enumeration.

Used for unit groups (O_K / p^M)^x of quadratic extensions, which are not
cyclic in general. The output is a basis b_1..b_r with orders n_1..n_r and a
table sending every element to its coordinates.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, Hashable, List, Sequence, Tuple

Elem = Hashable


def _order(g: Elem, one: Elem, mul: Callable[[Elem, Elem], Elem]) -> int:
    n, x = 1, g
    while x != one:
        x = mul(x, g)
        n += 1
    return n


def _power(g: Elem, k: int, one: Elem, mul) -> Elem:
    out, base = one, g
    while k:
        if k & 1:
            out = mul(out, base)
        base = mul(base, base)
        k >>= 1
    return out


def _prime_factors(n: int) -> List[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _span(basis: Sequence[Elem], orders: Sequence[int], one, mul) -> Dict[Elem, Tuple[int, ...]]:
    table: Dict[Elem, Tuple[int, ...]] = {one: ()}
    for b, n in zip(basis, orders):
        new: Dict[Elem, Tuple[int, ...]] = {}
        for x, coords in table.items():
            y = x
            for k in range(n):
                new[y] = coords + (k,)
                y = mul(y, b)
        table = new
    return table


def decompose(elements: Sequence[Elem], one: Elem,
              mul: Callable[[Elem, Elem], Elem]) -> Tuple[List[Elem], List[int], Dict[Elem, Tuple[int, ...]]]:
    """Basis, orders and coordinate table of a finite abelian group.

    Works prime by prime: within each Sylow subgroup, repeatedly take an
    element of maximal order modulo the span so far and correct it by the
    span so that its cyclic group meets the span trivially.
    """
    N = len(elements)
    basis: List[Elem] = []
    orders: List[int] = []
    for ell in _prime_factors(N):
        ell_part = 1
        while N % (ell_part * ell) == 0:
            ell_part *= ell
        cof = N // ell_part
        sylow = {_power(g, cof, one, mul) for g in elements}
        sb: List[Elem] = []
        so: List[int] = []
        span = {one: ()}
        while len(span) < len(sylow):
            best, best_k = None, 0
            for g in sylow:
                if g in span:
                    continue
                k, x = 0, g
                while x not in span:
                    x = _power(x, ell, one, mul)
                    k += 1
                if k > best_k:
                    best, best_k = g, k
            m = ell ** best_k
            h = _power(best, m, one, mul)
            coords = span[h]
            corr = one
            for b, c in zip(sb, coords):
                assert c % m == 0, "basis correction failed"
                corr = mul(corr, _power(b, c // m, one, mul))
            # best * corr^-1 has order exactly m
            inv_corr = _power(corr, _order(corr, one, mul) - 1, one, mul)
            g = mul(best, inv_corr)
            sb.append(g)
            so.append(m)
            span = _span(sb, so, one, mul)
        basis += sb
        orders += so
    table = _span(basis, orders, one, mul)
    if len(table) != N:
        raise AssertionError("decomposition does not cover the group")
    return basis, orders, table


def exponent(orders: Sequence[int]) -> int:
    return math.lcm(*orders) if orders else 1
