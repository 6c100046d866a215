"""Brute-force reference computations that share no code with the package.

Elements of O_d are pairs (a, b) meaning a + b*w, and everything is done with
plain integer loops.
"""
from __future__ import annotations

import itertools
import math


def w_square(d: int) -> tuple[int, int]:
    """(const, lin) with w^2 = const + lin*w."""
    if d % 4 == 1:
        return (d - 1) // 4, 1
    return d, 0


def mul(x, y, d):
    c0, c1 = w_square(d)
    a, b = x
    e, f = y
    return a * e + b * f * c0, a * f + b * e + b * f * c1


def is_squarefree(n: int) -> bool:
    n = abs(n)
    return all(n % (k * k) for k in range(2, math.isqrt(n) + 1))


def ideals_of_norm_p(d: int, p: int) -> int:
    """Count index-p sublattices of Z^2 closed under multiplication by w."""
    count = 0
    # index-p sublattices are kernels of nonzero functionals (alpha, beta) mod p up to scaling
    functionals = [(1, beta) for beta in range(p)] + [(0, 1)]
    for alpha, beta in functionals:
        def inside(v):
            return (alpha * v[0] + beta * v[1]) % p == 0

        basis = [v for v in ((1, 0), (0, 1), (p, 0), (0, p)) if inside(v)]
        basis += [(a, b) for a in range(p) for b in range(p) if (a or b) and inside((a, b))]
        if all(inside(mul(v, (0, 1), d)) for v in basis):
            count += 1
    return count


def split_kind_by_roots(d: int, p: int) -> str:
    """Number of ring maps O -> F_p decides the splitting."""
    c0, c1 = w_square(d)
    roots = [r for r in range(p) if (r * r - c1 * r - c0) % p == 0]
    if len(roots) == 2:
        return "split"
    if len(roots) == 1:
        return "ramified"
    return "inert"


def quotient_elements(hnf):
    a, b, c = hnf
    return [(u, v) for u in range(a) for v in range(c)]


def make_reducer(hnf):
    a, b, c = hnf

    def red(x):
        u, v = x
        k = v // c
        u, v = u - k * b, v - k * c
        return u % a, v

    return red


def sl2_count(d: int, hnf) -> int:
    """|SL(2, O/I)| by looping over all quadruples of residues."""
    red = make_reducer(hnf)
    elems = quotient_elements(hnf)
    prods = {(x, y): red(mul(x, y, d)) for x in elems for y in elems}
    one = red((1, 0))
    count = 0
    for p, s in itertools.product(elems, repeat=2):
        ps = prods[p, s]
        for q, r in itertools.product(elems, repeat=2):
            qr = prods[q, r]
            if red((ps[0] - qr[0], ps[1] - qr[1])) == one:
                count += 1
    return count


def unit_count(d: int, hnf) -> int:
    red = make_reducer(hnf)
    elems = quotient_elements(hnf)
    one = red((1, 0))
    return sum(1 for x in elems if any(red(mul(x, y, d)) == one for y in elems))


def class_number_by_forms(d: int) -> int:
    """Count reduced forms of discriminant D by an independent bounded search."""
    D = d if d % 4 == 1 else 4 * d
    h = 0
    for a in range(1, math.isqrt(-D // 3) + 2):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or math.gcd(math.gcd(a, b), c) != 1:
                continue
            if b < 0 and a == c:
                continue
            h += 1
    return h


def _mat_mul(X, Y, d, red):
    p, q, r, s = X
    e, f, g, h = Y

    def dot(a, b, c, dd):
        x, y = mul(a, b, d), mul(c, dd, d)
        return red((x[0] + y[0], x[1] + y[1]))

    return (dot(p, e, q, g), dot(p, f, q, h), dot(r, e, s, g), dot(r, f, s, h))


def closure(d: int, hnf, gens) -> set:
    """Subgroup generated by matrices given as 4-tuples of (a, b) entries; plain BFS."""
    red = make_reducer(hnf)
    gens = [tuple(red(x) for x in g) for g in gens]
    ident = (red((1, 0)), red((0, 0)), red((0, 0)), red((1, 0)))
    seen = {ident}
    todo = [ident]
    while todo:
        x = todo.pop()
        for g in gens:
            y = _mat_mul(x, g, d, red)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def normal_closure(d: int, hnf, seed, ambient_gens) -> set:
    """Close all conjugates of the seed under the whole ambient group."""
    red = make_reducer(hnf)
    G = closure(d, hnf, ambient_gens)

    def inv(g):
        for h in G:
            if _mat_mul(g, h, d, red) == (red((1, 0)), red((0, 0)), red((0, 0)), red((1, 0))):
                return h
        raise AssertionError("no inverse")

    conj = {_mat_mul(_mat_mul(g, tuple(red(x) for x in s), d, red), inv(g), d, red) for g in G for s in seed}
    return closure(d, hnf, conj)
