"""Ideals of O_d in Hermite normal form.

An ideal is the lattice Z*a + Z*(b + c*w) with a, c >= 1, 0 <= b < a.
The triple (a, b, c) is canonical, so ideal equality is triple equality.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Iterator

from .quadring import W, QuadInt, RingSpec, parse_quadint

DEFAULT_FACTOR_BOUND = 10**12


class CapacityError(RuntimeError):
    """A computation exceeds a configured size bound."""


def egcd(x: int, y: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*x + t*y = g = gcd(x, y) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while y:
        q, r = divmod(x, y)
        x, y = y, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if x < 0:
        return -x, -s0, -t0
    return x, s0, t0


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor_int(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> list[tuple[int, int]]:
    """Trial-division factorization of n >= 1."""
    if n > bound:
        raise CapacityError(f"{n} exceeds the factorization bound {bound}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _hnf_triple(vectors: Iterable[tuple[int, int]]) -> tuple[int, int, int]:
    pivot = None
    a = 0
    for x, y in vectors:
        if y == 0:
            a = math.gcd(a, x)
        elif pivot is None:
            pivot = (x, y)
        else:
            px, py = pivot
            g, s, t = egcd(py, y)
            pivot = (s * px + t * x, g)
            a = math.gcd(a, (y // g) * px - (py // g) * x)
    if pivot is None or a == 0:
        raise ValueError("generators do not span a full-rank lattice (zero ideal?)")
    px, py = pivot
    if py < 0:
        px, py = -px, -py
    return a, px % a, py


@dataclass(frozen=True)
class Ideal:
    ring: RingSpec = field(repr=False)
    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if a < 1 or c < 1 or not 0 <= b < a:
            raise ValueError(f"({a}, {b}, {c}) is not in Hermite normal form")
        if a % c or b % c:
            raise ValueError(f"lattice ({a}, {b}, {c}) is not an ideal: c must divide a and b")
        R = self.ring
        gen = QuadInt(b, c)
        if not (self.contains(R.mul(W, QuadInt(a, 0))) and self.contains(R.mul(W, gen))):
            raise ValueError(f"lattice ({a}, {b}, {c}) is not closed under multiplication by w")

    @property
    def hnf(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @property
    def norm(self) -> int:
        return self.a * self.c

    @property
    def basis(self) -> tuple[QuadInt, QuadInt]:
        return QuadInt(self.a, 0), QuadInt(self.b, self.c)

    def is_unit(self) -> bool:
        return self.norm == 1

    def contains(self, x: QuadInt) -> bool:
        if x.b % self.c:
            return False
        return (x.a - (x.b // self.c) * self.b) % self.a == 0

    def contains_ideal(self, other: Ideal) -> bool:
        return all(self.contains(g) for g in other.basis)

    def divides(self, other: Ideal) -> bool:
        return self.contains_ideal(other)

    def __mul__(self, other: Ideal) -> Ideal:
        return ideal_mul(self, other, self.ring)

    def __add__(self, other: Ideal) -> Ideal:
        return ideal_from_generators(list(self.basis) + list(other.basis), self.ring)

    def __pow__(self, k: int) -> Ideal:
        if k < 0:
            raise ValueError("negative ideal power")
        result = unit_ideal(self.ring)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.norm, self.a, self.b, self.c)

    def __str__(self) -> str:
        return format_ideal(self)


def ideal_from_generators(gens: Iterable[QuadInt], R: RingSpec) -> Ideal:
    gens = list(gens)
    if not gens or all(g.is_zero() for g in gens):
        raise ValueError("the zero ideal is not allowed")
    vectors = []
    for g in gens:
        gw = R.mul(g, W)
        vectors.append((g.a, g.b))
        vectors.append((gw.a, gw.b))
    a, b, c = _hnf_triple(vectors)
    return Ideal(R, a, b, c)


def principal(x: QuadInt | int, R: RingSpec) -> Ideal:
    if isinstance(x, int):
        x = QuadInt(x, 0)
    return ideal_from_generators([x], R)


def unit_ideal(R: RingSpec) -> Ideal:
    return Ideal(R, 1, 0, 1)


def ideal_mul(I: Ideal, J: Ideal, R: RingSpec) -> Ideal:
    prods = [R.mul(x, y) for x in I.basis for y in J.basis]
    return ideal_from_generators(prods, R)


def ideals_of_norm(R: RingSpec, n: int) -> list[Ideal]:
    """Every ideal of norm exactly n, by scanning HNF triples."""
    out = []
    for c in range(1, n + 1):
        if n % c:
            continue
        a = n // c
        if a % c:
            continue
        for b in range(0, a, c):
            try:
                out.append(Ideal(R, a, b, c))
            except ValueError:
                pass
    return sorted(out, key=Ideal.sort_key)


def ideals_up_to(R: RingSpec, bound: int, start: int = 2) -> list[Ideal]:
    return [I for n in range(start, bound + 1) for I in ideals_of_norm(R, n)]


# -- splitting of rational primes ---------------------------------------------


@dataclass(frozen=True)
class SplitType:
    kind: str  # "split" | "inert" | "ramified"
    p: int
    primes: tuple[Ideal, ...]

    def as_dict(self) -> dict:
        return {
            "type": self.kind,
            "p": self.p,
            "primes": [format_ideal(P, hnf=True) for P in self.primes],
            "norms": [P.norm for P in self.primes],
        }


def legendre(x: int, p: int) -> int:
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def _splitting_kind(R: RingSpec, p: int) -> str:
    if p == 2:
        if R.disc % 2 == 0:
            return "ramified"
        return "split" if R.d % 8 == 1 else "inert"
    if R.disc % p == 0:
        return "ramified"
    return "split" if legendre(R.disc, p) == 1 else "inert"


def min_poly_roots(R: RingSpec, p: int) -> list[int]:
    s, t = R.min_poly()
    return [r for r in range(p) if (r * r - s * r - t) % p == 0]


def split_type(R: RingSpec, p: int) -> SplitType:
    if not is_prime(p):
        raise ValueError(f"{p} is not a rational prime")
    kind = _splitting_kind(R, p)
    roots = min_poly_roots(R, p)
    expected_roots = {"split": 2, "inert": 0, "ramified": 1}[kind]
    if len(roots) != expected_roots:
        raise AssertionError(f"root count {len(roots)} disagrees with {kind} for p = {p}, d = {R.d}")
    pP = principal(p, R)
    if kind == "inert":
        primes: tuple[Ideal, ...] = (pP,)
        product = pP
    else:
        found = sorted(
            {ideal_from_generators([QuadInt(p, 0), QuadInt(r, -1)], R) for r in roots},
            key=lambda P: P.hnf,
        )
        primes = tuple(found)
        product = primes[0] * primes[0] if kind == "ramified" else primes[0] * primes[1]
    if product != pP:
        raise AssertionError(f"witness primes for p = {p}, d = {R.d} do not multiply to (p)")
    return SplitType(kind, p, primes)


# -- factorization ------------------------------------------------------------


@dataclass(frozen=True)
class FactoredIdeal:
    factors: tuple[tuple[Ideal, int], ...]

    def product(self, R: RingSpec) -> Ideal:
        return reduce(lambda acc, fe: acc * fe[0] ** fe[1], self.factors, unit_ideal(R))

    def primes(self) -> list[Ideal]:
        return [P for P, _ in self.factors]

    def as_list(self) -> list[dict]:
        return [{"prime": format_ideal(P, hnf=True), "norm": P.norm, "exponent": e} for P, e in self.factors]


def factor_ideal(I: Ideal, R: RingSpec | None = None, bound: int = DEFAULT_FACTOR_BOUND) -> FactoredIdeal:
    R = R or I.ring
    if I.is_unit():
        raise ValueError("the unit ideal (1) has no prime factorization")
    if I.norm > bound:
        raise CapacityError(f"norm {I.norm} exceeds the factorization bound {bound}")
    factors = []
    for p, _ in factor_int(I.norm, bound):
        for P in split_type(R, p).primes:
            e = 0
            Pe = P
            while Pe.contains_ideal(I):
                e += 1
                Pe = Pe * P
            if e:
                factors.append((P, e))
    fac = FactoredIdeal(tuple(factors))
    if fac.product(R) != I:
        raise AssertionError(f"factorization of {format_ideal(I)} does not reconstruct it")
    return fac


def is_prime_ideal(P: Ideal) -> bool:
    if P.is_unit():
        return False
    fac = factor_ideal(P)
    return len(fac.factors) == 1 and fac.factors[0][1] == 1


def residue_characteristic(P: Ideal) -> int:
    return factor_int(P.norm)[0][0]


# -- text format --------------------------------------------------------------

_HNF_RE = re.compile(r"^hnf:\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)$")


def parse_ideal(text: str, R: RingSpec) -> Ideal:
    """Accepts "hnf:a,b,c" or "(g1, g2, ...)" with generators like "a+b*w"."""
    s = text.strip()
    m = _HNF_RE.match(s)
    if m:
        a, b, c = (int(g) for g in m.groups())
        return Ideal(R, a, b, c)
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError(f"cannot parse ideal {text!r}: expected '(g1, g2, ...)' or 'hnf:a,b,c'")
    body = s[1:-1].strip()
    if not body:
        raise ValueError("an ideal needs at least one generator")
    return ideal_from_generators([parse_quadint(g) for g in body.split(",")], R)


def format_ideal(I: Ideal, hnf: bool = False) -> str:
    if hnf:
        return f"hnf:{I.a},{I.b},{I.c}"
    return f"({I.a}, {QuadInt(I.b, I.c)})"


def iter_primes(limit: int) -> Iterator[int]:
    return (p for p in range(2, limit + 1) if is_prime(p))


__all__ = [
    "CapacityError",
    "FactoredIdeal",
    "Ideal",
    "SplitType",
    "factor_ideal",
    "format_ideal",
    "ideal_from_generators",
    "ideal_mul",
    "ideals_of_norm",
    "ideals_up_to",
    "is_prime_ideal",
    "parse_ideal",
    "principal",
    "split_type",
    "unit_ideal",
]
