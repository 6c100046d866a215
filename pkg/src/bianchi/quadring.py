"""Exact arithmetic in the ring of integers O_d of Q(sqrt d).

Elements are written a + b*w over the integral basis {1, w}, where
w = sqrt(d) when d = 2, 3 (mod 4) and w = (1 + sqrt(d))/2 when d = 1 (mod 4).
"""
from __future__ import annotations

from dataclasses import dataclass


def square_factor(n: int) -> int | None:
    """Return a prime p with p*p | n, or None if n is squarefree."""
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return p
        if n % p == 0:
            n //= p
        p += 1 if p == 2 else 2
    return None


@dataclass(frozen=True, order=True)
class QuadInt:
    """The element a + b*w.  Ring-independent operations live here."""

    a: int
    b: int

    def __add__(self, other: QuadInt) -> QuadInt:
        return QuadInt(self.a + other.a, self.b + other.b)

    def __sub__(self, other: QuadInt) -> QuadInt:
        return QuadInt(self.a - other.a, self.b - other.b)

    def __neg__(self) -> QuadInt:
        return QuadInt(-self.a, -self.b)

    def scale(self, k: int) -> QuadInt:
        return QuadInt(k * self.a, k * self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __str__(self) -> str:
        return f"{self.a}{self.b:+d}*w"


ZERO = QuadInt(0, 0)
ONE = QuadInt(1, 0)
W = QuadInt(0, 1)


@dataclass(frozen=True)
class RingSpec:
    """O_d together with the rule w^2 = w2_const + w2_lin * w."""

    d: int
    w2_const: int
    w2_lin: int
    disc: int

    @property
    def w_rule(self) -> str:
        if self.w2_lin == 0:
            return f"w^2 = {self.w2_const}"
        return f"w^2 = w{self.w2_const:+d}"

    @property
    def imaginary(self) -> bool:
        return self.d < 0

    def mul(self, x: QuadInt, y: QuadInt) -> QuadInt:
        bb = x.b * y.b
        return QuadInt(
            x.a * y.a + bb * self.w2_const,
            x.a * y.b + x.b * y.a + bb * self.w2_lin,
        )

    def conj(self, x: QuadInt) -> QuadInt:
        # w + conj(w) = w2_lin
        return QuadInt(x.a + x.b * self.w2_lin, -x.b)

    def norm(self, x: QuadInt) -> int:
        return x.a * x.a + self.w2_lin * x.a * x.b - self.w2_const * x.b * x.b

    def trace(self, x: QuadInt) -> int:
        return 2 * x.a + self.w2_lin * x.b

    def pow(self, x: QuadInt, k: int) -> QuadInt:
        if k < 0:
            raise ValueError("negative exponent")
        result = ONE
        while k:
            if k & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            k >>= 1
        return result

    def min_poly(self) -> tuple[int, int]:
        """(s, t) with w^2 - s*w - t = 0."""
        return self.w2_lin, self.w2_const


def make_ring(d: int) -> RingSpec:
    if d in (0, 1):
        raise ValueError(f"d must not be 0 or 1, got {d}")
    p = square_factor(d)
    if p is not None:
        raise ValueError(f"d = {d} is not squarefree: {p}^2 divides it")
    if d % 4 == 1:
        return RingSpec(d=d, w2_const=(d - 1) // 4, w2_lin=1, disc=d)
    return RingSpec(d=d, w2_const=d, w2_lin=0, disc=4 * d)


def mul(x: QuadInt, y: QuadInt, R: RingSpec) -> QuadInt:
    return R.mul(x, y)


def norm(x: QuadInt, R: RingSpec) -> int:
    return R.norm(x)


def parse_quadint(text: str) -> QuadInt:
    """Parse "a+b*w" style input; accepts "3", "w", "-w", "1-w", "2+3*w", "5*w"."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty element")
    terms: list[str] = []
    start = 0
    for i in range(1, len(s)):
        if s[i] in "+-" and s[i - 1] not in "+-*":
            terms.append(s[start:i])
            start = i
    terms.append(s[start:])
    a = b = 0
    for term in terms:
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if term.endswith("w"):
            coeff = term[:-1].rstrip("*")
            if coeff.startswith("-") or coeff.startswith("+"):
                sign *= -1 if coeff[0] == "-" else 1
                coeff = coeff[1:]
            try:
                b += sign * (int(coeff) if coeff else 1)
            except ValueError:
                raise ValueError(f"cannot parse ring element {text!r}") from None
        else:
            try:
                a += sign * int(term)
            except ValueError:
                raise ValueError(f"cannot parse ring element {text!r}") from None
    return QuadInt(a, b)
