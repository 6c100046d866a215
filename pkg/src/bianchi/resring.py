"""Finite quotient rings O_d / I.

Residues are the pairs (u, v), 0 <= u < a, 0 <= v < c, for the modulus
I = hnf(a, b, c).  Internally a residue is the integer index u*c + v, which
lets the matrix-group code work on numpy arrays through lookup tables.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .ideals import CapacityError, Ideal, format_ideal
from .quadring import QuadInt, RingSpec

DEFAULT_RING_CAP = 10**4
TABLE_LIMIT = 4096


@dataclass(frozen=True)
class Residue:
    u: int
    v: int
    Q: QuotientRing

    @property
    def index(self) -> int:
        return self.u * self.Q.modulus.c + self.v

    def lift(self) -> QuadInt:
        return QuadInt(self.u, self.v)

    def __add__(self, other: Residue) -> Residue:
        return self.Q.reduce(self.lift() + other.lift())

    def __sub__(self, other: Residue) -> Residue:
        return self.Q.reduce(self.lift() - other.lift())

    def __neg__(self) -> Residue:
        return self.Q.reduce(-self.lift())

    def __mul__(self, other: Residue) -> Residue:
        return self.Q.reduce(self.Q.ring.mul(self.lift(), other.lift()))

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def __str__(self) -> str:
        return f"{self.u}{self.v:+d}*w mod {format_ideal(self.Q.modulus, hnf=True)}"


@dataclass(frozen=True)
class QuotientRing:
    ring: RingSpec
    modulus: Ideal

    def __post_init__(self):
        if self.modulus.is_unit():
            raise ValueError("O/(1) is the zero ring; a proper ideal is required")
        if self.modulus.ring != self.ring:
            raise ValueError("modulus belongs to a different ring")

    @property
    def size(self) -> int:
        return self.modulus.norm

    def reduce(self, x: QuadInt | int) -> Residue:
        if isinstance(x, int):
            x = QuadInt(x, 0)
        a, b, c = self.modulus.hnf
        k = x.b // c
        return Residue((x.a - k * b) % a, x.b - k * c, self)

    def index(self, x: QuadInt | int) -> int:
        return self.reduce(x).index

    def element(self, i: int) -> Residue:
        u, v = divmod(i, self.modulus.c)
        return Residue(u, v, self)

    def elements(self) -> list[Residue]:
        return [self.element(i) for i in range(self.size)]

    @property
    def zero(self) -> int:
        return 0

    @cached_property
    def one(self) -> int:
        return self.index(1)

    # -- vectorized arithmetic on index arrays --------------------------------

    def _reduce_arrays(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        a, b, c = self.modulus.hnf
        k = B // c
        return ((A - k * b) % a) * c + (B - k * c)

    def _coords(self, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return np.divmod(np.asarray(idx, dtype=np.int64), self.modulus.c)

    def mul_arrays(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        u1, v1 = self._coords(x)
        u2, v2 = self._coords(y)
        vv = v1 * v2
        return self._reduce_arrays(
            u1 * u2 + vv * self.ring.w2_const,
            u1 * v2 + u2 * v1 + vv * self.ring.w2_lin,
        )

    def add_arrays(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        u1, v1 = self._coords(x)
        u2, v2 = self._coords(y)
        return self._reduce_arrays(u1 + u2, v1 + v2)

    def neg_arrays(self, x: np.ndarray) -> np.ndarray:
        u, v = self._coords(x)
        return self._reduce_arrays(-u, -v)

    def _check_tables(self) -> None:
        if self.size > TABLE_LIMIT:
            raise CapacityError(f"ring of size {self.size} is too large for lookup tables (limit {TABLE_LIMIT})")
        # intermediate products stay well inside int64
        bound = self.size**2 * (abs(self.ring.w2_const) + 3)
        if bound >= 2**62:
            raise CapacityError("residue arithmetic would overflow 64-bit integers")

    @cached_property
    def mul_table(self) -> np.ndarray:
        self._check_tables()
        idx = np.arange(self.size, dtype=np.int64)
        return self.mul_arrays(idx[:, None], idx[None, :])

    @cached_property
    def add_table(self) -> np.ndarray:
        self._check_tables()
        idx = np.arange(self.size, dtype=np.int64)
        return self.add_arrays(idx[:, None], idx[None, :])

    @cached_property
    def sub_table(self) -> np.ndarray:
        idx = np.arange(self.size, dtype=np.int64)
        return self.add_table[idx[:, None], self.neg_table[None, :]]

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self.neg_arrays(np.arange(self.size, dtype=np.int64))

    def inverse_index(self, i: int) -> int | None:
        prods = self.mul_arrays(np.full(self.size, i, dtype=np.int64), np.arange(self.size, dtype=np.int64))
        hits = np.flatnonzero(prods == self.one)
        return int(hits[0]) if hits.size else None

    @cached_property
    def unit_mask(self) -> np.ndarray:
        return (self.mul_table == self.one).any(axis=1)

    def is_field(self) -> bool:
        return int(self.unit_mask.sum()) == self.size - 1

    def reduction_map(self, other: QuotientRing) -> np.ndarray:
        """Index map O/I -> O/J for J | I."""
        if not other.modulus.contains_ideal(self.modulus):
            raise ValueError(
                f"{format_ideal(other.modulus)} does not divide {format_ideal(self.modulus)}"
            )
        u, v = self._coords(np.arange(self.size, dtype=np.int64))
        return other._reduce_arrays(u, v)

    def ideal_mask(self, J: Ideal) -> np.ndarray:
        """Residues of O/I lying in the ideal J (J must divide I)."""
        if not J.contains_ideal(self.modulus):
            raise ValueError("the ideal must contain the modulus")
        u, v = self._coords(np.arange(self.size, dtype=np.int64))
        ok = v % J.c == 0
        return ok & ((u - (v // J.c) * J.b) % J.a == 0)


@lru_cache(maxsize=256)
def _quotient_ring_cached(R: RingSpec, I: Ideal) -> QuotientRing:
    return QuotientRing(R, I)


def quotient_ring(R: RingSpec, I: Ideal, cap: int = DEFAULT_RING_CAP) -> QuotientRing:
    if I.is_unit():
        raise ValueError("O/(1) is the zero ring; a proper ideal is required")
    if I.norm > cap:
        raise CapacityError(f"|O/I| = {I.norm} exceeds the ring enumeration cap {cap}")
    return _quotient_ring_cached(R, I)


def reduce(x: QuadInt, Q: QuotientRing) -> Residue:
    return Q.reduce(x)


def residue_inverse(r: Residue, Q: QuotientRing | None = None) -> Residue | None:
    Q = Q or r.Q
    i = Q.inverse_index(r.index)
    return None if i is None else Q.element(i)
