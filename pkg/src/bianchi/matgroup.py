"""Explicit finite subgroups of SL(2, O/I) and their PSL images.

A matrix [[p, q], [r, s]] over a quotient ring of size N is encoded as the
integer ((p*N + q)*N + r)*N + s.  Groups are sorted numpy arrays of such
codes; in PSL mode each class {M, -M} is represented by its smaller code.
All closures are breadth-first over whole frontiers, so the resulting
element sets do not depend on evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .ideals import CapacityError
from .quadring import QuadInt
from .resring import QuotientRing

DEFAULT_GROUP_CAP = 2 * 10**5
DEFAULT_TUPLE_CAP = 10**8


# -- encoding -----------------------------------------------------------------


def encode(Q: QuotientRing, p, q, r, s):
    N = Q.size
    return ((np.asarray(p, dtype=np.int64) * N + q) * N + r) * N + s


def decode(Q: QuotientRing, codes):
    N = Q.size
    codes = np.asarray(codes, dtype=np.int64)
    rest, s = np.divmod(codes, N)
    rest, r = np.divmod(rest, N)
    p, q = np.divmod(rest, N)
    return p, q, r, s


def matmul_codes(Q: QuotientRing, X, Y):
    mt, at = Q.mul_table, Q.add_table
    x11, x12, x21, x22 = decode(Q, X)
    y11, y12, y21, y22 = decode(Q, Y)
    return encode(
        Q,
        at[mt[x11, y11], mt[x12, y21]],
        at[mt[x11, y12], mt[x12, y22]],
        at[mt[x21, y11], mt[x22, y21]],
        at[mt[x21, y12], mt[x22, y22]],
    )


def neg_codes(Q: QuotientRing, X):
    ng = Q.neg_table
    p, q, r, s = decode(Q, X)
    return encode(Q, ng[p], ng[q], ng[r], ng[s])


def inverse_codes(Q: QuotientRing, X):
    """Inverse of determinant-one matrices: [[s, -q], [-r, p]]."""
    ng = Q.neg_table
    p, q, r, s = decode(Q, X)
    return encode(Q, s, ng[q], ng[r], p)


def det_codes(Q: QuotientRing, X):
    p, q, r, s = decode(Q, X)
    return Q.sub_table[Q.mul_table[p, s], Q.mul_table[q, r]]


def canonical(Q: QuotientRing, X, psl: bool):
    X = np.asarray(X, dtype=np.int64)
    if not psl:
        return X
    return np.minimum(X, neg_codes(Q, X))


def identity_code(Q: QuotientRing) -> int:
    return int(encode(Q, Q.one, 0, 0, Q.one))


def power_codes(Q: QuotientRing, X, k: int):
    X = np.asarray(X, dtype=np.int64)
    result = np.full(X.shape, identity_code(Q), dtype=np.int64)
    base = X
    while k:
        if k & 1:
            result = matmul_codes(Q, result, base)
        k >>= 1
        if k:
            base = matmul_codes(Q, base, base)
    return result


# -- single matrices ----------------------------------------------------------


@dataclass(frozen=True)
class Mat2:
    """A 2x2 matrix over a quotient ring; entries are residue indices."""

    Q: QuotientRing = field(repr=False)
    entries: tuple[int, int, int, int]

    @classmethod
    def from_ring(cls, Q: QuotientRing, p, q, r, s) -> Mat2:
        def idx(x):
            return Q.index(x if isinstance(x, QuadInt) else int(x))

        return cls(Q, (idx(p), idx(q), idx(r), idx(s)))

    @classmethod
    def from_code(cls, Q: QuotientRing, code: int) -> Mat2:
        return cls(Q, tuple(int(x) for x in decode(Q, code)))

    @property
    def code(self) -> int:
        return int(encode(self.Q, *self.entries))

    def det(self) -> int:
        return int(det_codes(self.Q, self.code))

    def __mul__(self, other: Mat2) -> Mat2:
        return Mat2.from_code(self.Q, int(matmul_codes(self.Q, self.code, other.code)))

    def inverse(self) -> Mat2:
        if self.det() != self.Q.one:
            raise ValueError("only determinant-one matrices are inverted here")
        return Mat2.from_code(self.Q, int(inverse_codes(self.Q, self.code)))

    def __pow__(self, k: int) -> Mat2:
        if k < 0:
            return self.inverse() ** (-k)
        return Mat2.from_code(self.Q, int(power_codes(self.Q, self.code, k)))

    def __neg__(self) -> Mat2:
        return Mat2.from_code(self.Q, int(neg_codes(self.Q, self.code)))

    def conj(self, g: Mat2) -> Mat2:
        """g * self * g^-1."""
        return g * self * g.inverse()

    def is_identity(self) -> bool:
        return self.code == identity_code(self.Q)

    def rows(self) -> list[list[str]]:
        els = [self.Q.element(i) for i in self.entries]
        return [[f"{e.u}{e.v:+d}*w" for e in els[:2]], [f"{e.u}{e.v:+d}*w" for e in els[2:]]]


def identity(Q: QuotientRing) -> Mat2:
    return Mat2.from_ring(Q, 1, 0, 0, 1)


def T(Q: QuotientRing, x: QuadInt | int) -> Mat2:
    """The upper unipotent [[1, x], [0, 1]]."""
    return Mat2.from_ring(Q, 1, x, 0, 1)


def L(Q: QuotientRing, y: QuadInt | int) -> Mat2:
    """The lower unipotent [[1, 0], [y, 1]]."""
    return Mat2.from_ring(Q, 1, 0, y, 1)


def S(Q: QuotientRing) -> Mat2:
    return Mat2.from_ring(Q, 0, 1, -1, 0)


def standard_generators(Q: QuotientRing) -> list[Mat2]:
    """S, T_1, T_w for the basis {1, w}."""
    return [S(Q), T(Q, 1), T(Q, QuadInt(0, 1))]


# -- groups -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteMatrixGroup:
    ring: QuotientRing
    elements: np.ndarray
    generators: tuple[int, ...]
    psl_mode: bool = False

    @property
    def order(self) -> int:
        return int(self.elements.size)

    def __len__(self) -> int:
        return self.order

    def identity(self) -> int:
        return int(canonical(self.ring, identity_code(self.ring), self.psl_mode))

    def canon(self, X):
        return canonical(self.ring, X, self.psl_mode)

    def contains_codes(self, X) -> np.ndarray:
        return np.isin(self.canon(X), self.elements, assume_unique=False)

    def __contains__(self, m: Mat2 | int) -> bool:
        code = m.code if isinstance(m, Mat2) else m
        return bool(self.contains_codes(np.array([code]))[0])

    def same_elements(self, other: FiniteMatrixGroup) -> bool:
        return self.psl_mode == other.psl_mode and np.array_equal(self.elements, other.elements)

    def issubset(self, other: FiniteMatrixGroup) -> bool:
        return bool(np.all(other.contains_codes(self.elements)))

    def gens(self) -> list[Mat2]:
        return [Mat2.from_code(self.ring, g) for g in self.generators]

    def conjugation_invariant(self, conjugators: Iterable[int]) -> bool:
        """True if g H g^-1 = H for every conjugator g."""
        Q = self.ring
        for g in conjugators:
            conj = matmul_codes(Q, matmul_codes(Q, g, self.elements), inverse_codes(Q, g))
            if not np.all(self.contains_codes(conj)):
                return False
        return True


def _codes(gens: Iterable[Mat2 | int]) -> list[int]:
    return [g.code if isinstance(g, Mat2) else int(g) for g in gens]


def _bfs(Q: QuotientRing, start: np.ndarray, gens: np.ndarray, psl: bool, cap: int) -> np.ndarray:
    visited = np.unique(start)
    frontier = visited
    while frontier.size:
        prods = np.concatenate([matmul_codes(Q, frontier, g) for g in gens])
        prods = np.unique(canonical(Q, prods, psl))
        new = prods[~np.isin(prods, visited, assume_unique=True)]
        if new.size == 0:
            break
        visited = np.union1d(visited, new)
        if visited.size > cap:
            raise CapacityError(f"group closure exceeds the element cap {cap}")
        frontier = new
    return visited


def _closure_codes(Q, gen_codes: Sequence[int], psl: bool, cap: int, start=None) -> np.ndarray:
    ident = canonical(Q, identity_code(Q), psl)
    if not len(gen_codes):
        return np.array([ident], dtype=np.int64)
    g = np.asarray(gen_codes, dtype=np.int64)
    dets = det_codes(Q, g)
    if np.any(dets != Q.one):
        raise ValueError("generators must have determinant 1")
    both = np.unique(canonical(Q, np.concatenate([g, inverse_codes(Q, g)]), psl))
    if start is None:
        start = np.array([ident], dtype=np.int64)
    return _bfs(Q, np.asarray(start, dtype=np.int64), both, psl, cap)


def subgroup_closure(
    gens: Iterable[Mat2 | int], Q: QuotientRing, psl: bool = False, cap: int = DEFAULT_GROUP_CAP
) -> FiniteMatrixGroup:
    codes = _codes(gens)
    if not codes:
        raise ValueError("at least one generator is required")
    elements = _closure_codes(Q, codes, psl, cap)
    return FiniteMatrixGroup(Q, elements, tuple(int(c) for c in canonical(Q, codes, psl)), psl)


def generated_by_set(
    Q: QuotientRing, codes: np.ndarray, psl: bool, cap: int = DEFAULT_GROUP_CAP
) -> FiniteMatrixGroup:
    """Subgroup generated by an arbitrary element set, using a greedy small generating set.

    Each added generator at least doubles the subgroup, so at most log2|H| passes.
    """
    codes = np.unique(canonical(Q, codes, psl))
    gens: list[int] = []
    H = np.array([canonical(Q, identity_code(Q), psl)], dtype=np.int64)
    remaining = codes[~np.isin(codes, H)]
    while remaining.size:
        gens.append(int(remaining[0]))
        H = _closure_codes(Q, gens, psl, cap, start=H)
        remaining = remaining[~np.isin(remaining, H)]
    if not gens:
        gens = [int(H[0])]
    return FiniteMatrixGroup(Q, H, tuple(gens), psl)


def sl2_order_bound_ok(Q: QuotientRing, tuple_cap: int) -> None:
    if Q.size**4 > tuple_cap:
        raise CapacityError(f"|Q|^4 = {Q.size ** 4} exceeds the brute-force tuple cap {tuple_cap}")


@lru_cache(maxsize=64)
def _sl2_elements(Q: QuotientRing) -> np.ndarray:
    N = Q.size
    mt, st = Q.mul_table, Q.sub_table
    one = Q.one
    idx = np.arange(N, dtype=np.int64)
    chunks = []
    for p in range(N):
        # rows (p, q) with no unimodular completion are pruned by the det test itself
        ps = mt[p]  # p*s over s
        qr = mt  # q*r over (q, r)
        det = st[ps[None, None, :], qr[:, :, None]]
        q, r, s = np.nonzero(det == one)
        if q.size:
            chunks.append(encode(Q, np.full(q.size, p), idx[q], idx[r], idx[s]))
    return np.sort(np.concatenate(chunks))


def sl2_enumerate(
    Q: QuotientRing, cap: int = DEFAULT_GROUP_CAP, tuple_cap: int = DEFAULT_TUPLE_CAP
) -> FiniteMatrixGroup:
    """All determinant-one matrices over Q, by brute force over 4-tuples."""
    sl2_order_bound_ok(Q, tuple_cap)
    elements = _sl2_elements(Q)
    if elements.size > cap:
        raise CapacityError(f"|SL(2, Q)| = {elements.size} exceeds the element cap {cap}")
    gens = tuple(g.code for g in standard_generators(Q))
    return FiniteMatrixGroup(Q, elements, gens, False)


def normal_closure(
    seed: Iterable[Mat2 | int], ambient: FiniteMatrixGroup, cap: int = DEFAULT_GROUP_CAP
) -> FiniteMatrixGroup:
    """Smallest subgroup containing seed and normalized by ambient's generators."""
    Q, psl = ambient.ring, ambient.psl_mode
    seed_codes = np.unique(canonical(Q, _codes(seed), psl))
    if not np.all(ambient.contains_codes(seed_codes)):
        raise ValueError("seed elements must lie in the ambient group")
    ident = canonical(Q, identity_code(Q), psl)
    amb = np.asarray(ambient.generators, dtype=np.int64)
    amb_inv = inverse_codes(Q, amb)
    gens: list[int] = []
    H = np.array([ident], dtype=np.int64)

    def absorb(cands: np.ndarray) -> None:
        nonlocal H
        for x in cands[~np.isin(cands, H)]:
            if not np.isin(x, H):
                gens.append(int(x))
                H = _closure_codes(Q, gens, psl, cap, start=H)

    absorb(seed_codes)
    checked = 0
    while checked < len(gens):
        # conjugate only the generators added since the last pass
        fresh = np.asarray(gens[checked:], dtype=np.int64)
        checked = len(gens)
        conj = matmul_codes(Q, matmul_codes(Q, amb[:, None], fresh[None, :]), amb_inv[:, None])
        absorb(np.unique(canonical(Q, conj.ravel(), psl)))
    if not gens:
        gens = [int(ident)]
    return FiniteMatrixGroup(Q, H, tuple(gens), psl)


def commutator_codes(Q: QuotientRing, X, Y):
    return matmul_codes(Q, matmul_codes(Q, X, Y), matmul_codes(Q, inverse_codes(Q, X), inverse_codes(Q, Y)))


def derived_subgroup(G: FiniteMatrixGroup, cap: int = DEFAULT_GROUP_CAP) -> FiniteMatrixGroup:
    Q = G.ring
    g = np.asarray(G.generators, dtype=np.int64)
    comms = commutator_codes(Q, g[:, None], g[None, :]).ravel()
    return normal_closure(comms, G, cap)


def power_subgroup(G: FiniteMatrixGroup, k: int, cap: int = DEFAULT_GROUP_CAP) -> FiniteMatrixGroup:
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return G
    powers = power_codes(G.ring, G.elements, k)
    return generated_by_set(G.ring, powers, G.psl_mode, cap)


def psl_quotient(G: FiniteMatrixGroup) -> FiniteMatrixGroup:
    Q = G.ring
    minus_i = int(neg_codes(Q, identity_code(Q)))
    if not G.psl_mode and minus_i not in G:
        raise ValueError("-I is not in the group, so the PSL image is not a quotient")
    elements = np.unique(canonical(Q, G.elements, True))
    return FiniteMatrixGroup(Q, elements, tuple(int(c) for c in canonical(Q, G.generators, True)), True)


def reduction_kernel(
    Q_big: QuotientRing, Q_small: QuotientRing | None, G: FiniteMatrixGroup
) -> FiniteMatrixGroup:
    """Elements of G congruent to the identity (+-identity in PSL mode) modulo the small modulus.

    Q_small = None stands for the unit ideal, whose kernel is G itself.
    """
    if G.ring != Q_big:
        raise ValueError("G must live over Q_big")
    if Q_small is None:
        return G
    rmap = Q_big.reduction_map(Q_small)
    p, q, r, s = (rmap[e] for e in decode(Q_big, G.elements))
    one = Q_small.one
    mask = (p == one) & (q == 0) & (r == 0) & (s == one)
    if G.psl_mode:
        m1 = Q_small.neg_table[one]
        mask |= (p == m1) & (q == 0) & (r == 0) & (s == m1)
    return generated_by_set(Q_big, G.elements[mask], G.psl_mode)


def congruence_kernel(Q_big: QuotientRing, J, psl: bool = False) -> FiniteMatrixGroup:
    """{M in SL(2, O/I) : M = I mod J} enumerated directly from entries in J/I."""
    in_j = np.flatnonzero(Q_big.ideal_mask(J))
    one = Q_big.one
    diag = Q_big.add_table[one, in_j]
    p, q, r, s = np.meshgrid(diag, in_j, in_j, diag, indexing="ij")
    cand = encode(Q_big, p.ravel(), q.ravel(), r.ravel(), s.ravel())
    cand = cand[det_codes(Q_big, cand) == one]
    if psl:
        cand = np.unique(canonical(Q_big, cand, True))
    return generated_by_set(Q_big, cand, psl)


# -- structure ----------------------------------------------------------------


@dataclass(frozen=True)
class StructureReport:
    order: int
    is_abelian: bool
    exponent: int
    center_order: int
    derived_index: int
    note: str = "fingerprint only: order, commutativity, exponent, center and derived index"

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "is_abelian": self.is_abelian,
            "exponent": self.exponent,
            "center_order": self.center_order,
            "derived_index": self.derived_index,
            "note": self.note,
        }


def element_orders(G: FiniteMatrixGroup) -> np.ndarray:
    Q = G.ring
    ident = G.identity()
    orders = np.zeros(G.order, dtype=np.int64)
    P = G.elements.copy()
    k = 1
    while True:
        hit = (P == ident) & (orders == 0)
        orders[hit] = k
        if np.all(orders):
            return orders
        k += 1
        if k > G.order:
            raise AssertionError("element order exceeds the group order; the set is not a group")
        P = G.canon(matmul_codes(Q, P, G.elements))


def exponent(G: FiniteMatrixGroup) -> int:
    return math.lcm(*(int(x) for x in np.unique(element_orders(G))))


def is_abelian(G: FiniteMatrixGroup) -> bool:
    g = np.asarray(G.generators, dtype=np.int64)
    Q = G.ring
    ab = G.canon(matmul_codes(Q, g[:, None], g[None, :]))
    ba = G.canon(matmul_codes(Q, g[None, :], g[:, None]))
    return bool(np.array_equal(ab, ba))


def center(G: FiniteMatrixGroup) -> np.ndarray:
    Q = G.ring
    mask = np.ones(G.order, dtype=bool)
    for g in G.generators:
        mask &= G.canon(matmul_codes(Q, G.elements, g)) == G.canon(matmul_codes(Q, g, G.elements))
    return G.elements[mask]


def structure_probe(G: FiniteMatrixGroup) -> StructureReport:
    D = derived_subgroup(G)
    return StructureReport(
        order=G.order,
        is_abelian=is_abelian(G),
        exponent=exponent(G),
        center_order=int(center(G).size),
        derived_index=G.order // D.order,
    )
