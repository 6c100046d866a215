"""Index of principal congruence subgroups: closed form and finite-quotient checks."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .ideals import (
    CapacityError,
    FactoredIdeal,
    Ideal,
    factor_ideal,
    format_ideal,
    is_prime_ideal,
    principal,
    residue_characteristic,
)
from .matgroup import (
    DEFAULT_GROUP_CAP,
    DEFAULT_TUPLE_CAP,
    L,
    S,
    T,
    FiniteMatrixGroup,
    Mat2,
    congruence_kernel,
    exponent,
    generated_by_set,
    is_abelian,
    normal_closure,
    reduction_kernel,
    sl2_enumerate,
    standard_generators,
    subgroup_closure,
)
from .quadring import ONE, QuadInt, RingSpec
from .resring import DEFAULT_RING_CAP, quotient_ring


@dataclass(frozen=True)
class Caps:
    ring: int = DEFAULT_RING_CAP
    group: int = DEFAULT_GROUP_CAP
    tuples: int = DEFAULT_TUPLE_CAP


DEFAULT_CAPS = Caps()


class NotCoprimeError(ValueError):
    pass


def _closed_form(norm: int, prime_norms: list[int]) -> int:
    num = norm**3
    den = 1
    for q in prime_norms:
        num *= q * q - 1
        den *= q * q
    if num % den:
        raise AssertionError(f"closed form {num}/{den} is not integral")
    return num // den


def sl2_order(I: Ideal) -> int:
    """|SL(2, O/I)| from the closed form; 1 for the unit ideal."""
    if I.is_unit():
        return 1
    return _closed_form(I.norm, [P.norm for P in factor_ideal(I).primes()])


def local_order(P: Ideal, e: int) -> int:
    if e < 1:
        raise ValueError("exponent must be positive")
    if not is_prime_ideal(P):
        raise ValueError(f"{format_ideal(P)} is not a prime ideal")
    q = P.norm
    return q ** (3 * e - 2) * (q * q - 1)


def enumerable(I: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
    return I.norm <= caps.ring and I.norm**4 <= caps.tuples and sl2_order(I) <= caps.group


def require_enumerable(I: Ideal, caps: Caps) -> None:
    if not enumerable(I, caps):
        raise CapacityError(
            f"SL(2, O/{format_ideal(I)}) has {sl2_order(I)} elements over a ring of size {I.norm}; "
            f"over the caps (ring {caps.ring}, group {caps.group}, tuples {caps.tuples})"
        )


@dataclass
class IndexReport:
    ideal: Ideal
    closed_form: int
    oracle: int | None
    factors: FactoredIdeal

    @property
    def match(self) -> bool:
        return self.oracle is not None and self.oracle == self.closed_form

    def as_dict(self) -> dict:
        return {
            "ideal": format_ideal(self.ideal, hnf=True),
            "norm": self.ideal.norm,
            "closed_form": self.closed_form,
            "oracle": self.oracle,
            "factors": self.factors.as_list(),
            "match": self.match,
        }


def index_formula(R: RingSpec, I: Ideal, caps: Caps = DEFAULT_CAPS, oracle: bool = True) -> IndexReport:
    if I.is_unit():
        raise ValueError("the index formula needs a nontrivial ideal, got (1)")
    fac = factor_ideal(I, R)
    closed = _closed_form(I.norm, [P.norm for P in fac.primes()])
    count = None
    if oracle and enumerable(I, caps):
        count = sl2_enumerate(quotient_ring(R, I, caps.ring), caps.group, caps.tuples).order
    return IndexReport(I, closed, count, fac)


@dataclass
class SurjectivityReport:
    ideal: Ideal
    closed_form: int
    closure_order: int
    sl2_order: int
    contained: bool

    @property
    def surjective(self) -> bool:
        return self.contained and self.closure_order == self.sl2_order == self.closed_form

    def as_dict(self) -> dict:
        return {
            "ideal": format_ideal(self.ideal, hnf=True),
            "closed_form": self.closed_form,
            "closure_order": self.closure_order,
            "sl2_order": self.sl2_order,
            "contained": self.contained,
            "surjective": self.surjective,
        }


def verify_surjectivity(R: RingSpec, I: Ideal, caps: Caps = DEFAULT_CAPS) -> SurjectivityReport:
    require_enumerable(I, caps)
    Q = quotient_ring(R, I, caps.ring)
    full = sl2_enumerate(Q, caps.group, caps.tuples)
    closure = subgroup_closure(standard_generators(Q), Q, cap=caps.group)
    return SurjectivityReport(I, sl2_order(I), closure.order, full.order, closure.issubset(full))


# -- filtration by powers of a prime ------------------------------------------


def zp_basis(P: Ideal, m: int) -> list[QuadInt]:
    """Elements of P^m whose images form an F_p-basis of P^m / P^(m+1)."""
    p = residue_characteristic(P)
    r = round(math.log(P.norm, p))
    Pm, Pm1 = P**m, P ** (m + 1)
    chosen: list[QuadInt] = []
    for g in Pm.basis:
        trial = chosen + [g]
        independent = True
        for coeffs in itertools.product(range(p), repeat=len(trial)):
            if not any(coeffs):
                continue
            x = QuadInt(0, 0)
            for k, t in zip(coeffs, trial):
                x = x + t.scale(k)
            if Pm1.contains(x):
                independent = False
                break
        if independent:
            chosen.append(g)
    if len(chosen) != r:
        raise AssertionError(f"found {len(chosen)} independent elements, expected {r}")
    return chosen


@dataclass
class FiltrationReport:
    prime: Ideal
    m: int
    characteristic: int
    kernel_order: int
    expected: int
    is_abelian: bool
    exponent: int
    witness_basis: list[QuadInt]
    witnesses: dict[str, list[Mat2]]
    witness_forms_ok: bool
    witnesses_generate: bool
    upper_lower_order: int
    diagonal_order: int
    parts_intersect_trivially: bool
    full_group_crosscheck: bool | None

    @property
    def elementary_abelian(self) -> bool:
        return self.is_abelian and self.exponent == self.characteristic

    @property
    def ok(self) -> bool:
        return (
            self.kernel_order == self.expected
            and self.elementary_abelian
            and self.witness_forms_ok
            and self.witnesses_generate
            and self.full_group_crosscheck is not False
        )

    def as_dict(self) -> dict:
        return {
            "prime": format_ideal(self.prime, hnf=True),
            "m": self.m,
            "characteristic": self.characteristic,
            "kernel_order": self.kernel_order,
            "expected": self.expected,
            "elementary_abelian": self.elementary_abelian,
            "exponent": self.exponent,
            "generator_witness": {
                "basis": [str(x) for x in self.witness_basis],
                "matrices": {k: [M.rows() for M in v] for k, v in self.witnesses.items()},
                "forms_ok": self.witness_forms_ok,
                "generate_kernel": self.witnesses_generate,
                "upper_lower_order": self.upper_lower_order,
                "diagonal_order": self.diagonal_order,
                "intersect_trivially": self.parts_intersect_trivially,
            },
            "full_group_crosscheck": self.full_group_crosscheck,
            "ok": self.ok,
        }


def verify_filtration(R: RingSpec, P: Ideal, m: int, caps: Caps = DEFAULT_CAPS) -> FiltrationReport:
    """Kernel of SL(2, O/P^(m+1)) -> SL(2, O/P^m), enumerated directly from entries in P^m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not is_prime_ideal(P):
        raise ValueError(f"{format_ideal(P)} is not a prime ideal")
    p = residue_characteristic(P)
    Pm = P**m
    Qb = quotient_ring(R, P ** (m + 1), caps.ring)
    kernel = congruence_kernel(Qb, Pm)

    basis = zp_basis(P, m)
    s, t1 = S(Qb), T(Qb, 1)
    X = [T(Qb, x) for x in basis]
    Y = [x.conj(s) for x in X]
    Z = [y.conj(t1) for y in Y]
    forms = all(
        y == L(Qb, -x) and z == Mat2.from_ring(Qb, ONE - x, x, -x, ONE + x)
        for x, y, z in zip(basis, Y, Z)
    )
    witnesses = generated_by_set(Qb, np.array([M.code for M in X + Y + Z]), False)
    A = generated_by_set(Qb, np.array([M.code for M in X + Y]), False)
    B = generated_by_set(Qb, np.array([M.code for M in Z]), False)
    meet = np.intersect1d(A.elements, B.elements)

    crosscheck = None
    if enumerable(P ** (m + 1), caps):
        full = sl2_enumerate(Qb, caps.group, caps.tuples)
        small = quotient_ring(R, Pm, caps.ring)
        crosscheck = reduction_kernel(Qb, small, full).same_elements(kernel)

    return FiltrationReport(
        prime=P,
        m=m,
        characteristic=p,
        kernel_order=kernel.order,
        expected=P.norm**3,
        is_abelian=is_abelian(kernel),
        exponent=exponent(kernel),
        witness_basis=basis,
        witnesses={"X": X, "Y": Y, "Z": Z},
        witness_forms_ok=forms,
        witnesses_generate=witnesses.same_elements(kernel),
        upper_lower_order=A.order,
        diagonal_order=B.order,
        parts_intersect_trivially=meet.size == 1,
        full_group_crosscheck=crosscheck,
    )


# -- multiplicativity ----------------------------------------------------------


@dataclass
class MultiplicativityReport:
    A: Ideal
    B: Ideal
    index_A: int
    index_B: int
    index_AB: int
    oracle_A: int | None
    oracle_B: int | None
    oracle_AB: int | None
    kernels_generate: bool | None

    @property
    def closed_form_ok(self) -> bool:
        return self.index_AB == self.index_A * self.index_B

    @property
    def oracle_ok(self) -> bool | None:
        if self.oracle_AB is None:
            return None
        return self.oracle_AB == self.oracle_A * self.oracle_B == self.index_AB

    @property
    def ok(self) -> bool:
        return self.closed_form_ok and self.oracle_ok is not False and self.kernels_generate is not False

    def as_dict(self) -> dict:
        return {
            "A": format_ideal(self.A, hnf=True),
            "B": format_ideal(self.B, hnf=True),
            "index_A": self.index_A,
            "index_B": self.index_B,
            "index_AB": self.index_AB,
            "oracle_A": self.oracle_A,
            "oracle_B": self.oracle_B,
            "oracle_AB": self.oracle_AB,
            "closed_form_ok": self.closed_form_ok,
            "oracle_ok": self.oracle_ok,
            "kernels_generate": self.kernels_generate,
            "ok": self.ok,
        }


def verify_multiplicativity(R: RingSpec, A: Ideal, B: Ideal, caps: Caps = DEFAULT_CAPS) -> MultiplicativityReport:
    common = A + B
    if not common.is_unit():
        raise NotCoprimeError(f"{format_ideal(A)} and {format_ideal(B)} share the factor {format_ideal(common)}")
    AB = A * B
    rA = index_formula(R, A, caps)
    rB = index_formula(R, B, caps)
    rAB = index_formula(R, AB, caps)
    kernels = None
    if rAB.oracle is not None:
        # finite image of E(A)E(B) = E: the two reduction kernels span SL(2, O/AB)
        Q = quotient_ring(R, AB, caps.ring)
        G = sl2_enumerate(Q, caps.group, caps.tuples)
        KA = reduction_kernel(Q, quotient_ring(R, A, caps.ring), G)
        KB = reduction_kernel(Q, quotient_ring(R, B, caps.ring), G)
        joint = generated_by_set(Q, np.concatenate([KA.elements, KB.elements]), False)
        meet = np.intersect1d(KA.elements, KB.elements)
        kernels = joint.same_elements(G) and meet.size == 1 and KA.order * KB.order == G.order
    return MultiplicativityReport(
        A, B, rA.closed_form, rB.closed_form, rAB.closed_form, rA.oracle, rB.oracle, rAB.oracle, kernels
    )


# -- finite image of the normal closure of T_1^m, T_w^m ------------------------


@dataclass
class ClosureReport:
    m: int
    n: int
    ambient_order: int
    closure_order: int
    kernel_order: int
    contained: bool

    @property
    def equal(self) -> bool:
        return self.contained and self.closure_order == self.kernel_order

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "ambient_order": self.ambient_order,
            "closure_order": self.closure_order,
            "kernel_order": self.kernel_order,
            "contained": self.contained,
            "equal": self.equal,
        }


def verify_wohlfahrt_closure(R: RingSpec, m: int, n: int, caps: Caps = DEFAULT_CAPS) -> ClosureReport:
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive integers")
    if m * n == 1:
        raise ValueError("m*n must exceed 1 so that O/(mn) is a nonzero ring")
    big = principal(m * n, R)
    require_enumerable(big, caps)
    Q = quotient_ring(R, big, caps.ring)
    G = subgroup_closure(standard_generators(Q), Q, cap=caps.group)
    if G.order != sl2_order(big):
        raise AssertionError("the standard generators do not generate SL(2, O/(mn))")
    seed = [T(Q, m), T(Q, QuadInt(0, m))]
    N = normal_closure(seed, G, caps.group)
    small = None if m == 1 else quotient_ring(R, principal(m, R), caps.ring)
    K = reduction_kernel(Q, small, G)
    return ClosureReport(m, n, G.order, N.order, K.order, N.issubset(K))


__all__ = [
    "Caps",
    "ClosureReport",
    "FiltrationReport",
    "IndexReport",
    "MultiplicativityReport",
    "NotCoprimeError",
    "SurjectivityReport",
    "enumerable",
    "index_formula",
    "local_order",
    "sl2_order",
    "verify_filtration",
    "verify_multiplicativity",
    "verify_surjectivity",
    "verify_wohlfahrt_closure",
    "zp_basis",
]
