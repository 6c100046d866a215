"""Bianchi-group verdicts: class numbers, reference abelianizations, and certificates.

Facts about the infinite groups PE_d and B_d (their abelianizations and the
rank bound r >= h_d) are reference data; they are recorded in certificates
as cited sources.  Everything else in a certificate is recomputed here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .ideals import Ideal, format_ideal, is_prime, legendre, principal, split_type
from .indexcalc import DEFAULT_CAPS, Caps, sl2_order
from .matgroup import (
    FiniteMatrixGroup,
    L,
    Mat2,
    S,
    T,
    center,
    congruence_kernel,
    derived_subgroup,
    exponent,
    generated_by_set,
    is_abelian,
    power_codes,
    power_subgroup,
    psl_quotient,
    sl2_enumerate,
    standard_generators,
    subgroup_closure,
)
from .quadring import ONE, QuadInt, RingSpec, make_ring
from .resring import quotient_ring

# d < 0 with O_d norm-Euclidean; there the elementary subgroup is all of PSL(2, O_d)
NORM_EUCLIDEAN_DS = (-1, -2, -3, -7, -11)


def _bianchi_ring(d: int) -> RingSpec:
    R = make_ring(d)
    if d >= 0:
        raise ValueError(f"d = {d}: Bianchi groups need an imaginary quadratic field (d < 0)")
    return R


def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """Reduced primitive forms (a, b, c) of the field discriminant.

    |b| <= a <= c, with b >= 0 whenever |b| = a or a = c.
    """
    D = _bianchi_ring(d).disc
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c >= a and math.gcd(math.gcd(a, abs(b)), c) == 1 and not (b < 0 and a == c):
                out.append((a, b, c))
        a += 1
    return out


def class_number(d: int) -> int:
    return len(reduced_forms(d))


# -- reference data for the infinite groups -----------------------------------


@dataclass(frozen=True)
class AbelianizationData:
    d: int
    free_rank: int
    torsion: tuple[int, ...]
    mod_squares: tuple[int, ...]
    equals_bianchi: bool
    row: str

    @property
    def mod_squares_order(self) -> int:
        return math.prod(self.mod_squares)

    def admits_index(self, q: int) -> bool:
        """Whether the abelianization has a subgroup of prime index q."""
        return self.free_rank >= 1 or any(t % q == 0 for t in self.torsion)

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "group": f"PE_{self.d}",
            "row": self.row,
            "abelianization": {"free_rank": self.free_rank, "torsion": list(self.torsion)},
            "mod_squares": list(self.mod_squares),
            "equals_bianchi": self.equals_bianchi,
        }


_REFERENCE_ROWS = {
    -1: (0, (2, 2), (2, 2)),
    -2: (1, (6,), (2, 2)),
    -3: (0, (3,), ()),
    -7: (1, (2,), (2, 2)),
    -11: (1, (3,), (2,)),
}
_GENERIC = (1, (6,), (2, 2))


def reference_abelianization(d: int) -> AbelianizationData:
    _bianchi_ring(d)
    if d in _REFERENCE_ROWS:
        rank, tors, sq = _REFERENCE_ROWS[d]
        return AbelianizationData(d, rank, tors, sq, True, str(d))
    rank, tors, sq = _GENERIC
    return AbelianizationData(d, rank, tors, sq, False, "generic (O_d not norm-Euclidean)")


# -- certificates -------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupDescriptor:
    """A finite-index subgroup S of PSL(2, O_d), described by its invariants."""

    name: str = "B_d"
    index: int = 1
    level: int = 1
    free_rank: int | None = None
    torsion: tuple[int, ...] | None = None

    @property
    def is_whole_group(self) -> bool:
        return self.name == "B_d" and self.index == 1 and self.level == 1

    def as_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "index": self.index, "level": self.level}
        if self.free_rank is not None:
            out["abelianization"] = {"free_rank": self.free_rank, "torsion": list(self.torsion or ())}
        return out


BIANCHI = SubgroupDescriptor()


@dataclass
class Hypothesis:
    name: str
    checked: bool
    witness: dict

    def as_dict(self) -> dict:
        return {"name": self.name, "checked": self.checked, "witness": self.witness}


@dataclass
class Certificate:
    d: int
    q: int | None
    subgroup: dict
    hypotheses: list[Hypothesis]
    verdict: str  # NonCongruence | Congruence | NotApplicable | Undetermined
    reason: str | None = None
    index: int | None = None
    level: int | str | None = None
    criteria: list[str] = field(default_factory=list)

    def hypothesis(self, name: str) -> Hypothesis:
        for h in self.hypotheses:
            if h.name == name:
                return h
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "q": self.q,
            "subgroup": self.subgroup,
            "hypotheses": [h.as_dict() for h in self.hypotheses],
            "verdict": self.verdict,
            "reason": self.reason,
            "index": self.index,
            "level": self.level,
            "criteria": self.criteria,
        }


def _splitting_hypothesis(R: RingSpec, q: int) -> Hypothesis:
    st = split_type(R, q)
    ok = st.kind == "inert" or (st.kind == "split" and q >= 5)
    witness = dict(st.as_dict())
    if q != 2:
        witness["legendre_disc"] = legendre(R.disc, q)
    else:
        witness["d_mod_8"] = R.d % 8
    return Hypothesis("splitting", ok, witness)


def _rank_hypothesis(d: int, q: int, sub: SubgroupDescriptor) -> Hypothesis:
    if sub.free_rank is not None:
        ok = sub.free_rank >= 1 or any(t % q == 0 for t in (sub.torsion or ()))
        return Hypothesis(
            "rank_source",
            ok,
            {"source": "user-supplied", "free_rank": sub.free_rank, "torsion": list(sub.torsion or ())},
        )
    if not sub.is_whole_group:
        return Hypothesis("rank_source", False, {"source": "none", "detail": "no abelianization data supplied"})
    row = reference_abelianization(d)
    witness = {"source": "reference-table", "row": row.row, "free_rank": row.free_rank, "torsion": list(row.torsion)}
    if d not in NORM_EUCLIDEAN_DS:
        h = class_number(d)
        witness["class_number"] = h
        witness["rank_lower_bound"] = h
        witness["detail"] = "B_d abelianization rank r >= h_d >= 1 when O_d is not norm-Euclidean"
    return Hypothesis("rank_source", row.admits_index(q), witness)


def _gcd_hypothesis(R: RingSpec, q: int, sub: SubgroupDescriptor) -> Hypothesis:
    if sub.index < 1 or sub.level < 1:
        raise ValueError("subgroup index and level must be positive")
    order = sl2_order(principal(sub.level, R))
    if order % sub.index:
        raise ValueError(
            f"malformed descriptor: index {sub.index} does not divide |SL(2, O/{sub.level})| = {order}"
        )
    ratio = order // sub.index
    g = math.gcd(q, ratio)
    return Hypothesis(
        "gcd_condition",
        g == 1,
        {"sl2_order": order, "index": sub.index, "ratio": ratio, "gcd": g},
    )


def certify_noncongruence(d: int, q: int, subgroup: SubgroupDescriptor = BIANCHI) -> Certificate:
    R = _bianchi_ring(d)
    if not is_prime(q):
        raise ValueError(f"q = {q} is not prime")
    hyps = [
        Hypothesis("ring_not_Z", True, {"d": d}),
        _splitting_hypothesis(R, q),
        _rank_hypothesis(d, q, subgroup),
        _gcd_hypothesis(R, q, subgroup),
    ]
    whole = subgroup.is_whole_group
    if whole:
        hyps.append(Hypothesis("d_exclusion", d not in (-1, -3), {"d": d, "excluded": [-1, -3]}))
    cert = Certificate(d, q, subgroup.as_dict(), hyps, "Undetermined", criteria=["index-q quotient at level q"])
    if whole:
        cert.criteria.append("abelianization maps onto Z/q")
        if d in (-1, -3):
            cert.verdict = "NotApplicable"
            cert.reason = f"d = {d} is excluded for the whole Bianchi group"
            return cert
    failed = [h for h in hyps if not h.checked]
    if failed:
        h = failed[0]
        detail = f"{h.witness.get('type')}" if h.name == "splitting" else str(h.witness)
        cert.reason = f"hypothesis {h.name} fails: {detail}"
        return cert
    cert.verdict = "NonCongruence"
    cert.index = subgroup.index * q
    cert.level = q if whole else f"divides {subgroup.level * q}"
    return cert


# -- PSL(2, O/2) and its squares -------------------------------------------


@dataclass
class Lemma61Report:
    d: int
    kind: str
    order: int
    expected_order: int
    checks: dict[str, bool]
    data: dict[str, Any]

    @property
    def ok(self) -> bool:
        return self.order == self.expected_order and all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "branch": self.kind,
            "order": self.order,
            "expected_order": self.expected_order,
            "checks": self.checks,
            "data": self.data,
            "ok": self.ok,
            "note": "isomorphism type not certified; checks cover order, squares, commutators and normality",
        }


def _elementary_abelian(H: FiniteMatrixGroup, p: int, order: int) -> bool:
    return H.order == order and is_abelian(H) and exponent(H) == p


def _codes(*mats: Mat2) -> np.ndarray:
    return np.array([M.code for M in mats], dtype=np.int64)


def verify_lemma_6_1(d: int) -> Lemma61Report:
    R = _bianchi_ring(d)
    st = split_type(R, 2)
    Q = quotient_ring(R, principal(2, R))
    G = psl_quotient(sl2_enumerate(Q))
    G2 = power_subgroup(G, 2)
    Gd = derived_subgroup(G)
    gen_closure = subgroup_closure(standard_generators(Q), Q, psl=True)
    checks = {"generated_by_standard": gen_closure.same_elements(G)}
    data: dict[str, Any] = {"square_subgroup_order": G2.order, "derived_order": Gd.order}

    if st.kind == "inert":
        checks["perfect"] = Gd.same_elements(G)
        checks["squares_generate"] = G2.same_elements(G)
        checks["trivial_center"] = center(G).size == 1
        return Lemma61Report(d, "inert", G.order, 60, checks, data)

    index = G.order // G2.order
    checks["square_index_4"] = index == 4
    checks["quotient_abelian"] = Gd.issubset(G2)
    checks["quotient_exponent_2"] = bool(np.all(G2.contains_codes(power_codes(Q, G.elements, 2))))
    data["square_index"] = index
    if st.kind == "split":
        checks["derived_index_4"] = G.order // Gd.order == 4
        return Lemma61Report(d, "split", G.order, 36, checks, data)

    # ramified: (2) = pi^2
    pi = st.primes[0]
    x = QuadInt(pi.b, pi.c)
    checks["x_in_pi_not_2"] = pi.contains(x) and not principal(2, R).contains(x)
    xm, ym = T(Q, x), L(Q, x)
    z = Mat2.from_ring(Q, ONE + x, x, x, ONE + x)
    s = S(Q)
    rot = Mat2.from_ring(Q, 0, 1, -1, -1)
    A = generated_by_set(Q, _codes(xm, ym, z), True)
    X = generated_by_set(Q, _codes(s, rot), True)
    xz, yz = xm * z, ym * z
    B = generated_by_set(Q, _codes(xz, yz), True)
    D = generated_by_set(Q, _codes(xz, yz, rot), True)
    ZS = generated_by_set(Q, _codes(z, s), True)
    checks["A_elementary_abelian_8"] = _elementary_abelian(A, 2, 8)
    checks["S_R_order_6"] = X.order == 6
    checks["xz_yz_forms"] = xz == Mat2.from_ring(Q, ONE + x, 0, x, ONE + x) and yz == Mat2.from_ring(
        Q, ONE + x, x, 0, ONE + x
    )
    checks["B_invariant_under_R"] = B.conjugation_invariant([rot.code])
    checks["D_order_12"] = D.order == 12
    checks["D_normal"] = D.conjugation_invariant(G.generators)
    checks["D_index_4"] = G.order // D.order == 4
    checks["zS_klein_four"] = _elementary_abelian(ZS, 2, 4)
    checks["zS_meets_D_trivially"] = np.intersect1d(ZS.elements, D.elements).size == 1
    checks["D_equals_squares"] = D.same_elements(G2)
    data.update({"pi": format_ideal(pi, hnf=True), "x": str(x), "D_order": D.order})
    return Lemma61Report(d, "ramified", G.order, 48, checks, data)


@dataclass
class PowerStatusReport:
    d: int
    certificates: list[Certificate]

    def get(self, name: str) -> Certificate:
        for c in self.certificates:
            if c.subgroup["name"] == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {"d": self.d, "certificates": [c.as_dict() for c in self.certificates]}


def power_subgroup_status(d: int, mod_squares_order: int | None = None) -> PowerStatusReport:
    """Congruence status of B_d^2, B_d', PE_d^2, PE_d'.

    mod_squares_order optionally supplies |B_d / B_d^2| when neither the
    reference table nor the class-number bound decides it.
    """
    R = _bianchi_ring(d)
    two = split_type(R, 2)
    mod8 = d % 8
    lemma = verify_lemma_6_1(d)
    row = reference_abelianization(d)
    h = class_number(d)
    base = [
        Hypothesis("mod8_class", (mod8 == 5) == (two.kind == "inert"), {"d_mod_8": mod8, "two": two.kind}),
        Hypothesis("psl_mod_2_structure", lemma.ok, {"branch": lemma.kind, "order": lemma.order}),
    ]
    certs: list[Certificate] = []

    def cert(name, extra, verdict, reason=None, index=None, level=None, criteria=()):
        certs.append(
            Certificate(d, None, {"name": name}, base + extra, verdict, reason, index, level, list(criteria))
        )

    if mod8 == 5:
        if d == -3:
            A4 = _a4_check(R)
            quotient = [Hypothesis("quotient_A4", A4["ok"], A4), Hypothesis("reference_abelianization", True, row.as_dict())]
            cert("B_d^2", quotient, "Congruence", "B_d^2 = B_d", 1, 1, ["2 inert: no index-2 congruence quotient"])
            cert("B_d'", quotient, "Congruence", "B_d' contains B_d(sqrt -3)", 3, 3, ["2 inert: no index-2 congruence quotient"])
            cert("PE_d^2", quotient, "Congruence", "PE_d = B_d for d = -3", 1, 1, ["elementary subgroup powers, 2 inert"])
            cert("PE_d'", quotient, "Congruence", "PE_d = B_d for d = -3", 3, 3, ["elementary subgroup powers, 2 inert"])
            return PowerStatusReport(d, certs)
        src = _nontrivial_quotient_source(d, row, h)
        extra = [src, Hypothesis("d_exclusion", True, {"d": d, "excluded": [-3]})]
        ok = all(x.checked for x in base + extra)
        verdict = "NonCongruence" if ok else "Undetermined"
        labels = {"B": "2 inert: no index-2 congruence quotient", "P": "elementary subgroup powers, 2 inert"}
        for name in ("B_d^2", "B_d'", "PE_d^2", "PE_d'"):
            cert(name, extra, verdict, None if ok else "a hypothesis failed", None, 2, [labels[name[0]]])
        return PowerStatusReport(d, certs)

    # d not 5 mod 8: B_d^2 is non-congruence iff |B_d / B_d^2| >= 8
    if d in NORM_EUCLIDEAN_DS:
        size, source = row.mod_squares_order, {"source": "reference-table", "row": row.row, "mod_squares": list(row.mod_squares)}
        bound_exact = True
    elif h >= 3:
        size, source = 2**h, {"source": "class-number bound", "class_number": h, "lower_bound": 2**h}
        bound_exact = False
    elif mod_squares_order is not None:
        size, source = mod_squares_order, {"source": "user-supplied", "value": mod_squares_order}
        bound_exact = True
    else:
        size, source = None, {"source": "none", "class_number": h}
        bound_exact = False
    quotient = Hypothesis("mod_squares_order", size is not None, {**source, "value": size, "exact": bound_exact})
    if size is None:
        cert("B_d^2", [quotient], "Undetermined", "needs |B_d/B_d^2|", None, 2, ["mod-squares order versus 4"])
    elif size >= 8:
        cert("B_d^2", [quotient], "NonCongruence", None, None, 2, ["mod-squares order versus 4"])
    else:
        cert("B_d^2", [quotient], "Congruence", "B_d^2 is the preimage of D", 4, 2, ["mod-squares order versus 4"])
    pe = Hypothesis("reference_abelianization", row.mod_squares_order == 4, row.as_dict())
    cert("PE_d^2", [pe], "Congruence" if pe.checked and lemma.ok else "Undetermined", None, 4, 2, ["elementary subgroup squares, 2 not inert"])
    return PowerStatusReport(d, certs)


def _nontrivial_quotient_source(d: int, row: AbelianizationData, h: int) -> Hypothesis:
    if d in NORM_EUCLIDEAN_DS:
        return Hypothesis(
            "rank_source", row.mod_squares_order > 1, {"source": "reference-table", "row": row.row, "mod_squares": list(row.mod_squares)}
        )
    return Hypothesis(
        "rank_source", h >= 1, {"source": "class-number bound", "class_number": h, "lower_bound": 2**h}
    )


def _a4_check(R: RingSpec) -> dict:
    """PSL(2, O/(sqrt -3)) has order 12 with a normal subgroup of index 3."""
    P = split_type(R, 3).primes[0]
    Q = quotient_ring(R, P)
    G = psl_quotient(sl2_enumerate(Q))
    D = derived_subgroup(G)
    return {"prime": format_ideal(P, hnf=True), "order": G.order, "derived_index": G.order // D.order,
            "ok": G.order == 12 and G.order // D.order == 3}


# -- ramified primes q >= 5 ---------------------------------------------------


@dataclass
class AppendixAReport:
    d: int
    q: int
    pi: Ideal
    x: QuadInt
    matrices: dict[str, Mat2]
    relations: dict[str, bool]
    checks: dict[str, bool]
    kernel_order: int
    kernel_exponent: int
    psl_order: int
    derived_index: int

    @property
    def ok(self) -> bool:
        return all(self.relations.values()) and all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "q": self.q,
            "pi": format_ideal(self.pi, hnf=True),
            "x": str(self.x),
            "matrices": {k: v.rows() for k, v in self.matrices.items()},
            "relations": self.relations,
            "checks": self.checks,
            "kernel_order": self.kernel_order,
            "kernel_exponent": self.kernel_exponent,
            "psl_order": self.psl_order,
            "derived_index": self.derived_index,
            "ok": self.ok,
        }


def verify_appendix_a(d: int, q: int, caps: Caps = DEFAULT_CAPS) -> AppendixAReport:
    R = make_ring(d)
    if not is_prime(q):
        raise ValueError(f"q = {q} is not prime")
    if q < 5:
        raise ValueError(f"q = {q}: the construction needs q >= 5")
    st = split_type(R, q)
    if st.kind != "ramified":
        raise ValueError(f"q = {q} is {st.kind} in O_{d}; the construction needs q ramified")
    pi = st.primes[0]
    qI = principal(q, R)
    x = QuadInt(pi.b % q, pi.c)
    Q = quotient_ring(R, qI, caps.ring)
    r, s = L(Q, x), T(Q, x)
    u = Mat2.from_ring(Q, ONE - x, x, -x, ONE + x)
    t = r * s.inverse() * u
    Sg, Tg = S(Q), T(Q, 1)

    def conj(v: Mat2, g: Mat2) -> Mat2:
        return g * v * g.inverse()

    relations = {
        "r^S = s^-1": conj(r, Sg) == s.inverse(),
        "s^S = r^-1": conj(s, Sg) == r.inverse(),
        "t^S = t^-1": conj(t, Sg) == t.inverse(),
        "r^T = r s^-1 t^-1": conj(r, Tg) == r * s.inverse() * t.inverse(),
        "s^T = s": conj(s, Tg) == s,
        "t^T = s^2 t": conj(t, Tg) == s * s * t,
    }
    rsu = generated_by_set(Q, _codes(r, s, u), False)
    rst = generated_by_set(Q, _codes(r, s, t), False)
    K = congruence_kernel(Q, pi)
    psl_expected = sl2_order(qI) // 2
    if psl_expected > caps.group:
        raise ValueError(f"|PSL(2, O/({q}))| = {psl_expected} exceeds the group cap {caps.group}")
    G = subgroup_closure(standard_generators(Q), Q, psl=True, cap=caps.group)
    Gd = derived_subgroup(G, caps.group)
    dindex = G.order // Gd.order
    checks = {
        "x_in_pi_not_q": pi.contains(x) and not qI.contains(x),
        "t_diagonal": t == Mat2.from_ring(Q, ONE - x, 0, 0, ONE + x),
        "rsu_equals_rst": rsu.same_elements(rst),
        "rsu_elementary_abelian": _elementary_abelian(rsu, q, q**3),
        "rsu_is_congruence_kernel": rsu.same_elements(K),
        "psl_order": G.order == psl_expected,
        "no_normal_subgroup_of_index_q": dindex % q != 0,
    }
    return AppendixAReport(
        d, q, pi, x, {"r": r, "s": s, "u": u, "t": t}, relations, checks,
        rsu.order, exponent(rsu), G.order, dindex,
    )


__all__ = [
    "AbelianizationData",
    "AppendixAReport",
    "BIANCHI",
    "Certificate",
    "Hypothesis",
    "Lemma61Report",
    "NORM_EUCLIDEAN_DS",
    "PowerStatusReport",
    "SubgroupDescriptor",
    "certify_noncongruence",
    "class_number",
    "power_subgroup_status",
    "reduced_forms",
    "reference_abelianization",
    "verify_appendix_a",
    "verify_lemma_6_1",
]
