from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bianchi.ideals import CapacityError, ideals_up_to, principal, split_type, unit_ideal
from bianchi.quadring import QuadInt, make_ring
from bianchi.resring import TABLE_LIMIT, quotient_ring, reduce, residue_inverse

import oracles

DS = [-1, -2, -3, -5, -7, -11]


def test_sizes_and_fields():
    R1, R3 = make_ring(-1), make_ring(-3)
    assert quotient_ring(R1, principal(2, R1)).size == 4
    F4 = quotient_ring(R3, principal(2, R3))
    assert F4.size == 4 and F4.is_field()
    F2 = quotient_ring(R1, principal(QuadInt(1, 1), R1))
    assert F2.size == 2 and F2.is_field()
    assert not quotient_ring(R1, principal(2, R1)).is_field()


def test_reduce_examples():
    R = make_ring(-1)
    Q2 = quotient_ring(R, principal(2, R))
    assert (reduce(QuadInt(0, 0), Q2).u, reduce(QuadInt(0, 0), Q2).v) == (0, 0)
    r = reduce(QuadInt(3, 5), Q2)
    assert (r.u, r.v) == (1, 1)
    Qpi = quotient_ring(R, principal(QuadInt(1, 1), R))
    r = reduce(QuadInt(0, 1), Qpi)
    assert (r.u, r.v) == (1, 0)


def test_inverse_examples():
    R1, R3 = make_ring(-1), make_ring(-3)
    Q = quotient_ring(R1, principal(2, R1))
    assert residue_inverse(Q.reduce(1)) == Q.reduce(1)
    assert residue_inverse(Q.reduce(QuadInt(1, 1))) is None
    F4 = quotient_ring(R3, principal(2, R3))
    w = F4.reduce(QuadInt(0, 1))
    inv = residue_inverse(w)
    assert inv is not None and w * inv == F4.reduce(1)


def test_unit_ideal_and_cap_rejected():
    R = make_ring(-1)
    with pytest.raises(ValueError):
        quotient_ring(R, unit_ideal(R))
    with pytest.raises(CapacityError):
        quotient_ring(R, principal(101, R))
    assert quotient_ring(R, principal(101, R), cap=20000).size == 10201


@pytest.mark.parametrize("d", DS)
def test_tables_match_elementwise_arithmetic(d):
    R = make_ring(d)
    for I in ideals_up_to(R, 12):
        Q = quotient_ring(R, I)
        M, A, N = Q.mul_table, Q.add_table, Q.neg_table
        for i in range(Q.size):
            x = Q.element(i)
            assert Q.index(x.lift()) == i
            assert N[i] == (-x).index
            for j in range(Q.size):
                y = Q.element(j)
                assert M[i, j] == (x * y).index
                assert A[i, j] == (x + y).index
                assert Q.sub_table[i, j] == (x - y).index


def test_table_limit_guard():
    R = make_ring(-1)
    Q = quotient_ring(R, principal(67, R), cap=TABLE_LIMIT + 1000)
    assert Q.size > TABLE_LIMIT
    with pytest.raises(CapacityError):
        Q.mul_table
    # vectorized products still work without tables
    x = np.arange(10, dtype=np.int64)
    assert Q.mul_arrays(x, x).shape == (10,)


@st.composite
def ring_ideal_pair(draw):
    d = draw(st.sampled_from(DS))
    R = make_ring(d)
    ideals = ideals_up_to(R, 20)
    A = draw(st.sampled_from(ideals))
    B = draw(st.sampled_from(ideals))
    return R, A, B


@given(ring_ideal_pair())
def test_crt_map_is_bijective_for_coprime_ideals(data):
    R, A, B = data
    if not (A + B).is_unit() or (A * B).norm > 400:
        return
    AB = A * B
    Q = quotient_ring(R, AB)
    to_a = Q.reduction_map(quotient_ring(R, A))
    to_b = Q.reduction_map(quotient_ring(R, B))
    pairs = set(zip(to_a.tolist(), to_b.tolist()))
    assert len(pairs) == Q.size == A.norm * B.norm


@given(ring_ideal_pair())
def test_reduction_map_is_ring_homomorphism(data):
    R, A, B = data
    big = A * B
    if big.norm > 400:
        return
    Qb, Qs = quotient_ring(R, big), quotient_ring(R, A)
    f = Qb.reduction_map(Qs)
    assert np.array_equal(f[Qb.mul_table], Qs.mul_table[np.ix_(f, f)])
    assert np.array_equal(f[Qb.add_table], Qs.add_table[np.ix_(f, f)])


def test_reduction_map_needs_divisor():
    R = make_ring(-1)
    with pytest.raises(ValueError):
        quotient_ring(R, principal(2, R)).reduction_map(quotient_ring(R, principal(3, R)))


def _primes_up_to(R, bound):
    out = []
    for p in range(2, bound + 1):
        if all(p % k for k in range(2, p)):
            out += [P for P in split_type(R, p).primes if P.norm <= bound]
    return out


@pytest.mark.parametrize("d", DS)
def test_unit_counts_for_prime_powers(d):
    R = make_ring(d)
    for P in _primes_up_to(R, 49):
        Q = quotient_ring(R, P)
        assert Q.is_field()
        assert int(Q.unit_mask.sum()) == P.norm - 1
        if P.norm <= 7:
            P2 = P * P
            units = int(quotient_ring(R, P2).unit_mask.sum())
            assert units == P2.norm - P.norm == oracles.unit_count(d, P2.hnf)


def test_ideal_mask():
    R = make_ring(-1)
    Q = quotient_ring(R, principal(6, R))
    J = principal(QuadInt(1, 1), R)
    mask = Q.ideal_mask(J)
    assert int(mask.sum()) == Q.size // J.norm
    assert all(J.contains(Q.element(i).lift()) == bool(mask[i]) for i in range(Q.size))
