from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from bianchi.quadring import QuadInt, make_ring, mul, norm, parse_quadint, square_factor

import oracles

DS = [-1, -2, -3, -5, -6, -7, -11, -15, -19, -23, 2, 3, 5, 13]

ints = st.integers(-50, 50)
elements = st.builds(QuadInt, ints, ints)


@pytest.mark.parametrize(
    "d, const, lin, disc, rule",
    [(-1, -1, 0, -4, "w^2 = -1"), (-3, -1, 1, -3, "w^2 = w-1"), (-5, -5, 0, -20, None), (5, 1, 1, 5, None)],
)
def test_ring_conventions(d, const, lin, disc, rule):
    R = make_ring(d)
    assert (R.w2_const, R.w2_lin, R.disc) == (const, lin, disc)
    if rule:
        assert R.w_rule == rule


@pytest.mark.parametrize("d", [12, 0, 1, -4, 18, -27])
def test_make_ring_rejects(d):
    with pytest.raises(ValueError):
        make_ring(d)


def test_square_factor_named():
    assert square_factor(12) == 2
    assert square_factor(-45) == 3
    assert square_factor(-7) is None
    with pytest.raises(ValueError, match="2\\^2"):
        make_ring(12)


@pytest.mark.parametrize(
    "d, x, y, out",
    [(-1, QuadInt(0, 1), QuadInt(0, 1), QuadInt(-1, 0)),
     (-3, QuadInt(0, 1), QuadInt(0, 1), QuadInt(-1, 1)),
     (-5, QuadInt(1, 1), QuadInt(1, -1), QuadInt(6, 0))],
)
def test_mul_examples(d, x, y, out):
    assert mul(x, y, make_ring(d)) == out


def test_norm_examples():
    assert norm(QuadInt(1, 1), make_ring(-1)) == 2
    for d in DS:
        assert norm(QuadInt(1, 0), make_ring(d)) == 1


def test_min_poly_kills_w():
    for d in DS:
        R = make_ring(d)
        s, t = R.min_poly()
        w = QuadInt(0, 1)
        assert R.mul(w, w) - w.scale(s) - QuadInt(t, 0) == QuadInt(0, 0)
        assert R.trace(w) == s and R.norm(w) == -t


@given(st.sampled_from(DS), elements, elements)
def test_mul_matches_oracle(d, x, y):
    z = mul(x, y, make_ring(d))
    assert (z.a, z.b) == oracles.mul((x.a, x.b), (y.a, y.b), d)


@given(st.sampled_from(DS), elements, elements, elements)
def test_ring_axioms(d, x, y, z):
    R = make_ring(d)
    assert R.mul(x, y) == R.mul(y, x)
    assert R.mul(R.mul(x, y), z) == R.mul(x, R.mul(y, z))
    assert R.mul(x, y + z) == R.mul(x, y) + R.mul(x, z)
    assert R.mul(x, QuadInt(1, 0)) == x
    assert x + (-x) == QuadInt(0, 0)


@given(st.sampled_from(DS), elements, elements)
def test_norm_multiplicative(d, x, y):
    R = make_ring(d)
    assert R.norm(R.mul(x, y)) == R.norm(x) * R.norm(y)
    assert R.mul(x, R.conj(x)) == QuadInt(R.norm(x), 0)


@given(st.sampled_from([d for d in DS if d < 0]), elements)
def test_norm_positive_definite(d, x):
    n = make_ring(d).norm(x)
    assert n >= 0 and (n == 0) == x.is_zero()


@given(st.sampled_from(DS), elements, st.integers(0, 6))
def test_pow_is_repeated_mul(d, x, k):
    R = make_ring(d)
    acc = QuadInt(1, 0)
    for _ in range(k):
        acc = R.mul(acc, x)
    assert R.pow(x, k) == acc


@pytest.mark.parametrize(
    "text, val",
    [("3", QuadInt(3, 0)), ("w", QuadInt(0, 1)), ("-w", QuadInt(0, -1)), ("1-w", QuadInt(1, -1)),
     ("2+3*w", QuadInt(2, 3)), ("5*w", QuadInt(0, 5)), (" -4 + w ", QuadInt(-4, 1))],
)
def test_parse_quadint(text, val):
    assert parse_quadint(text) == val


@given(elements)
def test_quadint_str_roundtrip(x):
    assert parse_quadint(str(x)) == x


@pytest.mark.parametrize("text", ["", "x", "2+", "w*w"])
def test_parse_quadint_rejects(text):
    with pytest.raises(ValueError):
        parse_quadint(text)
