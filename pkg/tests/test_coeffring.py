from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modtr.coeffring import ONE, PI2, ZERO, CoeffElem, EvenPoly, all_exponents, scale_lengths

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def coeffs(draw):
    terms = draw(st.dictionaries(st.integers(0, 3), fracs, max_size=3))
    out = CoeffElem(terms)
    if draw(st.booleans()):
        out = out + CoeffElem.symbol("u_0_0", draw(st.integers(1, 2)), draw(fracs))
    return out


@st.composite
def polys(draw, nvars=2):
    keys = st.tuples(*[st.integers(0, 2)] * nvars)
    terms = draw(st.dictionaries(keys, coeffs(), max_size=4))
    return EvenPoly(nvars, terms)


@settings(max_examples=60, deadline=None)
@given(coeffs(), coeffs(), coeffs())
def test_coeff_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a and a * ONE == a
    assert a - a == ZERO


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys())
def test_poly_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == EvenPoly.zero(2)


@settings(max_examples=40, deadline=None)
@given(polys())
def test_json_round_trip(p):
    assert EvenPoly.loads(p.dumps()) == p
    assert EvenPoly.from_json(p.to_json()) == p


@settings(max_examples=40, deadline=None)
@given(coeffs())
def test_coeff_json_round_trip(c):
    assert CoeffElem.from_json(c.to_json()) == c


def test_evaluation_uses_pi_squared(pi2):
    p = EvenPoly(1, {(0,): CoeffElem.pi2(1, Fraction(1, 12)), (1,): Fraction(1, 48)})
    assert p.eval([2.0], pi2) == pytest.approx(pi2 / 12 + 4 / 48, rel=1e-15)


def test_symbols_need_values():
    c = CoeffElem.symbol("s") + 1
    with pytest.raises(KeyError):
        c.evaluate(1.0)
    assert c.evaluate(1.0, {"s": 2.0}) == 3.0
    assert c.substitute({"s": CoeffElem.const(5)}) == CoeffElem.const(6)


def test_rescale_and_grading():
    p = EvenPoly(2, {(0, 0): PI2, (1, 0): 1, (1, 1): 3})
    assert p.rescale(2) == EvenPoly(2, {(0, 0): PI2, (1, 0): 4, (1, 1): 48})
    graded = scale_lengths(p)
    assert sorted(graded) == [0, 2, 4]
    assert sum(graded.values(), EvenPoly.zero(2)) == p


def test_permute_and_symmetry():
    p = EvenPoly(2, {(1, 0): 1})
    assert not p.is_symmetric()
    assert (p + p.permute([1, 0])).is_symmetric()


def test_top_degree_and_coefficient():
    p = EvenPoly(2, {(0, 0): PI2, (1, 0): 1, (0, 1): 2})
    assert p.top_degree_part() == EvenPoly(2, {(1, 0): 1, (0, 1): 2})
    assert p.coefficient((0, 1)) == CoeffElem.const(2)
    assert p.coefficient((5, 5)) == ZERO


def test_bad_exponents_rejected():
    with pytest.raises(ValueError):
        EvenPoly(2, {(1,): 1})
    with pytest.raises(ValueError):
        EvenPoly(1, {(-1,): 1})
    with pytest.raises(ValueError):
        EvenPoly(0)


def test_all_exponents_count():
    assert len(list(all_exponents(2, 2))) == 6


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_eval_is_a_homomorphism(p, q, x):
    sym = {"u_0_0": 0.7}

    def ev(r):
        return r.eval(x, 9.8696044010893586, sym)

    a, b = ev(p), ev(q)
    scale = 1 + abs(a) + abs(b) + abs(a * b)
    assert abs(ev(p + q) - (a + b)) <= 1e-12 * scale
    assert abs(ev(p * q) - a * b) <= 1e-12 * scale
