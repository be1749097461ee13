from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from traceseries.errors import MalformedSeriesError, SpecializationPoleError
from traceseries.exactpoly import (
    ONE, ONE_POLY, Monomial, Polynomial, RationalSeries, TruncatedSeries,
    divide_by_one_minus, expand_box, expand_truncated, invert_grading_vars, mul_truncated,
    pole_order_at_one, specialize, t, z,
)

T1, T2, T3 = t(1, 1), t(1, 2), t(2, 1)


def mono(**kw):
    names = {"a": T1, "b": T2, "c": T3, "z1": z(1), "z2": z(2)}
    return Monomial([(names[k], e) for k, e in kw.items()])


def test_var_printing():
    assert str(t(1, 2, 3)) == "t(1,2,3)"
    assert str(z(4)) == "z4"
    assert str(Monomial([(T2, 2), (T1, 1)])) == "t(1,1,1)*t(1,2,1)^2"


def test_monomial_arithmetic():
    m = mono(a=2, b=1)
    assert (m * m.inverse()).is_one()
    assert m / mono(a=1) == mono(a=1, b=1)
    assert (m ** 3).degree == 9
    p, q = mono(a=2, b=-1).split_signs()
    assert p == mono(a=2) and q == mono(b=1)
    assert mono(z1=1, z2=-1, a=1).torus_degree == 0
    assert mono(z1=1, z2=-1, a=1).grading_part() == mono(a=1)


def test_polynomial_ring_ops():
    x, y = Polynomial.var(T1), Polynomial.var(T2)
    assert (x + y) ** 2 == x * x + 2 * x * y + y * y
    assert (x - x).is_zero()
    assert ((x + 1) * (x - 1)).coefficient(ONE) == -1
    assert Polynomial.const(Fraction(1, 2)) * 2 == ONE_POLY


def test_torus_constant_term():
    p = Polynomial({mono(z1=1, z2=-1): 1, mono(a=1): 3, mono(z1=-1, z2=1, b=1): 2})
    assert p.torus_constant_term() == Polynomial({mono(a=1): 3})


def test_divide_by_one_minus():
    m = mono(a=1, b=1)
    p = Polynomial({ONE: 1, m ** 3: -1})
    q = divide_by_one_minus(p, m)
    assert q == Polynomial({ONE: 1, m: 1, m ** 2: 1})
    assert divide_by_one_minus(Polynomial({ONE: 1, m: 1}), m) is None


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-4, 4), max_size=6),
       st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda e: e != (0, 0)))
def test_division_inverts_multiplication(terms, exps):
    p = Polynomial({mono(a=i, b=j): c for (i, j), c in terms.items()})
    m = mono(a=exps[0], b=exps[1])
    assert divide_by_one_minus(p * (ONE_POLY - Polynomial.mono(m)), m) == p


def test_canonical_form_cancels_binomials():
    a = mono(a=1)
    r1 = RationalSeries(ONE_POLY, {a: 1})
    r2 = RationalSeries(Polynomial({ONE: 1, a: 1}), {a ** 2: 1})
    assert r1 == r2
    # only (1 - m) divisors of the numerator cancel; (1 + t) / (1 - t^2) keeps its form
    assert r2.factors == ((a ** 2, 1),)
    r3 = RationalSeries(Polynomial({ONE: 1, a: -1}), {a: 1, mono(b=1): 1})
    assert r3.factors == ((mono(b=1), 1),) and r3.numerator == ONE_POLY


def test_inverted_factor_is_reoriented():
    a = mono(a=1)
    r = RationalSeries(ONE_POLY, {a.inverse(): 1})
    # 1/(1 - 1/t) = -t/(1 - t)
    assert r == RationalSeries(Polynomial({a: -1}), {a: 1})


def test_mixed_sign_factor_rejected():
    with pytest.raises(MalformedSeriesError):
        RationalSeries(ONE_POLY, {mono(a=1, b=-1): 1})


def test_text_form():
    r = RationalSeries(Polynomial({ONE: 2, mono(b=1): 1, mono(c=1): 1}), {mono(a=1): 1, mono(b=1, c=1): 2})
    assert r.to_text() == "(t(1,2,1) + t(2,1,1) + 2) / ((1 - t(1,1,1))*(1 - t(1,2,1)*t(2,1,1))^2)"


def test_expand_truncated_geometric():
    r = RationalSeries(ONE_POLY, {mono(a=1): 1, mono(b=1): 1})
    s = expand_truncated(r, 2)
    want = Polynomial({ONE: 1, mono(a=1): 1, mono(b=1): 1, mono(a=2): 1, mono(a=1, b=1): 1, mono(b=2): 1})
    assert s == TruncatedSeries(want, 2)
    assert s.to_text().endswith("+ O(deg 3)")


def test_series_arithmetic_matches_expansion():
    r = RationalSeries(ONE_POLY, {mono(a=1): 1})
    s = RationalSeries(Polynomial({ONE: 1, mono(b=1): 1}), {mono(a=1, b=1): 1})
    assert expand_truncated(r * s, 5) == expand_truncated(r, 5) * expand_truncated(s, 5)
    assert expand_truncated(r + s, 5) == expand_truncated(r, 5) + expand_truncated(s, 5)


def test_specialize_pole():
    r = RationalSeries(ONE_POLY, {mono(b=1, c=1): 1})
    with pytest.raises(SpecializationPoleError):
        specialize(r, {T2: ONE, T3: ONE})
    collapsed = specialize(r, {T2: mono(a=1), T3: mono(a=1)})
    assert collapsed == RationalSeries(ONE_POLY, {mono(a=2): 1})


def test_invert_grading_vars():
    r = RationalSeries(ONE_POLY, {mono(a=1): 1})
    assert invert_grading_vars(r) == r.scale(-1, mono(a=1))


def test_expand_box_matches_full_expansion():
    r = RationalSeries(Polynomial({ONE: 1, mono(a=1, b=1): -1}), {mono(a=1): 1, mono(b=1): 2})
    box = expand_box(r, 2)
    full = expand_truncated(r, 4).poly
    kept = Polynomial({m: c for m, c in full.items() if all(e <= 2 for _, e in m.items())})
    assert box == kept


def test_pole_order_at_one():
    a = mono(a=1)
    r = RationalSeries(Polynomial({ONE: 1, a: 1}), {a: 2, a ** 2: 1})
    # (1+t)/((1-t)^2 (1-t^2)) = 1/(1-t)^3
    assert pole_order_at_one(r, T1) == 3


def test_mul_truncated_respects_cap():
    x = Polynomial({ONE: 1, mono(a=1): 1})
    assert mul_truncated(x, x, 1) == Polynomial({ONE: 1, mono(a=1): 2})


def test_json_layout():
    r = RationalSeries(ONE_POLY, {mono(a=1): 1}, coeff=Fraction(1, 2))
    assert r.to_json() == {"variables": ["t(1,1,1)"], "prefactor": [[0], 1, 2],
                           "numerator": [[[0], 1, 1]], "factors": [[[1], 1]]}
