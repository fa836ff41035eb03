"""Unit tests for src.exactnum: exact values, intervals and comparison.

Covers:
- Same-kind arithmetic (fraction sums, integer products) and its laws.
- Cross-kind comparison by interval refinement, Undecided at a low ceiling.
- LIKEN_PRECISION_CEILING parsing.
- Text form: format_value / parse_value.
"""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from src.errors import KindMismatchError, UndecidedComparisonError
from src.exactnum import (
    DEFAULT_PRECISION_CEILING,
    Interval,
    Ordering,
    Undecided,
    Value,
    ValueKind,
    approx,
    format_value,
    parse_value,
    precision_ceiling,
    value_add,
    value_compare,
    value_scale,
)

rationals = st.fractions(min_value=0, max_value=1000, max_denominator=1000).map(lambda f: Value.rational(f))
logints = st.integers(min_value=1, max_value=10**6).map(Value.logint)
same_kind_values = st.one_of(st.tuples(rationals, rationals, rationals), st.tuples(logints, logints, logints))


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

class TestValue:
    """Value construction and validation."""

    def test_rational_normalizes_to_fraction(self):
        v = Value.rational(6, 4)
        assert v.key == Fraction(3, 2)
        assert v == Value.rational("3/2")

    def test_negative_rational_rejected(self):
        with pytest.raises(ValueError):
            Value.rational(-1)

    def test_logint_needs_positive_int(self):
        with pytest.raises(ValueError):
            Value.logint(0)
        with pytest.raises(TypeError):
            Value(ValueKind.LOGINT, 2.0)

    def test_zero_of_each_kind(self):
        assert Value.zero(ValueKind.RATIONAL).is_zero
        assert Value.zero(ValueKind.LOGINT) == Value.logint(1)

    def test_interval_rejects_empty(self):
        with pytest.raises(ValueError):
            Interval(Fraction(2), Fraction(1), 64)


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------

class TestArithmetic:
    """value_add and value_scale."""

    def test_logint_sum_is_product(self):
        assert Value.logint(2) + Value.logint(3) == Value.logint(6)

    def test_rational_sum(self):
        assert value_add(Value.rational(1, 2), Value.rational(1, 3)) == Value.rational(5, 6)

    def test_cross_kind_sum_raises(self):
        with pytest.raises(KindMismatchError):
            value_add(Value.logint(2), Value.rational(1))

    def test_scale(self):
        assert value_scale(3, Value.logint(2)) == Value.logint(8)
        assert value_scale(4, Value.rational(3, 4)) == Value.rational(3)
        assert value_scale(0, Value.rational(5)).is_zero

    @pytest.mark.parametrize("n", [-1, True, 1.5])
    def test_scale_rejects_non_naturals(self, n):
        with pytest.raises(ValueError):
            value_scale(n, Value.rational(1))


@pytest.mark.property
class TestArithmeticLaws:
    """Commutative monoid laws of same-kind addition."""

    @given(same_kind_values)
    def test_commutative_and_associative(self, triple):
        u, v, w = triple
        assert u + v == v + u
        assert (u + v) + w == u + (v + w)

    @given(same_kind_values)
    def test_zero_is_identity_and_sum_is_monotone(self, triple):
        u, v, _ = triple
        zero = Value.zero(u.kind)
        assert u + zero == u
        assert value_compare(u, u + v) is not Ordering.GREATER

    @given(same_kind_values)
    def test_compare_is_antisymmetric(self, triple):
        u, v, _ = triple
        forward = value_compare(u, v)
        backward = value_compare(v, u)
        assert forward.value == -backward.value


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------

class TestCompare:
    """Cross-kind comparison by interval refinement."""

    def test_logint_against_rational(self):
        assert value_compare(Value.logint(3), Value.rational(11, 10)) is Ordering.LESS
        assert value_compare(Value.logint(3), Value.rational(1)) is Ordering.GREATER

    def test_zero_against_zero_across_kinds(self):
        assert value_compare(Value.logint(1), Value.rational(0)) is Ordering.EQUAL
        assert value_compare(Value.logint(1), Value.rational(1, 10**9)) is Ordering.LESS

    def test_low_ceiling_is_undecided(self):
        result = value_compare(Value.logint(3), Value.rational(1), ceiling=32)
        assert isinstance(result, Undecided)

    def test_operator_raises_when_undecided(self, monkeypatch):
        monkeypatch.setenv("LIKEN_PRECISION_CEILING", "32")
        with pytest.raises(UndecidedComparisonError):
            _ = Value.logint(3) < Value.rational(2)

    @pytest.mark.property
    @given(st.integers(min_value=2, max_value=10**6), st.fractions(min_value=0, max_value=20, max_denominator=10**4))
    def test_cross_kind_agrees_with_float(self, k, q):
        assume(abs(math.log(k) - float(q)) > 1e-6)
        expected = Ordering.LESS if math.log(k) < float(q) else Ordering.GREATER
        assert value_compare(Value.logint(k), Value.rational(q)) is expected

    def test_approx_intervals_are_nested_and_contain_ln(self):
        v = Value.logint(10)
        coarse, fine = approx(v, 64), approx(v, 256)
        assert coarse.encloses(fine)
        with mpmath.workprec(600):
            man, exp = mpmath.log(mpmath.mpf(10)).man_exp
        reference = Fraction(int(man), 1 << -exp)
        # reference is within 2^-590 of ln(10); the fine radius is far wider
        assert fine.lo < reference < fine.hi

    def test_approx_rational_is_a_point(self):
        interval = approx(Value.rational(1, 3), 64)
        assert interval.lo == interval.hi == Fraction(1, 3)


class TestPrecisionCeiling:
    """LIKEN_PRECISION_CEILING parsing."""

    def test_default(self, monkeypatch):
        monkeypatch.delenv("LIKEN_PRECISION_CEILING", raising=False)
        assert precision_ceiling() == DEFAULT_PRECISION_CEILING == 4096

    @pytest.mark.parametrize("raw, expected", [("128", 128), ("abc", 4096), ("-5", 4096), ("  ", 4096)])
    def test_override(self, monkeypatch, raw, expected):
        monkeypatch.setenv("LIKEN_PRECISION_CEILING", raw)
        assert precision_ceiling() == expected


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------

class TestTextForm:
    """format_value / parse_value."""

    @pytest.mark.parametrize(
        "text, value",
        [
            ("ln(12)", Value.logint(12)),
            ("7/3", Value.rational(7, 3)),
            ("5", Value.rational(5)),
            (" ln( 1 ) ", Value.logint(1)),
        ],
    )
    def test_parse(self, text, value):
        assert parse_value(text) == value

    def test_format(self):
        assert format_value(Value.rational(8)) == "8/1"
        assert format_value(Value.logint(9)) == "ln(9)"
        assert str(Value.rational(6, 4)) == "3/2"

    @pytest.mark.parametrize("text", ["1/0", "abc", "ln(x)", "-3"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            parse_value(text)
