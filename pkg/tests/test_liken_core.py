"""Unit tests for src.liken_core: enumeration, omega maps, sub-likens, gaps.

The heap enumeration is checked against the brute-force grid oracle on
random generator lists (hypothesis) and on the fixed families.
"""
from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.errors import (
    EmptySpecError,
    IndexOutOfRangeError,
    KindMismatchError,
    NonUniqueError,
    NotAnElementError,
    NotIncreasingError,
    UnknownGeneratorIndexError,
)
from src.exactnum import Value, ValueKind
from src.families import family_custom, family_custom_logint, family_custom_rational, family_nstar, family_numerical
from src.liken_core import (
    Count,
    ExponentVec,
    SublikenTracker,
    ValueBound,
    brute_force_prefix,
    enumerate_prefix,
    format_reps,
    gaps,
    irreducibles,
    omega,
    omega_inv,
    parse_exponent_vec,
    parse_reps,
    subliken_z,
    to_multiplicative,
)
from tests.liken_helpers import factorization_vec, modclass_prefix, multiplicative_values, nstar_prefix, numerical_prefix


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _vec(**kw):
    return ExponentVec.from_mapping({int(k[1:]): m for k, m in kw.items()})


def _same_prefix(a, b):
    assert a.keys == b.keys
    assert [e.reps for e in a.elements] == [e.reps for e in b.elements]


# ---------------------------------------------------------------------------
# Exponent vectors
# ---------------------------------------------------------------------------

class TestExponentVec:
    """Sparse vector arithmetic and text form."""

    def test_plus_unit_and_add(self):
        v = ExponentVec.unit(2).plus_unit(1).plus_unit(2)
        assert v.entries == ((1, 1), (2, 2))
        assert v + ExponentVec.unit(3) == _vec(k1=1, k2=2, k3=1)
        assert v.degree == 3 and v.support == frozenset({1, 2})

    def test_unit_index(self):
        assert ExponentVec.unit(4).unit_index == 4
        assert _vec(k1=2).unit_index is None
        assert ExponentVec().unit_index is None

    def test_text_form(self):
        assert parse_exponent_vec("1^2*3^1") == _vec(k1=2, k3=1)
        assert parse_exponent_vec("") == ExponentVec()
        assert format_reps(parse_reps("2^2;1^1*3^1")) == "1^1*3^1;2^2"
        with pytest.raises(ValueError):
            parse_exponent_vec("1^x")


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

class TestEnumerate:
    """enumerate_prefix on the fixed families."""

    def test_nstar_is_log_of_integers(self):
        prefix = nstar_prefix(11)
        assert multiplicative_values(prefix) == list(range(1, 12))
        assert prefix.generator_keys == (2, 3, 5, 7, 11)
        assert prefix.irreducible_indices == (1, 2, 4, 6, 10)
        assert all(prefix[n].rep == factorization_vec(n + 1) for n in range(11))

    def test_modclass_two(self):
        assert multiplicative_values(modclass_prefix(2, 5)) == [1, 3, 5, 7, 9]

    def test_numerical_non_unique_element(self):
        prefix = numerical_prefix([3, 4, 5], 7)
        assert prefix.keys == tuple(Fraction(v) for v in (0, 3, 4, 5, 6, 7, 8))
        eight = prefix[6]
        assert format_reps(eight.reps) == "1^1*3^1;2^2"
        assert not prefix.is_unique
        assert prefix.first_non_unique() is eight
        with pytest.raises(NonUniqueError):
            _ = eight.rep

    def test_value_bound_same_kind(self):
        prefix = enumerate_prefix(family_nstar(), ValueBound(Value.logint(10)))
        assert len(prefix) == 10

    def test_value_bound_cross_kind(self):
        # ln k <= 2 iff k <= 7
        prefix = enumerate_prefix(family_nstar(), ValueBound(Value.rational(2)))
        assert multiplicative_values(prefix) == list(range(1, 8))

    def test_finite_spec_runs_past_its_generators(self):
        prefix = enumerate_prefix(family_custom_logint([2]), Count(5))
        assert multiplicative_values(prefix) == [1, 2, 4, 8, 16]

    def test_bad_limits(self):
        with pytest.raises(ValueError):
            enumerate_prefix(family_nstar(), Count(0))
        with pytest.raises(EmptySpecError):
            enumerate_prefix(family_custom([], kind=ValueKind.RATIONAL), Count(3))


@pytest.mark.property
class TestOracle:
    """Heap enumeration against the brute-force grid oracle."""

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(min_value=2, max_value=60), min_size=1, max_size=4, unique=True).map(sorted))
    def test_logint_lists(self, ints):
        spec = family_custom_logint(ints)
        bound = Value.logint(3000)
        _same_prefix(enumerate_prefix(spec, ValueBound(bound)), brute_force_prefix(spec, bound))

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(
            st.fractions(min_value=Fraction(1, 2), max_value=12, max_denominator=3),
            min_size=1,
            max_size=4,
            unique=True,
        ).map(sorted)
    )
    def test_rational_lists(self, values):
        spec = family_custom_rational([f"{v.numerator}/{v.denominator}" for v in values])
        bound = Value.rational(12)
        _same_prefix(enumerate_prefix(spec, ValueBound(bound)), brute_force_prefix(spec, bound))

    def test_nstar_and_numerical(self):
        spec = family_nstar()
        _same_prefix(
            enumerate_prefix(spec, ValueBound(Value.logint(500))), brute_force_prefix(spec, Value.logint(500))
        )
        spec = family_numerical([6, 9, 20])
        _same_prefix(
            enumerate_prefix(spec, ValueBound(Value.rational(60))), brute_force_prefix(spec, Value.rational(60))
        )

    def test_oracle_kind_mismatch(self):
        with pytest.raises(KindMismatchError):
            brute_force_prefix(family_nstar(), Value.rational(3))


# ---------------------------------------------------------------------------
# Omega maps
# ---------------------------------------------------------------------------

class TestOmega:
    """omega / omega_inv."""

    def test_omega(self):
        assert omega(family_nstar(), _vec(k1=2, k2=1)) == Value.logint(12)
        assert omega(family_numerical([3, 4, 5]), _vec(k2=2)) == Value.rational(8)
        assert omega(family_nstar(), ExponentVec()) == Value.logint(1)

    def test_omega_unknown_index(self):
        with pytest.raises(UnknownGeneratorIndexError) as info:
            omega(family_numerical([3, 4, 5]), ExponentVec.unit(4))
        assert info.value.index == 4

    def test_omega_inv(self):
        prefix = nstar_prefix(20)
        assert omega_inv(prefix, Value.logint(12)) == _vec(k1=2, k2=1)

    def test_omega_inv_errors(self):
        prefix = numerical_prefix([3, 4, 5], 10)
        with pytest.raises(NotAnElementError):
            omega_inv(prefix, Value.rational(2))
        with pytest.raises(NonUniqueError):
            omega_inv(prefix, Value.rational(8))
        with pytest.raises(IndexOutOfRangeError):
            omega_inv(prefix, Value.rational(1000))
        with pytest.raises(KindMismatchError):
            omega_inv(prefix, Value.logint(3))

    def test_irreducibles(self):
        assert irreducibles(nstar_prefix(11)) == [1, 2, 4, 6, 10]
        assert irreducibles(numerical_prefix([3, 4, 5], 10)) == [1, 2, 3]
        assert irreducibles(modclass_prefix(2, 10)) == [1, 2, 3, 5, 6, 8, 9]


# ---------------------------------------------------------------------------
# Sub-likens
# ---------------------------------------------------------------------------

class TestSubliken:
    """SublikenTracker and subliken_z."""

    def test_tracker_rebuilds_when_generator_lands_inside(self):
        tracker = SublikenTracker(ValueKind.RATIONAL)
        assert tracker.next_above(Fraction(0)) is None
        tracker.add_generator(1, Fraction(3))
        assert tracker.next_above(Fraction(7)) == (Fraction(9), frozenset({_vec(k1=3)}))
        tracker.add_generator(2, Fraction(5))
        assert tracker.next_above(Fraction(7)) == (Fraction(8), frozenset({_vec(k1=1, k2=1)}))
        assert tracker.next_above(Fraction(9)) == (Fraction(10), frozenset({_vec(k2=2)}))

    def test_tracker_rejects_decreasing(self):
        tracker = SublikenTracker(ValueKind.LOGINT)
        tracker.add_generator(1, 5)
        with pytest.raises(NotIncreasingError):
            tracker.add_generator(2, 3)

    def test_z_in_modclass_two(self):
        prefix = modclass_prefix(2, 20)
        z = subliken_z(prefix, 2)
        assert z.value == Value.logint(9)
        assert z.index == 4
        assert z.rep == _vec(k1=2)

    def test_z_in_nstar(self):
        z = subliken_z(nstar_prefix(20), 3)
        assert z.value == Value.logint(6)
        assert z.index == 5

    def test_z_index_range(self):
        with pytest.raises(IndexOutOfRangeError):
            subliken_z(nstar_prefix(5), 5)
        with pytest.raises(IndexOutOfRangeError):
            subliken_z(nstar_prefix(5), 0)


# ---------------------------------------------------------------------------
# Gaps and the multiplicative model
# ---------------------------------------------------------------------------

class TestGaps:
    """gaps / to_multiplicative."""

    def test_logint_gaps_are_ratios(self):
        found = gaps(nstar_prefix(5))
        assert [g.exact for g in found] == [Fraction(2), Fraction(3, 2), Fraction(4, 3), Fraction(5, 4)]
        assert found[0].compare(found[1]).value == 1

    def test_rational_gaps_are_differences(self):
        found = gaps(numerical_prefix([3, 4, 5], 4))
        assert [g.exact for g in found] == [Fraction(3), Fraction(1), Fraction(1)]

    def test_gaps_need_two_elements(self):
        with pytest.raises(IndexOutOfRangeError):
            gaps(nstar_prefix(1))

    def test_to_multiplicative(self):
        prefix = nstar_prefix(10)
        assert to_multiplicative(prefix, 5) == (6, 6)
        with pytest.raises(KindMismatchError):
            to_multiplicative(numerical_prefix([3, 4], 3), 1)
        with pytest.raises(IndexOutOfRangeError):
            to_multiplicative(prefix, 10)
