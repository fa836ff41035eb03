"""Unit tests for src.morphisms: homothety, order isomorphism on prefixes, psi."""
from __future__ import annotations

from fractions import Fraction

import pytest

from src.errors import (
    EmptySpecError,
    IndexOutOfRangeError,
    LengthMismatchError,
    NonUniqueError,
    UnknownGeneratorIndexError,
)
from src.exactnum import Value, ValueKind
from src.families import (
    family_custom,
    family_custom_logint,
    family_custom_rational,
    family_modclass,
    family_nstar,
    family_numerical,
)
from src.liken_core import ExponentVec
from src.morphisms import (
    HomothetyOutcome,
    compare_likens,
    homothety_test,
    order_iso_prefix_test,
    perfect_power_root,
    psi_map,
)
from tests.liken_helpers import modclass_prefix, nstar_prefix, numerical_prefix


class TestPerfectPowerRoot:
    """perfect_power_root."""

    @pytest.mark.parametrize("n, expected", [(64, (2, 6)), (12, (12, 1)), (36, (6, 2)), (2, (2, 1)), (243, (3, 5))])
    def test_roots(self, n, expected):
        assert perfect_power_root(n) == expected

    def test_rejects_one(self):
        with pytest.raises(ValueError):
            perfect_power_root(1)


# ---------------------------------------------------------------------------
# Homothety
# ---------------------------------------------------------------------------

class TestHomothety:
    """homothety_test outcomes per value kind."""

    def test_rational_scaling(self):
        result = homothety_test(family_numerical([3, 4, 5]), family_numerical([6, 8, 10]))
        assert result.outcome is HomothetyOutcome.ISOMORPHIC
        assert result.ratio == Fraction(1, 2)
        assert result.to_dict()["ratio"] == "1/2"
        assert result.finite

    def test_rational_mismatch(self):
        result = homothety_test(family_numerical([3, 4, 5]), family_numerical([6, 8, 11]))
        assert result.outcome is HomothetyOutcome.NOT_ISOMORPHIC
        assert result.witness_index == 3

    def test_nstar_with_itself(self):
        result = homothety_test(family_nstar(), family_nstar(), k_max=10)
        assert result.isomorphic
        assert result.ratio_text == "1/1"
        assert result.compared == 10
        assert not result.finite

    def test_logint_power_identity(self):
        result = homothety_test(family_custom_logint([2, 3]), family_custom_logint([4, 9]))
        assert result.isomorphic
        assert result.ratio == Fraction(1, 2)
        assert [r["check"] for r in result.records] == ["2^2 == 4^1", "3^2 == 9^1"]

    def test_nstar_against_modclass_two(self):
        result = homothety_test(family_nstar(), family_modclass(2), k_max=5)
        assert result.outcome is HomothetyOutcome.NOT_ISOMORPHIC
        assert result.witness_index == 2
        assert result.precision_bits is not None

    def test_generator_counts_differ(self):
        result = homothety_test(family_custom_logint([2, 3]), family_custom_logint([2, 3, 5]))
        assert result.outcome is HomothetyOutcome.NOT_ISOMORPHIC
        assert result.witness_index == 3 and result.compared == 2

    def test_mixed_kinds_single_generator(self):
        result = homothety_test(family_custom_rational([1]), family_custom_logint([2]))
        assert result.isomorphic
        assert result.detail == "single generator each"
        assert result.ratio is None and result.ratio_text == "1/1/ln(2)"

    def test_equal_cross_ratio_across_kinds_is_undecided(self):
        # 1 * ln 4 == 2 * ln 2 exactly; intervals never separate them
        result = homothety_test(family_custom_rational([1, 2]), family_custom_logint([2, 4]), precision=256)
        assert result.outcome is HomothetyOutcome.UNDECIDED
        assert result.witness_index == 2

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            homothety_test(family_nstar(), family_nstar(), k_max=0)
        with pytest.raises(EmptySpecError):
            homothety_test(family_custom([], kind=ValueKind.LOGINT), family_nstar())


# ---------------------------------------------------------------------------
# Order isomorphism and psi
# ---------------------------------------------------------------------------

class TestOrderIso:
    """order_iso_prefix_test."""

    def test_nstar_with_itself(self):
        result = order_iso_prefix_test(nstar_prefix(50), nstar_prefix(50))
        assert result.consistent and result.checked == 49

    def test_nstar_against_modclass_two(self):
        result = order_iso_prefix_test(nstar_prefix(10), modclass_prefix(2, 10))
        assert not result.consistent
        assert result.mismatch_index == 3 and result.checked == 2
        assert result.rep_a == ExponentVec.unit(1).plus_unit(1)
        assert result.rep_b == ExponentVec.unit(3)
        assert result.to_dict()["rep_a"] == "1^2"

    def test_errors(self):
        with pytest.raises(LengthMismatchError):
            order_iso_prefix_test(nstar_prefix(5), nstar_prefix(6))
        with pytest.raises(NonUniqueError):
            order_iso_prefix_test(numerical_prefix([3, 4, 5], 10), numerical_prefix([3, 4, 5], 10))


class TestPsi:
    """psi_map."""

    def test_identity_on_nstar(self):
        assert psi_map(nstar_prefix(20), family_nstar(), 9) == Value.logint(10)

    def test_onto_modclass_two(self):
        source = nstar_prefix(20)
        # x_3 = 2 a_1 in N*; 2 ln 3 in the class 1 mod 2
        assert psi_map(source, family_modclass(2), 3) == Value.logint(9)
        assert psi_map(source, family_modclass(2), 0) == Value.logint(1)

    def test_errors(self):
        source = nstar_prefix(5)
        with pytest.raises(IndexOutOfRangeError):
            psi_map(source, family_nstar(), 5)
        with pytest.raises(UnknownGeneratorIndexError):
            psi_map(source, family_custom_logint([2]), 2)


# ---------------------------------------------------------------------------
# Combined comparison
# ---------------------------------------------------------------------------

class TestCompareLikens:
    """compare_likens."""

    def test_isomorphic(self):
        comparison = compare_likens(family_nstar(), family_nstar(), count=30)
        assert comparison.isomorphic
        assert comparison.order.consistent

    def test_not_isomorphic(self):
        comparison = compare_likens(family_nstar(), family_modclass(2), count=10, k_max=5)
        assert not comparison.isomorphic
        assert comparison.order.mismatch_index == 3
        payload = comparison.to_dict()
        assert payload["homothety"]["outcome"] == "not_isomorphic"
        assert payload["order_skipped"] is None

    def test_order_skipped_without_uniqueness(self):
        comparison = compare_likens(family_numerical([3, 4, 5]), family_numerical([6, 8, 10]), count=10)
        assert comparison.isomorphic
        assert comparison.order is None
        assert comparison.order_skipped == "non-unique representations"
