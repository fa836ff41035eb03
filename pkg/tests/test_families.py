"""Unit tests for src.families: generator families and spec configs."""
from __future__ import annotations

import itertools
import json

import pytest

from src.errors import EmptyListError, MixedKindsError, NonPositiveError, NotIncreasingError, SpecConfigError
from src.exactnum import Value, ValueKind
from src.families import (
    SpecKind,
    family_custom,
    family_custom_logint,
    family_custom_rational,
    family_modclass,
    family_nstar,
    family_numerical,
    load_spec_config,
    minimalize,
    modclass_irreducibles,
    spec_from_config,
)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _first_keys(spec, n):
    gens = spec.generators()
    return [gens.key(k) for k in range(1, n + 1)]


# ---------------------------------------------------------------------------
# N* and the classes 1 mod p
# ---------------------------------------------------------------------------

class TestLogFamilies:
    """nstar and modclass generators."""

    def test_nstar_generators_are_log_primes(self):
        spec = family_nstar()
        assert spec.value_kind is ValueKind.LOGINT
        assert _first_keys(spec, 6) == [2, 3, 5, 7, 11, 13]
        assert not spec.is_finite
        assert spec.unique_factorization

    def test_modclass_two_skips_two(self):
        assert _first_keys(family_modclass(2), 5) == [3, 5, 7, 11, 13]

    @pytest.mark.parametrize(
        "p, expected",
        [
            (3, [4, 7, 10, 13, 19, 22, 25, 31]),
            (4, [5, 9, 13, 17, 21, 29, 33, 37, 41, 49]),
        ],
    )
    def test_modclass_irreducibles(self, p, expected):
        assert list(itertools.islice(modclass_irreducibles(p), len(expected))) == expected

    def test_modclass_uniqueness_flag(self):
        assert family_modclass(1).unique_factorization
        assert family_modclass(3).unique_factorization is None

    @pytest.mark.parametrize("p", [0, -2, True])
    def test_modclass_rejects_bad_p(self, p):
        with pytest.raises(SpecConfigError):
            family_modclass(p)


# ---------------------------------------------------------------------------
# Numerical semigroups
# ---------------------------------------------------------------------------

class TestNumerical:
    """family_numerical and minimalize."""

    def test_minimalize_reports_decomposition(self):
        assert minimalize([3, 4, 5, 7]) == ((3, 4, 5), ((7, (3, 4)),))
        assert minimalize([6, 9, 20, 12]) == ((6, 9, 20), ((12, (6, 6)),))

    def test_spec_fields(self):
        spec = family_numerical([6, 9, 20])
        assert spec.minimal_gens == (6, 9, 20)
        assert spec.gcd == 1 and spec.cofinite
        assert spec.finite_values == (Value.rational(6), Value.rational(9), Value.rational(20))
        assert spec.name == "numerical<6,9,20>"

    def test_not_cofinite(self):
        spec = family_numerical([4, 6])
        assert spec.gcd == 2
        assert spec.cofinite is False

    def test_errors(self):
        with pytest.raises(EmptyListError):
            family_numerical([])
        with pytest.raises(NonPositiveError) as info:
            family_numerical([3, 0])
        assert info.value.index == 2


# ---------------------------------------------------------------------------
# Custom specs
# ---------------------------------------------------------------------------

class TestCustom:
    """family_custom and its typed wrappers."""

    def test_logint_integer_generators(self):
        spec = family_custom_logint([2, 3])
        assert spec.kind is SpecKind.CUSTOM_LOGINT
        assert spec.integer_generators == (2, 3)

    def test_not_increasing(self):
        with pytest.raises(NotIncreasingError) as info:
            family_custom_logint([3, 2])
        assert info.value.index == 2

    def test_logint_rejects_one(self):
        with pytest.raises(NonPositiveError):
            family_custom_logint([1, 2])

    def test_mixed_kinds(self):
        with pytest.raises(MixedKindsError):
            family_custom([Value.logint(2), Value.rational(3)])

    def test_rational_parses_text(self):
        spec = family_custom_rational(["1/2", 3])
        assert spec.finite_values == (Value.rational(1, 2), Value.rational(3))
        assert spec.to_config() == {"kind": "custom_rational", "values": ["1/2", "3/1"]}

    def test_rational_bad_entry(self):
        with pytest.raises(SpecConfigError):
            family_custom_rational(["x"])

    def test_stream_needs_kind(self):
        with pytest.raises(SpecConfigError):
            family_custom(lambda: iter([Value.logint(2)]))

    def test_stream_has_no_config(self):
        spec = family_custom(lambda: (Value.logint(2**k) for k in itertools.count(1)), kind=ValueKind.LOGINT)
        assert _first_keys(spec, 3) == [2, 4, 8]
        with pytest.raises(SpecConfigError):
            spec.to_config()

    def test_stream_validated_lazily(self):
        spec = family_custom(lambda: iter([Value.logint(5), Value.logint(3)]), kind=ValueKind.LOGINT)
        gens = spec.generators()
        assert gens.key(1) == 5
        with pytest.raises(NotIncreasingError):
            gens.get(2)


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

class TestConfig:
    """spec_from_config / load_spec_config / to_config."""

    @pytest.mark.parametrize(
        "config",
        [
            {"kind": "nstar"},
            {"kind": "modclass", "p": 2},
            {"kind": "numerical", "gens": [3, 4, 5]},
            {"kind": "custom_logint", "ints": [2, 3, 7]},
            {"kind": "custom_rational", "values": ["1/2", "3/1"]},
        ],
    )
    def test_config_rebuilds_equal_spec(self, config):
        spec = spec_from_config(config)
        assert spec_from_config(spec.to_config()) == spec

    def test_comma_string_lists(self):
        assert spec_from_config({"kind": "numerical", "gens": "3,4,5"}).minimal_gens == (3, 4, 5)

    @pytest.mark.parametrize(
        "config",
        [{"kind": "nope"}, {"kind": "modclass"}, {"kind": "numerical", "gens": 5}, {"kind": "numerical", "gens": ["a"]}, []],
    )
    def test_bad_configs(self, config):
        with pytest.raises(SpecConfigError):
            spec_from_config(config)

    def test_load_spec_config(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"kind": "modclass", "p": 4}), encoding="utf-8")
        assert load_spec_config(path).name == "modclass(4)"

    def test_load_spec_config_missing(self, tmp_path):
        with pytest.raises(SpecConfigError):
            load_spec_config(tmp_path / "absent.json")
