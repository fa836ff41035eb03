"""Exact values for liken elements: rationals and logarithms of integers.

Provides:
- ``ValueKind``: the two value kinds with their additive key arithmetic
  (``combine``/``power``): fraction sums for rationals, integer products for
  logarithms of integers.
- ``Value``: an immutable, hashable exact quantity. Same-kind comparison is
  always decided exactly; cross-kind comparison is resolved by interval
  refinement in ``value_compare``.
- ``Interval``: closed interval with rational endpoints containing a value.
- ``value_compare`` / ``value_add`` / ``value_scale`` / ``approx``.
- ``format_value`` / ``parse_value``: the textual form ``p/q`` and
  ``ln(k)``, parsed back bit-exactly.

Dependencies:
    - ``fractions.Fraction`` for exact rationals.
    - ``mpmath`` for directed approximations of ``ln(k)``; every mpmath result
      is converted to an exact dyadic ``Fraction`` before it is used.
    - ``os`` for the ``LIKEN_PRECISION_CEILING`` override.
"""

from __future__ import annotations

import dataclasses
import enum
import os
import re
from fractions import Fraction
from typing import Optional, Union

import mpmath

from src.errors import KindMismatchError, UndecidedComparisonError

DEFAULT_PRECISION_CEILING = 4096
_INITIAL_COMPARE_BITS = 64
_GUARD_BITS = 40

Key = Union[Fraction, int]


class ValueKind(str, enum.Enum):
    RATIONAL = "rational"
    LOGINT = "logint"

    @property
    def zero_key(self) -> Key:
        return Fraction(0) if self is ValueKind.RATIONAL else 1

    def combine(self, a: Key, b: Key) -> Key:
        """Key of the sum of two values of this kind."""
        if self is ValueKind.RATIONAL:
            return a + b
        return a * b

    def power(self, key: Key, n: int) -> Key:
        """Key of the n-fold sum of a value of this kind."""
        if self is ValueKind.RATIONAL:
            return key * n
        return key**n


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclasses.dataclass(frozen=True)
class Undecided:
    """Cross-kind comparison that did not separate before the ceiling."""

    precision_bits: int


@dataclasses.dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` guaranteed to contain an exact value.

    Invariants:
        - ``lo <= hi``.
    """

    lo: Fraction
    hi: Fraction
    precision_bits: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __mul__(self, other: "Interval") -> "Interval":
        # endpoints are non-negative for every liken value
        return Interval(
            self.lo * other.lo,
            self.hi * other.hi,
            min(self.precision_bits, other.precision_bits),
        )

    def separation(self, other: "Interval") -> Optional[Ordering]:
        """Ordering of the enclosed values if the intervals are disjoint."""
        if self.hi < other.lo:
            return Ordering.LESS
        if self.lo > other.hi:
            return Ordering.GREATER
        if self.lo == self.hi == other.lo == other.hi:
            return Ordering.EQUAL
        return None


@dataclasses.dataclass(frozen=True)
class Value:
    """Exact non-negative quantity: a rational, or ``ln(k)`` for an integer k.

    Attributes:
        kind: ``ValueKind.RATIONAL`` or ``ValueKind.LOGINT``.
        key: ``Fraction`` (rational) or ``int`` k >= 1 (logarithm). Equal
            values of one kind have equal keys, and the same-kind order of
            values is the order of their keys.

    Examples:
        >>> Value.logint(2) + Value.logint(3) == Value.logint(6)
        True
        >>> str(Value.rational(8))
        '8/1'
    """

    kind: ValueKind
    key: Key

    def __post_init__(self) -> None:
        if self.kind is ValueKind.RATIONAL:
            if not isinstance(self.key, Fraction):
                object.__setattr__(self, "key", Fraction(self.key))
            if self.key < 0:
                raise ValueError(f"rational value must be non-negative, got {self.key}")
        else:
            if isinstance(self.key, bool) or not isinstance(self.key, int):
                raise TypeError("logint key must be an int")
            if self.key < 1:
                raise ValueError(f"logint argument must be >= 1, got {self.key}")

    @classmethod
    def rational(cls, numerator: Union[int, Fraction, str], denominator: int = 1) -> "Value":
        return cls(ValueKind.RATIONAL, Fraction(numerator) / denominator)

    @classmethod
    def logint(cls, k: int) -> "Value":
        return cls(ValueKind.LOGINT, k)

    @classmethod
    def zero(cls, kind: ValueKind) -> "Value":
        return cls(kind, kind.zero_key)

    @property
    def is_zero(self) -> bool:
        return self.key == self.kind.zero_key

    def __add__(self, other: "Value") -> "Value":
        return value_add(self, other)

    def __lt__(self, other: "Value") -> bool:
        return _decided(self, other) is Ordering.LESS

    def __le__(self, other: "Value") -> bool:
        return _decided(self, other) is not Ordering.GREATER

    def __gt__(self, other: "Value") -> bool:
        return _decided(self, other) is Ordering.GREATER

    def __ge__(self, other: "Value") -> bool:
        return _decided(self, other) is not Ordering.LESS

    def __str__(self) -> str:
        return format_value(self)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def precision_ceiling() -> int:
    """Cross-kind comparison ceiling in bits, read from the environment.

    Returns:
        ``LIKEN_PRECISION_CEILING`` when it is a positive integer, otherwise
        ``DEFAULT_PRECISION_CEILING``.
    """
    raw = os.environ.get("LIKEN_PRECISION_CEILING")
    if raw is None or not raw.strip():
        return DEFAULT_PRECISION_CEILING
    try:
        bits = int(raw)
    except ValueError:
        return DEFAULT_PRECISION_CEILING
    return bits if bits > 0 else DEFAULT_PRECISION_CEILING


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------

def value_add(u: Value, v: Value) -> Value:
    """Exact sum of two same-kind values.

    Raises:
        KindMismatchError: If ``u`` and ``v`` are of different kinds.

    Complexity:
        O(M(bits)): one big-integer product or fraction sum.
    """
    if u.kind is not v.kind:
        raise KindMismatchError(f"cannot add {u.kind.value} and {v.kind.value} values")
    return Value(u.kind, u.kind.combine(u.key, v.key))


def value_scale(n: int, v: Value) -> Value:
    """The n-fold sum of ``v``; ``n = 0`` gives the zero of ``v``'s kind."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"scale factor must be a natural number, got {n!r}")
    return Value(v.kind, v.kind.power(v.key, n))


# ---------------------------------------------------------------------------
# Approximation and comparison
# ---------------------------------------------------------------------------

def _mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = x.man_exp
    if exp >= 0:
        return Fraction(int(man) << exp)
    return Fraction(int(man), 1 << -exp)


def approx(v: Value, precision_bits: int) -> Interval:
    """Enclose ``v`` in an interval of width <= 2^-bits * max(1, v).

    Rationals are returned as exact point intervals. For ``ln(k)`` the
    midpoint is computed by mpmath with guard bits and the radius
    ``max(1, bitlen(k)) / 2^(bits+3)`` dominates the evaluation error, so
    the interval always contains ``ln(k)`` and intervals for increasing
    ``precision_bits`` are nested.

    Args:
        v: The value to enclose.
        precision_bits: Requested precision, >= 1.

    Returns:
        An ``Interval`` with dyadic endpoints for logarithms.

    Raises:
        ValueError: If ``precision_bits < 1``.

    Complexity:
        O(M(bits) log bits) for the mpmath logarithm.
    """
    if precision_bits < 1:
        raise ValueError("precision_bits must be >= 1")
    if v.kind is ValueKind.RATIONAL:
        return Interval(v.key, v.key, precision_bits)
    k = v.key
    if k == 1:
        return Interval(Fraction(0), Fraction(0), precision_bits)
    with mpmath.workprec(precision_bits + _GUARD_BITS + k.bit_length().bit_length()):
        mid = _mpf_to_fraction(mpmath.log(mpmath.mpf(k)))
    radius = Fraction(max(1, k.bit_length()), 1 << (precision_bits + 3))
    return Interval(mid - radius, mid + radius, precision_bits)


def value_compare(
    u: Value, v: Value, ceiling: Optional[int] = None
) -> Union[Ordering, Undecided]:
    """Compare two values exactly, or by interval refinement across kinds.

    Same-kind comparison compares keys (cross-multiplication of fractions,
    integer comparison for logarithms). Cross-kind comparison starts at 64
    bits and doubles the precision until the enclosures separate or the
    ceiling is exceeded.

    Args:
        u: Left value.
        v: Right value.
        ceiling: Maximum precision in bits; defaults to ``precision_ceiling()``.

    Returns:
        An ``Ordering``, or ``Undecided(bits)`` with the last precision tried.

    Examples:
        >>> value_compare(Value.logint(3), Value.rational(11, 10))
        <Ordering.LESS: -1>
    """
    if u.kind is v.kind:
        if u.key < v.key:
            return Ordering.LESS
        if u.key > v.key:
            return Ordering.GREATER
        return Ordering.EQUAL
    if u.is_zero or v.is_zero:
        if u.is_zero and v.is_zero:
            return Ordering.EQUAL
        return Ordering.LESS if u.is_zero else Ordering.GREATER
    limit = ceiling if ceiling is not None else precision_ceiling()
    bits = _INITIAL_COMPARE_BITS
    tried = bits
    while bits <= limit:
        tried = bits
        found = approx(u, bits).separation(approx(v, bits))
        if found is not None and found is not Ordering.EQUAL:
            return found
        bits *= 2
    return Undecided(tried)


def _decided(u: Value, v: Value) -> Ordering:
    result = value_compare(u, v)
    if isinstance(result, Undecided):
        raise UndecidedComparisonError(result.precision_bits)
    return result


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------

_LOG_RE = re.compile(r"^\s*ln\(\s*(\d+)\s*\)\s*$")
_RATIONAL_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+)\s*)?$")


def format_value(v: Value) -> str:
    if v.kind is ValueKind.LOGINT:
        return f"ln({v.key})"
    return f"{v.key.numerator}/{v.key.denominator}"


def parse_value(text: str) -> Value:
    """Parse ``p/q``, ``p`` or ``ln(k)`` back into an exact ``Value``.

    Raises:
        ValueError: If ``text`` matches neither form or has a zero denominator.
    """
    match = _LOG_RE.match(text)
    if match:
        return Value.logint(int(match.group(1)))
    match = _RATIONAL_RE.match(text)
    if match:
        den = int(match.group(2)) if match.group(2) is not None else 1
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Value.rational(int(match.group(1)), den)
    raise ValueError(f"not a value: {text!r}")


def approx_text(v: Value, digits: int = 12) -> str:
    """Fixed-point display string of ``v`` (display only, never used in logic)."""
    enclosure = approx(v, 64)
    mid = (enclosure.lo + enclosure.hi) / 2
    return f"{float(mid):.{digits}f}"
