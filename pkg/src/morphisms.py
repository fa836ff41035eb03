"""Isomorphism tests between likens.

Two likens with uniqueness are isomorphic exactly when their generator
sequences are homothetic, a_k = lambda * b_k for one lambda > 0, with the
generators aligned by position (both sequences increase).

- ``homothety_test`` decides homothety up to ``k_max`` generators with a
  tri-state result: exact certificates where the kinds allow them, interval
  refutation otherwise, and Undecided when neither applies.
- ``order_iso_prefix_test`` compares the representation of x_n and y_n
  index by index; the first difference shows that the order isomorphism is
  not additive.
- ``psi_map`` transports an element's representation to another spec.

Dependencies:
    fractions, src.exactnum (approx, precision_ceiling), src.liken_core,
    src.families, src.errors.
"""

from __future__ import annotations

import dataclasses
import enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from src.errors import (
    EmptySpecError,
    IndexOutOfRangeError,
    InternalConsistencyError,
    LengthMismatchError,
)
from src.exactnum import Ordering, Value, ValueKind, approx, format_value, precision_ceiling
from src.families import LikenSpec
from src.liken_core import (
    Count,
    ExponentVec,
    GeneratorSeq,
    Prefix,
    enumerate_prefix,
    format_exponent_vec,
    omega,
)

_START_BITS = 64
MAX_RECORDS = 50


class HomothetyOutcome(str, enum.Enum):
    ISOMORPHIC = "isomorphic"
    NOT_ISOMORPHIC = "not_isomorphic"
    UNDECIDED = "undecided"


@dataclasses.dataclass(frozen=True)
class HomothetyResult:
    """Outcome of a homothety test of ``a`` against ``b`` (a_k = lambda * b_k).

    Attributes:
        outcome: Isomorphic, NotIsomorphic or Undecided.
        ratio: Exact lambda when it is rational.
        ratio_text: lambda as text: ``"p/q"`` or a symbolic ``"ln(4)/ln(3)"``.
        compared: Number of generator positions examined.
        witness_index: Generator position refuting the homothety.
        detail: Human-readable explanation.
        precision_bits: Last interval precision used, when intervals were used.
        finite: True when either liken is finite-dimensional.
        records: Per-generator verification records (capped).
    """

    outcome: HomothetyOutcome
    ratio: Optional[Fraction] = None
    ratio_text: Optional[str] = None
    compared: int = 0
    witness_index: Optional[int] = None
    detail: str = ""
    precision_bits: Optional[int] = None
    finite: bool = False
    records: Tuple[Dict[str, Any], ...] = ()

    @property
    def isomorphic(self) -> bool:
        return self.outcome is HomothetyOutcome.ISOMORPHIC

    def to_dict(self) -> Dict[str, Any]:
        return {
            "outcome": self.outcome.value,
            "ratio": None if self.ratio is None else f"{self.ratio.numerator}/{self.ratio.denominator}",
            "ratio_text": self.ratio_text,
            "compared": self.compared,
            "witness_index": self.witness_index,
            "detail": self.detail,
            "precision_bits": self.precision_bits,
            "finite": self.finite,
            "records": list(self.records),
        }


# ---------------------------------------------------------------------------
# Integer roots
# ---------------------------------------------------------------------------

def _iroot(n: int, e: int) -> int:
    """floor(n ** (1/e)) for n >= 1, exact."""
    lo, hi = 1, 1 << (n.bit_length() // e + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**e <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo


def perfect_power_root(n: int) -> Tuple[int, int]:
    """(r, e) with n = r^e and e maximal; r is not itself a perfect power.

    Examples:
        >>> perfect_power_root(64)
        (2, 6)
        >>> perfect_power_root(12)
        (12, 1)
    """
    if n < 2:
        raise ValueError(f"perfect_power_root needs n >= 2, got {n}")
    for e in range(n.bit_length(), 1, -1):
        r = _iroot(n, e)
        if r > 1 and r**e == n:
            return r, e
    return n, 1


def _log_ratio(g: int, h: int) -> Optional[Fraction]:
    """ln(g)/ln(h) when it is rational, else None."""
    rg, eg = perfect_power_root(g)
    rh, eh = perfect_power_root(h)
    if rg != rh:
        return None
    return Fraction(eg, eh)


# ---------------------------------------------------------------------------
# Homothety
# ---------------------------------------------------------------------------

def _interval_cross_compare(
    a1: Value, bk: Value, ak: Value, b1: Value, ceiling: int
) -> Tuple[Optional[Ordering], int]:
    """Order of a_1*b_k against a_k*b_1 by interval refinement, or None."""
    bits = _START_BITS
    tried = bits
    while bits <= ceiling:
        tried = bits
        left = approx(a1, bits) * approx(bk, bits)
        right = approx(ak, bits) * approx(b1, bits)
        found = left.separation(right)
        if found is not None and found is not Ordering.EQUAL:
            return found, tried
        bits *= 2
    return None, tried


def _pairs(gens_a: GeneratorSeq, gens_b: GeneratorSeq, k_max: int) -> Tuple[List[Tuple[Value, Value]], Optional[int]]:
    """Aligned generator pairs up to k_max and the first position where one list ends early."""
    pairs: List[Tuple[Value, Value]] = []
    for k in range(1, k_max + 1):
        a, b = gens_a.get(k), gens_b.get(k)
        if a is None and b is None:
            break
        if a is None or b is None:
            return pairs, k
        pairs.append((a, b))
    return pairs, None


def homothety_test(
    spec_a: LikenSpec, spec_b: LikenSpec, k_max: int = 10, precision: Optional[int] = None
) -> HomothetyResult:
    """Test a_k = lambda * b_k for k <= k_max.

    - Rational against rational: lambda = a_1 / b_1, every k verified exactly.
    - Logarithm against logarithm: lambda = p/q is rational iff g_1 and h_1
      are powers of one base; then g_k^q = h_k^p is verified for every k.
      Otherwise each cross ratio a_1*b_k against a_k*b_1 is decided exactly
      when both log ratios are rational, else refuted by interval refinement.
    - Mixed kinds: interval refinement only.

    Args:
        spec_a: Left liken.
        spec_b: Right liken.
        k_max: Number of generator positions to test, >= 1.
        precision: Interval precision ceiling in bits (default
            ``precision_ceiling()``).

    Returns:
        A ``HomothetyResult``; lambda maps b onto a.

    Raises:
        EmptySpecError: A spec has no generator.
        ValueError: ``k_max < 1``.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    gens_a, gens_b = spec_a.generators(), spec_b.generators()
    for spec, gens in ((spec_a, gens_a), (spec_b, gens_b)):
        if gens.get(1) is None:
            raise EmptySpecError(f"spec {spec.name!r} has no generators")
    finite = spec_a.is_finite or spec_b.is_finite
    pairs, ended = _pairs(gens_a, gens_b, k_max)
    if ended is not None:
        return HomothetyResult(
            HomothetyOutcome.NOT_ISOMORPHIC,
            compared=len(pairs),
            witness_index=ended,
            detail=f"generator counts differ at position {ended}",
            finite=finite,
        )
    ceiling = precision if precision is not None else precision_ceiling()
    a1, b1 = pairs[0]
    if a1.kind is ValueKind.RATIONAL and b1.kind is ValueKind.RATIONAL:
        return _rational_homothety(pairs, finite)
    if a1.kind is ValueKind.LOGINT and b1.kind is ValueKind.LOGINT:
        ratio = _log_ratio(a1.key, b1.key)
        if ratio is not None:
            return _logint_rational_homothety(pairs, ratio, finite)
    return _cross_ratio_homothety(pairs, ceiling, finite)


def _rational_homothety(pairs: List[Tuple[Value, Value]], finite: bool) -> HomothetyResult:
    ratio = pairs[0][0].key / pairs[0][1].key
    records = []
    for k, (a, b) in enumerate(pairs, start=1):
        if a.key != ratio * b.key:
            return HomothetyResult(
                HomothetyOutcome.NOT_ISOMORPHIC,
                ratio=None,
                compared=k,
                witness_index=k,
                detail=f"a_{k} = {format_value(a)} != {ratio} * {format_value(b)}",
                finite=finite,
            )
        if len(records) < MAX_RECORDS:
            records.append({"k": k, "a": format_value(a), "b": format_value(b), "check": "a_k == lambda * b_k"})
    return HomothetyResult(
        HomothetyOutcome.ISOMORPHIC,
        ratio=ratio,
        ratio_text=f"{ratio.numerator}/{ratio.denominator}",
        compared=len(pairs),
        detail="exact rational homothety",
        finite=finite,
        records=tuple(records),
    )


def _logint_rational_homothety(pairs: List[Tuple[Value, Value]], ratio: Fraction, finite: bool) -> HomothetyResult:
    p, q = ratio.numerator, ratio.denominator
    records = []
    for k, (a, b) in enumerate(pairs, start=1):
        if a.key**q != b.key**p:
            return HomothetyResult(
                HomothetyOutcome.NOT_ISOMORPHIC,
                compared=k,
                witness_index=k,
                detail=f"{a.key}^{q} != {b.key}^{p}: a_{k} is not {ratio} * b_{k}",
                finite=finite,
            )
        if len(records) < MAX_RECORDS:
            records.append({"k": k, "a": format_value(a), "b": format_value(b), "check": f"{a.key}^{q} == {b.key}^{p}"})
    return HomothetyResult(
        HomothetyOutcome.ISOMORPHIC,
        ratio=ratio,
        ratio_text=f"{p}/{q}",
        compared=len(pairs),
        detail="exact integer power identity",
        finite=finite,
        records=tuple(records),
    )


def _cross_ratio_homothety(pairs: List[Tuple[Value, Value]], ceiling: int, finite: bool) -> HomothetyResult:
    a1, b1 = pairs[0]
    symbolic = f"{format_value(a1)}/{format_value(b1)}"
    records = []
    undecided_at: Optional[int] = None
    bits_used: Optional[int] = None
    for k, (a, b) in enumerate(pairs[1:], start=2):
        exact = _exact_cross_ratio(a1, b, a, b1)
        if exact is None:
            order, bits = _interval_cross_compare(a1, b, a, b1, ceiling)
            bits_used = bits if bits_used is None else max(bits_used, bits)
            if order is None:
                undecided_at = undecided_at or k
                continue
            how = f"intervals at {bits} bits"
        else:
            order = exact
            how = "exact log ratios"
        if order is not Ordering.EQUAL:
            return HomothetyResult(
                HomothetyOutcome.NOT_ISOMORPHIC,
                compared=k,
                witness_index=k,
                detail=f"a_1*b_{k} {'<' if order is Ordering.LESS else '>'} a_{k}*b_1 ({how})",
                precision_bits=bits_used,
                finite=finite,
            )
        if len(records) < MAX_RECORDS:
            records.append({"k": k, "a": format_value(a), "b": format_value(b), "check": "a_1*b_k == a_k*b_1"})
    if undecided_at is not None:
        return HomothetyResult(
            HomothetyOutcome.UNDECIDED,
            ratio_text=symbolic,
            compared=len(pairs),
            witness_index=undecided_at,
            detail=f"cross ratio at position {undecided_at} not separated",
            precision_bits=bits_used,
            finite=finite,
        )
    detail = "single generator each" if len(pairs) == 1 else "cross ratios equal exactly"
    return HomothetyResult(
        HomothetyOutcome.ISOMORPHIC,
        ratio_text=symbolic,
        compared=len(pairs),
        detail=detail,
        finite=finite,
        records=tuple(records),
    )


def _exact_cross_ratio(a1: Value, bk: Value, ak: Value, b1: Value) -> Optional[Ordering]:
    """Compare a_1*b_k with a_k*b_1 exactly when it reduces to rational log ratios.

    For logarithms, a_1*b_k = a_k*b_1 iff ln g_k/ln g_1 = ln h_k/ln h_1; each
    side is either rational (common perfect-power base) or irrational. Two
    rational sides compare exactly, one rational side against an irrational
    one is unequal; the order then still needs intervals.
    """
    if not (a1.kind is ak.kind is ValueKind.LOGINT and b1.kind is bk.kind is ValueKind.LOGINT):
        return None
    left = _log_ratio(ak.key, a1.key)
    right = _log_ratio(bk.key, b1.key)
    if left is None or right is None:
        return None
    # a_1*b_k vs a_k*b_1  <=>  right vs left after dividing by a_1*b_1 > 0
    if right < left:
        return Ordering.LESS
    if right > left:
        return Ordering.GREATER
    return Ordering.EQUAL


# ---------------------------------------------------------------------------
# Order isomorphism on prefixes
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class OrderIsoResult:
    """ConsistentUpTo(N) when ``consistent``, else the first mismatch."""

    consistent: bool
    checked: int
    mismatch_index: Optional[int] = None
    rep_a: Optional[ExponentVec] = None
    rep_b: Optional[ExponentVec] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "consistent": self.consistent,
            "checked_up_to": self.checked,
            "mismatch_index": self.mismatch_index,
            "rep_a": None if self.rep_a is None else format_exponent_vec(self.rep_a),
            "rep_b": None if self.rep_b is None else format_exponent_vec(self.rep_b),
        }


def order_iso_prefix_test(prefix_a: Prefix, prefix_b: Prefix) -> OrderIsoResult:
    """Compare the representations of x_n and y_n for every n.

    Raises:
        LengthMismatchError: Prefix lengths differ.
        NonUniqueError: An element of either prefix has several representations.
    """
    if len(prefix_a) != len(prefix_b):
        raise LengthMismatchError(f"prefix lengths {len(prefix_a)} and {len(prefix_b)} differ")
    for n in range(len(prefix_a)):
        rep_a, rep_b = prefix_a[n].rep, prefix_b[n].rep
        if rep_a != rep_b:
            return OrderIsoResult(False, n - 1, n, rep_a, rep_b)
    return OrderIsoResult(True, prefix_a.last_index)


def psi_map(prefix_source: Prefix, spec_target: LikenSpec, n: int, gens: Optional[GeneratorSeq] = None) -> Value:
    """Omega of ``spec_target`` applied to the representation of the source x_n.

    Raises:
        IndexOutOfRangeError: ``n`` outside the source prefix.
        NonUniqueError: The source element is not uniquely represented.
        UnknownGeneratorIndexError: The target has too few generators.
    """
    if not 0 <= n < len(prefix_source):
        raise IndexOutOfRangeError(f"n={n} outside 0..{prefix_source.last_index}")
    return omega(spec_target, prefix_source[n].rep, gens)


# ---------------------------------------------------------------------------
# Combined comparison
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class LikenComparison:
    homothety: HomothetyResult
    order: Optional[OrderIsoResult]
    order_skipped: Optional[str] = None

    @property
    def isomorphic(self) -> bool:
        return self.homothety.isomorphic

    def to_dict(self) -> Dict[str, Any]:
        return {
            "homothety": self.homothety.to_dict(),
            "order": None if self.order is None else self.order.to_dict(),
            "order_skipped": self.order_skipped,
        }


def compare_likens(
    spec_a: LikenSpec, spec_b: LikenSpec, count: int, k_max: int = 10, precision: Optional[int] = None
) -> LikenComparison:
    """Homothety test plus an order-isomorphism check on ``count``-element prefixes.

    The order check is skipped when either prefix lacks uniqueness.

    Raises:
        InternalConsistencyError: The prefixes disagree while the homothety
            test certified an isomorphism.
    """
    homothety = homothety_test(spec_a, spec_b, k_max=k_max, precision=precision)
    prefix_a = enumerate_prefix(spec_a, Count(count))
    prefix_b = enumerate_prefix(spec_b, Count(count))
    if len(prefix_a) != len(prefix_b):
        return LikenComparison(homothety, None, "prefixes have different lengths")
    if not (prefix_a.is_unique and prefix_b.is_unique):
        return LikenComparison(homothety, None, "non-unique representations")
    order = order_iso_prefix_test(prefix_a, prefix_b)
    if not order.consistent and homothety.isomorphic:
        raise InternalConsistencyError(
            f"homothety certified but representations differ at n={order.mismatch_index}"
        )
    return LikenComparison(homothety, order)
