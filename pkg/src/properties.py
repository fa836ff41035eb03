"""Property checkers over an enumerated prefix.

Each checker is a pure function of an immutable ``Prefix`` and returns a
``PropertyReport``: a verdict, an optional qualifier saying how far the
verdict reaches (``certified``, ``prefix-scope``, ``trend``, ``exact``,
``at least``), capped witness lists and a free-form ``data`` dict.

A Fail verdict always carries at least one witness whose indices and exact
values violate the property's defining inequality.

Properties whose statements quantify over the whole unbounded liken
(finiteness of separation pairs, the Legendre limit) are reported with a
prefix-scope or trend qualifier; a prefix cannot decide them.

Dependencies:
    bisect, fractions, math, numpy (seeded sampling for the gap lemmas),
    src.liken_core, src.families, src.sieve, src.exactnum, src.errors.
"""

from __future__ import annotations

import bisect
import dataclasses
import enum
import math
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import IndexOutOfRangeError, InternalConsistencyError
from src.exactnum import Value, ValueKind, format_value
from src.families import LikenSpec
from src.liken_core import (
    ExponentVec,
    Prefix,
    SublikenTracker,
    ValueBound,
    enumerate_prefix,
    format_reps,
)
from src.sieve import factorize, simple_sieve

MAX_WITNESSES = 20
MAX_LISTED_PAIRS = 100


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INAPPLICABLE = "inapplicable"


@dataclasses.dataclass(frozen=True)
class Witness:
    """Indices and exact values exhibiting a property instance."""

    indices: Tuple[int, ...]
    values: Tuple[Value, ...]
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "indices": list(self.indices),
            "values": [format_value(v) for v in self.values],
            "note": self.note,
        }


@dataclasses.dataclass(frozen=True)
class PropertyReport:
    """Outcome of one property check.

    Attributes:
        property_id: Registry name, e.g. ``"convexity"``.
        prefix_len: Number of prefix elements examined.
        verdict: Pass, Fail or Inapplicable.
        qualifier: Scope of the verdict, or None for a plain prefix check.
        reason: Why the check is Inapplicable, or a certification note.
        witnesses: At most ``MAX_WITNESSES`` witnesses.
        data: Check-specific numbers (failure counts, ratio series, ...).
    """

    property_id: str
    prefix_len: int
    verdict: Verdict
    qualifier: Optional[str] = None
    reason: Optional[str] = None
    witnesses: Tuple[Witness, ...] = ()
    data: Dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    @property
    def failed(self) -> bool:
        return self.verdict is Verdict.FAIL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "property_id": self.property_id,
            "prefix_len": self.prefix_len,
            "verdict": self.verdict.value,
            "qualifier": self.qualifier,
            "reason": self.reason,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "data": self.data,
        }


def _inapplicable(property_id: str, prefix: Prefix, reason: str) -> PropertyReport:
    return PropertyReport(property_id, len(prefix), Verdict.INAPPLICABLE, reason=reason)


def _scan_report(
    property_id: str,
    prefix: Prefix,
    witnesses: List[Witness],
    failures: int,
    data: Optional[Dict[str, Any]] = None,
    qualifier: Optional[str] = None,
) -> PropertyReport:
    data = dict(data or {})
    data["failures"] = failures
    verdict = Verdict.FAIL if failures else Verdict.PASS
    return PropertyReport(
        property_id,
        len(prefix),
        verdict,
        qualifier=qualifier,
        witnesses=tuple(witnesses[:MAX_WITNESSES]),
        data=data,
    )


def _values(prefix: Prefix, indices: Iterable[int]) -> Tuple[Value, ...]:
    return tuple(prefix[i].value for i in indices)


# ---------------------------------------------------------------------------
# Convexity, disjoint support, parity
# ---------------------------------------------------------------------------

def check_convexity(prefix: Prefix) -> PropertyReport:
    """Strict convexity 2x_{k+1} > x_k + x_{k+2} for k = 0..N-2.

    Logarithm prefixes are compared in the multiplicative model:
    K_{k+1}^2 > K_k * K_{k+2} as integers.
    """
    if len(prefix) < 3:
        return _inapplicable("convexity", prefix, "prefix has fewer than 3 elements")
    keys = prefix.keys
    logint = prefix.kind is ValueKind.LOGINT
    witnesses: List[Witness] = []
    failures = 0
    for k in range(len(keys) - 2):
        a, b, c = keys[k], keys[k + 1], keys[k + 2]
        holds = b * b > a * c if logint else 2 * b > a + c
        if not holds:
            failures += 1
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(
                    Witness((k, k + 1, k + 2), _values(prefix, (k, k + 1, k + 2)), "2*x_{k+1} <= x_k + x_{k+2}")
                )
    return _scan_report("convexity", prefix, witnesses, failures, {"checked": len(keys) - 2})


def check_disjoint_support(prefix: Prefix) -> PropertyReport:
    """supp(x_n) and supp(x_{n+1}) are disjoint for n = 1..N-1.

    Raises:
        InternalConsistencyError: The prefix is convex but has a failure;
            convexity implies disjoint support.
    """
    if not prefix.is_unique:
        return _inapplicable("disjoint_support", prefix, "non-unique representations; support undefined")
    witnesses: List[Witness] = []
    failures = 0
    for n in range(1, len(prefix) - 1):
        shared = prefix[n].support & prefix[n + 1].support
        if shared:
            failures += 1
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(
                    Witness((n, n + 1), _values(prefix, (n, n + 1)), f"shared generators {sorted(shared)}")
                )
    if failures and len(prefix) >= 3 and check_convexity(prefix).passed:
        raise InternalConsistencyError("convex prefix violates disjoint support")
    return _scan_report("disjoint_support", prefix, witnesses, failures)


def check_parity(prefix: Prefix) -> PropertyReport:
    """a_1 never divides two consecutive elements x_n, x_{n+1} (n >= 1)."""
    if not prefix.is_unique:
        return _inapplicable("parity", prefix, "non-unique representations; divisibility undefined")
    witnesses: List[Witness] = []
    failures = 0
    for n in range(1, len(prefix) - 1):
        if 1 in prefix[n].support and 1 in prefix[n + 1].support:
            failures += 1
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(Witness((n, n + 1), _values(prefix, (n, n + 1)), "a_1 divides both"))
    return _scan_report("parity", prefix, witnesses, failures)


# ---------------------------------------------------------------------------
# Ockham's razor
# ---------------------------------------------------------------------------

def check_or(prefix: Prefix) -> PropertyReport:
    """If supp(x_n) and supp(z_n) are disjoint then x_{n+1} = z_n (n = 1..N-1).

    z_n comes from a private ``SublikenTracker`` that receives each
    irreducible x_n as the scan reaches it, so L^(n) is never re-enumerated
    from scratch.

    Returns:
        Fail witnesses carry indices ``(n, n+1)`` and values
        ``(x_n, z_n, x_{n+1})``.
    """
    if not prefix.is_unique:
        return _inapplicable("or", prefix, "non-unique representations; support undefined")
    irreducible = set(prefix.irreducible_indices)
    tracker = SublikenTracker(prefix.kind)
    kind = prefix.kind
    keys = prefix.keys
    witnesses: List[Witness] = []
    failures = 0
    applicable = 0
    for n in range(1, len(prefix) - 1):
        if n in irreducible:
            tracker.add_generator(prefix.generator_label(n), keys[n])
        z_key, z_reps = tracker.next_above(keys[n])
        z_support = frozenset().union(*(r.support for r in z_reps))
        if not prefix[n].support.isdisjoint(z_support):
            continue
        applicable += 1
        if keys[n + 1] != z_key:
            failures += 1
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(
                    Witness(
                        (n, n + 1),
                        (prefix[n].value, Value(kind, z_key), prefix[n + 1].value),
                        f"z_n rep {format_reps(z_reps)} disjoint from x_n but x_(n+1) != z_n",
                    )
                )
    return _scan_report("or", prefix, witnesses, failures, {"disjoint_steps": applicable})


# ---------------------------------------------------------------------------
# Bertrand, Legendre, separation
# ---------------------------------------------------------------------------

def check_bertrand(prefix: Prefix) -> PropertyReport:
    """Some generator lies in [x_n, x_n + a_1] for every checkable n >= 1.

    n is checkable when x_n + a_1 <= x_N; the remaining indices form a
    suffix and are reported as unchecked.
    """
    if not prefix.generators:
        return _inapplicable("bertrand", prefix, "prefix contains no generator")
    kind = prefix.kind
    keys = prefix.keys
    gen_keys = prefix.generator_keys
    a1 = gen_keys[0]
    last = keys[-1]
    witnesses: List[Witness] = []
    failures = 0
    checked = 0
    first_unchecked: Optional[int] = None
    for n in range(1, len(keys)):
        upper = kind.combine(keys[n], a1)
        if upper > last:
            first_unchecked = n
            break
        checked += 1
        pos = bisect.bisect_left(gen_keys, keys[n])
        if pos == len(gen_keys) or gen_keys[pos] > upper:
            failures += 1
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(
                    Witness((n,), (prefix[n].value, Value(kind, upper)), "no generator in [x_n, x_n + a_1]")
                )
    unchecked = 0 if first_unchecked is None else len(keys) - first_unchecked
    data = {
        "checked": checked,
        "unchecked": unchecked,
        "unchecked_from": first_unchecked,
    }
    return _scan_report("bertrand", prefix, witnesses, failures, data, qualifier="checkable n")


def default_checkpoints(last_index: int) -> List[int]:
    """10^j - 1 style checkpoints 9, 99, 999, ... below ``last_index``, plus it."""
    points = []
    step = 10
    while step - 1 < last_index:
        points.append(step - 1)
        step *= 10
    points.append(last_index)
    return points


def check_legendre(prefix: Prefix, checkpoints: Optional[Sequence[int]] = None) -> PropertyReport:
    """Series card{k : a_k <= x_n} / n at the checkpoints.

    The verdict is a trend: Pass when the ratios do not increase across the
    sorted checkpoints. Ratios are kept as unreduced ``count/n`` pairs.

    Raises:
        IndexOutOfRangeError: A checkpoint outside 1..N.
    """
    last = prefix.last_index
    if last < 1:
        return _inapplicable("legendre", prefix, "prefix has no nonzero element")
    points = sorted(set(checkpoints)) if checkpoints else default_checkpoints(last)
    for n in points:
        if not 1 <= n <= last:
            raise IndexOutOfRangeError(f"checkpoint {n} outside 1..{last}")
    gen_keys = prefix.generator_keys
    series = [(n, bisect.bisect_right(gen_keys, prefix.keys[n])) for n in points]
    witnesses: List[Witness] = []
    failures = 0
    for (n0, c0), (n1, c1) in zip(series, series[1:]):
        if Fraction(c1, n1) > Fraction(c0, n0):
            failures += 1
            witnesses.append(Witness((n0, n1), _values(prefix, (n0, n1)), f"ratio rises {c0}/{n0} -> {c1}/{n1}"))
    data = {"series": [{"n": n, "count": c, "ratio": f"{c}/{n}"} for n, c in series]}
    return _scan_report("legendre", prefix, witnesses, failures, data, qualifier="trend")


def legendre_series(report: PropertyReport) -> List[Tuple[int, Fraction]]:
    return [(row["n"], Fraction(row["count"], row["n"])) for row in report.data.get("series", [])]


def check_separation(prefix: Prefix) -> PropertyReport:
    """Consecutive pairs (x_n, x_{n+1}) with both elements irreducible.

    Finiteness of the pair set cannot be decided on a prefix, so the verdict
    is always Pass with a prefix-scope qualifier; the count is the result.
    """
    irreducible = set(prefix.irreducible_indices)
    pairs = [n for n in sorted(irreducible) if n + 1 in irreducible]
    listed = [
        {"indices": [n, n + 1], "values": [format_value(prefix[n].value), format_value(prefix[n + 1].value)]}
        for n in pairs[:MAX_LISTED_PAIRS]
    ]
    return PropertyReport(
        "separation",
        len(prefix),
        Verdict.PASS,
        qualifier="prefix-scope",
        reason="finiteness of the pair set is not decidable from a prefix",
        data={"count": len(pairs), "pairs": listed},
    )


# ---------------------------------------------------------------------------
# Uniqueness
# ---------------------------------------------------------------------------

def factor_matrix(ints: Sequence[int]) -> Tuple[Tuple[int, ...], List[List[int]]]:
    """Prime-exponent matrix: one row per integer, one column per prime.

    Examples:
        >>> factor_matrix([12, 18])
        ((2, 3), [[2, 1], [1, 2]])
    """
    factorizations = [factorize(g) for g in ints]
    primes = tuple(sorted(set().union(*factorizations))) if factorizations else ()
    return primes, [[f.get(p, 0) for p in primes] for f in factorizations]


def rank_and_relation(rows: Sequence[Sequence[int]]) -> Tuple[int, Optional[Tuple[int, ...]]]:
    """Rank of ``rows`` over Q and, when they are dependent, an integer relation.

    Gaussian elimination in exact ``Fraction`` arithmetic on the transpose,
    so the null space read off the reduced form is a relation
    ``sum c_i * rows[i] = 0``.

    Returns:
        ``(rank, None)`` for independent rows, else ``(rank, c)`` with
        coprime-scaled integer coefficients ``c``.
    """
    m = len(rows)
    width = len(rows[0]) if rows else 0
    mat = [[Fraction(rows[i][j]) for i in range(m)] for j in range(width)]
    pivots: List[int] = []
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, width) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        lead = mat[r][c]
        mat[r] = [x / lead for x in mat[r]]
        for i in range(width):
            if i != r and mat[i][c] != 0:
                factor = mat[i][c]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    if r == m:
        return r, None
    free = next(c for c in range(m) if c not in pivots)
    coeffs = [Fraction(0)] * m
    coeffs[free] = Fraction(1)
    for row, c in enumerate(pivots):
        coeffs[c] = -mat[row][free]
    scale = math.lcm(*(x.denominator for x in coeffs))
    ints = [int(x * scale) for x in coeffs]
    divisor = math.gcd(*ints)
    return r, tuple(x // divisor for x in ints)


def _relation_witness(prefix: Prefix, kind: ValueKind, keys: Sequence, coeffs: Sequence[int]) -> Witness:
    left = ExponentVec.from_mapping({i + 1: c for i, c in enumerate(coeffs) if c > 0})
    right = ExponentVec.from_mapping({i + 1: -c for i, c in enumerate(coeffs) if c < 0})
    key = kind.zero_key
    for k, mult in left.entries:
        key = kind.combine(key, kind.power(keys[k - 1], mult))
    value = Value(kind, key)
    n = prefix.index_of.get(key)
    return Witness(
        (n,) if n is not None else (),
        (value,),
        f"two representations {format_reps([left, right])}",
    )


def _uniqueness_certificate(
    spec: LikenSpec, prefix: Prefix
) -> Tuple[Optional[bool], str, Optional[Witness], Dict[str, Any]]:
    """Spec-level decision: True (unique), False (not unique) or None (unknown)."""
    if spec.unique_factorization is not None:
        return True, spec.unique_factorization, None, {}
    if not spec.is_finite or not spec.finite_values:
        return None, "stream-backed family without a structural certificate", None, {}
    keys = [v.key for v in spec.finite_values]
    if len(keys) == 1:
        return True, "single generator", None, {}
    kind = spec.value_kind
    if kind is ValueKind.RATIONAL:
        ratio = Fraction(keys[1]) / Fraction(keys[0])
        coeffs = [ratio.numerator, -ratio.denominator] + [0] * (len(keys) - 2)
        witness = _relation_witness(prefix, kind, keys, coeffs)
        return False, "rational generators are commensurable", witness, {}
    primes, rows = factor_matrix(keys)
    rank, relation = rank_and_relation(rows)
    data = {"rank": rank, "generators": len(keys), "primes": list(primes), "matrix": rows}
    if relation is None:
        return True, f"prime-exponent matrix has full rank {rank}", None, data
    witness = _relation_witness(prefix, kind, keys, relation)
    data["relation"] = list(relation)
    return False, f"prime-exponent matrix has rank {rank} < {len(keys)}", witness, data


def check_uniqueness(spec: LikenSpec, prefix: Prefix) -> PropertyReport:
    """Uniqueness of representations on the prefix and, when possible, globally.

    The prefix scan reports every element with two or more representations.
    The spec-level certificate covers families known to factor uniquely,
    single-generator likens, rational likens with several generators
    (always dependent) and finite logarithm likens through the rank of the
    prime-exponent matrix of their integer generators.

    Raises:
        InternalConsistencyError: A certified-unique spec shows a collision.
    """
    witnesses: List[Witness] = []
    collisions = 0
    for element in prefix.elements:
        if not element.is_unique:
            collisions += 1
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(
                    Witness((element.index,), (element.value,), f"representations {format_reps(element.reps)}")
                )
    certified, reason, relation, data = _uniqueness_certificate(spec, prefix)
    data["collisions"] = collisions
    if collisions and certified is True:
        raise InternalConsistencyError(f"certified-unique spec {spec.name!r} has a prefix collision")
    if certified is False and relation is not None and not witnesses:
        witnesses.append(relation)
    if collisions or certified is False:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.PASS
    qualifier = "prefix-scope" if certified is None else "certified"
    return PropertyReport(
        "uniqueness",
        len(prefix),
        verdict,
        qualifier=qualifier,
        reason=reason,
        witnesses=tuple(witnesses),
        data=data,
    )


# ---------------------------------------------------------------------------
# Dimension and generator positions
# ---------------------------------------------------------------------------

def dimension(prefix: Prefix) -> PropertyReport:
    """Number of irreducibles: exact for finite specs, a lower bound otherwise."""
    spec = prefix.spec
    if spec.minimal_gens is not None:
        count, qualifier = len(spec.minimal_gens), "exact"
    elif spec.is_finite and spec.finite_values:
        private = enumerate_prefix(spec, ValueBound(spec.finite_values[-1]))
        count, qualifier = len(private.irreducible_indices), "exact"
    else:
        count, qualifier = len(prefix.irreducible_indices), "at least"
    return PropertyReport("dimension", len(prefix), Verdict.PASS, qualifier=qualifier, data={"dimension": count})


def generator_positions(prefix: Prefix) -> FrozenSet[int]:
    """Indices n of the irreducible elements of the prefix."""
    return frozenset(prefix.irreducible_indices)


def nstar_positions(last_index: int) -> FrozenSet[int]:
    """{n <= last_index : n + 1 prime}, the irreducible indices of N*."""
    return frozenset(int(p) - 1 for p in simple_sieve(last_index + 1).tolist())


@dataclasses.dataclass(frozen=True)
class PositionComparison:
    agree: bool
    first_disagreement: Optional[int]
    missing: Tuple[int, ...]
    extra: Tuple[int, ...]


def compare_positions(found: Iterable[int], target: Iterable[int]) -> PositionComparison:
    """Compare two index sets; ``missing`` are target-only, ``extra`` found-only."""
    found_set, target_set = set(found), set(target)
    missing = tuple(sorted(target_set - found_set))
    extra = tuple(sorted(found_set - target_set))
    first = min(missing[:1] + extra[:1], default=None)
    return PositionComparison(not missing and not extra, first, missing, extra)


def check_positions(prefix: Prefix, target: Optional[Iterable[int]] = None) -> PropertyReport:
    """Irreducible indices against ``target`` (default: n with n + 1 prime)."""
    found = generator_positions(prefix)
    wanted = nstar_positions(prefix.last_index) if target is None else frozenset(target)
    result = compare_positions(found, wanted)
    witnesses = []
    if not result.agree:
        n = result.first_disagreement
        state = "irreducible" if n in found else "composed"
        witnesses.append(Witness((n,), (prefix[n].value,), f"x_n is {state}, target disagrees"))
    return PropertyReport(
        "positions",
        len(prefix),
        Verdict.PASS if result.agree else Verdict.FAIL,
        witnesses=tuple(witnesses),
        data={
            "positions": sorted(found)[:MAX_LISTED_PAIRS],
            "count": len(found),
            "missing": list(result.missing[:MAX_WITNESSES]),
            "extra": list(result.extra[:MAX_WITNESSES]),
        },
    )


# ---------------------------------------------------------------------------
# Gap lemmas
# ---------------------------------------------------------------------------

def _distinct_sorted(rng: np.random.Generator, low: int, high: int, size: int) -> List[int]:
    while True:
        draw = sorted(int(x) for x in rng.integers(low, high + 1, size=size))
        if len(set(draw)) == size:
            return draw


def check_gap_lemmas(prefix: Prefix, trials: int = 1000, seed: int = 0) -> PropertyReport:
    """Sample the gap inequalities that follow from convexity.

    Per trial, with exact keys:
      - additive: x_{q-1} - x_{p-1} > x_q - x_p for 1 <= p < q <= N, and the
        shifted form x_{q-k} - x_{p-k} > x_q - x_p for 1 <= k <= p;
      - multiplicative: X_p / X_q > X_{p-k} / X_{q-k} with X_j = exp(x_{j-1})
        and 1 <= k < p < q <= N + 1.
    Logarithm prefixes compare integer products, never logarithms.

    Args:
        prefix: The prefix; must pass ``check_convexity``.
        trials: Number of sampled (k, p, q) triples per form.
        seed: Seed for ``numpy.random.default_rng``.
    """
    convexity = check_convexity(prefix)
    if not convexity.passed:
        return _inapplicable("gap_lemmas", prefix, "prefix is not convex")
    last = prefix.last_index
    keys = prefix.keys
    logint = prefix.kind is ValueKind.LOGINT

    # each form reads a - b > c - d on the four indexed elements
    def shifted(k: int, p: int, q: int) -> Tuple[int, int, int, int]:
        return q - k, p - k, q, p

    def multiplicative(k: int, p: int, q: int) -> Tuple[int, int, int, int]:
        return p - 1, q - 1, p - k - 1, q - k - 1

    def holds(terms: Tuple[int, int, int, int]) -> bool:
        a, b, c, d = (keys[i] for i in terms)
        if logint:
            return a * d > b * c
        return a - b > c - d

    rng = np.random.default_rng(seed)
    witnesses: List[Witness] = []
    failures = 0
    for _ in range(trials):
        p, q = _distinct_sorted(rng, 1, last, 2)
        k = int(rng.integers(1, p + 1))
        km, pm, qm = _distinct_sorted(rng, 1, last + 1, 3)
        checks = (
            ("additive", 1, p, q, shifted(1, p, q)),
            ("shifted", k, p, q, shifted(k, p, q)),
            ("multiplicative", km, pm, qm, multiplicative(km, pm, qm)),
        )
        for form, kk, pp, qq, terms in checks:
            if holds(terms):
                continue
            failures += 1
            if len(witnesses) < MAX_WITNESSES:
                values = tuple(prefix[i].value for i in terms)
                witnesses.append(Witness((kk, pp, qq), values, f"{form} gap inequality v0 - v1 > v2 - v3 fails"))
    return _scan_report(
        "gap_lemmas", prefix, witnesses, failures, {"trials": trials, "seed": seed}
    )
