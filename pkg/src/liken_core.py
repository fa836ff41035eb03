"""In-order enumeration of liken elements with exponent-vector tracking.

Provides:
- ``GeneratorSeq``: lazily pulled, validated generator stream.
- ``ExponentVec`` / ``Element`` / ``Prefix``: immutable enumeration results.
- ``enumerate_prefix``: min-heap enumeration over a canonical spanning tree
  of exponent vectors: each vector is produced exactly once (extensions only
  use generator indices >= the largest index already present) and equal
  values are merged into one element carrying every representation.
- ``omega`` / ``omega_inv`` / ``irreducibles`` / ``subliken_z`` / ``gaps`` /
  ``to_multiplicative``.
- ``SublikenTracker``: incremental sorted enumeration of the sub-liken
  generated by a growing generator set (used by the OR checker and the
  constructor).
- ``brute_force_prefix``: grid oracle used to validate the engine.

Dependencies:
    heapq, bisect, itertools, functools, src.exactnum, src.errors.

Complexity:
    ``enumerate_prefix`` pops one heap entry per exponent vector with value
    <= x_N and pushes at most two, so O(V log V) for V such vectors (V = N
    for likens with uniqueness).
"""

from __future__ import annotations

import bisect
import dataclasses
import functools
import heapq
import itertools
import re
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from src.errors import (
    EmptySpecError,
    IndexOutOfRangeError,
    InternalConsistencyError,
    KindMismatchError,
    MixedKindsError,
    NonPositiveError,
    NonUniqueError,
    NotAnElementError,
    NotIncreasingError,
    UndecidedComparisonError,
    UnknownGeneratorIndexError,
)
from src.exactnum import Key, Ordering, Undecided, Value, ValueKind, value_compare

if TYPE_CHECKING:
    from src.families import LikenSpec


# ---------------------------------------------------------------------------
# Generator streams
# ---------------------------------------------------------------------------

class GeneratorSeq:
    """Strictly increasing positive generator values, pulled on demand.

    Validation happens as values are pulled: the k-th value (1-based) must
    have the stream's kind, be positive and exceed value k-1.
    """

    def __init__(self, kind: ValueKind, source: Iterable[Value], finite: bool = False, name: str = ""):
        self.kind = kind
        self.finite = finite
        self.name = name
        self._it = iter(source)
        self._values: List[Value] = []
        self._keys: List[Key] = []
        self._exhausted = False

    def __len__(self) -> int:
        return len(self._values)

    @property
    def exhausted(self) -> bool:
        return self._exhausted

    @property
    def produced(self) -> Tuple[Value, ...]:
        return tuple(self._values)

    def _pull(self) -> bool:
        if self._exhausted:
            return False
        try:
            v = next(self._it)
        except StopIteration:
            self._exhausted = True
            return False
        index = len(self._values) + 1
        if v.kind is not self.kind:
            raise MixedKindsError(f"generator {index} of {self.name or 'stream'} is {v.kind.value}")
        if v.is_zero:
            raise NonPositiveError(index)
        if self._keys and v.key <= self._keys[-1]:
            raise NotIncreasingError(index)
        self._values.append(v)
        self._keys.append(v.key)
        return True

    def get(self, k: int) -> Optional[Value]:
        """Generator a_k (1-based), or None past the end of a finite stream."""
        while len(self._values) < k and self._pull():
            pass
        return self._values[k - 1] if len(self._values) >= k else None

    def key(self, k: int) -> Optional[Key]:
        v = self.get(k)
        return None if v is None else v.key

    def ensure_through(self, bound: Key) -> int:
        """Pull until every generator with key <= ``bound`` is known.

        Returns:
            The number of generators with key <= ``bound``.
        """
        while not self._exhausted and (not self._keys or self._keys[-1] <= bound):
            self._pull()
        return bisect.bisect_right(self._keys, bound)


# ---------------------------------------------------------------------------
# Exponent vectors, elements, prefixes
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True, order=True, slots=True)
class ExponentVec:
    """Sparse multiplicities ``((k, m_k), ...)`` sorted by generator index."""

    entries: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "ExponentVec":
        for k, m in mapping.items():
            if k < 1 or m < 0:
                raise ValueError(f"invalid exponent entry {k}:{m}")
        return cls(tuple(sorted((k, m) for k, m in mapping.items() if m > 0)))

    @classmethod
    def unit(cls, k: int) -> "ExponentVec":
        return cls(((k, 1),))

    @property
    def is_zero(self) -> bool:
        return not self.entries

    @property
    def support(self) -> FrozenSet[int]:
        return frozenset(k for k, _ in self.entries)

    @property
    def max_index(self) -> int:
        return self.entries[-1][0] if self.entries else 0

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def unit_index(self) -> Optional[int]:
        """k when this vector is the unit vector e_k."""
        if len(self.entries) == 1 and self.entries[0][1] == 1:
            return self.entries[0][0]
        return None

    def as_dict(self) -> Dict[int, int]:
        return dict(self.entries)

    def plus_unit(self, k: int) -> "ExponentVec":
        """This vector plus e_k."""
        entries = list(self.entries)
        if entries and entries[-1][0] <= k:
            if entries[-1][0] == k:
                entries[-1] = (k, entries[-1][1] + 1)
            else:
                entries.append((k, 1))
            return ExponentVec(tuple(entries))
        counts = dict(entries)
        counts[k] = counts.get(k, 0) + 1
        return ExponentVec(tuple(sorted(counts.items())))

    def __add__(self, other: "ExponentVec") -> "ExponentVec":
        counts = dict(self.entries)
        for k, m in other.entries:
            counts[k] = counts.get(k, 0) + m
        return ExponentVec(tuple(sorted(counts.items())))

    def __str__(self) -> str:
        return format_exponent_vec(self)


def format_exponent_vec(vec: ExponentVec) -> str:
    """``k1^m1*k2^m2``; the zero vector is the empty string."""
    return "*".join(f"{k}^{m}" for k, m in vec.entries)


_TERM_RE = re.compile(r"^\s*(\d+)\s*\^\s*(\d+)\s*$")


def parse_exponent_vec(text: str) -> ExponentVec:
    if not text.strip():
        return ExponentVec()
    counts: Dict[int, int] = {}
    for term in text.split("*"):
        match = _TERM_RE.match(term)
        if not match:
            raise ValueError(f"bad exponent term {term!r} in {text!r}")
        k, m = int(match.group(1)), int(match.group(2))
        counts[k] = counts.get(k, 0) + m
    return ExponentVec.from_mapping(counts)


def format_reps(reps: Iterable[ExponentVec]) -> str:
    return ";".join(format_exponent_vec(r) for r in sorted(reps))


def parse_reps(text: str) -> FrozenSet[ExponentVec]:
    return frozenset(parse_exponent_vec(part) for part in text.split(";"))


@dataclasses.dataclass(frozen=True)
class Element:
    """One liken element: position, exact value and all representations.

    ``index`` is None only for elements computed outside a prefix (a z_n
    lying beyond the enumerated range).
    """

    index: Optional[int]
    value: Value
    reps: FrozenSet[ExponentVec]

    @property
    def is_unique(self) -> bool:
        return len(self.reps) == 1

    @property
    def rep(self) -> ExponentVec:
        """The unique representation.

        Raises:
            NonUniqueError: If the element has several representations.
        """
        if len(self.reps) != 1:
            raise NonUniqueError(sorted(self.reps), self.index)
        return next(iter(self.reps))

    @property
    def support(self) -> FrozenSet[int]:
        return self.rep.support


@dataclasses.dataclass(frozen=True)
class Count:
    n: int


@dataclasses.dataclass(frozen=True)
class ValueBound:
    bound: Value


Limit = Union[Count, ValueBound]


@dataclasses.dataclass(frozen=True)
class Prefix:
    """Initial segment x_0 < x_1 < ... < x_N of a liken.

    Attributes:
        spec: The spec it was enumerated from.
        elements: Elements with indices 0..N.
        generators: Every generator with value <= x_N, in order.
    """

    spec: "LikenSpec"
    elements: Tuple[Element, ...]
    generators: Tuple[Value, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, n: int) -> Element:
        return self.elements[n]

    @property
    def kind(self) -> ValueKind:
        return self.elements[0].value.kind

    @property
    def last_index(self) -> int:
        return len(self.elements) - 1

    @functools.cached_property
    def keys(self) -> Tuple[Key, ...]:
        return tuple(e.value.key for e in self.elements)

    @functools.cached_property
    def generator_keys(self) -> Tuple[Key, ...]:
        return tuple(g.key for g in self.generators)

    @functools.cached_property
    def index_of(self) -> Dict[Key, int]:
        return {key: n for n, key in enumerate(self.keys)}

    @functools.cached_property
    def is_unique(self) -> bool:
        return all(e.is_unique for e in self.elements)

    @property
    def generators_seen(self) -> int:
        used = max((r.max_index for e in self.elements for r in e.reps), default=0)
        return max(used, len(self.generators))

    @functools.cached_property
    def irreducible_indices(self) -> Tuple[int, ...]:
        return tuple(irreducibles(self))

    def generator_label(self, n: int) -> int:
        """Generator index k of the irreducible element x_n = a_k."""
        for rep in self.elements[n].reps:
            k = rep.unit_index
            if k is not None:
                return k
        raise InternalConsistencyError(f"x_{n} is not a generator")

    def first_non_unique(self) -> Optional[Element]:
        return next((e for e in self.elements if not e.is_unique), None)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _bound_check(limit: Limit, kind: ValueKind):
    if isinstance(limit, Count):
        return None
    bound = limit.bound
    if bound.kind is kind:
        return lambda key: key <= bound.key

    def within(key: Key) -> bool:
        result = value_compare(Value(kind, key), bound)
        if isinstance(result, Undecided):
            raise UndecidedComparisonError(result.precision_bits)
        return result is not Ordering.GREATER

    return within


def enumerate_prefix(spec: "LikenSpec", limit: Limit) -> Prefix:
    """Enumerate a liken in strictly increasing value order.

    The frontier is a min-heap of (value key, vector) candidates seeded with
    e_1. Popping vector ``v`` whose largest index is k pushes its first child
    ``v + e_k`` and its next sibling ``parent + e_{k+1}``; this visits the
    canonical tree in which every exponent vector has exactly one parent.
    Generator a_{k+1} is pulled from the stream when a_k is first popped, so
    no generator is skipped before an element exceeding it is emitted.

    Args:
        spec: The liken spec.
        limit: ``Count(n)`` for n elements (indices 0..n-1) or
            ``ValueBound(B)`` for all elements with value <= B.

    Returns:
        The ``Prefix``.

    Raises:
        EmptySpecError: The spec has no generator.
        UndecidedComparisonError: Cross-kind bound not separable.
        ValueError: ``Count`` below 1.
    """
    if isinstance(limit, Count) and limit.n < 1:
        raise ValueError("Count limit must be >= 1")
    gens = spec.generators()
    if gens.get(1) is None:
        raise EmptySpecError(f"spec {spec.name!r} has no generators")
    kind = gens.kind
    combine = kind.combine
    zero_vec = ExponentVec()
    zero_key = kind.zero_key
    elements: List[Element] = [Element(0, Value(kind, zero_key), frozenset({zero_vec}))]
    within = _bound_check(limit, kind)
    target = limit.n if isinstance(limit, Count) else None

    seq = itertools.count()
    heap: list = [(gens.key(1), next(seq), ExponentVec.unit(1), 1, zero_vec, zero_key)]

    def expand(key: Key, vec: ExponentVec, k: int, parent: ExponentVec, parent_key: Key) -> None:
        heapq.heappush(heap, (combine(key, gens.key(k)), next(seq), vec.plus_unit(k), k, vec, key))
        sibling = gens.key(k + 1)
        if sibling is not None:
            heapq.heappush(
                heap,
                (combine(parent_key, sibling), next(seq), parent.plus_unit(k + 1), k + 1, parent, parent_key),
            )

    while heap and (target is None or len(elements) < target):
        key = heap[0][0]
        if within is not None and not within(key):
            break
        reps = set()
        while heap and heap[0][0] == key:
            _, _, vec, k, parent, parent_key = heapq.heappop(heap)
            reps.add(vec)
            expand(key, vec, k, parent, parent_key)
        elements.append(Element(len(elements), Value(kind, key), frozenset(reps)))

    last_key = elements[-1].value.key
    count = gens.ensure_through(last_key)
    return Prefix(spec=spec, elements=tuple(elements), generators=gens.produced[:count])


def brute_force_prefix(spec: "LikenSpec", bound: Value) -> Prefix:
    """Grid oracle: every exponent vector with value <= ``bound``, sorted and merged.

    Exponential in the number of generators below ``bound``; for validation
    at small scale only.

    Raises:
        KindMismatchError: ``bound`` differs in kind from the spec.
        EmptySpecError: The spec has no generator.
    """
    gens = spec.generators()
    if bound.kind is not gens.kind:
        raise KindMismatchError("oracle bound must match the spec kind")
    if gens.get(1) is None:
        raise EmptySpecError(f"spec {spec.name!r} has no generators")
    kind = gens.kind
    count = gens.ensure_through(bound.key)
    keys = [g.key for g in gens.produced[:count]]
    found: Dict[Key, set] = {}

    def walk(i: int, key: Key, counts: Tuple[Tuple[int, int], ...]) -> None:
        if i == len(keys) or kind.combine(key, keys[i]) > bound.key:
            found.setdefault(key, set()).add(ExponentVec(counts))
            return
        m = 0
        current = key
        while current <= bound.key:
            walk(i + 1, current, counts + (((i + 1, m),) if m else ()))
            m += 1
            current = kind.combine(current, keys[i])

    walk(0, kind.zero_key, ())
    elements = tuple(
        Element(n, Value(kind, key), frozenset(found[key])) for n, key in enumerate(sorted(found))
    )
    return Prefix(spec=spec, elements=elements, generators=gens.produced[:count])


# ---------------------------------------------------------------------------
# Omega maps
# ---------------------------------------------------------------------------

def omega(spec: "LikenSpec", m: ExponentVec, gens: Optional[GeneratorSeq] = None) -> Value:
    """Exact value of sum m_k * a_k over the spec's generators.

    Raises:
        UnknownGeneratorIndexError: An index of ``m`` exceeds a finite spec.
    """
    gens = gens if gens is not None else spec.generators()
    kind = gens.kind
    key = kind.zero_key
    for k, mult in m.entries:
        g = gens.key(k)
        if g is None:
            raise UnknownGeneratorIndexError(k)
        key = kind.combine(key, kind.power(g, mult))
    return Value(kind, key)


def omega_inv(prefix: Prefix, v: Value) -> ExponentVec:
    """The unique representation of ``v`` recorded in ``prefix``.

    Raises:
        KindMismatchError: ``v`` differs in kind from the prefix.
        IndexOutOfRangeError: ``v`` exceeds the last prefix value.
        NotAnElementError: ``v`` is not a liken element.
        NonUniqueError: ``v`` has several representations.
    """
    if v.kind is not prefix.kind:
        raise KindMismatchError("value kind differs from prefix kind")
    if v.key > prefix.keys[-1]:
        raise IndexOutOfRangeError(f"{v} exceeds the last prefix value {prefix[-1].value}")
    n = prefix.index_of.get(v.key)
    if n is None:
        raise NotAnElementError(f"{v} is not an element of {prefix.spec.name}")
    return prefix[n].rep


# ---------------------------------------------------------------------------
# Irreducibles
# ---------------------------------------------------------------------------

def irreducibles(prefix: Prefix) -> List[int]:
    """Indices n >= 1 whose x_n is not a sum of two nonzero prefix elements.

    Pair scan over u <= x_n / 2 (rationals) or u^2 <= x_n (logarithms), with
    x_n - u looked up in the prefix. The result is cross-checked against the
    representation record: x_n is irreducible iff its only representation is
    a unit vector.

    Raises:
        InternalConsistencyError: On disagreement between the two methods.
    """
    keys = prefix.keys
    index_of = prefix.index_of
    logint = prefix.kind is ValueKind.LOGINT
    found: List[int] = []
    for n in range(1, len(keys)):
        v = keys[n]
        decomposable = False
        for j in range(1, n):
            u = keys[j]
            if logint:
                if u * u > v:
                    break
                if v % u == 0 and v // u in index_of:
                    decomposable = True
                    break
            else:
                if 2 * u > v:
                    break
                if v - u in index_of:
                    decomposable = True
                    break
        if not decomposable:
            found.append(n)
    expected = [
        n for n in range(1, len(keys))
        if len(prefix[n].reps) == 1 and next(iter(prefix[n].reps)).unit_index is not None
    ]
    if found != expected:
        raise InternalConsistencyError(
            f"irreducible scan {found[:10]} disagrees with representation record {expected[:10]}"
        )
    return found


# ---------------------------------------------------------------------------
# Sub-likens
# ---------------------------------------------------------------------------

class SublikenTracker:
    """Sorted elements of the sub-liken generated by a growing generator set.

    Each generator j keeps a pointer p_j to the smallest known element M[p]
    with g_j + M[p] beyond the largest known element; a heap over those
    candidates yields the next element, and all generators reaching it
    contribute representations. Adding a generator g with g + a_min beyond
    the largest known element only inserts g itself; anything else triggers
    a rebuild.

    Generators carry caller-chosen labels, used as indices in the
    representations.
    """

    def __init__(self, kind: ValueKind):
        self.kind = kind
        self._gens: List[Tuple[int, Key]] = []
        self._reset()

    def _reset(self) -> None:
        self._keys: List[Key] = [self.kind.zero_key]
        self._reps: List[FrozenSet[ExponentVec]] = [frozenset({ExponentVec()})]
        self._ptr: List[int] = [0] * len(self._gens)
        self._heap: List[Tuple[Key, int]] = [(g, j) for j, (_, g) in enumerate(self._gens)]
        heapq.heapify(self._heap)

    @property
    def generator_count(self) -> int:
        return len(self._gens)

    @property
    def known_keys(self) -> Tuple[Key, ...]:
        return tuple(self._keys)

    def add_generator(self, label: int, key: Key) -> None:
        if self._gens and key <= self._gens[-1][1]:
            raise NotIncreasingError(len(self._gens) + 1)
        top = self._keys[-1]
        smallest = self._gens[0][1] if self._gens else key
        self._gens.append((label, key))
        j = len(self._gens) - 1
        if key > top:
            self._ptr.append(0)
            heapq.heappush(self._heap, (key, j))
            return
        if self.kind.combine(key, smallest) <= top:
            self._reset()
            while self._keys[-1] < top:
                self._advance()
            return
        pos = bisect.bisect_left(self._keys, key)
        if self._keys[pos] == key:
            self._reps[pos] = self._reps[pos] | {ExponentVec.unit(label)}
        else:
            self._keys.insert(pos, key)
            self._reps.insert(pos, frozenset({ExponentVec.unit(label)}))
            self._ptr = [pos if p >= pos else p for p in self._ptr]
        self._ptr.append(1)
        combine = self.kind.combine
        self._heap = [(combine(g, self._keys[self._ptr[i]]), i) for i, (_, g) in enumerate(self._gens)]
        heapq.heapify(self._heap)

    def _advance(self) -> None:
        key = self._heap[0][0]
        hits: List[int] = []
        while self._heap and self._heap[0][0] == key:
            hits.append(heapq.heappop(self._heap)[1])
        reps = set()
        for i in hits:
            label = self._gens[i][0]
            reps.update(r.plus_unit(label) for r in self._reps[self._ptr[i]])
        self._keys.append(key)
        self._reps.append(frozenset(reps))
        combine = self.kind.combine
        for i in hits:
            self._ptr[i] += 1
            heapq.heappush(self._heap, (combine(self._gens[i][1], self._keys[self._ptr[i]]), i))

    def next_above(self, key: Key) -> Optional[Tuple[Key, FrozenSet[ExponentVec]]]:
        """Least element strictly above ``key``, or None without generators."""
        if not self._gens:
            return None
        while self._keys[-1] <= key:
            self._advance()
        pos = bisect.bisect_right(self._keys, key)
        return self._keys[pos], self._reps[pos]


def subliken_z(prefix: Prefix, n: int) -> Element:
    """z_n: least element of L^(n) strictly greater than x_n.

    L^(n) is generated by the irreducibles x_j with j <= n and is enumerated
    afresh. Since x_n + a_1 lies in L^(n), z_n <= x_n + a_1 holds and bounds
    the enumeration.

    Args:
        prefix: A complete prefix.
        n: Index with 1 <= n < len(prefix).

    Returns:
        Element with representations labelled by parent generator indices;
        ``index`` is z_n's position in ``prefix`` when it lies inside it.

    Raises:
        IndexOutOfRangeError: ``n`` outside 1..len(prefix)-1.
        InternalConsistencyError: z_n exceeds x_n + a_1.
    """
    if not 1 <= n < len(prefix):
        raise IndexOutOfRangeError(f"n={n} outside 1..{len(prefix) - 1}")
    tracker = SublikenTracker(prefix.kind)
    for j in prefix.irreducible_indices:
        if j > n:
            break
        tracker.add_generator(prefix.generator_label(j), prefix.keys[j])
    key, reps = tracker.next_above(prefix.keys[n])
    limit = prefix.kind.combine(prefix.keys[n], prefix.generator_keys[0])
    if key > limit:
        raise InternalConsistencyError(f"z_{n} exceeds x_{n} + a_1")
    return Element(prefix.index_of.get(key), Value(prefix.kind, key), reps)


# ---------------------------------------------------------------------------
# Gaps and the multiplicative model
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Gap:
    """delta_k = x_{k+1} - x_k, kept as the exact pair of endpoints."""

    k: int
    lower: Value
    upper: Value

    @property
    def exact(self):
        """Fraction difference (rationals) or Fraction ratio x^_{k+2}/x^_{k+1} (logarithms)."""
        if self.lower.kind is ValueKind.RATIONAL:
            return self.upper.key - self.lower.key
        return Fraction(self.upper.key, self.lower.key)

    def compare(self, other: "Gap") -> Ordering:
        if self.lower.kind is ValueKind.RATIONAL:
            left, right = self.upper.key - self.lower.key, other.upper.key - other.lower.key
        else:
            left, right = self.upper.key * other.lower.key, other.upper.key * self.lower.key
        if left < right:
            return Ordering.LESS
        if left > right:
            return Ordering.GREATER
        return Ordering.EQUAL


def gaps(prefix: Prefix) -> List[Gap]:
    """delta_k for k = 0..N-1.

    Raises:
        IndexOutOfRangeError: Prefix shorter than 2.
    """
    if len(prefix) < 2:
        raise IndexOutOfRangeError("gaps need at least two elements")
    return [
        Gap(k, prefix[k].value, prefix[k + 1].value) for k in range(len(prefix) - 1)
    ]


def to_multiplicative(prefix: Prefix, n: int) -> Tuple[int, int]:
    """(n+1, exp(x_n)): the multiplicative-model index and value.

    Raises:
        KindMismatchError: Rational prefixes have no integer model.
        IndexOutOfRangeError: ``n`` outside the prefix.
    """
    if prefix.kind is not ValueKind.LOGINT:
        raise KindMismatchError("multiplicative model needs a logint prefix")
    if not 0 <= n < len(prefix):
        raise IndexOutOfRangeError(f"n={n} outside 0..{len(prefix) - 1}")
    return n + 1, prefix.keys[n]
