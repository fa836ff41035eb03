"""Built-in liken specs and spec config files.

A ``LikenSpec`` is an immutable description of a generator family. Calling
``spec.generators()`` returns a fresh single-consumer ``GeneratorSeq``, so a
spec can be enumerated any number of times.

Families:
- ``family_nstar``: logarithms of the primes (the liken ln(n+1)).
- ``family_modclass(p)``: logarithms of the class {m : m = 1 mod p};
  generators are the class-irreducible integers.
- ``family_numerical(gens)``: numerical semigroups, minimalized eagerly.
- ``family_custom`` / ``family_custom_logint`` / ``family_custom_rational``.

Spec config files are JSON objects ``{"kind": ..., ...parameters}``.

Dependencies:
    json, math, functools, src.exactnum, src.sieve, src.liken_core (GeneratorSeq).
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import itertools
import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from src.errors import (
    EmptyListError,
    MixedKindsError,
    NonPositiveError,
    NotIncreasingError,
    SpecConfigError,
)
from src.exactnum import Value, ValueKind, format_value, parse_value
from src.liken_core import GeneratorSeq
from src.sieve import prime_stream


class SpecKind(str, enum.Enum):
    NSTAR = "nstar"
    MODCLASS = "modclass"
    NUMERICAL = "numerical"
    CUSTOM_RATIONAL = "custom_rational"
    CUSTOM_LOGINT = "custom_logint"


@dataclasses.dataclass(frozen=True)
class LikenSpec:
    """Generator family description.

    Attributes:
        kind: Family kind.
        name: Display name, e.g. ``"modclass(2)"``.
        value_kind: Kind of every generator value.
        source: Zero-argument factory returning a fresh iterator of generator
            values.
        finite_values: The full generator tuple for finite specs, else None.
        params: Config parameters (``p``, the user's ``gens``, ...).
        minimal_gens: Numerical specs only: the minimal generating system.
        gcd: Numerical specs only.
        cofinite: Numerical specs only: ``gcd == 1``.
        redundancies: Numerical specs only: ``(value, decomposition)`` for each
            removed input generator.
        unique_factorization: Reason text when uniqueness is known
            structurally for the whole (unbounded) family, else None.
    """

    kind: SpecKind
    name: str
    value_kind: ValueKind
    source: Callable[[], Iterable[Value]] = dataclasses.field(compare=False, repr=False)
    finite_values: Optional[Tuple[Value, ...]] = None
    params: Tuple[Tuple[str, Any], ...] = ()
    minimal_gens: Optional[Tuple[int, ...]] = None
    gcd: Optional[int] = None
    cofinite: Optional[bool] = None
    redundancies: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    unique_factorization: Optional[str] = None

    @property
    def is_finite(self) -> bool:
        return self.finite_values is not None

    @property
    def integer_generators(self) -> Optional[Tuple[int, ...]]:
        """The integers g_i with a_i = ln(g_i), for finite logint specs."""
        if self.finite_values is None or self.value_kind is not ValueKind.LOGINT:
            return None
        return tuple(v.key for v in self.finite_values)

    def param(self, name: str, default: Any = None) -> Any:
        return dict(self.params).get(name, default)

    def generators(self) -> GeneratorSeq:
        return GeneratorSeq(self.value_kind, self.source(), finite=self.is_finite, name=self.name)

    def to_config(self) -> Dict[str, Any]:
        """Config dict that rebuilds an equal spec via ``spec_from_config``.

        Raises:
            SpecConfigError: For stream-backed custom specs.
        """
        if self.kind is SpecKind.NSTAR:
            return {"kind": "nstar"}
        if self.kind is SpecKind.MODCLASS:
            return {"kind": "modclass", "p": self.param("p")}
        if self.kind is SpecKind.NUMERICAL:
            return {"kind": "numerical", "gens": list(self.param("gens"))}
        if self.finite_values is None:
            raise SpecConfigError(f"spec {self.name!r} is stream-backed and has no config form")
        if self.kind is SpecKind.CUSTOM_LOGINT:
            return {"kind": "custom_logint", "ints": [v.key for v in self.finite_values]}
        return {"kind": "custom_rational", "values": [format_value(v) for v in self.finite_values]}


# ---------------------------------------------------------------------------
# N* and the classes 1 mod p
# ---------------------------------------------------------------------------

def _prime_values() -> Iterator[Value]:
    return (Value.logint(p) for p in prime_stream())


def family_nstar() -> LikenSpec:
    """The liken of logarithms of the positive integers; generators ln(p)."""
    return LikenSpec(
        kind=SpecKind.NSTAR,
        name="nstar",
        value_kind=ValueKind.LOGINT,
        source=_prime_values,
        unique_factorization="unique prime factorization",
    )


def modclass_irreducibles(p: int) -> Iterator[int]:
    """Yield the irreducibles of {m >= 1 : m = 1 mod p} in increasing order.

    m is reducible iff some class member u with 1 < u <= sqrt(m) divides it;
    the cofactor is then automatically in the class. It suffices to try the
    class irreducibles found so far.

    Complexity:
        O(pi_p(sqrt(m))) divisions per candidate m.
    """
    if p == 1:
        yield from prime_stream()
        return
    if p == 2:
        yield from itertools.islice(prime_stream(), 1, None)
        return
    found: List[int] = []
    for m in itertools.count(1 + p, p):
        reducible = False
        for q in found:
            if q * q > m:
                break
            if m % q == 0:
                reducible = True
                break
        if not reducible:
            found.append(m)
            yield m


def family_modclass(p: int) -> LikenSpec:
    """The liken of ln(m) for m = 1 mod p (K_p).

    Raises:
        SpecConfigError: If ``p < 1``.
    """
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise SpecConfigError(f"modclass p must be a positive integer, got {p!r}")
    return LikenSpec(
        kind=SpecKind.MODCLASS,
        name=f"modclass({p})",
        value_kind=ValueKind.LOGINT,
        source=lambda: (Value.logint(m) for m in modclass_irreducibles(p)),
        params=(("p", p),),
        unique_factorization="unique prime factorization" if p <= 2 else None,
    )


# ---------------------------------------------------------------------------
# Numerical semigroups
# ---------------------------------------------------------------------------

def minimalize(gens: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[Tuple[int, Tuple[int, ...]], ...]]:
    """Split a generator list into its minimal system and the redundant inputs.

    Returns:
        ``(minimal, redundancies)`` where each redundancy is
        ``(g, decomposition)`` with ``sum(decomposition) == g`` over smaller
        minimal generators.

    Examples:
        >>> minimalize([3, 4, 5, 7])
        ((3, 4, 5), ((7, (3, 4)),))
    """
    ordered = sorted(set(gens))
    top = ordered[-1]
    # last[v] = a generator used in one decomposition of v, 0 for v = 0
    last: List[Optional[int]] = [None] * (top + 1)
    last[0] = 0
    minimal: List[int] = []
    redundant: List[Tuple[int, Tuple[int, ...]]] = []
    for g in ordered:
        if last[g] is not None:
            parts: List[int] = []
            v = g
            while v:
                parts.append(last[v])
                v -= last[v]
            redundant.append((g, tuple(sorted(parts))))
            continue
        minimal.append(g)
        for v in range(g, top + 1):
            if last[v] is None and last[v - g] is not None:
                last[v] = g
    return tuple(minimal), tuple(redundant)


def family_numerical(gens: Sequence[int]) -> LikenSpec:
    """Numerical semigroup spec; generators are the minimal system as rationals.

    Raises:
        EmptyListError: If ``gens`` is empty.
        NonPositiveError: If some input is < 1 (1-based index).
    """
    if not gens:
        raise EmptyListError("numerical semigroup needs at least one generator")
    for i, g in enumerate(gens, start=1):
        if isinstance(g, bool) or not isinstance(g, int):
            raise SpecConfigError(f"numerical generator {i} must be an integer, got {g!r}")
        if g < 1:
            raise NonPositiveError(i)
    minimal, redundant = minimalize(gens)
    divisor = functools.reduce(math.gcd, minimal)
    values = tuple(Value.rational(g) for g in minimal)
    label = ",".join(str(g) for g in minimal)
    return LikenSpec(
        kind=SpecKind.NUMERICAL,
        name=f"numerical<{label}>",
        value_kind=ValueKind.RATIONAL,
        source=lambda: iter(values),
        finite_values=values,
        params=(("gens", tuple(gens)),),
        minimal_gens=minimal,
        gcd=divisor,
        cofinite=divisor == 1,
        redundancies=redundant,
    )


# ---------------------------------------------------------------------------
# Custom specs
# ---------------------------------------------------------------------------

def _validate_values(values: Sequence[Value]) -> ValueKind:
    kind = values[0].kind
    for i, v in enumerate(values, start=1):
        if v.kind is not kind:
            raise MixedKindsError(f"generator {i} is {v.kind.value}, generator 1 is {kind.value}")
        if v.is_zero:
            raise NonPositiveError(i)
        if i > 1 and v.key <= values[i - 2].key:
            raise NotIncreasingError(i)
    return kind


def family_custom(
    values: Union[Sequence[Value], Callable[[], Iterable[Value]]],
    kind: Optional[ValueKind] = None,
    name: Optional[str] = None,
) -> LikenSpec:
    """Spec wrapping a user generator list or stream factory.

    A finite list is validated eagerly and is its own tail bound. A stream
    factory (zero-argument callable) is validated lazily as it is pulled and
    needs an explicit ``kind``.

    Raises:
        NotIncreasingError, NonPositiveError, MixedKindsError: On invalid lists.
        SpecConfigError: Stream factory without ``kind``.
    """
    if callable(values):
        if kind is None:
            raise SpecConfigError("stream-backed custom spec needs an explicit value kind")
        spec_kind = SpecKind.CUSTOM_LOGINT if kind is ValueKind.LOGINT else SpecKind.CUSTOM_RATIONAL
        return LikenSpec(
            kind=spec_kind,
            name=name or f"{spec_kind.value}(stream)",
            value_kind=kind,
            source=values,
        )
    finite = tuple(values)
    if finite:
        found = _validate_values(finite)
        if kind is not None and kind is not found:
            raise MixedKindsError(f"expected {kind.value} generators, got {found.value}")
        kind = found
    elif kind is None:
        kind = ValueKind.RATIONAL
    spec_kind = SpecKind.CUSTOM_LOGINT if kind is ValueKind.LOGINT else SpecKind.CUSTOM_RATIONAL
    label = ",".join(format_value(v) for v in finite)
    return LikenSpec(
        kind=spec_kind,
        name=name or f"{spec_kind.value}[{label}]",
        value_kind=kind,
        source=lambda: iter(finite),
        finite_values=finite,
    )


def family_custom_logint(ints: Sequence[int]) -> LikenSpec:
    values = []
    for i, k in enumerate(ints, start=1):
        if isinstance(k, bool) or not isinstance(k, int):
            raise SpecConfigError(f"custom_logint entry {i} must be an integer, got {k!r}")
        if k <= 1:
            raise NonPositiveError(i)
        values.append(Value.logint(k))
    return family_custom(values, kind=ValueKind.LOGINT)


def family_custom_rational(values: Sequence[Union[int, str]]) -> LikenSpec:
    parsed = []
    for i, raw in enumerate(values, start=1):
        try:
            parsed.append(Value.rational(raw) if isinstance(raw, int) else parse_value(str(raw)))
        except ValueError as exc:
            raise SpecConfigError(f"custom_rational entry {i}: {exc}") from exc
    return family_custom(parsed, kind=ValueKind.RATIONAL)


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

def _int_list(config: Dict[str, Any], field: str) -> List[int]:
    raw = config.get(field)
    if isinstance(raw, str):
        raw = [part for part in raw.split(",") if part.strip()]
    if not isinstance(raw, (list, tuple)):
        raise SpecConfigError(f"{config.get('kind')} spec needs a list field {field!r}")
    try:
        return [int(x) for x in raw]
    except (TypeError, ValueError) as exc:
        raise SpecConfigError(f"{field!r} must contain integers") from exc


def spec_from_config(config: Dict[str, Any]) -> LikenSpec:
    """Build a spec from a config dict such as ``{"kind": "modclass", "p": 2}``.

    Raises:
        SpecConfigError: Unknown kind or malformed parameters.
    """
    if not isinstance(config, dict):
        raise SpecConfigError("spec config must be an object")
    kind = config.get("kind")
    if kind == SpecKind.NSTAR.value:
        return family_nstar()
    if kind == SpecKind.MODCLASS.value:
        try:
            p = int(config.get("p"))
        except (TypeError, ValueError) as exc:
            raise SpecConfigError("modclass spec needs an integer 'p'") from exc
        return family_modclass(p)
    if kind == SpecKind.NUMERICAL.value:
        return family_numerical(_int_list(config, "gens"))
    if kind == SpecKind.CUSTOM_LOGINT.value:
        return family_custom_logint(_int_list(config, "ints"))
    if kind == SpecKind.CUSTOM_RATIONAL.value:
        raw = config.get("values")
        if isinstance(raw, str):
            raw = [part for part in raw.split(",") if part.strip()]
        if not isinstance(raw, (list, tuple)):
            raise SpecConfigError("custom_rational spec needs a list field 'values'")
        return family_custom_rational(raw)
    raise SpecConfigError(f"unknown spec kind {kind!r}")


def load_spec_config(path: Union[str, Path]) -> LikenSpec:
    try:
        config = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecConfigError(f"cannot read spec config {path}: {exc}") from exc
    return spec_from_config(config)
