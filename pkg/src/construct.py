"""Ockham's-razor construction of liken prefixes and the main-theorem check.

``or_construct`` grows a prefix one element per step. With x_n known it
computes z_n, the least element above x_n of the sub-liken generated so
far. When supp(x_n) and supp(z_n) are disjoint, z_n becomes x_{n+1};
otherwise a fresh generator with a value strictly between x_n and z_n is
inserted as x_{n+1}. The value comes from a ``ConstructionPolicy``.

Elements are formal exponent vectors with concrete rational values; two
vectors meeting at one value abort the run with ``ValueCollisionError``
instead of being merged.

``verify_main_theorem`` runs the convexity and OR checks and, when both
pass, compares the prefix with an equally long prefix of N*.

Dependencies:
    mpmath (the logarithmic value profile), fractions, src.liken_core,
    src.properties, src.morphisms, src.families, src.sieve, src.errors.
"""

from __future__ import annotations

import dataclasses
import enum
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath

from src.errors import (
    EmptyConvexityWindowError,
    InternalConsistencyError,
    NonUniqueError,
    PolicyExhaustedError,
    ValueCollisionError,
    ValueOutsideWindowError,
)
from src.exactnum import Value, ValueKind, format_value, parse_value
from src.families import family_custom, family_nstar
from src.liken_core import (
    Count,
    Element,
    ExponentVec,
    Prefix,
    SublikenTracker,
    brute_force_prefix,
    enumerate_prefix,
    format_exponent_vec,
    subliken_z,
)
from src.morphisms import OrderIsoResult, order_iso_prefix_test
from src.properties import PropertyReport, check_convexity, check_or, nstar_positions

PROFILE_BITS = 64


class PolicyKind(str, enum.Enum):
    MIDPOINT = "midpoint"
    CONVEXITY_WINDOW = "convexity-window"
    USER_VALUES = "user-values"


class WindowPoint(str, enum.Enum):
    PROFILE = "profile"
    MIDPOINT = "midpoint"


@dataclasses.dataclass(frozen=True)
class ConstructionPolicy:
    """How the value of a fresh generator is chosen.

    - ``MIDPOINT``: (x_n + z_n) / 2.
    - ``CONVEXITY_WINDOW``: a point of the open window
      ((x_n + z_n) / 2, min(z_n, x_n + delta_{n-1})), which keeps the
      prefix convex once x_{n+2} = z_n. ``window_point`` picks either the
      point log2(n + 2) of the N* profile (falling back to the window
      midpoint when it leaves the window) or the plain midpoint.
    - ``USER_VALUES``: the given values, consumed in order.
    """

    kind: PolicyKind = PolicyKind.CONVEXITY_WINDOW
    window_point: WindowPoint = WindowPoint.PROFILE
    values: Tuple[Fraction, ...] = ()

    @classmethod
    def midpoint(cls) -> "ConstructionPolicy":
        return cls(PolicyKind.MIDPOINT)

    @classmethod
    def convexity_window(cls, window_point: Union[str, WindowPoint] = WindowPoint.PROFILE) -> "ConstructionPolicy":
        return cls(PolicyKind.CONVEXITY_WINDOW, WindowPoint(window_point))

    @classmethod
    def user_values(cls, values: Sequence[Union[Fraction, int, str]]) -> "ConstructionPolicy":
        parsed = []
        for raw in values:
            if isinstance(raw, str):
                parsed.append(parse_value(raw).key)
            else:
                parsed.append(Fraction(raw))
        return cls(PolicyKind.USER_VALUES, values=tuple(parsed))

    @property
    def label(self) -> str:
        if self.kind is PolicyKind.CONVEXITY_WINDOW:
            return f"{self.kind.value}:{self.window_point.value}"
        return self.kind.value

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "window_point": self.window_point.value if self.kind is PolicyKind.CONVEXITY_WINDOW else None,
            "values": [f"{v.numerator}/{v.denominator}" for v in self.values],
        }


class StepAction(str, enum.Enum):
    TOOK_Z = "took_z"
    INSERTED_GENERATOR = "inserted_generator"


@dataclasses.dataclass(frozen=True)
class TraceStep:
    """Step n producing x_{n+1}.

    ``z``/``z_rep`` are None for the normalization step n = 0.
    ``window`` is the open interval the inserted value had to lie in.
    """

    n: int
    action: StepAction
    value: Value
    rep: ExponentVec
    z: Optional[Value] = None
    z_rep: Optional[ExponentVec] = None
    generator_index: Optional[int] = None
    window: Optional[Tuple[Fraction, Fraction]] = None
    point_rule: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "action": self.action.value,
            "value": format_value(self.value),
            "rep": format_exponent_vec(self.rep),
            "z": None if self.z is None else format_value(self.z),
            "z_rep": None if self.z_rep is None else format_exponent_vec(self.z_rep),
            "generator_index": self.generator_index,
            "window": None if self.window is None else [_fraction_text(w) for w in self.window],
            "point_rule": self.point_rule,
        }


def _fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclasses.dataclass(frozen=True)
class ConstructionTrace:
    policy: ConstructionPolicy
    steps: Tuple[TraceStep, ...]
    prefix: Prefix

    @property
    def generator_values(self) -> Tuple[Value, ...]:
        return self.prefix.generators

    def summary(self) -> Dict[str, Any]:
        inserted = sum(1 for s in self.steps if s.action is StepAction.INSERTED_GENERATOR)
        fallbacks = sum(1 for s in self.steps if s.point_rule == "midpoint-fallback")
        return {
            "policy": self.policy.to_dict(),
            "steps": len(self.steps),
            "generators": inserted,
            "profile_fallbacks": fallbacks,
            "last_value": format_value(self.prefix[-1].value),
        }


# ---------------------------------------------------------------------------
# Value policies
# ---------------------------------------------------------------------------

def profile_point(n: int) -> Fraction:
    """Dyadic approximation of log2(n + 2), the N* value of x_{n+1} with a_1 = 1."""
    with mpmath.workprec(PROFILE_BITS + 32):
        scaled = mpmath.log(n + 2, 2) * mpmath.mpf(2) ** PROFILE_BITS
        numerator = int(mpmath.nint(scaled))
    return Fraction(numerator, 1 << PROFILE_BITS)


def _choose_value(
    policy: ConstructionPolicy,
    n: int,
    keys: Sequence[Fraction],
    z_key: Fraction,
    user_values: Iterator[Fraction],
) -> Tuple[Fraction, Tuple[Fraction, Fraction], str]:
    x_n = keys[n]
    if policy.kind is PolicyKind.MIDPOINT:
        return (x_n + z_key) / 2, (x_n, z_key), "midpoint"
    if policy.kind is PolicyKind.USER_VALUES:
        try:
            value = next(user_values)
        except StopIteration:
            raise PolicyExhaustedError(f"user values exhausted at n={n}") from None
        if not x_n < value < z_key:
            raise ValueOutsideWindowError(n, _fraction_text(value), _fraction_text(x_n), _fraction_text(z_key))
        return value, (x_n, z_key), "user"
    low = (x_n + z_key) / 2
    high = min(z_key, x_n + (x_n - keys[n - 1]))
    if low >= high:
        raise EmptyConvexityWindowError(n, _fraction_text(low), _fraction_text(high))
    middle = (low + high) / 2
    if policy.window_point is WindowPoint.MIDPOINT:
        return middle, (low, high), "midpoint"
    point = profile_point(n)
    if low < point < high:
        return point, (low, high), "profile"
    return middle, (low, high), "midpoint-fallback"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def or_construct(policy: Optional[ConstructionPolicy] = None, steps: int = 100) -> ConstructionTrace:
    """Build x_0 .. x_steps by the Ockham's-razor rule.

    Step 0 inserts a_1 = 1. Every later step n computes z_n with an
    incrementally extended ``SublikenTracker``; the new generator of an
    insertion step exceeds every previous one, so the tracker only ever
    inserts it in place.

    Args:
        policy: Value policy; defaults to ConvexityWindow with the profile point.
        steps: Number of steps, >= 1.

    Returns:
        The trace; its prefix equals the enumeration of the liken generated
        by the inserted values, up to x_steps.

    Raises:
        ValueError: ``steps < 1``.
        EmptyConvexityWindowError: ConvexityWindow found no room at some n.
        ValueCollisionError: z_n has two formal representations.
        PolicyExhaustedError: User values ran out.
        ValueOutsideWindowError: A user value is not inside (x_n, z_n).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    policy = policy or ConstructionPolicy()
    kind = ValueKind.RATIONAL
    tracker = SublikenTracker(kind)
    user_values = iter(policy.values)
    keys: List[Fraction] = [Fraction(0), Fraction(1)]
    reps: List[ExponentVec] = [ExponentVec(), ExponentVec.unit(1)]
    gens: List[Fraction] = [Fraction(1)]
    tracker.add_generator(1, Fraction(1))
    trace: List[TraceStep] = [
        TraceStep(
            0,
            StepAction.INSERTED_GENERATOR,
            Value(kind, Fraction(1)),
            ExponentVec.unit(1),
            generator_index=1,
            point_rule="normalization",
        )
    ]
    for n in range(1, steps):
        z_key, z_reps = tracker.next_above(keys[n])
        if len(z_reps) > 1:
            raise ValueCollisionError(n)
        z_rep = next(iter(z_reps))
        z_value = Value(kind, z_key)
        if reps[n].support.isdisjoint(z_rep.support):
            keys.append(z_key)
            reps.append(z_rep)
            trace.append(TraceStep(n, StepAction.TOOK_Z, z_value, z_rep, z=z_value, z_rep=z_rep))
            continue
        value, window, rule = _choose_value(policy, n, keys, z_key, user_values)
        k = len(gens) + 1
        gens.append(value)
        tracker.add_generator(k, value)
        keys.append(value)
        reps.append(ExponentVec.unit(k))
        trace.append(
            TraceStep(
                n,
                StepAction.INSERTED_GENERATOR,
                Value(kind, value),
                ExponentVec.unit(k),
                z=z_value,
                z_rep=z_rep,
                generator_index=k,
                window=window,
                point_rule=rule,
            )
        )
    spec = family_custom([Value(kind, g) for g in gens], kind=kind, name=f"or_construct[{policy.label}]")
    elements = tuple(Element(n, Value(kind, key), frozenset({rep})) for n, (key, rep) in enumerate(zip(keys, reps)))
    prefix = Prefix(spec=spec, elements=elements, generators=tuple(Value(kind, g) for g in gens))
    return ConstructionTrace(policy, tuple(trace), prefix)


# ---------------------------------------------------------------------------
# Trace checks
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class TraceIssue:
    n: int
    rule: str
    detail: str

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "rule": self.rule, "detail": self.detail}


def replay_trace(trace: ConstructionTrace, upto: Optional[int] = None) -> List[TraceIssue]:
    """Recompute z_n for each step with a fresh ``subliken_z`` and compare.

    Args:
        trace: The trace to replay.
        upto: Last step index to replay (default: all).

    Returns:
        Disagreements in z_n or in the action the OR rule prescribes.
    """
    prefix = trace.prefix
    issues: List[TraceIssue] = []
    for step in trace.steps[1:]:
        if upto is not None and step.n > upto:
            break
        z = subliken_z(prefix, step.n)
        if step.z is None or z.value.key != step.z.key:
            issues.append(TraceIssue(step.n, "z", f"replayed z_n {format_value(z.value)} != recorded {step.z}"))
            continue
        disjoint = prefix[step.n].support.isdisjoint(z.rep.support)
        expected = StepAction.TOOK_Z if disjoint else StepAction.INSERTED_GENERATOR
        if step.action is not expected:
            issues.append(TraceIssue(step.n, "action", f"replay prescribes {expected.value}, trace has {step.action.value}"))
    return issues


def trace_invariant_violations(trace: ConstructionTrace) -> List[TraceIssue]:
    """Check the OR rule, the window rule and x_{n+2} = z_n after insertions."""
    prefix = trace.prefix
    issues: List[TraceIssue] = []
    for step in trace.steps[1:]:
        n = step.n
        x_n = prefix[n]
        if step.value.key != prefix.keys[n + 1]:
            issues.append(TraceIssue(n, "prefix", "step value differs from x_(n+1)"))
        disjoint = x_n.support.isdisjoint(step.z_rep.support)
        if step.action is StepAction.TOOK_Z:
            if not disjoint:
                issues.append(TraceIssue(n, "or", "took z_n although supports intersect"))
            if step.value.key != step.z.key:
                issues.append(TraceIssue(n, "or", "took a value other than z_n"))
            continue
        if disjoint:
            issues.append(TraceIssue(n, "or", "inserted a generator although supports are disjoint"))
        if not x_n.value.key < step.value.key < step.z.key:
            issues.append(TraceIssue(n, "window", "inserted value outside (x_n, z_n)"))
        if step.window is not None and not step.window[0] < step.value.key < step.window[1]:
            issues.append(TraceIssue(n, "window", "inserted value outside its policy window"))
        if n + 2 < len(prefix) and prefix.keys[n + 2] != step.z.key:
            issues.append(TraceIssue(n, "after_insertion", "x_(n+2) differs from the pre-insertion z_n"))
    return issues


def prefix_from_trace_records(records: Iterable[Mapping[str, Any]]) -> Prefix:
    """Rebuild the prefix of an exported trace (``TraceStep.to_dict`` rows).

    The inserted generators are enumerated afresh; every recorded value and
    representation must agree with that enumeration.

    Raises:
        ValueError: The trace is empty.
        KeyError: A record lacks a field.
        InternalConsistencyError: A record disagrees with the enumeration.
    """
    rows = sorted(records, key=lambda r: r["n"])
    if not rows:
        raise ValueError("trace has no steps")
    gens = [parse_value(r["value"]) for r in rows if r["action"] == StepAction.INSERTED_GENERATOR.value]
    spec = family_custom(gens, kind=ValueKind.RATIONAL, name=f"trace({len(gens)} generators)")
    prefix = enumerate_prefix(spec, Count(len(rows) + 1))
    for position, row in enumerate(rows):
        if row["n"] != position:
            raise InternalConsistencyError(f"trace step {position} is missing")
        element = prefix[position + 1]
        if format_value(element.value) != row["value"] or format_exponent_vec(element.rep) != row["rep"]:
            raise InternalConsistencyError(f"trace step n={position} disagrees with its generators")
    return prefix


# ---------------------------------------------------------------------------
# Main theorem
# ---------------------------------------------------------------------------

class TheoremVerdict(str, enum.Enum):
    THEOREM_CONSISTENT = "theorem_consistent"
    HYPOTHESIS_FAILS = "hypothesis_fails"
    COUNTEREXAMPLE_FLAG = "counterexample_flag"


@dataclasses.dataclass(frozen=True)
class MainTheoremReport:
    """Convexity and OR reports, the comparison with N* and the verdict.

    ``reverification`` is set only for COUNTEREXAMPLE_FLAG: the outcome of
    re-enumerating the prefix with the brute-force oracle.
    """

    convexity: PropertyReport
    or_report: PropertyReport
    iso: Optional[OrderIsoResult]
    verdict: TheoremVerdict
    failed_hypotheses: Tuple[str, ...] = ()
    reverification: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "failed_hypotheses": list(self.failed_hypotheses),
            "convexity": self.convexity.to_dict(),
            "or": self.or_report.to_dict(),
            "iso": None if self.iso is None else self.iso.to_dict(),
            "reverification": self.reverification,
        }


def _reverify(prefix: Prefix) -> str:
    oracle = brute_force_prefix(prefix.spec, prefix[-1].value)
    if oracle.keys != prefix.keys or any(a.reps != b.reps for a, b in zip(oracle.elements, prefix.elements)):
        return "oracle disagrees with the enumeration: engine bug"
    if not (check_convexity(oracle).passed and check_or(oracle).passed):
        return "oracle prefix fails a hypothesis: checker bug"
    return "confirmed by the brute-force oracle"


def verify_main_theorem(prefix: Prefix) -> MainTheoremReport:
    """Empirical check that (C) and (OR) force the representation pattern of N*.

    Raises:
        NonUniqueError: The prefix has an element with several representations.
        InternalConsistencyError: A consistent prefix has an irreducible x_n
            with n + 1 composite.
    """
    offender = prefix.first_non_unique()
    if offender is not None:
        raise NonUniqueError(sorted(offender.reps), offender.index)
    convexity = check_convexity(prefix)
    or_report = check_or(prefix)
    failed = tuple(name for name, report in (("C", convexity), ("OR", or_report)) if not report.passed)
    if failed:
        return MainTheoremReport(convexity, or_report, None, TheoremVerdict.HYPOTHESIS_FAILS, failed)
    nstar = enumerate_prefix(family_nstar(), Count(len(prefix)))
    iso = order_iso_prefix_test(prefix, nstar)
    if not iso.consistent:
        return MainTheoremReport(
            convexity, or_report, iso, TheoremVerdict.COUNTEREXAMPLE_FLAG, reverification=_reverify(prefix)
        )
    if set(prefix.irreducible_indices) != nstar_positions(prefix.last_index):
        raise InternalConsistencyError("irreducible indices differ from {n : n + 1 prime}")
    return MainTheoremReport(convexity, or_report, iso, TheoremVerdict.THEOREM_CONSISTENT)
