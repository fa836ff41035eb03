"""Error hierarchy for liken enumeration, checking and construction.

Every error carries a stable machine-readable ``code`` (written by the CLI to
standard error) and an ``exit_code``: 2 for usage or spec errors, 1 for
failures of a well-formed run.

Dependencies:
    Standard library only.
"""

from __future__ import annotations

from typing import Any, Iterable, Optional


class LikenError(Exception):
    """Base class for all liken-lab errors."""

    code = "liken_error"
    exit_code = 2

    def to_dict(self) -> dict:
        return {"type": type(self).__name__, "code": self.code, "message": str(self)}


class SpecConfigError(LikenError):
    code = "spec_config"


class KindMismatchError(LikenError):
    code = "kind_mismatch"


class EmptySpecError(LikenError):
    code = "empty_spec"


class EmptyListError(LikenError):
    code = "empty_list"


class MixedKindsError(LikenError):
    code = "mixed_kinds"


class NotIncreasingError(LikenError):
    """Generator at 1-based ``index`` is not larger than its predecessor."""

    code = "not_increasing"

    def __init__(self, index: int):
        super().__init__(f"generator {index} is not strictly larger than generator {index - 1}")
        self.index = index


class NonPositiveError(LikenError):
    code = "non_positive"

    def __init__(self, index: int):
        super().__init__(f"generator {index} is not positive")
        self.index = index


class UndecidedComparisonError(LikenError):
    code = "undecided_comparison"
    exit_code = 1

    def __init__(self, precision_bits: int):
        super().__init__(f"comparison undecided at {precision_bits} bits")
        self.precision_bits = precision_bits


class UnknownGeneratorIndexError(LikenError):
    code = "unknown_generator_index"

    def __init__(self, index: int):
        super().__init__(f"spec has no generator with index {index}")
        self.index = index


class NotAnElementError(LikenError):
    code = "not_an_element"
    exit_code = 1


class NonUniqueError(LikenError):
    """Raised where a single representation is required but several exist."""

    code = "non_unique"
    exit_code = 1

    def __init__(self, reps: Iterable[Any], index: Optional[int] = None):
        self.reps = tuple(reps)
        self.index = index
        where = f" at index {index}" if index is not None else ""
        super().__init__(
            f"element{where} has {len(self.reps)} representations: "
            + "; ".join(str(r) for r in self.reps)
        )


class IndexOutOfRangeError(LikenError):
    code = "index_out_of_range"


class LengthMismatchError(LikenError):
    code = "length_mismatch"


class NotAMemberError(LikenError):
    code = "not_a_member"


class NotCofiniteError(LikenError):
    code = "not_cofinite"


class NoGapsError(LikenError):
    code = "no_gaps"


class EmptyConvexityWindowError(LikenError):
    code = "empty_convexity_window"
    exit_code = 1

    def __init__(self, n: int, low: Any = None, high: Any = None):
        super().__init__(f"convexity window empty at n={n}: ({low}, {high})")
        self.n = n
        self.low = low
        self.high = high


class ValueOutsideWindowError(LikenError):
    code = "value_outside_window"
    exit_code = 1

    def __init__(self, n: int, value: Any, low: Any, high: Any):
        super().__init__(f"value {value} at n={n} is not inside ({low}, {high})")
        self.n = n
        self.value = value


class ValueCollisionError(LikenError):
    code = "value_collision"
    exit_code = 1

    def __init__(self, n: int):
        super().__init__(f"two formal elements share one value at n={n}")
        self.n = n


class PolicyExhaustedError(LikenError):
    code = "policy_exhausted"
    exit_code = 1


class InternalConsistencyError(LikenError):
    code = "internal_consistency"
    exit_code = 1
