"""Numerical-semigroup invariants: Apéry sets, Frobenius number, gaps, genus.

The membership table is a numpy boolean array built by unbounded-knapsack
closure: for each generator g and residue r, the chain table[r::g] is
closed under "+g" by a cumulative logical OR.

Dependencies:
    numpy, math, functools, src.families (minimalize), src.errors.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.errors import (
    EmptyListError,
    InternalConsistencyError,
    NoGapsError,
    NonPositiveError,
    NotAMemberError,
    NotCofiniteError,
)
from src.families import LikenSpec, minimalize


def membership_table(gens: Sequence[int], bound: int) -> np.ndarray:
    """Boolean table ``t`` with ``t[v]`` iff v in <gens>, for 0 <= v <= bound."""
    table = np.zeros(bound + 1, dtype=bool)
    table[0] = True
    for g in gens:
        for r in range(min(g, bound + 1)):
            table[r::g] = np.logical_or.accumulate(table[r::g])
    return table


def _longest_run_end(table: np.ndarray, length: int) -> int:
    """Index where the first run of ``length`` consecutive members starts, or -1."""
    run = 0
    for v, member in enumerate(table.tolist()):
        run = run + 1 if member else 0
        if run == length:
            return v - length + 1
    return -1


@dataclasses.dataclass(frozen=True)
class NumericalSemigroup:
    """Submonoid of (N, +) with its membership table.

    Attributes:
        minimal_gens: Sorted minimal generating system.
        gcd: gcd of the generators.
        table: Membership of 0..bound. When ``gcd == 1`` the table contains a
            run of ``multiplicity`` consecutive members, so every integer
            beyond the table is a member.
        redundancies: Removed input generators with a decomposition.
    """

    minimal_gens: Tuple[int, ...]
    gcd: int
    table: np.ndarray = dataclasses.field(compare=False, repr=False)
    redundancies: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()

    @classmethod
    def from_generators(cls, gens: Sequence[int]) -> "NumericalSemigroup":
        """Minimalize ``gens`` and build a sufficient membership table.

        The table starts at (max gen)^2 + max gen and doubles until it holds
        a run of min-gen consecutive members (every residue class mod the
        smallest generator is then covered).

        Raises:
            EmptyListError: ``gens`` is empty.
            NonPositiveError: Some generator is < 1.
        """
        if not gens:
            raise EmptyListError("numerical semigroup needs at least one generator")
        for i, g in enumerate(gens, start=1):
            if g < 1:
                raise NonPositiveError(i)
        minimal, redundant = minimalize(gens)
        divisor = functools.reduce(math.gcd, minimal)
        top = minimal[-1]
        bound = top * top + top
        table = membership_table(minimal, bound)
        if divisor == 1:
            while _longest_run_end(table, minimal[0]) < 0:
                bound *= 2
                table = membership_table(minimal, bound)
        return cls(minimal, divisor, table, redundant)

    @classmethod
    def from_spec(cls, spec: LikenSpec) -> "NumericalSemigroup":
        return cls.from_generators(spec.minimal_gens)

    @property
    def multiplicity(self) -> int:
        return self.minimal_gens[0]

    @property
    def embedding_dimension(self) -> int:
        return len(self.minimal_gens)

    @property
    def bound(self) -> int:
        return self.table.size - 1

    @property
    def cofinite(self) -> bool:
        return self.gcd == 1

    def contains(self, v: int) -> bool:
        if v < 0:
            return False
        if v <= self.bound:
            return bool(self.table[v])
        if self.cofinite:
            return True
        return v % self.gcd == 0 and bool(membership_table(self.minimal_gens, v)[v])

    def members_up_to(self, bound: int) -> List[int]:
        if bound <= self.bound:
            return np.flatnonzero(self.table[: bound + 1]).tolist()
        return np.flatnonzero(membership_table(self.minimal_gens, bound)).tolist()

    def _require_cofinite(self) -> None:
        if not self.cofinite:
            raise NotCofiniteError(f"gcd {self.gcd} != 1: the complement is infinite")


def apery_set(s: NumericalSemigroup, m: int) -> List[int]:
    """Least member of ``s`` in each residue class mod ``m``.

    Returns:
        Sorted list with exactly ``m`` entries.

    Raises:
        NotCofiniteError: ``gcd(s) != 1``.
        NotAMemberError: ``m < 1`` or ``m`` not in ``s``.
    """
    s._require_cofinite()
    if m < 1 or not s.contains(m):
        raise NotAMemberError(f"{m} is not a positive member of the semigroup")
    least: Dict[int, int] = {}
    table = s.table
    gap_list = np.flatnonzero(~table)
    largest_gap = int(gap_list[-1]) if gap_list.size else -1
    # every Apery element is at most the largest gap plus m
    if largest_gap + m > s.bound:
        table = membership_table(s.minimal_gens, largest_gap + m)
    for v in np.flatnonzero(table).tolist():
        r = v % m
        if r not in least:
            least[r] = v
            if len(least) == m:
                break
    if len(least) != m:
        raise InternalConsistencyError(f"membership table misses residues mod {m}")
    return sorted(least.values())


def genus_and_gaps(s: NumericalSemigroup) -> Tuple[int, List[int]]:
    """The finite complement N minus S and its size.

    Raises:
        NotCofiniteError: ``gcd(s) != 1``.
    """
    s._require_cofinite()
    gap_list = np.flatnonzero(~s.table).tolist()
    return len(gap_list), gap_list


def frobenius(s: NumericalSemigroup) -> int:
    """Largest natural not in ``s``: max(Ap(s, m)) - m, checked against the table.

    Raises:
        NotCofiniteError: ``gcd(s) != 1``.
        NoGapsError: ``s`` is all of N.
        InternalConsistencyError: The Apéry value disagrees with the table.
    """
    s._require_cofinite()
    if s.multiplicity == 1:
        raise NoGapsError("the semigroup is all of N")
    m = s.multiplicity
    value = max(apery_set(s, m)) - m
    _, gap_list = genus_and_gaps(s)
    if not gap_list or gap_list[-1] != value:
        raise InternalConsistencyError(f"Apery Frobenius {value} disagrees with table gaps")
    return value
