"""Registry of property checkers selectable from the command line.

Each entry maps a CLI property name (``"disjoint-support"``) to a callable
``fn(prefix, **options) -> PropertyReport`` and a one-line description.
Checkers ignore options they do not use, so the executor can forward one
option dict to every selected check.

Adding a checker requires a single ``register()`` call; neither the
executor nor the CLI changes.

Public API
----------
register(name, fn, description)
    Register a checker.
names() -> list[str]
    Registered names in registration order.
get_entries() -> list[dict]
    Entries with keys name, fn, description.
call(name, prefix, options) -> PropertyReport
    Run a registered checker.
"""

from __future__ import annotations

from typing import Any, Callable, Dict, List, Optional

from src.liken_core import Prefix
from src.properties import (
    PropertyReport,
    check_bertrand,
    check_convexity,
    check_disjoint_support,
    check_gap_lemmas,
    check_legendre,
    check_or,
    check_parity,
    check_positions,
    check_separation,
    check_uniqueness,
    dimension,
)

Checker = Callable[..., PropertyReport]

_REGISTRY: Dict[str, Dict[str, Any]] = {}


def register(name: str, fn: Checker, description: str = "") -> None:
    """Register a property checker.

    Args:
        name: CLI property name.
        fn: Callable ``fn(prefix, **options)`` returning a ``PropertyReport``.
        description: One-line summary for ``--help`` output.

    Postconditions:
        - The checker is available via ``get_entries()``, ``names()`` and
          ``call()``. An existing name is overwritten.
    """
    _REGISTRY[name] = {"name": name, "fn": fn, "description": description}


def names() -> List[str]:
    return list(_REGISTRY)


def get_entries() -> List[Dict[str, Any]]:
    return list(_REGISTRY.values())


def call(name: str, prefix: Prefix, options: Optional[Dict[str, Any]] = None) -> PropertyReport:
    """Run the checker registered as ``name`` on ``prefix``.

    Raises:
        KeyError: If ``name`` is not registered.
    """
    return _REGISTRY[name]["fn"](prefix, **(options or {}))


# ---------------------------------------------------------------------------
# Built-in checkers
# ---------------------------------------------------------------------------

def _plain(fn: Callable[[Prefix], PropertyReport]) -> Checker:
    def run(prefix: Prefix, **_: Any) -> PropertyReport:
        return fn(prefix)

    run.__name__ = fn.__name__
    return run


def _legendre(prefix: Prefix, checkpoints=None, **_: Any) -> PropertyReport:
    return check_legendre(prefix, checkpoints)


def _uniqueness(prefix: Prefix, **_: Any) -> PropertyReport:
    return check_uniqueness(prefix.spec, prefix)


def _gap_lemmas(prefix: Prefix, trials: int = 1000, seed: int = 0, **_: Any) -> PropertyReport:
    return check_gap_lemmas(prefix, trials=trials, seed=seed)


register("convexity", _plain(check_convexity), "2x_(k+1) > x_k + x_(k+2) for every k")
register("disjoint-support", _plain(check_disjoint_support), "consecutive elements share no generator")
register("parity", _plain(check_parity), "a_1 never divides two consecutive elements")
register("or", _plain(check_or), "disjoint supports of x_n and z_n force x_(n+1) = z_n")
register("bertrand", _plain(check_bertrand), "a generator in every window [x_n, x_n + a_1]")
register("legendre", _legendre, "generator-count ratio trend at checkpoints")
register("separation", _plain(check_separation), "consecutive irreducible pairs in the prefix")
register("uniqueness", _uniqueness, "one representation per element, certified where possible")
register("dimension", _plain(dimension), "number of irreducibles")
register("positions", _plain(check_positions), "irreducible indices against {n : n + 1 prime}")
register("gap-lemmas", _gap_lemmas, "sampled gap inequalities implied by convexity")
