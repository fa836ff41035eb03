"""Executor: run one liken-lab command from a resolved run config.

This module receives a run config dict of the form:
    {"command": "enumerate" | "check" | "compare" | "semigroup"
                | "construct" | "verify-main",
     "family": ..., "count": ..., "props": [...], "format": ..., ...}
(keys mirror the long CLI flag names with ``-`` replaced by ``_``) and
executes the matching runner from ``COMMAND_REGISTRY``.

Telemetry instrumentation:
    ``execute`` creates (or accepts) a ``RunContext`` and threads it to the
    runner. Runners log each stage through ``dataclasses.replace()``
    snapshots carrying their own ``span`` label; the shared ``ctx`` is never
    mutated at this layer. ``log_run_outcome_and_stats`` is emitted exactly
    once per call, on success and on error.

Environment variables
---------------------
LIKEN_OUT_DIR : Default output directory for artifacts (``liken_out``).

Dependencies:
    dataclasses, os, time, datetime, pathlib, src.families, src.liken_core,
    src.check_registry, src.morphisms, src.semigroup_tools, src.construct,
    src.exporters, src.run_telemetry.
"""

from __future__ import annotations

import contextlib
import dataclasses
import os
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import src.check_registry as check_registry
from src.construct import (
    ConstructionPolicy,
    TheoremVerdict,
    or_construct,
    prefix_from_trace_records,
    verify_main_theorem,
)
from src.errors import LikenError, SpecConfigError
from src.exactnum import parse_value
from src.exporters import (
    read_jsonl,
    report_table,
    write_json,
    write_jsonl,
    write_legendre_dat,
    write_prefix,
    write_text_atomic,
)
from src.families import LikenSpec, load_spec_config, spec_from_config
from src.liken_core import Count, Prefix, ValueBound, enumerate_prefix
from src.morphisms import compare_likens
from src.properties import Verdict, legendre_series
from src.run_telemetry import RunContext, log_check_execution, log_run_outcome_and_stats, log_stage
from src.semigroup_tools import NumericalSemigroup, apery_set, frobenius, genus_and_gaps

DEFAULT_OUT_DIR = "liken_out"
DEFAULT_COUNT = 100
DEFAULT_STEPS = 100
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

ALLOWED_FORMATS = ("json", "csv", "table")
_PREFIX_SUFFIX = {"json": ".json", "csv": ".csv", "table": ".txt"}
_FAMILY_FIELDS = {"modclass": "p", "numerical": "gens", "custom_logint": "ints", "custom_rational": "values"}

CommandRunner = Callable[[Dict[str, Any], RunContext], Tuple[int, Dict[str, Any]]]


# ---------------------------------------------------------------------------
# Config coercion
# ---------------------------------------------------------------------------

def _coerce_positive_int(value: Any, *, name: str) -> Optional[int]:
    if value is None:
        return None
    if isinstance(value, bool):
        raise ValueError(f"{name} must be a positive integer")
    try:
        result = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a positive integer")
    if result <= 0:
        raise ValueError(f"{name} must be a positive integer")
    return result


def _coerce_int_list(value: Any, *, name: str) -> Optional[List[int]]:
    if value is None:
        return None
    parts = value.split(",") if isinstance(value, str) else value
    try:
        return [int(p) for p in parts if str(p).strip()]
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a comma-separated list of integers")


def _coerce_str_list(value: Any) -> List[str]:
    if value is None:
        return []
    parts = value.split(",") if isinstance(value, str) else value
    return [str(p).strip() for p in parts if str(p).strip()]


def _out_dir(config: Dict[str, Any]) -> Path:
    return Path(config.get("out_dir") or os.environ.get("LIKEN_OUT_DIR", DEFAULT_OUT_DIR))


def _format(config: Dict[str, Any]) -> str:
    fmt = (config.get("format") or "json").strip().lower()
    if fmt not in ALLOWED_FORMATS:
        raise ValueError(f"format must be one of {ALLOWED_FORMATS}, got {fmt!r}")
    return fmt


def resolve_spec(config: Dict[str, Any], suffix: str = "") -> Optional[LikenSpec]:
    """Spec named by ``spec{suffix}`` (a JSON file) or ``family{suffix}`` flags.

    ``suffix`` is ``"_b"`` for the second liken of ``compare``.

    Returns:
        The spec, or None when neither key is set.

    Raises:
        SpecConfigError: Unknown family or malformed parameters.
    """
    path = config.get(f"spec{suffix}")
    if path:
        return load_spec_config(path)
    family = config.get(f"family{suffix}")
    if not family:
        return None
    family = str(family).strip().lower().replace("-", "_")
    spec_config: Dict[str, Any] = {"kind": family}
    field = _FAMILY_FIELDS.get(family)
    if field is not None:
        if config.get(f"{field}{suffix}") is None:
            raise SpecConfigError(f"family {family!r} needs --{field}{suffix.replace('_', '-')}")
        spec_config[field] = config[f"{field}{suffix}"]
    return spec_from_config(spec_config)


def _require_spec(config: Dict[str, Any], suffix: str = "") -> LikenSpec:
    spec = resolve_spec(config, suffix)
    if spec is None:
        raise SpecConfigError(f"no spec given: pass --family{suffix.replace('_', '-')} or --spec{suffix.replace('_', '-')}")
    return spec


def _limit(config: Dict[str, Any]):
    """``--bound`` as a ValueBound, else ``--count N`` as Count(N + 1)."""
    bound = config.get("bound")
    if bound is not None:
        return ValueBound(parse_value(str(bound)))
    count = _coerce_positive_int(config.get("count"), name="count") or DEFAULT_COUNT
    return Count(count + 1)


# ---------------------------------------------------------------------------
# Stage timing
# ---------------------------------------------------------------------------

@contextlib.contextmanager
def _stage(ctx: RunContext, stage: str, detail: Dict[str, Any]) -> Iterator[Dict[str, Any]]:
    """Time the enclosed block and log it as a ``stage`` record.

    The caller may add fields to ``detail`` inside the block.
    """
    snap = dataclasses.replace(ctx, span=stage)
    start_ts = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    status = "error"
    try:
        yield detail
        status = "ok"
    finally:
        log_stage(
            snap,
            stage=stage,
            elapsed_ms=(time.perf_counter() - t0) * 1000,
            start_ts=start_ts,
            end_ts=datetime.now(timezone.utc).isoformat(),
            status=status,
            detail=detail,
        )


def _enumerate(spec: LikenSpec, config: Dict[str, Any], ctx: RunContext) -> Prefix:
    with _stage(ctx, "enumerate", {"spec": spec.name}) as detail:
        prefix = enumerate_prefix(spec, _limit(config))
        detail["length"] = len(prefix)
    return prefix


# ---------------------------------------------------------------------------
# Command runners
# ---------------------------------------------------------------------------

def _run_enumerate(config: Dict[str, Any], ctx: RunContext) -> Tuple[int, Dict[str, Any]]:
    spec = _require_spec(config)
    fmt = _format(config)
    prefix = _enumerate(spec, config, ctx)
    with _stage(ctx, "export", {"format": fmt}) as detail:
        path = write_prefix(prefix, _out_dir(config) / f"prefix{_PREFIX_SUFFIX[fmt]}", fmt)
        detail["path"] = str(path)
    return EXIT_OK, {
        "spec": spec.name,
        "length": len(prefix),
        "irreducible_count": len(prefix.irreducible_indices),
        "path": str(path),
    }


def _check_options(config: Dict[str, Any]) -> Dict[str, Any]:
    options: Dict[str, Any] = {}
    checkpoints = _coerce_int_list(config.get("checkpoints"), name="checkpoints")
    if checkpoints:
        options["checkpoints"] = checkpoints
    trials = _coerce_positive_int(config.get("trials"), name="trials")
    if trials is not None:
        options["trials"] = trials
    if config.get("seed") is not None:
        options["seed"] = int(config["seed"])
    return options


def _run_check(config: Dict[str, Any], ctx: RunContext) -> Tuple[int, Dict[str, Any]]:
    spec = _require_spec(config)
    fmt = _format(config)
    props = _coerce_str_list(config.get("props")) or check_registry.names()
    unknown = [p for p in props if p not in check_registry.names()]
    if unknown:
        raise ValueError(f"unknown properties {unknown}; known: {check_registry.names()}")
    prefix = _enumerate(spec, config, ctx)
    options = _check_options(config)

    reports = []
    for name in props:
        snap = dataclasses.replace(ctx, span=f"check:{name}")
        start_ts = datetime.now(timezone.utc).isoformat()
        t0 = time.perf_counter()
        report = check_registry.call(name, prefix, options)
        log_check_execution(
            snap,
            property_id=report.property_id,
            verdict=report.verdict.value,
            qualifier=report.qualifier,
            prefix_len=report.prefix_len,
            check_elapsed_ms=(time.perf_counter() - t0) * 1000,
            call_start_ts=start_ts,
            call_end_ts=datetime.now(timezone.utc).isoformat(),
        )
        reports.append(report)

    payload = [r.to_dict() for r in reports]
    out = _out_dir(config)
    with _stage(ctx, "export", {"format": fmt}) as detail:
        paths = [str(write_json(out / "reports.json", {"spec": spec.name, "reports": payload}))]
        if fmt == "table":
            paths.append(str(write_text_atomic(out / "reports.txt", report_table(payload))))
        for report in reports:
            if report.property_id == "legendre" and report.verdict is not Verdict.INAPPLICABLE:
                paths.append(str(write_legendre_dat(out / "legendre.dat", legendre_series(report))))
        detail["paths"] = paths

    failed = [r.property_id for r in reports if r.verdict is Verdict.FAIL]
    return (EXIT_FAILURE if failed else EXIT_OK), {
        "spec": spec.name,
        "prefix_len": len(prefix),
        "failed": failed,
        "reports": payload,
        "paths": paths,
    }


def _run_compare(config: Dict[str, Any], ctx: RunContext) -> Tuple[int, Dict[str, Any]]:
    spec_a = _require_spec(config)
    spec_b = _require_spec(config, "_b")
    count = _coerce_positive_int(config.get("count"), name="count") or DEFAULT_COUNT
    k_max = _coerce_positive_int(config.get("k_max"), name="k_max") or 10
    precision = _coerce_positive_int(config.get("precision"), name="precision")
    with _stage(ctx, "compare", {"a": spec_a.name, "b": spec_b.name}) as detail:
        comparison = compare_likens(spec_a, spec_b, count + 1, k_max=k_max, precision=precision)
        detail["outcome"] = comparison.homothety.outcome.value
    result = {"a": spec_a.name, "b": spec_b.name, **comparison.to_dict()}
    with _stage(ctx, "export", {}) as detail:
        detail["path"] = str(write_json(_out_dir(config) / "compare.json", result))
    return (EXIT_OK if comparison.isomorphic else EXIT_FAILURE), result


def _run_semigroup(config: Dict[str, Any], ctx: RunContext) -> Tuple[int, Dict[str, Any]]:
    gens = _coerce_int_list(config.get("gens"), name="gens")
    if not gens:
        spec = _require_spec(config)
        if spec.minimal_gens is None:
            raise SpecConfigError(f"spec {spec.name!r} is not a numerical semigroup")
        gens = list(spec.minimal_gens)
    with _stage(ctx, "semigroup", {"gens": gens}) as detail:
        semigroup = NumericalSemigroup.from_generators(gens)
        detail["bound"] = semigroup.bound
        result: Dict[str, Any] = {
            "minimal_gens": list(semigroup.minimal_gens),
            "redundant": [{"value": v, "decomposition": list(d)} for v, d in semigroup.redundancies],
            "gcd": semigroup.gcd,
            "cofinite": semigroup.cofinite,
            "multiplicity": semigroup.multiplicity,
            "embedding_dimension": semigroup.embedding_dimension,
            "frobenius": None,
            "genus": None,
            "gaps": None,
            "apery": {},
        }
        if semigroup.cofinite:
            genus, gap_list = genus_and_gaps(semigroup)
            result["frobenius"] = frobenius(semigroup) if gap_list else None
            result["genus"] = genus
            result["gaps"] = gap_list
            moduli = _coerce_int_list(config.get("m"), name="m") or [semigroup.multiplicity]
            result["apery"] = {str(m): apery_set(semigroup, m) for m in moduli}
    with _stage(ctx, "export", {}) as detail:
        detail["path"] = str(write_json(_out_dir(config) / "semigroup.json", result))
    return EXIT_OK, result


def _policy(config: Dict[str, Any]) -> ConstructionPolicy:
    kind = (config.get("policy") or "convexity-window").strip().lower()
    if kind == "midpoint":
        return ConstructionPolicy.midpoint()
    if kind == "convexity-window":
        return ConstructionPolicy.convexity_window(config.get("window_point") or "profile")
    if kind == "user-values":
        values = _coerce_str_list(config.get("user_values"))
        if not values:
            raise ValueError("policy user-values needs --user-values")
        return ConstructionPolicy.user_values(values)
    raise ValueError(f"unknown policy {kind!r}")


def _construct(config: Dict[str, Any], ctx: RunContext):
    policy = _policy(config)
    steps = _coerce_positive_int(config.get("steps"), name="steps") or DEFAULT_STEPS
    with _stage(ctx, "construct", {"policy": policy.label, "steps": steps}) as detail:
        trace = or_construct(policy, steps)
        detail["generators"] = len(trace.generator_values)
    return trace


def _run_construct(config: Dict[str, Any], ctx: RunContext) -> Tuple[int, Dict[str, Any]]:
    trace = _construct(config, ctx)
    with _stage(ctx, "export", {}) as detail:
        path = write_jsonl(_out_dir(config) / "trace.jsonl", (s.to_dict() for s in trace.steps))
        detail["path"] = str(path)
    return EXIT_OK, {**trace.summary(), "path": str(path)}


def _run_verify_main(config: Dict[str, Any], ctx: RunContext) -> Tuple[int, Dict[str, Any]]:
    spec = resolve_spec(config)
    if config.get("trace"):
        source = str(config["trace"])
        with _stage(ctx, "load_trace", {"path": source}) as detail:
            prefix = prefix_from_trace_records(read_jsonl(source))
            detail["length"] = len(prefix)
    elif spec is not None:
        prefix = _enumerate(spec, config, ctx)
        source = spec.name
    else:
        trace = _construct(config, ctx)
        prefix = trace.prefix
        source = prefix.spec.name
    with _stage(ctx, "verify", {"source": source}) as detail:
        report = verify_main_theorem(prefix)
        detail["verdict"] = report.verdict.value
    result = {"source": source, "prefix_len": len(prefix), **report.to_dict()}
    with _stage(ctx, "export", {}) as detail:
        detail["path"] = str(write_json(_out_dir(config) / "verify_main.json", result))
    ok = report.verdict is TheoremVerdict.THEOREM_CONSISTENT
    return (EXIT_OK if ok else EXIT_FAILURE), result


COMMAND_REGISTRY: Dict[str, CommandRunner] = {
    "enumerate": _run_enumerate,
    "check": _run_check,
    "compare": _run_compare,
    "semigroup": _run_semigroup,
    "construct": _run_construct,
    "verify-main": _run_verify_main,
}


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, LikenError):
        return exc.exit_code
    return EXIT_USAGE


def _error_dict(exc: BaseException) -> Dict[str, Any]:
    if isinstance(exc, LikenError):
        return exc.to_dict()
    code = "usage" if isinstance(exc, (ValueError, KeyError, TypeError)) else "internal"
    return {"type": type(exc).__name__, "code": code, "message": str(exc)}


def execute(config: Dict[str, Any], ctx: Optional[RunContext] = None) -> Dict[str, Any]:
    """Execute the command named by ``config["command"]``.

    Args:
        config: Resolved run config (CLI flags merged over ``--config`` file
            values).
        ctx: Optional ``RunContext``; one is created when omitted.

    Returns:
        ``{"command", "exit_code", "result"}`` on success, or
        ``{"command", "exit_code", "error": {"type", "code", "message"}}``.
        ``exit_code`` is 0 for success or all-pass, 1 for a property failure
        or a failed well-formed run, 2 for usage and spec errors.

    Postconditions:
        - Exceptions are captured in the return dict, never raised.
        - Exactly one ``run_outcome_and_stats`` record is emitted.
    """
    command = config.get("command") or ""
    if ctx is None:
        ctx = RunContext(command=command)
    t0 = time.perf_counter()
    start_ts = datetime.now(timezone.utc)

    try:
        if command not in COMMAND_REGISTRY:
            raise ValueError(f"unknown command {command!r}; expected one of {sorted(COMMAND_REGISTRY)}")
        spec = resolve_spec(config) if command != "construct" else None
        if spec is not None:
            ctx = dataclasses.replace(ctx, spec=spec.name)
        exit_code, result = COMMAND_REGISTRY[command](config, ctx)
    except Exception as exc:
        exit_code = _exit_code_for(exc)
        log_run_outcome_and_stats(
            ctx,
            total_wall_clock_runtime_ms=(time.perf_counter() - t0) * 1000,
            start_ts=start_ts,
            end_ts=datetime.now(timezone.utc),
            status="error",
            exit_code=exit_code,
            exception_type=type(exc).__name__,
            exception_message=str(exc),
        )
        return {"command": command, "exit_code": exit_code, "error": _error_dict(exc)}

    log_run_outcome_and_stats(
        ctx,
        total_wall_clock_runtime_ms=(time.perf_counter() - t0) * 1000,
        start_ts=start_ts,
        end_ts=datetime.now(timezone.utc),
        status="success",
        exit_code=exit_code,
    )
    return {"command": command, "exit_code": exit_code, "result": result}
