"""Structured telemetry for liken-lab runs.

Provides:
- ``RunContext`` dataclass, created once per CLI run and propagated via
  ``dataclasses.replace()`` snapshots to every stage.
- ``log_stage``: emits a ``record_type="stage"`` JSON record (enumeration,
  construction, export timings).
- ``log_check_execution``: emits a ``record_type="check_execution"`` JSON
  record for one property check.
- ``log_run_outcome_and_stats``: emits a ``record_type="run_outcome_and_stats"``
  aggregate record. Entry points call it on success and on error, so every
  run produces exactly one summary record.
- ``JsonFormatter`` / ``_configure_logger``: one JSON object per line on the
  ``liken.telemetry`` logger, written to standard error.

Environment variables
---------------------
LIKEN_LOG_LEVEL : Logger level name (default ``INFO``); ``WARNING`` silences
    the records.

Dependencies:
    dataclasses, uuid, logging, json, os, datetime.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import os
import uuid
from datetime import datetime
from typing import Any, Dict, Optional

LOGGER_NAME = "liken.telemetry"
DEFAULT_LOG_LEVEL = "INFO"


# ---------------------------------------------------------------------------
# RunContext dataclass
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class RunContext:
    """Label context propagated through a single CLI run.

    Labels are never mutated on the shared instance; call sites use
    ``dataclasses.replace(ctx, span=...)`` to produce per-stage snapshots.
    The ``records`` list is shared across all snapshots, so every ``log_*``
    call appends to the one list the entry point holds.

    Attributes:
        command: CLI subcommand, e.g. ``"check"``.
        run_id: 32-char UUID hex string, unique per run.
        spec: Spec name of the run (empty for ``construct``).
        span: Active span label, e.g. ``"enumerate"``, ``"check:or"``.
        records: One record dict per ``log_*`` call during the run.

    Examples:
        >>> ctx = RunContext(command="check")
        >>> len(ctx.run_id) == 32
        True
        >>> snap = dataclasses.replace(ctx, span="enumerate")
        >>> snap.records is ctx.records
        True
    """

    command: str
    run_id: str = dataclasses.field(default_factory=lambda: uuid.uuid4().hex)
    spec: str = ""
    span: str = ""
    records: list = dataclasses.field(default_factory=list)


# ---------------------------------------------------------------------------
# Logging infrastructure
# ---------------------------------------------------------------------------

class JsonFormatter(logging.Formatter):
    """Format each ``LogRecord`` as a single-line JSON string.

    The record's ``msg`` (a dict) is nested under ``data``; objects that are
    not JSON-serialisable fall back to their ``repr``.
    """

    def format(self, record: logging.LogRecord) -> str:  # noqa: A003
        payload = {
            "level": record.levelname,
            "logger": record.name,
            "timestamp": self.formatTime(record, self.datefmt),
            "data": record.msg,
        }
        return json.dumps(payload, default=repr)


def _level_from_env() -> int:
    name = (os.environ.get("LIKEN_LOG_LEVEL") or DEFAULT_LOG_LEVEL).strip().upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def _configure_logger() -> logging.Logger:
    """Attach a ``JsonFormatter`` stderr handler to ``liken.telemetry`` once.

    Guards against duplicate handlers by looking for an attached
    ``JsonFormatter`` handler, so foreign handlers do not suppress it; the
    level is re-read from ``LIKEN_LOG_LEVEL`` on every call.

    Returns:
        The configured logger.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(_level_from_env())
    if not any(isinstance(h.formatter, JsonFormatter) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(JsonFormatter())
        logger.addHandler(handler)
    logger.propagate = False
    return logger


_logger = _configure_logger()


def _emit(ctx: RunContext, record: Dict[str, Any]) -> None:
    ctx.records.append(record)
    _logger.info(record)


# ---------------------------------------------------------------------------
# Record emitters
# ---------------------------------------------------------------------------

def log_stage(
    ctx: RunContext,
    *,
    stage: str,
    elapsed_ms: float,
    start_ts: str,
    end_ts: str,
    status: str = "ok",
    detail: Optional[Dict[str, Any]] = None,
) -> None:
    """Append a ``stage`` record to *ctx* and emit it.

    Args:
        ctx: The per-stage snapshot.
        stage: Stage name, e.g. ``"enumerate"``, ``"construct"``, ``"export"``.
        elapsed_ms: Wall-clock duration measured with ``time.perf_counter()``.
        start_ts: UTC ISO 8601 string captured before the stage.
        end_ts: UTC ISO 8601 string captured after the stage.
        status: ``"ok"`` or ``"error"``.
        detail: Optional stage-specific fields (element counts, paths); omitted
            from the record when None.

    Postconditions:
        - Exactly one dict with ``record_type="stage"`` is appended.
    """
    record: Dict[str, Any] = {
        "record_type": "stage",
        "command": ctx.command,
        "run_id": ctx.run_id,
        "spec": ctx.spec,
        "span": ctx.span,
        "stage": stage,
        "elapsed_ms": round(elapsed_ms, 3),
        "start_ts": start_ts,
        "end_ts": end_ts,
        "status": status,
    }
    if detail is not None:
        record["detail"] = detail
    _emit(ctx, record)


def log_check_execution(
    ctx: RunContext,
    *,
    property_id: str,
    verdict: str,
    qualifier: Optional[str],
    prefix_len: int,
    check_elapsed_ms: float,
    call_start_ts: str,
    call_end_ts: str,
) -> None:
    """Append a ``check_execution`` record to *ctx* and emit it.

    Examples:
        >>> ctx = RunContext(command="check")
        >>> log_check_execution(ctx, property_id="convexity", verdict="pass",
        ...     qualifier=None, prefix_len=101, check_elapsed_ms=1.5,
        ...     call_start_ts="2026-01-01T00:00:00+00:00",
        ...     call_end_ts="2026-01-01T00:00:00.0015+00:00")
        >>> ctx.records[0]["record_type"]
        'check_execution'
    """
    _emit(
        ctx,
        {
            "record_type": "check_execution",
            "command": ctx.command,
            "run_id": ctx.run_id,
            "spec": ctx.spec,
            "span": ctx.span,
            "property_id": property_id,
            "verdict": verdict,
            "qualifier": qualifier,
            "prefix_len": prefix_len,
            "check_elapsed_ms": round(check_elapsed_ms, 3),
            "call_start_ts": call_start_ts,
            "call_end_ts": call_end_ts,
        },
    )


def log_run_outcome_and_stats(
    ctx: RunContext,
    *,
    total_wall_clock_runtime_ms: float,
    start_ts: datetime,
    end_ts: datetime,
    status: str,
    exit_code: Optional[int] = None,
    exception_type: Optional[str] = None,
    exception_message: Optional[str] = None,
) -> None:
    """Emit the ``run_outcome_and_stats`` aggregate record for the run.

    Called always by ``executor.execute``, both when the command succeeds and
    when it fails, so every run produces exactly one summary record.
    Aggregates ``check_count``, per-verdict counts, ``total_check_ms`` and
    ``stage_count`` from ``ctx.records``.

    Args:
        ctx: The run-level context (the original, not a snapshot).
        total_wall_clock_runtime_ms: End-to-end duration in ms.
        start_ts: UTC-aware ``datetime`` captured before the first stage.
        end_ts: UTC-aware ``datetime`` captured after the last stage.
        status: ``"success"`` or ``"error"``.
        exit_code: Process exit code the command resolves to.
        exception_type: ``type(exc).__name__``; omitted when None.
        exception_message: ``str(exc)``; omitted when None.

    Postconditions:
        - Exactly one dict with ``record_type="run_outcome_and_stats"`` is
          appended to ``ctx.records``.
        - ``is_partial_data`` is True iff ``status == "error"``.
        - Exception fields appear only when provided.
    """
    checks = [r for r in ctx.records if r.get("record_type") == "check_execution"]
    verdict_counts: Dict[str, int] = {}
    for r in checks:
        verdict_counts[r["verdict"]] = verdict_counts.get(r["verdict"], 0) + 1
    record: Dict[str, Any] = {
        "record_type": "run_outcome_and_stats",
        "command": ctx.command,
        "run_id": ctx.run_id,
        "spec": ctx.spec,
        "status": status,
        "is_partial_data": status == "error",
        "exit_code": exit_code,
        "total_wall_clock_runtime_ms": round(total_wall_clock_runtime_ms, 3),
        "start_ts": start_ts.isoformat() if isinstance(start_ts, datetime) else start_ts,
        "end_ts": end_ts.isoformat() if isinstance(end_ts, datetime) else end_ts,
        "check_count": len(checks),
        "verdict_counts": verdict_counts,
        "total_check_ms": round(sum(r.get("check_elapsed_ms", 0.0) for r in checks), 3),
        "stage_count": sum(1 for r in ctx.records if r.get("record_type") == "stage"),
    }
    if exception_type is not None:
        record["exception_type"] = exception_type
    if exception_message is not None:
        record["exception_message"] = exception_message
    _emit(ctx, record)
