"""Command-line front door: ``liken <command> [flags]``.

Commands: enumerate, check, compare, semigroup, construct, verify-main.
Flags may also come from a run config file (``--config run.json``), a JSON
object whose keys mirror the long flag names; explicit flags win.

The command result is printed to stdout as one JSON document. Errors are
written to stderr as one JSON line ``{"command", "error": {"type", "code",
"message"}}``. Exit codes: 0 success or all checks pass, 1 property failure
or failed run, 2 usage or spec error.

Environment variables
---------------------
Loaded from ``.env`` with python-dotenv (shell values win):
LIKEN_PRECISION_CEILING, LIKEN_LOG_LEVEL, LIKEN_OUT_DIR.

Dependencies:
    argparse, json, sys, pathlib, python-dotenv, src.executor,
    src.check_registry.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

import src.check_registry as check_registry
from src.errors import SpecConfigError
from src.executor import EXIT_USAGE, execute


def _add_spec_flags(parser: argparse.ArgumentParser, suffix: str = "", label: str = "") -> None:
    parser.add_argument(f"--family{suffix}", help=f"{label}Family: nstar, modclass, numerical, custom_logint, custom_rational.")
    parser.add_argument(f"--p{suffix}", type=int, help=f"{label}Modulus for modclass.")
    parser.add_argument(f"--gens{suffix}", help=f"{label}Comma-separated integers for numerical.")
    parser.add_argument(f"--ints{suffix}", help=f"{label}Comma-separated integers g_i with a_i = ln(g_i).")
    parser.add_argument(f"--values{suffix}", help=f"{label}Comma-separated rationals p/q.")
    parser.add_argument(f"--spec{suffix}", help=f"{label}Path to a JSON spec config.")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run config; explicit flags win.")
    parser.add_argument("--count", type=int, help="Enumerate indices 0..COUNT (default: 100).")
    parser.add_argument("--bound", help="Enumerate values <= BOUND instead (p/q or ln(k)).")
    parser.add_argument("--format", choices=("json", "csv", "table"), help="Output format (default: json).")
    parser.add_argument("--precision", type=int, help="Interval precision in bits for cross-kind comparisons.")
    parser.add_argument("--out-dir", help="Artifact directory (default: $LIKEN_OUT_DIR or liken_out).")


def _add_construct_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--policy", choices=("midpoint", "convexity-window", "user-values"))
    parser.add_argument("--window-point", choices=("profile", "midpoint"))
    parser.add_argument("--steps", type=int, help="Construction steps (default: 100).")
    parser.add_argument("--user-values", help="Comma-separated fresh generator values for user-values.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liken", description="Exact experiments on likens.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="Write a prefix of a liken.")
    _add_spec_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("check", help="Run property checks on a prefix.")
    _add_spec_flags(p)
    _add_common_flags(p)
    p.add_argument("--props", help=f"Comma-separated subset of: {', '.join(check_registry.names())}.")
    p.add_argument("--checkpoints", help="Comma-separated Legendre checkpoints.")
    p.add_argument("--trials", type=int, help="Gap-lemma samples (default: 1000).")
    p.add_argument("--seed", type=int, help="Gap-lemma sampling seed (default: 0).")

    p = sub.add_parser("compare", help="Test two likens for isomorphism.")
    _add_spec_flags(p)
    _add_spec_flags(p, "-b", "Second liken: ")
    _add_common_flags(p)
    p.add_argument("--k-max", type=int, help="Generator positions compared (default: 10).")

    p = sub.add_parser("semigroup", help="Numerical-semigroup invariants.")
    _add_spec_flags(p)
    _add_common_flags(p)
    p.add_argument("--m", help="Comma-separated Apery moduli (default: multiplicity).")

    p = sub.add_parser("construct", help="Build a liken by the OR rule.")
    _add_common_flags(p)
    _add_construct_flags(p)

    p = sub.add_parser("verify-main", help="Check that (C) and (OR) force the N* pattern.")
    p.add_argument("--trace", help="trace.jsonl written by construct; its prefix is verified.")
    _add_spec_flags(p)
    _add_common_flags(p)
    _add_construct_flags(p)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    """Parse command-line arguments.

    Args:
        argv: Argument list (defaults to sys.argv[1:]).
    """
    return build_parser().parse_args(argv)


def _load_run_config(path: str) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecConfigError(f"cannot read run config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SpecConfigError("run config must be a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def resolve_config(args: argparse.Namespace) -> Dict[str, Any]:
    """Merge ``--config`` file values under the explicitly given flags."""
    flags = {k: v for k, v in vars(args).items() if v is not None and k != "config"}
    config = _load_run_config(args.config) if args.config else {}
    config.update(flags)
    return config


def run(argv: Optional[List[str]] = None) -> int:
    """Parse, execute and print; return the process exit code."""
    load_dotenv()
    args = parse_args(argv)
    try:
        config = resolve_config(args)
    except SpecConfigError as exc:
        print(json.dumps({"command": args.command, "error": exc.to_dict()}), file=sys.stderr)
        return EXIT_USAGE
    outcome = execute(config)
    if "error" in outcome:
        print(json.dumps({"command": outcome["command"], "error": outcome["error"]}), file=sys.stderr)
    else:
        print(json.dumps(outcome["result"], indent=2, sort_keys=True, default=str))
    return outcome["exit_code"]


def main(argv=None):
    """CLI entry point; exits with the command's exit code."""
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
