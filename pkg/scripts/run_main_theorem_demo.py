"""Print the opening steps of the OR construction and the main-theorem verdicts.
Usage: from project root, run: python scripts/run_main_theorem_demo.py [steps]"""
import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dotenv import load_dotenv

load_dotenv()

from src.construct import ConstructionPolicy, or_construct, verify_main_theorem
from src.exactnum import approx_text
from src.families import family_modclass, family_nstar
from src.liken_core import Count, enumerate_prefix


def _pp(obj):
    return json.dumps(obj, indent=2, default=str)


def main():
    steps = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    trace = or_construct(ConstructionPolicy.convexity_window(), steps)

    print("=" * 70)
    print(f"OR CONSTRUCTION ({trace.policy.label}, {steps} steps): first 12 steps")
    print("=" * 70)
    for step in trace.steps[:12]:
        print(
            f"n={step.n:<3} {step.action.value:<19} x={approx_text(step.value, 6):<10}"
            f" rep={step.to_dict()['rep']:<10} rule={step.point_rule or '-'}"
        )
    print("\nSUMMARY:", _pp(trace.summary()))

    cases = [
        ("or_construct", trace.prefix),
        ("nstar", enumerate_prefix(family_nstar(), Count(steps + 1))),
        ("modclass(2)", enumerate_prefix(family_modclass(2), Count(steps + 1))),
    ]
    for name, prefix in cases:
        print("\n" + "=" * 70)
        print(f"VERIFY MAIN: {name} ({len(prefix)} elements)")
        print("=" * 70)
        report = verify_main_theorem(prefix)
        print("VERDICT:", report.verdict.value, "| failed:", list(report.failed_hypotheses) or "-")
        if report.iso is not None:
            print("ISO:", _pp(report.iso.to_dict()))


if __name__ == "__main__":
    main()
