"""Launch the liken CLI from a source checkout.
Usage: from project root, run: python scripts/liken.py check --family nstar --count 1000 --props convexity,or"""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.cli import main

if __name__ == "__main__":
    main()
