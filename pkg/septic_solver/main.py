#!/usr/bin/env python3
"""
Septic Solver - B-spline collocation for seventh-order boundary value problems
"""

import sys

from src.ui import run


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
