#!/usr/bin/env python3
"""Regenerate tests/fixtures/oracle/pass_at_k.json.

Pass@k for every 0 <= c <= n <= 8, 1 <= k <= n, counted by walking all
k-subsets of a pool whose first c items are correct. Values are exact
fractions; the tests compare num/den against the C++ estimator.
"""
import itertools
import json
import sys
from fractions import Fraction


def cases():
    for n in range(0, 9):
        for c in range(0, n + 1):
            for k in range(1, n + 1):
                subsets = list(itertools.combinations(range(n), k))
                hit = sum(1 for s in subsets if any(i < c for i in s))
                f = Fraction(hit, len(subsets))
                yield {"n": n, "c": c, "k": k, "num": f.numerator, "den": f.denominator}


def main():
    out = {"generator": "exhaustive k-subset enumeration, exact fractions (python3 itertools)",
           "cases": list(cases())}
    json.dump(out, sys.stdout, indent=0)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
