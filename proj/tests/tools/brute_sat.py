#!/usr/bin/env python3
"""Exhaustive DIMACS solver used to cross-check the internal solver.

Prints competition-style output: an `s` line and, when satisfiable, one `v`
line terminated by 0.
"""
import itertools
import sys


def main(path):
    clauses, cur, nvars = [], [], 0
    with open(path) as f:
        for line in f:
            tok = line.split()
            if not tok or tok[0] in ("c", "p"):
                if tok and tok[0] == "p":
                    nvars = int(tok[2])
                continue
            for t in map(int, tok):
                if t == 0:
                    clauses.append(cur)
                    cur = []
                else:
                    cur.append(t)
    if nvars > 20:
        sys.exit("too many variables for exhaustive search")
    for bits in itertools.product((False, True), repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            print("s SATISFIABLE")
            print("v " + " ".join(str(v + 1 if b else -(v + 1)) for v, b in enumerate(bits)) + " 0")
            return 10
    print("s UNSATISFIABLE")
    return 20


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
