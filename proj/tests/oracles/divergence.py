"""Exhaustive divergence set for the argmax toy problem.

Input: three integers in [0, 9] on one line. One gold prints the first index
of the maximum, the other the last. They disagree exactly when the maximum
occurs more than once. Writes the disagreeing inputs, one per line, in
enumeration order.
"""
import itertools
import sys


def first_argmax(v):
    return max(range(len(v)), key=lambda i: (v[i], -i))


def last_argmax(v):
    return max(range(len(v)), key=lambda i: (v[i], i))


def main(out_path):
    rows = []
    for v in itertools.product(range(10), repeat=3):
        if first_argmax(v) != last_argmax(v):
            rows.append(" ".join(map(str, v)))
    with open(out_path, "w") as f:
        f.write("\n".join(rows) + "\n")
    print(len(rows))


if __name__ == "__main__":
    main(sys.argv[1])
