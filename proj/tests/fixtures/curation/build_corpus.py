#!/usr/bin/env python3
"""Writes corpus.jsonl: 20 raw problems with planted defects.

Each record carries an "expect" field naming its planted fate (kept or a
drop reason). Loaders ignore unknown fields.
"""
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def py(src):
    return {"language": "python3", "source": src}


SUM_A = py("a, b = map(int, input().split())\nprint(a + b)\n")
SUM_B = py("import sys\nprint(sum(map(int, sys.stdin.read().split())))\n")

MAX_A = py("input()\nprint(max(map(int, input().split())))\n")
MAX_B = py("import sys\nxs = list(map(int, sys.stdin.read().split()))[1:]\nxs.sort()\nprint(xs[-1])\n")

REV_A = py("print(input().strip()[::-1])\n")
REV_B = py("s = input().strip()\nprint(''.join(reversed(s)))\n")

VOW_A = py("print(sum(c in 'aeiou' for c in input()))\n")
VOW_B = py("s = input()\nprint(len([c for c in s if c in 'aeiou']))\n")

GCD_A = py("import math\na, b = map(int, input().split())\nprint(math.gcd(a, b))\n")
GCD_B = py("a, b = map(int, input().split())\nwhile b:\n    a, b = b, a % b\nprint(a)\n")

PAR_A = py("n = int(input())\nprint('even' if n % 2 == 0 else 'odd')\n")
PAR_B = py("n = int(input())\nprint(['even', 'odd'][n & 1])\n")
PAR_WRONG = py("print('even')\n")

SORT_A = py("input()\nprint(*sorted(map(int, input().split())))\n")
SORT_B = py("import sys\nd = sys.stdin.read().split()\nprint(' '.join(map(str, sorted(int(x) for x in d[1:]))))\n")

MIN_A = py("input()\nprint(min(map(int, input().split())))\n")
MIN_B = py("input()\nxs = sorted(map(int, input().split()))\nprint(xs[0])\n")
MIN_WRONG = py("input()\nprint(max(map(int, input().split())))\n")
CRASH = py("raise SystemExit(1)\n")

SQ_A = py("n = int(input())\nprint(n * n)\n")
SQ_B = py("n = int(input())\nprint(n ** 2)\n")

DIFF_A = py("input()\nxs = list(map(int, input().split()))\nprint(max(xs) - min(xs))\n")
DIFF_B = py("input()\nxs = sorted(map(int, input().split()))\nprint(xs[-1] - xs[0])\n")

CNT_A = py("input()\na = list(map(int, input().split()))\nprint(*[sum(y > x for y in a) for x in a])\n")
CNT_B = py("input()\na = list(map(int, input().split()))\nb = sorted(a)\n"
           "import bisect\nprint(' '.join(str(len(b) - bisect.bisect_right(b, x)) for x in a))\n")

LONG_MAX = (
    "You are given a sequence of n integers a1, a2, ..., an written on a long paper strip. "
    "Your friend wants to know the largest value that appears anywhere on the strip, because "
    "the winner of the local game is decided by the biggest number someone managed to write. "
    "The first line of the input contains a single integer n (1 <= n <= 100000), the number "
    "of values written on the strip. The second line contains the n integers separated by "
    "single spaces, each of them between -1000000000 and 1000000000 inclusive. Print a single "
    "integer, the maximum of the given values. Note that values may repeat and that negative "
    "values are allowed, so do not assume the answer is positive. Read the input carefully and "
    "make sure your program runs within the time limit of {tl} seconds for the largest inputs."
)

CNT_STATEMENT = (
    "For every element of the array print how many elements of the array are strictly larger "
    "than it. Example input: 5 3 6 4 5 9 Example output: 4 1 3 2 0"
)


def t(i, o):
    return {"input": i, "output": o}


def rec(pid, statement, golds, tests, expect, io="stdin", **extra):
    r = {
        "id": pid,
        "source_tag": "fixture",
        "statement": statement,
        "input_format": extra.pop("input_format", ""),
        "output_format": extra.pop("output_format", ""),
        "gold_solutions": golds,
        "public_tests": tests,
        "expect": expect,
    }
    if io != "stdin":
        r["io"] = io
    r.update(extra)
    return r


SUM_TESTS = [t("1 2\n", "3\n"), t("-5 5\n", "0\n")]
MAX_TESTS = [t("3\n1 9 2\n", "9\n"), t("1\n-4\n", "-4\n")]
REV_TESTS = [t("abc\n", "cba\n"), t("x\n", "x\n")]

corpus = [
    rec("p01", "Read two integers a and b and print their sum a + b.", [SUM_A, SUM_B], SUM_TESTS, "kept"),
    rec("p02", LONG_MAX.format(tl=2), [MAX_A, MAX_B], MAX_TESTS, "kept"),
    rec("p03", "Given a string s of lowercase letters, output the string written backwards, "
        "from its last character to its first character.", [REV_A, REV_B], REV_TESTS, "kept"),
    rec("p04", "Read two integers a and b and print their sum a + b.", [SUM_B, SUM_A], SUM_TESTS,
        "duplicate"),
    rec("p05", LONG_MAX.format(tl=3), [MAX_B, MAX_A], MAX_TESTS, "duplicate"),
    rec("p06", "<p>Given a <b>string</b> s of lowercase letters, output the string written "
        "backwards,\n  from its last character to its <i>first</i> character.</p>",
        [REV_B, REV_A], REV_TESTS, "duplicate"),
    rec("p07", "Count how many vowels (a, e, i, o, u) the given word contains.", [VOW_A, VOW_B],
        [t("hello\n", "2\n"), t("rhythm\n", "0\n")], "kept"),
    rec("p08", "Implement the function gcd(a, b) returning the greatest common divisor.",
        [GCD_A, GCD_B], [t("12 18\n", "6\n")], "non_stdin", io="function"),
    rec("p09", "Complete the method isEven(n) of class Solution.", [PAR_A, PAR_B],
        [t("4\n", "even\n")], "non_stdin", fn_name="isEven"),
    rec("p10", "Print the greatest common divisor of the two given positive integers.",
        [GCD_A], [t("12 18\n", "6\n")], "too_few_golds"),
    rec("p11", "Print the square of the given integer n.", [SQ_A], [t("3\n", "9\n")],
        "too_few_golds"),
    rec("p12", "Print the difference between the largest and the smallest array element.", [],
        [t("3\n1 5 2\n", "4\n")], "too_few_golds"),
    rec("p13", "Sort the given array in non-decreasing order and print it on one line.",
        [SORT_A, SORT_B], [], "no_public_tests"),
    rec("p14", "Decide whether the integer n is even or odd and print the matching word.",
        [PAR_A, PAR_WRONG], [t("4\n", "even\n"), t("7\n", "odd\n")], "gold_failed"),
    rec("p15", "Output the minimum value among the n given integers.", [MIN_WRONG, CRASH],
        [t("3\n4 1 7\n", "1\n")], "gold_failed"),
    rec("p16", "Find the minimum element of an integer array of length n and print it.",
        [MIN_A, MIN_WRONG, MIN_B], [t("3\n4 1 7\n", "1\n"), t("2\n5 5\n", "5\n")], "kept"),
    rec("p17", CNT_STATEMENT, [CNT_A, CNT_B], [t("5\n3 6 4 5 9\n", "4 1 3 2 0\n")], "hackable"),
    rec("p18", "Print the greatest common divisor of two positive integers a and b given on "
        "one line.", [GCD_A, GCD_B], [t("12 18\n", "6\n"), t("7 5\n", "1\n")], "kept"),
    rec("p19", "Given n, output n multiplied by itself.", [SQ_A, SQ_B], [t("12\n", "144\n")],
        "kept"),
    rec("p20", "Print max minus min of the array.", [DIFF_A, DIFF_B],
        [t("3\n1 5 2\n", "4\n"), t("1\n7\n", "0\n")], "kept"),
]

assert len(corpus) == 20
with open(os.path.join(HERE, "corpus.jsonl"), "w") as f:
    for r in corpus:
        f.write(json.dumps(r) + "\n")
