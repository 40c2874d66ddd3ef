#!/usr/bin/env python3
"""TPR/TNR for the metrics fixture, computed by running each solution
natively (no sandbox) and counting by hand.

Writes metrics_expected.json.
"""
import json
import os
import subprocess
import tempfile

HERE = os.path.dirname(os.path.abspath(__file__))
FIX = os.path.join(HERE, "..", "fixtures", "metrics")


def norm(s):
    lines = [l.rstrip(" \t\r\v\f") for l in s.split("\n")]
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines)


def build(sol, tmp):
    path = os.path.join(FIX, sol["file"])
    if sol["language"] == "cpp":
        exe = os.path.join(tmp, sol["file"] + ".bin")
        if subprocess.run(["g++", "-O2", "-o", exe, path], capture_output=True).returncode:
            return None
        return [exe]
    return ["python3", path]


def passes_all(cmd, cases):
    for inp, out in cases:
        r = subprocess.run(cmd, input=inp, capture_output=True, text=True, timeout=10)
        if r.returncode != 0 or norm(r.stdout) != norm(out):
            return False
    return True


def rate(num, den):
    return None if den == 0 else num / den


def main():
    fixture_set = json.load(open(os.path.join(FIX, "set.json")))
    rows = []
    with tempfile.TemporaryDirectory() as tmp:
        for sol in fixture_set["solutions"]:
            cmd = build(sol, tmp)
            if cmd is None:
                continue
            correct = passes_all(cmd, fixture_set["labeling_set"])
            accepted = passes_all(cmd, fixture_set["suite_under_test"])
            rows.append((sol["file"], sol["language"], sol["origin"], correct, accepted))

    def rates(sel):
        pos = [r for r in sel if r[3]]
        neg = [r for r in sel if not r[3]]
        return (rate(sum(r[4] for r in pos), len(pos)),
                rate(sum(not r[4] for r in neg), len(neg)))

    def macro(sel):
        origins = sorted({r[2] for r in sel})
        out = []
        for k in (0, 1):
            vals = [rates([r for r in sel if r[2] == o])[k] for o in origins]
            vals = [v for v in vals if v is not None]
            out.append(sum(vals) / len(vals) if vals else None)
        return out

    result = {"labels": {r[0]: r[3] for r in rows}, "accepted": {r[0]: r[4] for r in rows},
              "groups": {}}
    for name, sel in [("all", rows)] + [(lang, [r for r in rows if r[1] == lang])
                                         for lang in ("cpp", "python3")]:
        tpr, tnr = rates(sel)
        mt, mn = macro(sel)
        result["groups"][name] = {"micro_tpr": tpr, "micro_tnr": tnr,
                                  "macro_tpr": mt, "macro_tnr": mn}
    with open(os.path.join(HERE, "metrics_expected.json"), "w") as f:
        json.dump(result, f, indent=2, sort_keys=True)
        f.write("\n")
    print(json.dumps(result, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
