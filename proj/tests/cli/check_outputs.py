"""Content checks on CLI artifacts: wave trace, heat kernel, zero run, exponents."""
import csv
import json
import math
import sys


def rows(path):
    with open(path) as f:
        return list(csv.DictReader(f))


def wave(d):
    at = {float(r["x"]): float(r["value"]) for r in rows(f"{d}/wave_trace.csv")}
    v = at[-1.0]
    assert abs(v - math.sqrt(0.5)) < 1e-6, v


def kernel(d):
    worst = max(abs(float(r["value"]) - 1.0 / (math.pi * (1.0 + float(r["x"]) ** 2)))
                for r in rows(f"{d}/kernel.csv"))
    assert worst < 1e-6, worst


def zero(d):
    data = rows(f"{d}/slices.csv")
    assert data and all(float(r["u"]) == 0.0 and float(r["flap"]) == 0.0 for r in data)
    assert list(data[0].keys()) == ["t", "x", "u", "psi", "flap", "contact"]
    report = json.load(open(f"{d}/report.json"))
    assert report["regularity"] is None and "contact everywhere" in report["regularity_note"]


def exponents(d):
    report = json.load(open(f"{d}/exponents.json"))
    e = report["regularity"]["alpha_space_detach"]["exponent"]
    assert 1.3 <= e <= 1.7, e


if __name__ == "__main__":
    globals()[sys.argv[1]](sys.argv[2])
    print(sys.argv[1], "ok")
