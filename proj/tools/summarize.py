#!/usr/bin/env python3
"""Recompute per-(sweep_value, robot_id) error statistics from an rssiloc CSV.

With --check, compares against the summary block printed by the rssiloc CLI
and exits 1 on any mismatch beyond --tolerance.
"""

import argparse
import csv
import math
import statistics
import sys
from collections import defaultdict

SUMMARY_HEADER = "sweep_value,robot_id,count,failed,mean_error_m,median_error_m,std_error_m"


def summarize(path):
    groups = defaultdict(lambda: ([], [0]))
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            errors, failed = groups[(float(row["sweep_value"]), int(row["robot_id"]))]
            e = float(row["error_m"])
            if math.isnan(e):
                failed[0] += 1
            else:
                errors.append(e)
    out = {}
    for key in sorted(groups):
        errors, failed = groups[key]
        nan = float("nan")
        out[key] = {
            "count": len(errors),
            "failed": failed[0],
            "mean": statistics.fmean(errors) if errors else nan,
            "median": statistics.median(errors) if errors else nan,
            "std": (statistics.stdev(errors) if len(errors) > 1 else 0.0) if errors else nan,
        }
    return out


def parse_cli_summary(path):
    with open(path) as f:
        lines = f.read().splitlines()
    try:
        start = lines.index(SUMMARY_HEADER) + 1
    except ValueError:
        sys.exit(f"{path}: no summary block")
    out = {}
    for line in lines[start:]:
        if not line.strip():
            break
        sv, rid, count, failed, mean, median, std = line.split(",")
        out[(float(sv), int(rid))] = {
            "count": int(count),
            "failed": int(failed),
            "mean": float(mean),
            "median": float(median),
            "std": float(std),
        }
    return out


def close(a, b, tol):
    if math.isnan(a) or math.isnan(b):
        return math.isnan(a) and math.isnan(b)
    return abs(a - b) <= tol


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", help="result CSV written with --format csv")
    ap.add_argument("--check", metavar="CLI_OUTPUT", help="stdout of the run that wrote the CSV")
    ap.add_argument("--tolerance", type=float, default=1e-9)
    args = ap.parse_args()

    ours = summarize(args.csv)
    if not args.check:
        print(SUMMARY_HEADER)
        for (sv, rid), s in ours.items():
            print(f"{sv:.9g},{rid},{s['count']},{s['failed']},{s['mean']:.12g},{s['median']:.12g},{s['std']:.12g}")
        return 0

    theirs = parse_cli_summary(args.check)
    bad = []
    if ours.keys() != theirs.keys():
        bad.append(f"groups differ: {sorted(ours)} vs {sorted(theirs)}")
    for key in ours.keys() & theirs.keys():
        a, b = ours[key], theirs[key]
        for field in ("count", "failed"):
            if a[field] != b[field]:
                bad.append(f"{key} {field}: {a[field]} vs {b[field]}")
        for field in ("mean", "median", "std"):
            if not close(a[field], b[field], args.tolerance):
                bad.append(f"{key} {field}: {a[field]!r} vs {b[field]!r}")
    for msg in bad:
        print(msg, file=sys.stderr)
    print(f"{len(ours)} groups checked, {len(bad)} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
