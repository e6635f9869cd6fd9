#!/usr/bin/env python3
"""Solve exported LP models with HiGHS and compare against the exact solver.

Usage:
    verify_lp_with_highs.py --cli build/tools/mimo-grouping --work /tmp/lpcheck \
        [--instances 3] [--nodes 6] [--groups 2] [--pilots 4] [--full-circle] [--verbatim]

For each generated instance this script
  1. writes the repaired LP model with `mimo-grouping export-lp`,
  2. solves it with HiGHS (pip install highspy),
  3. runs `mimo-grouping evaluate --methods exact` on the same instance,
and reports the two objectives. Exit status is non-zero if any pair differs
by more than 1e-6 rad.
"""
import argparse
import csv
import json
import math
import pathlib
import random
import subprocess
import sys

import highspy


def solve_lp(path):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    if h.readModel(str(path)) != highspy.HighsStatus.kOk:
        raise RuntimeError(f"HiGHS could not read {path}")
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    if status != "Optimal":
        return status, None
    return status, h.getInfo().objective_function_value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--work", required=True)
    ap.add_argument("--instances", type=int, default=3)
    ap.add_argument("--nodes", type=int, default=6)
    ap.add_argument("--groups", type=int, default=2)
    ap.add_argument("--pilots", type=int, default=4)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--verbatim", action="store_true", help="solve the unrepaired model instead")
    ap.add_argument("--full-circle", action="store_true",
                    help="replace generated profiles with theta uniform on [0, 2pi) and sigma on [0, 0.3] "
                         "so that wraparound gaps can bind")
    args = ap.parse_args()

    work = pathlib.Path(args.work)
    inst_dir = work / "instances"
    subprocess.run([args.cli, "generate", "--nodes", str(args.nodes), "--groups", str(args.groups),
                    "--pilots", str(args.pilots), "--instances", str(args.instances),
                    "--seed", str(args.seed), "--out", str(inst_dir)], check=True, stdout=subprocess.DEVNULL)
    if args.full_circle:
        rng = random.Random(args.seed)
        for inst in sorted(inst_dir.glob("instance_*.json")):
            doc = json.loads(inst.read_text())
            for p in doc["profiles"]:
                p["theta"] = rng.uniform(0.0, 2.0 * math.pi)
                p["sigma"] = rng.uniform(0.0, 0.3)
            inst.write_text(json.dumps(doc))
    results = work / "exact.csv"
    subprocess.run([args.cli, "evaluate", "--in", str(inst_dir), "--methods", "exact", "--timeout", "0",
                    "--out", str(results)], check=True, stdout=subprocess.DEVNULL)
    exact = {row["instance"]: float(row["objective_B"]) for row in csv.DictReader(open(results, newline=""))}

    worst = 0.0
    for inst in sorted(inst_dir.glob("instance_*.json")):
        lp = work / (inst.stem + ".lp")
        cmd = [args.cli, "export-lp", "--in", str(inst), "--out", str(lp)]
        if args.verbatim:
            cmd.append("--verbatim")
        subprocess.run(cmd, check=True, stdout=subprocess.DEVNULL)
        status, value = solve_lp(lp)
        ref = exact[inst.name]
        diff = abs(value - ref) if value is not None else float("inf")
        worst = max(worst, diff)
        print(f"{inst.name}: highs={status} B_milp={value} B_exact={ref} |diff|={diff:.3g}")
    print(f"max |diff| = {worst:.3g}")
    return 0 if worst <= 1e-6 else 1


if __name__ == "__main__":
    sys.exit(main())
