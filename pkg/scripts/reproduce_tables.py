"""Yearly energy of the unoptimized and optimized cabling plans.

Runs every idle policy at every link rate on a scenario and prints a
policy-by-rate table for both plans, plus savings against the unoptimized
plan kept always on.
"""
import argparse
from pathlib import Path

from greenlan import pipeline
from greenlan.energy import ALWAYS_ACTIVE, POLICIES
from greenlan.scenario import load_scenario

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", type=Path, default=ROOT / "scenarios" / "office" / "scenario.json")
    args = ap.parse_args()

    sc = load_scenario(args.scenario)
    res = pipeline.optimize(sc)
    base = sc.baseline()
    rates = [r.name for r in sc.fabric.link_rates]
    print(f"optimized groups {[[v + 1 for v in g] for g in res.partition.groups]}, "
          f"cut {res.cut.cut_size:.1f} (baseline {res.baseline_cut.cut_size:.1f})")
    header = f"{'':28s}" + "".join(f"{r:>12s}" for r in rates)
    print("\nkWh/year")
    print(header)
    row = [pipeline.energy(sc, base, ALWAYS_ACTIVE, r).yearly_kwh for r in rates]
    print(f"{'unoptimized, always-active':28s}" + "".join(f"{x:12.1f}" for x in row))
    for policy in POLICIES:
        row = [pipeline.energy(sc, res.partition, policy, r).yearly_kwh for r in rates]
        print(f"{'optimized, ' + policy:28s}" + "".join(f"{x:12.1f}" for x in row))
    print("\nsaving vs unoptimized, kWh/year")
    print(header)
    for policy in POLICIES:
        row = [pipeline.energy(sc, res.partition, policy, r, baseline=base).savings_vs_baseline_kwh
               for r in rates]
        print(f"{policy:28s}" + "".join(f"{x:12.1f}" for x in row))


if __name__ == "__main__":
    main()
