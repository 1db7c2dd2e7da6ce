"""Fit the switch power model to the reference yearly energy figures.

Prints the fitted parameters and the per-entry relative error under both the
fit and the shipped default model.
"""
import argparse
from pathlib import Path

from greenlan.calibration import calibrate, reproduce
from greenlan.energy import DEFAULT_POWER_MODEL
from greenlan.partition import rsb_optimized
from greenlan.scenario import load_scenario
from greenlan.spectral import symmetrize

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", type=Path, default=ROOT / "scenarios" / "office" / "scenario.json")
    ap.add_argument("--hibernate-w", type=float, default=20.0)
    args = ap.parse_args()

    sc = load_scenario(args.scenario)
    fab = sc.fabric
    opt = rsb_optimized(symmetrize(sc.combined_matrix()), fab.device_ports_per_switch, fab.d_switches)
    pm = calibrate(sc, opt, hibernate_w=args.hibernate_w)
    ports = ", ".join(f"{r}: {w:.4f}" for r, w in pm.port_w_by_rate.items())
    print(f"base_w {pm.base_w:.4f}  port_w {{{ports}}}  hibernate_w {pm.hibernate_w:.1f}")
    print()
    print(f"{'entry':40s} {'rate':>5s} {'target':>8s} {'fit':>9s} {'err':>7s} {'default':>9s} {'err':>7s}")
    for r_fit, r_def in zip(reproduce(sc, opt, pm), reproduce(sc, opt, DEFAULT_POWER_MODEL)):
        t = r_fit.target
        mark = "" if t.asserted else "  (not fitted)"
        print(f"{t.label:40s} {t.rate:>5s} {t.kwh:8.1f} {r_fit.model_kwh:9.2f} {r_fit.rel_error:+7.2%}"
              f" {r_def.model_kwh:9.2f} {r_def.rel_error:+7.2%}{mark}")


if __name__ == "__main__":
    main()
