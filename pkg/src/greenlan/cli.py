"""Command-line entry point: ``optimize``, ``energy`` and ``report``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .energy import POLICIES, EnergyError
from .partition import InfeasibleError, Partition
from .report import (
    collect,
    dumps,
    energy_doc,
    groups_1based,
    optimize_doc,
    partition_doc,
    render_csv,
    render_json,
    render_text,
    write_json,
)
from .scenario import Scenario, ScenarioError, load_scenario, partition_from_groups
from .spectral import ConvergenceError
from .traffic import TrafficError, to_csv

log = logging.getLogger("greenlan")

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="greenlan", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("optimize", help="partition devices onto switches")
    p.add_argument("scenario", type=Path)
    p.add_argument("--out", type=Path, default=Path("out"))

    p = sub.add_parser("energy", help="yearly energy of a partition under an idle policy")
    p.add_argument("scenario", type=Path)
    p.add_argument("--partition", required=True, help="partition/optimize JSON file, or 'auto'")
    p.add_argument("--policy", required=True, choices=POLICIES)
    p.add_argument("--rate", help="only this link rate (default: every rate in the fabric)")
    p.add_argument("--baseline", help="partition file to compare against, or 'default'")
    p.add_argument("--out", type=Path, default=Path("out"))

    p = sub.add_parser("report", help="render earlier results")
    p.add_argument("dir", type=Path)
    p.add_argument("--format", required=True, choices=("text", "json", "csv"))
    return parser


def _read_partition(spec: str, scenario: Scenario) -> Partition:
    if spec == "auto":
        return pipeline.optimize(scenario).partition
    if spec == "default":
        return scenario.baseline()
    path = Path(spec)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise ScenarioError(f"cannot read partition {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ScenarioError(f"partition {path} is not valid JSON: {e}") from None
    if isinstance(doc, dict) and "partition" in doc:
        doc = doc["partition"]
    groups = doc.get("groups") if isinstance(doc, dict) else doc
    if groups is None:
        raise ScenarioError(f"partition {path} has no 'groups'")
    return partition_from_groups(groups, scenario.n, scenario.fabric.device_ports_per_switch)


def cmd_optimize(args) -> int:
    scenario = load_scenario(args.scenario)
    res = pipeline.optimize(scenario)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "optimize.json", optimize_doc(res, scenario.devices))
    write_json(out / "partition.json", partition_doc(res.partition))
    labels = [scenario.devices[v] for v in res.partition.serialization]
    for name, m in res.reordered.items():
        (out / f"{name}_reordered.csv").write_text(to_csv(m, labels))
    log.info("groups %s, cut %.4f", groups_1based(res.partition), res.cut.cut_size)
    print(f"partition {groups_1based(res.partition)} cut {res.cut.cut_size:.4f} -> {out}")
    return EXIT_OK


def cmd_energy(args) -> int:
    scenario = load_scenario(args.scenario)
    part = _read_partition(args.partition, scenario)
    baseline = _read_partition(args.baseline, scenario) if args.baseline else None
    rates = [args.rate] if args.rate else [r.name for r in scenario.fabric.link_rates]
    reports = [pipeline.energy(scenario, part, args.policy, rate, baseline) for rate in rates]
    doc = {
        "policy": args.policy,
        "partition": groups_1based(part),
        "baseline": groups_1based(baseline) if baseline else None,
        "rates": [energy_doc(r) for r in reports],
    }
    args.out.mkdir(parents=True, exist_ok=True)
    write_json(args.out / f"energy-{args.policy}.json", doc)
    for r in reports:
        extra = "" if r.savings_vs_baseline_kwh is None else f", saving {r.savings_vs_baseline_kwh:.4f}"
        print(f"{args.policy} @ {r.rate}: {r.yearly_kwh:.4f} kWh/year{extra}")
    return EXIT_OK


def cmd_report(args) -> int:
    if not args.dir.is_dir():
        raise ScenarioError(f"no such results directory: {args.dir}")
    doc = collect(args.dir)
    if not doc:
        raise ScenarioError(f"{args.dir} holds no optimize.json or energy-*.json")
    render = {"text": render_text, "json": render_json, "csv": render_csv}[args.format]
    sys.stdout.write(render(doc))
    return EXIT_OK


COMMANDS = {"optimize": cmd_optimize, "energy": cmd_energy, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ScenarioError, TrafficError, EnergyError, ValueError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
