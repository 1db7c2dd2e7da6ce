"""Serialization of results and rendering of the combined report.

Machine-readable output is byte-stable: keys are emitted in a fixed order
and every float is written with four fractional digits.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .energy import EnergyReport, POLICIES
from .partition import Partition
from .pipeline import OptimizeResult
from .spectral import Disconnected

DIGITS = 4


def _scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        s = f"{x:.{DIGITS}f}"
        return s[1:] if s == f"-{0:.{DIGITS}f}" else s
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj, indent: int = 0) -> str:
    """JSON with fixed float formatting; lists of scalars stay on one line."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        obj = obj.item()
    return _scalar(obj)


def write_json(path: Path, obj) -> None:
    path.write_text(dumps(obj) + "\n")


def groups_1based(p: Partition) -> list[list[int]]:
    return [[v + 1 for v in g] for g in p.groups]


def partition_doc(p: Partition) -> dict:
    return {"groups": groups_1based(p), "capacity": p.capacity, "flags": list(p.flags)}


def optimize_doc(res: OptimizeResult, devices) -> dict:
    f = res.fiedler
    if f is None:
        fdoc = None
    elif isinstance(f, Disconnected):
        fdoc = {"disconnected": True, "lambda2": float(f.lambda2),
                "components": [[v + 1 for v in c] for c in f.components]}
    else:
        fdoc = {"disconnected": False, "lambda2": float(f.lambda2),
                "vector": [float(x) for x in f.vector],
                "ordering": [v + 1 for v in f.ordering],
                "degenerate": f.degenerate}
    order = res.partition.serialization
    return {
        "devices": list(devices),
        "partition": partition_doc(res.partition),
        "fiedler": fdoc,
        "cut": {
            "cut_size": res.cut.cut_size,
            "pair_flows": [{"groups": [a + 1, b + 1], "weight": w} for (a, b), w in res.cut.pair_flows.items()],
            "baseline_cut_size": res.baseline_cut.cut_size,
        },
        "serialization": [v + 1 for v in order],
        "reordered": {name: [[float(x) for x in row] for row in m.weights]
                      for name, m in res.reordered.items()},
    }


def energy_doc(rep: EnergyReport) -> dict:
    return {
        "rate": rep.rate,
        "policy": rep.policy,
        "yearly_kwh": rep.yearly_kwh,
        "savings_vs_baseline_kwh": rep.savings_vs_baseline_kwh,
        "emission_kgco2": rep.emission_kgco2,
        "periods": [
            {
                "name": p.name,
                "hours": float(p.hours),
                "power_w": p.power_w,
                "states": [s.label() for s in p.states],
                "trunks": [{"switches": [a + 1, b + 1], "count": t} for (a, b), t in p.trunk_counts.items()],
                "overloaded_switches": [k + 1 for k in p.overloaded],
            }
            for p in rep.per_period
        ],
        "wake_events": [
            {"switch": e.switch + 1, "boundary": e.boundary, "at_hour": float(e.at_hour),
             "from": e.from_mode, "lead_time_s": float(e.lead_time_s)}
            for e in rep.wake_events
        ],
    }


def collect(directory: Path) -> dict:
    """Read the outputs of earlier ``optimize`` and ``energy`` runs."""
    doc = {}
    opt = directory / "optimize.json"
    if opt.is_file():
        doc["optimize"] = json.loads(opt.read_text())
    energy = {}
    for policy in POLICIES:
        f = directory / f"energy-{policy}.json"
        if f.is_file():
            energy[policy] = json.loads(f.read_text())
    if energy:
        doc["energy"] = energy
    return doc


def render_json(doc: dict) -> str:
    return dumps(doc) + "\n"


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.{DIGITS}f}"


def render_text(doc: dict) -> str:
    lines = []
    opt = doc.get("optimize")
    if opt:
        lines.append("Partition (switch: devices)")
        labels = opt["devices"]
        for k, g in enumerate(opt["partition"]["groups"], start=1):
            lines.append(f"  S{k}: " + ", ".join(labels[v - 1] for v in g))
        lines.append(f"  cut size {_fmt(opt['cut']['cut_size'])} (baseline {_fmt(opt['cut']['baseline_cut_size'])})")
        f = opt.get("fiedler")
        if f and not f["disconnected"]:
            lines.append(f"  lambda2 {_fmt(f['lambda2'])}, sorted vertices {' '.join(map(str, f['ordering']))}")
        lines.append("")
    energy = doc.get("energy", {})
    if energy:
        rates = []
        for e in energy.values():
            for r in e["rates"]:
                if r["rate"] not in rates:
                    rates.append(r["rate"])
        width = max(len(p) for p in energy) + 2
        lines.append("Yearly energy (kWh/year)")
        lines.append(" " * width + "".join(f"{r:>14}" for r in rates))
        for policy, e in energy.items():
            by = {r["rate"]: r for r in e["rates"]}
            lines.append(f"{policy:<{width}}" + "".join(f"{_fmt(by[r]['yearly_kwh']) if r in by else '-':>14}" for r in rates))
        if any(r["savings_vs_baseline_kwh"] is not None for e in energy.values() for r in e["rates"]):
            lines.append("")
            lines.append("Saving versus baseline (kWh/year)")
            lines.append(" " * width + "".join(f"{r:>14}" for r in rates))
            for policy, e in energy.items():
                by = {r["rate"]: r for r in e["rates"]}
                lines.append(f"{policy:<{width}}" + "".join(
                    f"{_fmt(by[r]['savings_vs_baseline_kwh']) if r in by else '-':>14}" for r in rates))
        wake_lines = []
        for policy, e in energy.items():
            seen = set()
            for r in e["rates"]:
                for w in r["wake_events"]:
                    key = (w["switch"], w["boundary"], w["lead_time_s"])
                    if key not in seen:
                        seen.add(key)
                        wake_lines.append(f"  {policy}: wake S{key[0]} {key[2]:.0f} s before '{key[1]}'")
        if wake_lines:
            lines.append("")
            lines.append("Wake-up lead times")
            lines += wake_lines
    return "\n".join(lines).rstrip() + "\n"


def render_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["policy", "rate", "period", "hours", "power_w", "states", "yearly_kwh", "savings_vs_baseline_kwh"])
    for policy, e in doc.get("energy", {}).items():
        for r in e["rates"]:
            for p in r["periods"]:
                w.writerow([policy, r["rate"], p["name"], _fmt(p["hours"]), _fmt(p["power_w"]),
                            " ".join(p["states"]), _fmt(r["yearly_kwh"]), _fmt(r["savings_vs_baseline_kwh"])])
    return buf.getvalue()
