"""Scenario files: devices, periods, fabric, power model and load classes."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .energy import DEFAULT_POWER_MODEL, EnergyError, FabricConfig, LinkRate, PowerModel
from .partition import Partition
from .traffic import (
    ABSTRACT_LOAD,
    LoadClass,
    PeriodProfile,
    TrafficError,
    TrafficMatrix,
    check_day_coverage,
    combine,
    matrix_from_rows,
    parse_csv,
)


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    devices: tuple[str, ...]
    periods: tuple[PeriodProfile, ...]
    fabric: FabricConfig
    power: PowerModel
    load_classes: dict | None = None
    baseline_partition: Partition | None = None
    combined: TrafficMatrix | None = None
    emission_kg_per_kwh: float | None = None

    @property
    def n(self) -> int:
        return len(self.devices)

    def combined_matrix(self) -> TrafficMatrix:
        """The pre-combined matrix if the file gives one, else the duration-weighted sum."""
        return self.combined if self.combined is not None else combine(self.periods)

    def baseline(self) -> Partition:
        if self.baseline_partition is not None:
            return self.baseline_partition
        return Partition.consecutive(self.n, self.fabric.device_ports_per_switch)


def partition_from_groups(groups, n: int, capacity: int) -> Partition:
    """Build a partition from 1-based device lists."""
    try:
        zero = [[int(v) - 1 for v in g] for g in groups]
    except (TypeError, ValueError):
        raise ScenarioError(f"partition groups must be lists of device numbers, got {groups!r}") from None
    if any(v < 0 for g in zero for v in g):
        raise ScenarioError("device numbers in a partition start at 1")
    try:
        return Partition(n, tuple(tuple(g) for g in zero), capacity)
    except ValueError as e:
        raise ScenarioError(f"invalid partition: {e}") from None


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise ScenarioError(f"{where}: missing required key {key!r}")
    return doc[key]


def _matrix(entry: dict, base: Path, where: str) -> TrafficMatrix:
    unit = entry.get("unit", ABSTRACT_LOAD)
    try:
        if "matrix" in entry:
            return matrix_from_rows(entry["matrix"], unit)
        if "matrix_csv" in entry:
            path = base / entry["matrix_csv"]
            try:
                text = path.read_text()
            except OSError as e:
                raise ScenarioError(f"{where}: cannot read {path}: {e.strerror}") from None
            return parse_csv(text, unit)[0]
    except TrafficError as e:
        raise ScenarioError(f"{where}: {e}") from None
    raise ScenarioError(f"{where}: needs 'matrix' or 'matrix_csv'")


def _fabric(doc: dict) -> FabricConfig:
    rates = tuple(LinkRate(str(_need(r, "name", "fabric.link_rates")),
                           float(_need(r, "capacity_mbps", "fabric.link_rates")))
                  for r in _need(doc, "link_rates", "fabric"))
    return FabricConfig(
        d_switches=int(_need(doc, "d_switches", "fabric")),
        ports_per_switch=int(_need(doc, "ports_per_switch", "fabric")),
        device_ports_per_switch=int(_need(doc, "device_ports_per_switch", "fabric")),
        link_rates=rates,
        wake_from_hibernate_s=float(doc.get("wake_from_hibernate_s", 260.0)),
        wake_from_off_s=float(doc.get("wake_from_off_s", 290.0)),
    )


def _power(doc: dict | None) -> PowerModel:
    if doc is None:
        return DEFAULT_POWER_MODEL
    return PowerModel(
        base_w=float(_need(doc, "base_w", "power")),
        port_w_by_rate={str(k): float(v) for k, v in _need(doc, "port_w_by_rate", "power").items()},
        hibernate_w=float(_need(doc, "hibernate_w", "power")),
        off_w=float(doc.get("off_w", 0.0)),
    )


def _load_classes(doc: dict | None) -> dict | None:
    if doc is None:
        return None
    out = {}
    for sym, c in doc.items():
        out[str(sym)] = LoadClass(int(_need(c, "frame_bytes", f"load_classes[{sym}]")),
                                  int(_need(c, "pps", f"load_classes[{sym}]")))
        if "mbps" in c and abs(out[str(sym)].mbps - float(c["mbps"])) > 1e-9:
            raise ScenarioError(
                f"load_classes[{sym}]: mbps {c['mbps']} != frame_bytes*8*pps/1e6 = {out[str(sym)].mbps}"
            )
    return out


def parse_scenario(doc: dict, base: Path = Path(".")) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        devices = tuple(str(d) for d in _need(doc, "devices", "scenario"))
        periods = []
        for k, p in enumerate(_need(doc, "periods", "scenario")):
            where = f"periods[{k}]"
            periods.append(PeriodProfile(str(_need(p, "name", where)), float(_need(p, "hours", where)),
                                         _matrix(p, base, where)))
        if not periods:
            raise ScenarioError("scenario: at least one period is required")
        check_day_coverage(periods)
        for p in periods:
            if p.matrix.n != len(devices):
                raise ScenarioError(
                    f"period {p.name!r}: matrix has {p.matrix.n} devices, scenario lists {len(devices)}"
                )
        if len({p.name for p in periods}) != len(periods):
            raise ScenarioError("period names must be unique")
        fabric = _fabric(_need(doc, "fabric", "scenario"))
        power = _power(doc.get("power"))
        power.check_rates(fabric)
        combined = None
        if "combined" in doc:
            combined = _matrix(doc["combined"], base, "combined")
            if combined.n != len(devices):
                raise ScenarioError(f"combined: matrix has {combined.n} devices, scenario lists {len(devices)}")
        baseline = None
        if "baseline_partition" in doc:
            baseline = partition_from_groups(doc["baseline_partition"], len(devices),
                                             fabric.device_ports_per_switch)
        emission = doc.get("emission_kg_per_kwh")
        return Scenario(devices, tuple(periods), fabric, power, _load_classes(doc.get("load_classes")),
                        baseline, combined, None if emission is None else float(emission))
    except (TrafficError, EnergyError) as e:
        raise ScenarioError(str(e)) from None
    except (TypeError, AttributeError) as e:
        raise ScenarioError(f"malformed scenario: {e}") from None


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ScenarioError(f"scenario {path} is not valid JSON: {e}") from None
    return parse_scenario(doc, path.parent)
