"""Switch power states, trunk requirements and yearly energy accounting."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .partition import Partition
from .traffic import MBPS, LoadClass, PeriodProfile, TrafficMatrix, load_to_bandwidth

ALWAYS_ACTIVE = "always-active"
HIBERNATE_IDLE = "hibernate-idle"
OFF_IDLE = "off-idle"
POLICIES = (ALWAYS_ACTIVE, HIBERNATE_IDLE, OFF_IDLE)

ACTIVE = "active"
HIBERNATE = "hibernate"
OFF = "off"

DAYS_PER_YEAR = 365


class EnergyError(ValueError):
    pass


@dataclass(frozen=True)
class LinkRate:
    name: str
    capacity_mbps: float


@dataclass(frozen=True)
class FabricConfig:
    d_switches: int
    ports_per_switch: int
    device_ports_per_switch: int
    link_rates: tuple[LinkRate, ...]
    wake_from_hibernate_s: float = 260.0
    wake_from_off_s: float = 290.0

    def __post_init__(self):
        object.__setattr__(self, "link_rates", tuple(self.link_rates))
        if self.d_switches < 1:
            raise EnergyError("d_switches must be at least 1")
        if not 1 <= self.device_ports_per_switch <= self.ports_per_switch:
            raise EnergyError(
                f"device_ports_per_switch ({self.device_ports_per_switch}) must be in "
                f"1..ports_per_switch ({self.ports_per_switch})"
            )
        if not self.link_rates:
            raise EnergyError("at least one link rate is required")
        caps = [r.capacity_mbps for r in self.link_rates]
        if any(c <= 0 for c in caps):
            raise EnergyError("link rate capacities must be positive")
        if any(b <= a for a, b in zip(caps, caps[1:])):
            raise EnergyError("link rate capacities must be strictly increasing")
        if len({r.name for r in self.link_rates}) != len(self.link_rates):
            raise EnergyError("duplicate link rate names")

    def rate(self, name: str) -> LinkRate:
        for r in self.link_rates:
            if r.name == name:
                return r
        raise EnergyError(f"unknown link rate {name!r}; known: {[r.name for r in self.link_rates]}")


@dataclass(frozen=True)
class PowerModel:
    """Linear switch power: chassis plus a per-port cost that depends on the rate."""

    base_w: float
    port_w_by_rate: Mapping[str, float]
    hibernate_w: float
    off_w: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "port_w_by_rate", dict(self.port_w_by_rate))
        if self.off_w != 0:
            raise EnergyError("off_w is fixed at 0")
        if self.base_w < 0 or any(w < 0 for w in self.port_w_by_rate.values()):
            raise EnergyError("powers must be nonnegative")
        if not 0 <= self.hibernate_w <= self.base_w:
            raise EnergyError(
                f"hibernate_w ({self.hibernate_w}) must lie between 0 and base_w ({self.base_w})"
            )

    def check_rates(self, fabric: FabricConfig) -> None:
        """Every fabric rate needs a port cost, non-decreasing with capacity."""
        costs = []
        for r in fabric.link_rates:
            if r.name not in self.port_w_by_rate:
                raise EnergyError(f"power model has no port cost for rate {r.name!r}")
            costs.append(self.port_w_by_rate[r.name])
        if any(b < a for a, b in zip(costs, costs[1:])):
            raise EnergyError("port power must not decrease at higher link rates")


# Fitted to the reference measurements by greenlan.calibration (hibernate
# held at the measured 20 W); regenerate with scripts/calibrate_power.py.
DEFAULT_POWER_MODEL = PowerModel(
    base_w=33.4114,
    port_w_by_rate={"100M": 0.1593, "1G": 0.4627},
    hibernate_w=20.0,
)


@dataclass(frozen=True)
class SwitchState:
    mode: str
    active_ports: int = 0
    rate: str | None = None

    def __post_init__(self):
        if self.mode not in (ACTIVE, HIBERNATE, OFF):
            raise EnergyError(f"unknown switch mode {self.mode!r}")
        if self.active_ports < 0:
            raise EnergyError("active_ports must be nonnegative")

    @classmethod
    def active(cls, ports: int, rate: str) -> "SwitchState":
        return cls(ACTIVE, ports, rate)

    def label(self) -> str:
        return f"active({self.active_ports}@{self.rate})" if self.mode == ACTIVE else self.mode


@dataclass(frozen=True)
class GroupActivity:
    has_traffic: bool
    intra: float
    inter: float


def _require_mbps(m: TrafficMatrix) -> None:
    if m.unit != MBPS:
        raise EnergyError("trunk sizing needs a matrix in Mbps; convert with load classes first")


def _pair_flow(m: TrafficMatrix, a: Sequence[int], b: Sequence[int]) -> float:
    if not a or not b:
        return 0.0
    w = m.weights
    return float(w[np.ix_(a, b)].sum() + w[np.ix_(b, a)].sum())


def required_trunks(p: Partition, m: TrafficMatrix, capacity_mbps: float) -> dict[tuple[int, int], int]:
    """Trunk links needed between each pair of groups.

    The crossing flow counts both directions; a pair with flow ``F`` needs
    ``ceil(F / capacity_mbps)`` trunks.
    """
    if capacity_mbps <= 0:
        raise EnergyError(f"trunk capacity must be positive, got {capacity_mbps}")
    _require_mbps(m)
    if p.n != m.n:
        raise EnergyError(f"partition covers {p.n} devices but the matrix has {m.n}")
    out = {}
    for a, b in combinations(range(len(p.groups)), 2):
        f = _pair_flow(m, p.groups[a], p.groups[b])
        out[(a, b)] = math.ceil(f / capacity_mbps - 1e-12) if f > 0 else 0
    return out


def switch_activity(p: Partition, m: TrafficMatrix) -> list[GroupActivity]:
    if p.n != m.n:
        raise EnergyError(f"partition covers {p.n} devices but the matrix has {m.n}")
    w = m.weights
    label = p.group_of()
    out = []
    for k, g in enumerate(p.groups):
        inside = label == k
        intra = float(w[np.ix_(inside, inside)].sum())
        inter = float(w[np.ix_(inside, ~inside)].sum() + w[np.ix_(~inside, inside)].sum())
        out.append(GroupActivity(intra + inter > 0, intra, inter))
    return out


def port_demand(p: Partition, trunks: Mapping[tuple[int, int], int], d_switches: int) -> list[int]:
    """Device ports plus trunk ports wanted on each switch."""
    if len(p.groups) > d_switches:
        raise EnergyError(f"{len(p.groups)} groups for {d_switches} switches")
    demand = [len(g) for g in p.groups] + [0] * (d_switches - len(p.groups))
    for (a, b), t in trunks.items():
        demand[a] += t
        demand[b] += t
    return demand


def plan_states(activity: Sequence[GroupActivity], policy: str, *, ports: Sequence[int],
                rate: str, ports_per_switch: int | None = None) -> list[SwitchState]:
    """Per-switch power state for one period.

    Switches past the end of ``activity`` host no devices and count as idle.
    Port demand above ``ports_per_switch`` is clipped to the ports that exist.
    """
    if policy not in POLICIES:
        raise EnergyError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    states = []
    for k, want in enumerate(ports):
        busy = k < len(activity) and activity[k].has_traffic
        if busy or policy == ALWAYS_ACTIVE:
            n = want if ports_per_switch is None else min(want, ports_per_switch)
            states.append(SwitchState.active(n, rate))
        elif policy == HIBERNATE_IDLE:
            states.append(SwitchState(HIBERNATE))
        else:
            states.append(SwitchState(OFF))
    return states


def fleet_power(states: Sequence[SwitchState], pm: PowerModel) -> float:
    total = 0.0
    for s in states:
        if s.mode == ACTIVE:
            if s.rate not in pm.port_w_by_rate:
                raise EnergyError(f"power model has no port cost for rate {s.rate!r}")
            total += pm.base_w + s.active_ports * pm.port_w_by_rate[s.rate]
        elif s.mode == HIBERNATE:
            total += pm.hibernate_w
        else:
            total += pm.off_w
    return total


def yearly_energy(periods, tol: float = 1e-9) -> float:
    """kWh per year from ``(period, power_w)`` pairs covering one day.

    The period may be a :class:`PeriodProfile` or its length in hours.
    """
    hours = [p.duration_hours_per_day if isinstance(p, PeriodProfile) else float(p)
             for p, _ in periods]
    if abs(sum(hours) - 24.0) > tol:
        raise EnergyError(f"period durations sum to {sum(hours)} h, expected 24 h")
    return sum(h * w for h, (_, w) in zip(hours, periods)) * DAYS_PER_YEAR / 1000.0


@dataclass(frozen=True)
class WakeEvent:
    switch: int
    boundary: str
    at_hour: float
    from_mode: str
    lead_time_s: float


def wake_feasibility(schedule: Sequence[tuple[str, float]],
                     states: Sequence[Sequence[SwitchState]],
                     cfg: FabricConfig) -> list[WakeEvent]:
    """Wake-up lead times needed at each period start over a daily cycle.

    ``schedule`` lists ``(name, hours)`` in chronological order starting at
    hour 0; the last period wraps around into the first.
    """
    if len(schedule) != len(states):
        raise EnergyError("schedule and states differ in length")
    events = []
    start = 0.0
    starts = []
    for _, h in schedule:
        starts.append(start)
        start += h
    for i, (name, _) in enumerate(schedule):
        prev = states[i - 1]
        for k, (before, after) in enumerate(zip(prev, states[i])):
            if after.mode != ACTIVE or before.mode == ACTIVE:
                continue
            lead = cfg.wake_from_hibernate_s if before.mode == HIBERNATE else cfg.wake_from_off_s
            events.append(WakeEvent(k, name, starts[i], before.mode, lead))
    return events


@dataclass(frozen=True)
class PeriodEnergy:
    name: str
    hours: float
    states: tuple[SwitchState, ...]
    trunk_counts: dict
    power_w: float
    overloaded: tuple[int, ...] = ()


@dataclass(frozen=True)
class EnergyReport:
    policy: str
    rate: str
    per_period: tuple[PeriodEnergy, ...]
    yearly_kwh: float
    savings_vs_baseline_kwh: float | None = None
    emission_kgco2: float | None = None
    wake_events: tuple[WakeEvent, ...] = field(default=())


def evaluate(periods: Sequence[PeriodProfile], partition: Partition, fabric: FabricConfig,
             power: PowerModel, policy: str, rate: str,
             load_classes: Mapping[str, LoadClass] | None = None,
             emission_kg_per_kwh: float | None = None) -> EnergyReport:
    """Power and yearly energy of one cabling plan under one idle policy.

    Trunks run at the same rate as the device ports, so they are sized
    against that rate's capacity.
    """
    if policy not in POLICIES:
        raise EnergyError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    power.check_rates(fabric)
    link = fabric.rate(rate)
    if max((len(g) for g in partition.groups), default=0) > fabric.device_ports_per_switch:
        raise EnergyError("a group exceeds the device ports of one switch")
    rows = []
    for prof in periods:
        m = prof.matrix
        if m.unit != MBPS:
            if load_classes is None:
                raise EnergyError(f"period {prof.name!r} is in abstract load but no load classes are set")
            m = load_to_bandwidth(m, load_classes)
        trunks = required_trunks(partition, m, link.capacity_mbps)
        demand = port_demand(partition, trunks, fabric.d_switches)
        activity = switch_activity(partition, m)
        states = plan_states(activity, policy, ports=demand, rate=rate,
                             ports_per_switch=fabric.ports_per_switch)
        over = tuple(k for k, (want, s) in enumerate(zip(demand, states))
                     if s.mode == ACTIVE and want > fabric.ports_per_switch)
        rows.append(PeriodEnergy(prof.name, prof.duration_hours_per_day, tuple(states),
                                 trunks, fleet_power(states, power), over))
    kwh = yearly_energy([(r.hours, r.power_w) for r in rows])
    wake = wake_feasibility([(r.name, r.hours) for r in rows], [r.states for r in rows], fabric)
    emission = None if emission_kg_per_kwh is None else kwh * emission_kg_per_kwh
    return EnergyReport(policy, rate, tuple(rows), kwh, None, emission, tuple(wake))


def savings(baseline: EnergyReport, optimized: EnergyReport) -> float:
    """Yearly kWh saved by ``optimized`` relative to ``baseline`` (may be negative)."""
    a = [(p.name, p.hours) for p in baseline.per_period]
    b = [(p.name, p.hours) for p in optimized.per_period]
    if a != b:
        raise EnergyError(f"reports cover different periods: {a} vs {b}")
    if len(baseline.per_period[0].states) != len(optimized.per_period[0].states):
        raise EnergyError("reports cover different fabrics")
    return baseline.yearly_kwh - optimized.yearly_kwh
