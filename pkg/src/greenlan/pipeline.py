"""End-to-end optimize and energy runs over a scenario."""
from __future__ import annotations

from dataclasses import dataclass

from .energy import ALWAYS_ACTIVE, EnergyReport, evaluate, savings
from .partition import CutReport, Partition, cut_size, rsb_optimized
from .scenario import Scenario
from .spectral import Disconnected, FiedlerResult, SymmetricGraph, fiedler, laplacian, symmetrize
from .traffic import TrafficMatrix


@dataclass(frozen=True)
class OptimizeResult:
    combined: TrafficMatrix
    graph: SymmetricGraph
    fiedler: FiedlerResult | Disconnected | None
    partition: Partition
    cut: CutReport
    baseline_cut: CutReport
    reordered: dict


def optimize(scenario: Scenario) -> OptimizeResult:
    """Combine the periods, bisect recursively and reorder each period's matrix."""
    combined = scenario.combined_matrix()
    g = symmetrize(combined)
    f = fiedler(laplacian(g), adj=g.adj) if g.n >= 2 else None
    fab = scenario.fabric
    p = rsb_optimized(g, fab.device_ports_per_switch, fab.d_switches)
    order = p.serialization
    reordered = {prof.name: prof.matrix.reordered(order) for prof in scenario.periods}
    return OptimizeResult(combined, g, f, p, cut_size(g, p), cut_size(g, scenario.baseline()), reordered)


def energy(scenario: Scenario, partition: Partition, policy: str, rate: str,
           baseline: Partition | None = None) -> EnergyReport:
    """Evaluate ``partition``; with ``baseline``, also report savings against it
    run with every switch always on."""
    kw = dict(load_classes=scenario.load_classes, emission_kg_per_kwh=scenario.emission_kg_per_kwh)
    rep = evaluate(scenario.periods, partition, scenario.fabric, scenario.power, policy, rate, **kw)
    if baseline is None:
        return rep
    base = evaluate(scenario.periods, baseline, scenario.fabric, scenario.power, ALWAYS_ACTIVE, rate, **kw)
    return EnergyReport(rep.policy, rep.rate, rep.per_period, rep.yearly_kwh,
                        savings(base, rep), rep.emission_kgco2, rep.wake_events)
