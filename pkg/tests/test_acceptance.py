"""Acceptance criteria, one test each.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints a
PASS/FAIL line per criterion with the measured values.
"""
import json
import time

import numpy as np
import pytest

from greenlan.cli import main
from greenlan.energy import required_trunks, switch_activity
from greenlan.partition import brute_force_min_cut, cut_size, rsb_optimized
from greenlan.spectral import (
    Disconnected,
    FiedlerResult,
    SymmetricGraph,
    eig_symmetric,
    fiedler,
    laplacian,
    symmetrize,
)
from greenlan.traffic import load_to_bandwidth

from conftest import (
    OFFICE_SCENARIO,
    REFERENCE_DEGREES_5_TO_9,
    REFERENCE_FIEDLER,
    REFERENCE_GROUPS,
    REFERENCE_ORDER,
)
from oracles import is_connected, packable_whole, random_clustered_graph, random_graph

POLICIES = ("always-active", "hibernate-idle", "off-idle")
HOURS = {"working": 16, "nonworking": 8}


def detail(record_property, text):
    record_property("detail", text)


@pytest.mark.criterion(1, "Fiedler ordering and components")
def test_fiedler_fixture(reference_combined, record_property):
    t0 = time.perf_counter()
    f = fiedler(laplacian(symmetrize(reference_combined)))
    elapsed = time.perf_counter() - t0
    order = tuple(v + 1 for v in f.ordering)
    dev = float(np.max(np.abs(np.asarray(f.vector) - REFERENCE_FIEDLER)))
    detail(record_property, f"order {order}, max |du| {dev:.2e}, {elapsed * 1000:.1f} ms")
    assert order == REFERENCE_ORDER
    assert dev <= 5e-4
    assert elapsed < 1.0


@pytest.mark.criterion(2, "Laplacian degrees of vertices 5-9")
def test_laplacian_fixture(reference_combined, record_property):
    deg = laplacian(symmetrize(reference_combined)).degrees
    got = tuple(int(d) for d in deg[4:9])
    detail(record_property, f"degrees {got}")
    assert np.array_equal(deg[4:9], REFERENCE_DEGREES_5_TO_9)


@pytest.mark.criterion(3, "partition of the combined graph")
def test_partition_fixture(reference_combined, record_property):
    p = rsb_optimized(symmetrize(reference_combined), n_ports=3, d_switches=3)
    got = [sorted(v + 1 for v in g) for g in p.groups]
    detail(record_property, f"groups {got}")
    assert [set(g) for g in got] == [set(g) for g in REFERENCE_GROUPS]


def _run_cli(out):
    assert main(["optimize", str(OFFICE_SCENARIO), "--out", str(out)]) == 0
    runs = {}
    for plan in ("default", str(out / "partition.json")):
        for policy in POLICIES:
            sub = out / ("baseline" if plan == "default" else "optimized")
            assert main(["energy", str(OFFICE_SCENARIO), "--partition", plan, "--policy", policy,
                         "--baseline", "default", "--out", str(sub)]) == 0
            doc = json.loads((sub / f"energy-{policy}.json").read_text())
            for r in doc["rates"]:
                runs[sub.name, policy, r["rate"]] = r
    return runs


def _period_kwh(run, name):
    p = next(p for p in run["periods"] if p["name"] == name)
    return p["power_w"] * HOURS[name] * 365 / 1000


@pytest.mark.criterion(4, "yearly energy reproduction within 1%")
def test_energy_reproduction(tmp_path, record_property):
    runs = _run_cli(tmp_path)
    checks = []
    for rate, ref in (("100M", dict(total=898.2, work=596.3, aa=298.7, hib=218.1, off=99.9, save=83.8)),
                      ("1G", dict(total=929.7, work=613.8, aa=306.9, hib=219.6, off=100.7, save=96.3))):
        checks += [
            (f"unoptimized total @{rate}", runs["baseline", "always-active", rate]["yearly_kwh"], ref["total"]),
            (f"optimized working @{rate}",
             _period_kwh(runs["optimized", "always-active", rate], "working"), ref["work"]),
            (f"nonworking always-active @{rate}",
             _period_kwh(runs["optimized", "always-active", rate], "nonworking"), ref["aa"]),
            (f"nonworking hibernate @{rate}",
             _period_kwh(runs["optimized", "hibernate-idle", rate], "nonworking"), ref["hib"]),
            (f"nonworking off @{rate}",
             _period_kwh(runs["optimized", "off-idle", rate], "nonworking"), ref["off"]),
            (f"switched-off total @{rate}",
             runs["optimized", "off-idle", rate]["yearly_kwh"], ref["work"] + ref["off"]),
            (f"hibernate saving @{rate}",
             runs["optimized", "hibernate-idle", rate]["savings_vs_baseline_kwh"], ref["save"]),
        ]
    rel = [(label, got, want, (got - want) / want) for label, got, want in checks]
    bad = [r for r in rel if abs(r[3]) > 0.01]
    for label, got, want, e in rel:
        print(f"{'ok  ' if abs(e) <= 0.01 else 'MISS'} {label:34s} {got:9.2f} vs {want:7.1f} ({e:+.2%})")
    worst = max(rel, key=lambda r: abs(r[3]))
    detail(record_property, f"{len(rel) - len(bad)}/{len(rel)} within 1%, worst {worst[0]} {worst[3]:+.2%}"
           + ("; misses: " + ", ".join(f"{r[0]} {r[3]:+.2%}" for r in bad) if bad else ""))
    assert not bad


@pytest.mark.criterion(5, "S1-S2 trunk reduction on the working matrix")
def test_trunk_reduction(office_scenario, record_property):
    working = next(p for p in office_scenario.periods if p.name == "working")
    m = load_to_bandwidth(working.matrix, office_scenario.load_classes)
    opt = rsb_optimized(symmetrize(office_scenario.combined_matrix()), 3, 3)
    base = office_scenario.baseline()
    cap = office_scenario.fabric.rate("100M").capacity_mbps
    t_opt = required_trunks(opt, m, cap)[(0, 1)]
    t_base = required_trunks(base, m, cap)[(0, 1)]
    detail(record_property, f"at {cap:.0f} Mbps: baseline {t_base}, optimized {t_opt}")
    assert t_opt < t_base


@pytest.mark.criterion(6, "two idle switches in the nonworking period")
def test_idle_detection(office_scenario, record_property):
    night = next(p for p in office_scenario.periods if p.name == "nonworking")
    m = load_to_bandwidth(night.matrix, office_scenario.load_classes)
    opt = rsb_optimized(symmetrize(office_scenario.combined_matrix()), 3, 3)
    idle = [k + 1 for k, a in enumerate(switch_activity(opt, m)) if not a.has_traffic]
    detail(record_property, f"idle switches {idle}")
    assert len(idle) == 2


@pytest.mark.criterion(7, "RSB against exhaustive minimum cut")
def test_oracle_suite(record_property):
    rng = np.random.default_rng(20240607)
    t0 = time.perf_counter()
    ratios, missed, whole, lower = [], [], 0, 0
    for k in range(200):
        n = int(rng.integers(2, 10))
        if k % 2:
            adj = random_clustered_graph(rng, n, 3, 3, p_in=0.8, n_cross=int(rng.integers(0, 3)))
        else:
            adj = random_graph(rng, n, float(rng.choice([0.2, 0.4, 0.7])))
        g = SymmetricGraph(adj)
        rsb = cut_size(g, rsb_optimized(g, 3, 3)).cut_size
        best = cut_size(g, brute_force_min_cut(g, 3, 3)).cut_size
        if rsb < best - 1e-9:
            lower += 1
        if best > 0:
            ratios.append(rsb / best)
        if packable_whole(adj, 3, 3):
            whole += 1
            if rsb > 1e-9:
                missed.append(k)
    elapsed = time.perf_counter() - t0
    mean = float(np.mean(ratios)) if ratios else 1.0
    detail(record_property, f"mean optimality ratio {mean:.4f} over {len(ratios)} graphs with a nonzero "
           f"optimum; {whole} packable graphs, {len(missed)} missed; {elapsed:.1f} s")
    assert lower == 0
    assert not missed
    assert elapsed < 60


@pytest.mark.criterion(8, "eigensolver residual, orthonormality, connectivity")
def test_eigensolver_properties(record_property):
    rng = np.random.default_rng(777)
    worst_res = worst_orth = 0.0
    mismatches = 0
    for k in range(100):
        n = int(rng.integers(2, 33))
        p = float(rng.choice([0.05, 0.1, 0.2, 0.5, 1.0]))
        adj = random_graph(rng, n, p, wmax=int(rng.choice([1, 10, 1000])))
        L = laplacian(SymmetricGraph(adj))
        w, v = eig_symmetric(L)
        scale = np.linalg.norm(L.entries)
        res = max(np.linalg.norm(L.entries @ v[:, i] - w[i] * v[:, i]) for i in range(n))
        worst_res = max(worst_res, res / scale if scale else res)
        worst_orth = max(worst_orth, float(np.abs(v.T @ v - np.eye(n)).max()))
        connected = is_connected(adj)
        if (w[1] > 1e-9) != connected:
            mismatches += 1
        if isinstance(fiedler(L, adj=adj), FiedlerResult) != connected:
            mismatches += 1
    detail(record_property, f"max residual/|M|_F {worst_res:.1e}, max orthonormality error "
           f"{worst_orth:.1e}, connectivity mismatches {mismatches}")
    assert worst_res <= 1e-8
    assert worst_orth <= 1e-9
    assert mismatches == 0


@pytest.mark.criterion(9, "byte-identical outputs across runs")
def test_determinism(tmp_path, record_property):
    for run in ("a", "b"):
        _run_cli(tmp_path / run)
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.json"))
    differ = [str(f) for f in files if (tmp_path / "a" / f).read_bytes() != (tmp_path / "b" / f).read_bytes()]
    detail(record_property, f"{len(files)} JSON files compared, {len(differ)} differ")
    assert files
    assert not differ
