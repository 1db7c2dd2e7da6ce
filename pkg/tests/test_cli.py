import json
import subprocess
import sys

import pytest

from greenlan.cli import main

from conftest import OFFICE_SCENARIO


def scenario_file(tmp_path, n, d, ports):
    doc = {
        "devices": [f"D{i + 1}" for i in range(n)],
        "periods": [{"name": "day", "hours": 24, "unit": "mbps",
                     "matrix": [[0 if i == j else 1 for j in range(n)] for i in range(n)]}],
        "fabric": {"d_switches": d, "ports_per_switch": ports + 2, "device_ports_per_switch": ports,
                   "link_rates": [{"name": "100M", "capacity_mbps": 100}]},
        "power": {"base_w": 30, "port_w_by_rate": {"100M": 0.2}, "hibernate_w": 20},
    }
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture(scope="module")
def office_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("office")
    assert main(["optimize", str(OFFICE_SCENARIO), "--out", str(out)]) == 0
    for policy in ("always-active", "hibernate-idle", "off-idle"):
        assert main(["energy", str(OFFICE_SCENARIO), "--partition", str(out / "partition.json"),
                     "--policy", policy, "--baseline", "default", "--out", str(out)]) == 0
    return out


def test_optimize_writes_partition(office_out):
    doc = json.loads((office_out / "optimize.json").read_text())
    assert doc["partition"]["groups"] == [[3, 6, 7], [2, 5, 9], [8, 1, 4]]
    assert doc["serialization"] == [3, 6, 7, 2, 5, 9, 8, 1, 4]
    assert (office_out / "working_reordered.csv").read_text().startswith("PC3,PC6,PC7")
    assert doc["cut"]["cut_size"] < doc["cut"]["baseline_cut_size"]


def test_energy_json(office_out):
    doc = json.loads((office_out / "energy-off-idle.json").read_text())
    assert [r["rate"] for r in doc["rates"]] == ["100M", "1G"]
    night = doc["rates"][0]["periods"][1]
    assert night["states"][0] == "off" and night["states"][2] == "off"
    assert doc["rates"][0]["wake_events"][0]["lead_time_s"] == 290.0


def test_energy_auto_partition_and_single_rate(tmp_path, capsys):
    rc = main(["energy", str(OFFICE_SCENARIO), "--partition", "auto", "--policy", "hibernate-idle",
               "--rate", "1G", "--out", str(tmp_path)])
    assert rc == 0
    doc = json.loads((tmp_path / "energy-hibernate-idle.json").read_text())
    assert [r["rate"] for r in doc["rates"]] == ["1G"]
    assert doc["rates"][0]["savings_vs_baseline_kwh"] is None
    assert "hibernate-idle @ 1G" in capsys.readouterr().out


@pytest.mark.parametrize("fmt", ["text", "json", "csv"])
def test_report_formats(office_out, fmt, capsys):
    assert main(["report", str(office_out), "--format", fmt]) == 0
    out = capsys.readouterr().out
    if fmt == "json":
        doc = json.loads(out)
        assert set(doc["energy"]) == {"always-active", "hibernate-idle", "off-idle"}
    elif fmt == "csv":
        rows = out.strip().splitlines()
        assert rows[0].startswith("policy,rate,period")
        assert len(rows) == 1 + 3 * 2 * 2
    else:
        assert "Yearly energy" in out
        assert "S1: PC3, PC6, PC7" in out
        assert "wake S1 290 s" in out


def test_single_device_single_switch(tmp_path):
    path = scenario_file(tmp_path, 1, 1, 1)
    assert main(["optimize", str(path), "--out", str(tmp_path / "o")]) == 0
    doc = json.loads((tmp_path / "o" / "partition.json").read_text())
    assert doc["groups"] == [[1]]


def test_infeasible_exit_code(tmp_path, capsys):
    path = scenario_file(tmp_path, 10, 3, 3)
    assert main(["optimize", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "10 devices" in capsys.readouterr().err


def test_usage_errors(tmp_path, capsys):
    assert main([]) == 1
    with pytest.raises(SystemExit) as e:
        main(["energy", str(OFFICE_SCENARIO), "--partition", "auto", "--policy", "sleep"])
    assert e.value.code == 1
    assert main(["report", str(tmp_path / "missing"), "--format", "text"]) == 1
    assert main(["optimize", str(tmp_path / "missing.json")]) == 1
    assert "cannot read scenario" in capsys.readouterr().err


def test_bad_partition_file(tmp_path):
    bad = tmp_path / "p.json"
    bad.write_text('{"groups": [[1, 2, 3], [4, 5, 6], [7, 8, 8]]}')
    rc = main(["energy", str(OFFICE_SCENARIO), "--partition", str(bad), "--policy", "off-idle",
               "--out", str(tmp_path)])
    assert rc == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "greenlan"], capture_output=True, text=True)
    assert r.returncode == 1
    assert "usage" in r.stderr
