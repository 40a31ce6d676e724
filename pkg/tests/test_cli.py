import json
import subprocess
import sys

import pytest

from paba.cli import main, parse_values
from paba.config import ConfigError, RunConfig, parse_config
from paba.simulator import Scenario


def test_empty_config_gives_defaults(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    cfg = parse_config(path)
    assert cfg == RunConfig()
    sc = cfg.scenario
    assert (sc.n_groups, sc.workers_per_group, sc.bandwidth_hz) == (15, 15, 100e6)
    assert (sc.ap_tx_power_dbm, sc.worker_tx_power_dbm, sc.noise_density_dbm_hz) == (46.0, 24.0, -174.0)
    assert sc.cpu_freqs_ghz == tuple(round(0.1 * i, 1) for i in range(1, 11))
    assert sc.total_params == 1_241_220


def test_override_wins_over_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"scenario": {"bandwidth_hz": 5e7, "n_groups": 4}, "scheme": "baseline"}))
    cfg = parse_config(path, ["bandwidth_hz=7e7"])
    assert cfg.scenario.bandwidth_hz == 7e7
    assert cfg.scenario.n_groups == 4 and cfg.scheme == "baseline"
    assert parse_config(path, ["scenario.n_groups=6"], seed=9).scenario.seed == 9


@pytest.mark.parametrize("override,field", [
    ("bandwidth_hz=-1", "scenario.bandwidth_hz"),
    ("n_groups=2.5", "scenario.n_groups"),
    ("bogus=1", "bogus"),
    ("solver.kkt_tol=2", "solver.kkt_tol"),
    ("scheme=magic", "scheme"),
    ("learning.loss=hinge", "learning.loss"),
    ("learning.step_size=-1", "learning.step_size"),
])
def test_bad_values_name_the_field(override, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(None, [override])
    assert exc.value.path.startswith(field)


def test_unknown_keys_in_file_rejected(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"scenario": {"radius": 1.0}}))
    with pytest.raises(ConfigError, match="scenario.radius"):
        parse_config(path)


def test_config_round_trips_through_json(tmp_path):
    cfg = parse_config(None, ["n_groups=3", "learning.enabled=true"])
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert parse_config(path) == cfg


def test_parse_values():
    assert parse_values("1,2,3") == [1.0, 2.0, 3.0]
    assert parse_values("20e6..140e6") == [20e6 + 20e6 * i for i in range(7)]
    assert parse_values("5..25:5") == [5.0, 10.0, 15.0, 20.0, 25.0]
    with pytest.raises(ConfigError):
        parse_values("a..b")


def test_solve_writes_allocation(tmp_path, capsys):
    rc = main(["solve", "--scheme", "joint", "--out-dir", str(tmp_path)])
    assert rc == 0
    out = json.loads((tmp_path / "allocation.json").read_text())
    alloc = out["allocation"]
    assert sum(alloc["block_lens"]) == Scenario().total_params
    assert sum(sum(g) for g in alloc["bw_ratios"]) <= 1 + 1e-12


def test_config_error_exit_code(tmp_path, capsys):
    rc = main(["solve", "--set", "bandwidth_hz=-1", "--out-dir", str(tmp_path)])
    assert rc == 2
    assert "scenario.bandwidth_hz" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--axis", "power"])
    assert exc.value.code == 2


def test_sweep_csv_contract_and_determinism(tmp_path, capsys):
    args = ["sweep", "--axis", "bandwidth", "--values", "20e6..140e6", "--draws", "2",
            "--schemes", "baseline,joint", "--seed", "5"]
    assert main(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert main(args + ["--out-dir", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "sweep_bandwidth.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep_bandwidth.csv").read_bytes()
    lines = a.decode().splitlines()
    assert lines[0] == "axis,scheme,mean_latency_s,std_latency_s,draws"
    assert len(lines) == 1 + 7 * 2


def test_simulate_with_learning(tmp_path):
    rc = main(["simulate", "--rounds", "3", "--set", "n_groups=3", "--set", "workers_per_group=2",
               "--set", "learning.enabled=true", "--set", "learning.total_params=100",
               "--set", "learning.n_samples=60", "--out-dir", str(tmp_path)])
    assert rc == 0
    trace = json.loads((tmp_path / "trace.json").read_text())["trace"]
    assert len(trace["latency_s"]) == 3 and len(trace["objective"]) == 4
    assert all(sum(a["block_lens"]) == 100 for a in trace["allocations"])


def test_simulate_infeasible_exit_code(tmp_path, monkeypatch):
    from paba import simulator
    from paba.errors import InfeasibleError

    def never(*args, **kw):
        raise InfeasibleError("zero uplink")

    monkeypatch.setattr(simulator, "solve", never)
    assert main(["simulate", "--rounds", "2", "--set", "n_groups=2", "--out-dir", str(tmp_path)]) == 3


def test_verify_table_and_failure_exit(tmp_path, capsys, monkeypatch):
    assert main(["verify", "--suite", "oracle", "--seeds", "2", "--out-dir", str(tmp_path)]) == 0
    table = capsys.readouterr().out
    assert "analytic rate matches finite difference" in table and "FAIL" not in table

    from paba import checks

    broken = checks.Check("always wrong", "bcd", lambda s: 1.0, 0.0)
    monkeypatch.setattr(checks, "CHECKS", [broken])
    assert main(["verify", "--suite", "bcd", "--seeds", "1", "--out-dir", str(tmp_path)]) == 4
    assert "FAIL" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "paba", "solve", "--scheme", "baseline",
                           "--set", "n_groups=2", "--out-dir", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "allocation.json").exists()
