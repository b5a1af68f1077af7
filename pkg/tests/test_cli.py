import csv
import json
import subprocess
import sys

import pytest

from weeconomy.cli import main, reproduce_times
from weeconomy.engine import MODEL_NAMES
from weeconomy.rng import RNG_ID

SMALL = ["--agents", "100", "--steps", "3000", "--tp", "500"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_writes_contract_files(tmp_path):
    out = tmp_path / "d"
    assert main(["run", "--model", "WE-M-M", "--seed", "7", *SMALL, "--out", str(out)]) == 0
    gini = read_csv(out / "gini.csv")
    assert gini[0] == ["t", "g"]
    times = [int(r[0]) for r in gini[1:]]
    assert times == [0, 100, 1000, 3000]
    for t in times:
        snap = read_csv(out / f"snapshot_{t}.csv")
        assert snap[0] == ["agent_id", "rho_m", "rho_r", "rho", "m"]
        assert len(snap) == 101
        hist = read_csv(out / f"histogram_{t}.csv")
        assert hist[0] == ["bin_lo", "bin_hi", "count"]
        assert sum(int(r[2]) for r in hist[1:]) == 100
    meta = json.loads((out / "run.json").read_text())
    assert meta["seed"] == 7 and meta["rng_id"] == RNG_ID
    assert meta["model"]["name"] == "WE-M-M"
    assert meta["n_agents"] == 100 and meta["t_p"] == 500


def test_floats_round_trip(tmp_path):
    main(["run", "--model", "JV-M", *SMALL, "--out", str(tmp_path)])
    for row in read_csv(tmp_path / "snapshot_3000.csv")[1:]:
        m = row[4]
        assert repr(float(m)) == m


def test_rerun_is_byte_identical(tmp_path):
    args = ["run", "--model", "JV-M-MR", "--seed", "3", *SMALL]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    for f in (tmp_path / "a").glob("*.csv"):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_run_json_replays_exactly(tmp_path):
    main(["run", "--model", "WE-M-M-FR", "--seed", "5", *SMALL, "--band", "0.8,1.2",
          "--out", str(tmp_path / "a")])
    main(["run", "--config", str(tmp_path / "a" / "run.json"), "--out", str(tmp_path / "b")])
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"preset": "JV-M", "n_agents": 50, "total_steps": 200, "seed": 1}))
    main(["run", "--config", str(cfg), "--seed", "9", "--out", str(tmp_path / "o")])
    meta = json.loads((tmp_path / "o" / "run.json").read_text())
    assert meta["seed"] == 9 and meta["n_agents"] == 50


def test_preset_overrides_init(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"preset": "WE-M-M-IR", "init": "equal", "n_agents": 20,
                               "total_steps": 10, "lambda": 0.3}))
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")])
    meta = json.loads((tmp_path / "o" / "run.json").read_text())
    assert meta["init"] == "uniform" and meta["lam"] == 0.3


def test_bogus_model_exit_1(capsys):
    assert main(["run", "--model", "BOGUS"]) == 1
    err = capsys.readouterr().err
    assert all(name in err for name in MODEL_NAMES)


@pytest.mark.parametrize(
    "cfg",
    [{"model": "JV-M", "nonsense": 1}, {"model": "JV-M", "lambda": 1.5}, {"n_agents": 10}],
)
def test_invalid_config_exit_1(tmp_path, cfg):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 1


def test_bad_flag_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--no-such-flag"])
    assert exc.value.code == 1


def test_runtime_failure_exit_2(tmp_path, capsys):
    code = main(["run", "--model", "JV-B", "--agents", "4", "--steps", "1000",
                 "--delta-lo", "1e300", "--delta-hi", "1e300", "--out", str(tmp_path)])
    assert code == 2
    assert "step" in capsys.readouterr().err


def test_list_models(capsys):
    assert main(["list-models"]) == 0
    out = capsys.readouterr().out
    assert len(out.strip().splitlines()) == 12


def _sweep_cfg(tmp_path, **extra):
    cfg = {"base": {"n_agents": 60, "total_steps": 2000, "t_p": 400},
           "models": ["JV-M-M", "WE-M-M"], "seeds": [1, 2]}
    cfg.update(extra)
    path = tmp_path / f"sweep{len(list(tmp_path.iterdir()))}.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_sweep_rows(tmp_path):
    assert main(["sweep", "--config", _sweep_cfg(tmp_path), "--out", str(tmp_path / "s")]) == 0
    rows = read_csv(tmp_path / "s" / "sweep.csv")
    assert rows[0] == ["model", "seed", "final_g", "mean_m", "band_fraction"]
    assert [(r[0], r[1]) for r in rows[1:]] == [("JV-M-M", "1"), ("JV-M-M", "2"),
                                               ("WE-M-M", "1"), ("WE-M-M", "2")]
    assert len(list((tmp_path / "s" / "cells").iterdir())) == 4
    assert read_csv(tmp_path / "s" / "failures.csv") == [["model", "seed", "error"]]


def test_sweep_identical_and_parallel_independent(tmp_path):
    cfg = _sweep_cfg(tmp_path)
    main(["sweep", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["sweep", "--config", cfg, "--out", str(tmp_path / "b")])
    main(["sweep", "--config", cfg, "--workers", "2", "--out", str(tmp_path / "c")])
    ref = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert (tmp_path / "b" / "sweep.csv").read_bytes() == ref
    assert (tmp_path / "c" / "sweep.csv").read_bytes() == ref


def test_sweep_failure_isolated(tmp_path):
    cfg = _sweep_cfg(tmp_path, models=["JV-M"],
                     grid=[{"model": "WE-M-M", "delta_lo": -1.5}])
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    fails = read_csv(tmp_path / "s" / "failures.csv")
    assert [r[:2] for r in fails[1:]] == [["WE-M-M", "1"], ["WE-M-M", "2"]]
    assert len(read_csv(tmp_path / "s" / "sweep.csv")) == 3


def test_sweep_all_failed_exit_2(tmp_path):
    cfg = _sweep_cfg(tmp_path, models=[], grid=[{"model": "JV-M", "xi": 3.0}])
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")]) == 2


def test_sweep_unknown_key_exit_1(tmp_path):
    cfg = _sweep_cfg(tmp_path, colour="blue")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")]) == 1


def test_reproduce_fig5_uses_free_rider_rate(tmp_path):
    assert main(["reproduce", "fig5", "--steps", "2000", "--agents", "50", "--seeds", "1,2",
                 "--out", str(tmp_path)]) == 0
    summary = read_csv(tmp_path / "fig5" / "summary.csv")
    assert [r[0] for r in summary[1:]] == ["JV-M-M-FR", "WE-M-M-FR"]
    meta = json.loads((tmp_path / "fig5" / "run.json").read_text())
    assert all(c["r_f"] == 0.5 and c["model"]["free_rider_enabled"] for c in meta["cells"])
    assert {c["seed"] for c in meta["cells"]} == {1, 2}


def test_reproduce_fig1_snapshot_times(tmp_path):
    main(["reproduce", "fig1", "--steps", "100000", "--agents", "50", "--seeds", "1",
          "--out", str(tmp_path)])
    hist = read_csv(tmp_path / "fig1" / "histograms.csv")
    assert {(r[0], r[2]) for r in hist[1:]} == {
        (m, t) for m in ("JV-B", "JV-M", "WE-M-M") for t in ("10000", "100000")
    }
    wealth = read_csv(tmp_path / "fig1" / "wealth.csv")
    assert len(wealth) == 1 + 3 * 50


def test_reproduce_default_seeds(tmp_path):
    main(["reproduce", "fig4", "--steps", "500", "--agents", "20", "--out", str(tmp_path)])
    summary = read_csv(tmp_path / "fig4" / "summary.csv")
    assert all(r[1] == "5" for r in summary[1:])


def test_reproduce_unknown_figure():
    assert main(["reproduce", "fig9"]) == 1


def test_reproduce_times():
    assert reproduce_times(1000) == (0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000)


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "weeconomy.cli", "list-models"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "WE-M-M-FR" in proc.stdout
