import csv
import json
import subprocess
import sys

import pytest

from hcsp.cli import main, read_front
from hcsp.instance import Caregiver, Instance, Service, save_instance

FAST = ["--n", "30", "--nroutes", "10", "--nalns", "2", "--nsols", "100", "--step", "15"]


@pytest.fixture
def tiny_file(tmp_path):
    assert main(["generate", "--services", "5", "--caregivers", "2", "--seed", "3", "--profile", "tiny",
                 "--out", str(tmp_path / "gen")]) == 0
    return tmp_path / "gen" / "5_01.json"


def test_generate_batch_and_reproducible(tmp_path, capsys):
    for out in ("a", "b"):
        assert main(["generate", "--services", "10", "--count", "10", "--seed", "7", "--out", str(tmp_path / out)]) == 0
    files = sorted(p.name for p in (tmp_path / "a").glob("10_*.json"))
    assert len(files) == 10
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["command"] == "generate" and len(manifest["seeds"]) == 10


def test_generate_rejects_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--services", "0"])
    assert exc.value.code == 2


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HCSP_OUTPUT_DIR", str(tmp_path / "envout"))
    assert main(["generate", "--services", "3"]) == 0
    assert (tmp_path / "envout" / "3_01.json").exists()


def test_solve_writes_artifacts(tiny_file, tmp_path):
    out = tmp_path / "s"
    assert main(["solve", str(tiny_file), "--seed", "42", "--out", str(out)] + FAST) == 0
    rows = list(csv.DictReader(open(out / "front.csv")))
    assert rows and all((out / r["solution_file"]).exists() for r in rows)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 42 and manifest["config"]["nroutes"] == 10
    assert manifest["instance"]["sha256"]
    assert (out / "progress.jsonl").read_text().count("\n") == 3


def test_solve_same_seed_identical_front(tiny_file, tmp_path):
    for out in ("x", "y"):
        assert main(["solve", str(tiny_file), "--seed", "42", "--out", str(tmp_path / out)] + FAST) == 0
    assert (tmp_path / "x" / "front.csv").read_bytes() == (tmp_path / "y" / "front.csv").read_bytes()


def test_solve_preset_applied(tiny_file, tmp_path):
    out = tmp_path / "p"
    assert main(["solve", str(tiny_file), "--preset", "real-week", "--n", "5", "--nroutes", "3", "--nsols", "10",
                 "--out", str(out)]) == 0
    cfg = json.loads((out / "manifest.json").read_text())["config"]
    assert cfg["nalns"] == 1 and cfg["pr"] == "1%" and cfg["p"] == "auto_1%"


def test_solve_one_service_one_point(tmp_path):
    services = (Service(1, 60, 1, (480, 720), (540, 660)),)
    cg = Caregiver(1, {1: (420, 1020)}, {1: 480}, 2400, {1: 3})
    path = tmp_path / "one.json"
    save_instance(Instance(services, (cg,), ((0,),)), path)
    assert main(["solve", str(path), "--out", str(tmp_path / "o")] + FAST) == 0
    assert len(read_front(tmp_path / "o" / "front.csv")) == 1


def test_solve_infeasible_instance_error(tmp_path, capsys):
    services = (Service(1, 60, 2, (480, 720), (540, 660)),)
    cg = Caregiver(1, {1: (420, 1020)}, {1: 480}, 2400, {1: 3})
    path = tmp_path / "bad.json"
    save_instance(Instance(services, (cg,), ((0,),)), path)
    assert main(["solve", str(path), "--out", str(tmp_path / "o")] + FAST) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "infeasible"


def test_invalid_instance_file_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"pi_min": 120, "services": [], "caregivers": []}))
    assert main(["solve", str(path), "--out", str(tmp_path / "o")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "instance" and any("travel" in v for v in err["violations"])


def test_exact_matches_and_emits_lp(tiny_file, tmp_path):
    out = tmp_path / "e"
    assert main(["exact", str(tiny_file), "--full", "--emit-lp", str(out / "lp"), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    solved = [g for g in manifest["grid"] if not g["status"].startswith("error")]
    assert len(manifest["artifacts"]["lp_files"]) == len(solved)
    assert manifest["config"]["grid"]["full"] is True


def test_exact_oversized_without_solver(tmp_path, capsys):
    assert main(["generate", "--services", "8", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    assert main(["exact", str(tmp_path / "8_01.json"), "--out", str(tmp_path / "e")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert "enumeration bound" in err["message"]


def test_compare_self_zero_and_plot_rows(tiny_file, tmp_path):
    out = tmp_path / "s"
    main(["solve", str(tiny_file), "--out", str(out)] + FAST)
    main(["exact", str(tiny_file), "--full", "--out", str(tmp_path / "e")])
    assert main(["compare", str(out / "front.csv"), str(out / "front.csv"), "--names", "a,b",
                 "--out", str(tmp_path / "c1")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "c1" / "indicators.csv")))
    assert all(float(r[k]) == 0 for r in rows for k in ("CV", "EPS", "GD", "IGD"))
    assert main(["compare", str(out / "front.csv"), str(tmp_path / "e" / "front.csv"), "--names", "bialns,exact",
                 "--out", str(tmp_path / "c2")]) == 0
    plot = list(csv.DictReader(open(tmp_path / "c2" / "plot_data.csv")))
    sizes = len(read_front(out / "front.csv")) + len(read_front(tmp_path / "e" / "front.csv"))
    assert len(plot) == sizes


def test_compare_malformed_front(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("f1,f2\n1,x\n")
    good = tmp_path / "good.csv"
    good.write_text("f1,f2\n1,2\n")
    assert main(["compare", str(good), str(bad), "--out", str(tmp_path / "c")]) == 1
    assert "malformed" in json.loads(capsys.readouterr().err)["message"]


def test_compare_needs_two(tmp_path, capsys):
    good = tmp_path / "good.csv"
    good.write_text("f1,f2\n1,2\n")
    assert main(["compare", str(good), "--out", str(tmp_path / "c")]) == 1


def test_eval_reports_feasibility(tiny_file, tmp_path, capsys):
    out = tmp_path / "s"
    main(["solve", str(tiny_file), "--out", str(out)] + FAST)
    capsys.readouterr()
    assert main(["eval", str(tiny_file), str(out / "solutions" / "sol_000.json")]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["feasible"] and result["violations"] == []
    first = next(csv.DictReader(open(out / "front.csv")))
    assert (result["f1"], result["f2"]) == (int(first["f1"]), int(first["f2"]))


def test_console_entry_point_runs(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hcsp.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "hcsp" in proc.stdout
