import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from mfraclab.cli import build_parser, main, refinement_study, resolve_config

FAST = ["--grids", "8,16", "--instances", "2", "--seed", "5"]


def run_main(args, env=None):
    if env:
        old = {k: os.environ.get(k) for k in env}
        os.environ.update(env)
        try:
            return main(args)
        finally:
            for k, v in old.items():
                if v is None:
                    os.environ.pop(k, None)
                else:
                    os.environ[k] = v
    return main(args)


def test_list_checks(capsys):
    assert main(["--list"]) == 0
    out = capsys.readouterr().out
    assert "check_welland" in out and "check_orlicz_strong" in out


def test_full_small_run(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["--suite", "check_weak_malpha,check_holder_pair", *FAST,
                 "--out", str(out)])
    assert code == 0
    for name in ("config.json", "report.csv", "refinement.csv", "summary.csv",
                 "refinement.png", "verdicts.png"):
        assert (out / name).exists(), name
    table = capsys.readouterr().out
    assert "check_weak_malpha" in table and "STABLE-PASS" in table
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["seed"] == 5 and cfg["grids"] == [8, 16]
    header = (out / "report.csv").read_text().splitlines()[0]
    assert header == ("check_id,part,statement,config,seed,grid,lhs,rhs,c_hat,"
                      "hypothesis,mode,flags,skip")


def test_no_figures_flag(tmp_path):
    out = tmp_path / "nofig"
    assert main(["--suite", "check_holder_three", *FAST, "--out", str(out),
                 "--no-figures"]) == 0
    assert not (out / "refinement.png").exists()
    assert (out / "report.csv").exists()


def test_unknown_check_is_config_error(tmp_path):
    code = main(["--suite", "check_nonsense", *FAST, "--out", str(tmp_path / "x")])
    assert code == 2


def test_invalid_exponents_reported(tmp_path, capsys):
    code = main(["--suite", "check_weak_malpha", "--p", "2.5,2.5", *FAST,
                 "--out", str(tmp_path / "x")])
    err = capsys.readouterr().err
    assert code == 2
    assert "p_i" in err and "nm/alpha" in err


def test_bad_grids_rejected(tmp_path):
    assert main(["--grids", "16,12", "--out", str(tmp_path / "x")]) == 2
    assert main(["--grids", "16,16", "--out", str(tmp_path / "x")]) == 2


def test_config_file_and_flag_override(tmp_path):
    cfg = {"suite": "check_holder_three", "grids": [8], "instances": 1, "seed": 9,
           "out": str(tmp_path / "from_file")}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    assert main(["--config", str(p)]) == 0
    assert (tmp_path / "from_file" / "report.csv").exists()
    # a flag beats the file
    assert main(["--config", str(p), "--out", str(tmp_path / "flagged")]) == 0
    assert (tmp_path / "flagged" / "report.csv").exists()
    # unknown keys are config errors
    p2 = tmp_path / "bad.json"
    p2.write_text(json.dumps({"nonsense": 1}))
    assert main(["--config", str(p2)]) == 2


def test_env_output_dir(tmp_path):
    target = tmp_path / "envdir"
    code = run_main(["--suite", "check_holder_three", *FAST, "--no-figures"],
                    env={"MFRACLAB_OUT": str(target)})
    assert code == 0
    assert (target / "report.csv").exists()


def test_parallel_reports_byte_identical(tmp_path):
    args = ["--suite", "check_weak_malpha,check_strong_malpha,check_welland",
            *FAST, "--no-figures"]
    out1, out8 = tmp_path / "j1", tmp_path / "j8"
    assert main([*args, "--jobs", "1", "--out", str(out1)]) == 0
    assert main([*args, "--jobs", "8", "--out", str(out8)]) == 0
    for name in ("report.csv", "refinement.csv", "summary.csv", "config.json"):
        b1 = (out1 / name).read_bytes()
        b8 = (out8 / name).read_bytes()
        if name == "config.json":
            # jobs and out are configuration, and differ by construction
            d1 = json.loads(b1)
            d8 = json.loads(b8)
            d1.pop("jobs"), d8.pop("jobs")
            d1.pop("out"), d8.pop("out")
            assert d1 == d8
        else:
            assert b1 == b8, name


def test_refinement_study_rows(tmp_path):
    cfg = resolve_config(build_parser().parse_args(
        ["--suite", "check_weak_malpha", *FAST]))
    outcomes, rows = refinement_study(cfg)
    assert rows and rows[0][0] == "check_weak_malpha"
    n1, n2 = rows[0][2], rows[0][3]
    assert (n1, n2) == (8, 16)
    assert isinstance(rows[0][7], bool)


def test_explicit_weight_recipes(tmp_path):
    out = tmp_path / "rec"
    code = main(["--suite", "check_strong_malpha", "--grids", "8,16",
                 "--instances", "2", "--weights", "constant:1.3;bump:0.2,0.4",
                 "--u", "constant:1.0", "--out", str(out), "--no-figures"])
    assert code == 0
    # unresolvable recipe kinds and slot-count mismatches are config errors
    assert main(["--suite", "check_strong_malpha", "--weights", "mystery:1;bump:0.1",
                 "--out", str(tmp_path / "x")]) == 2
    assert main(["--suite", "check_strong_malpha", "--weights", "power:0.5",
                 "--out", str(tmp_path / "y")]) == 2


def test_suite_all_smoke(tmp_path):
    out = tmp_path / "all"
    code = main(["--suite", "all", "--grids", "8,16", "--instances", "1",
                 "--seed", "3", "--out", str(out), "--no-figures"])
    assert code == 0
    summary = (out / "summary.csv").read_text().splitlines()
    assert len(summary) == 22  # header + every registered check
    assert not any(",FAIL," in line for line in summary)


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "mfraclab.cli", "--list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "check_discreta" in proc.stdout
