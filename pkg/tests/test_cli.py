import json
import subprocess
import sys

import pytest

from hierperc import cli
from hierperc.validation import Deviation

BASE = ["--alpha", "0.5", "--beta", "1.0", "--replicates", "2000", "--seed", "3"]


def run(capsys, *argv):
    status = cli.main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


@pytest.mark.parametrize(
    "argv",
    [
        ["susceptibility", *BASE, "--n", "4"],
        ["typical-max", *BASE, "--n", "4"],
        ["two-point", *BASE, "--n", "3"],
        ["two-point", *BASE, "--n", "3", "--mode", "unrestricted", "--delta-embed", "2"],
        ["triangle", *BASE, "--n", "3"],
        ["phi", *BASE, "--levels", "2..4"],
        ["tail", *BASE, "--beta", "0.6", "--cap", "64"],
        ["delta-fit", *BASE, "--cap", "256"],
        ["sample", *BASE, "--n", "5", "--replicates", "3", "--marks", "0,7"],
    ],
)
def test_commands_succeed(capsys, argv):
    status, out, err = run(capsys, *argv)
    assert status == 0, err
    assert out.strip()


def test_oracle_check_passes(capsys):
    status, out, _ = run(capsys, "oracle-check", "--alpha", "0.5", "--beta", "0.7", "--n", "2", "--replicates", "20000")
    assert status == 0
    header = out.splitlines()[0].split(",")
    assert header[:4] == ["n", "beta", "sampler", "observable"]
    assert {"direct", "recursive", "explorer"} <= {line.split(",")[2] for line in out.splitlines()[1:]}


def test_oracle_deviation_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "oracle_check", lambda *a, **k: [Deviation("direct", "kroot", "1", 0.5, 0.9, 0.01)])
    status, out, _ = run(capsys, "oracle-check", "--alpha", "0.5", "--beta", "0.7", "--n", "2")
    assert status == 2
    assert "direct,kroot" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["susceptibility", "--alpha", "0.5", "--n", "2"],  # missing beta
        ["susceptibility", "--alpha", "1.5", "--beta", "1", "--n", "2"],
        ["susceptibility", "--alpha", "0.5", "--beta", "-1", "--n", "2"],
        ["susceptibility", "--alpha", "0.5", "--beta", "1", "--replicates", "0"],
        ["wobble", "--beta", "1"],
        ["tail", "--beta", "1", "--cap", "abc"],
        ["delta-fit", "--beta", "0.6", "--cap", "64", "--window", "16,64"],
        ["sample", "--beta", "1", "--n", "2", "--marks", "9"],
        ["sample", "--beta", "1", "--n", "40"],
        ["betac-scan", "--beta", "0", "--levels", "2..3", "--bracket", "0.01,0.02", "--replicates", "200"],
    ],
)
def test_invalid_input_exit_one(capsys, argv):
    status, _, err = run(capsys, *argv)
    assert status == 1
    assert err.startswith("error:") and err.count("\n") == 1


def test_two_point_beta_zero(capsys):
    status, out, _ = run(capsys, "two-point", "--alpha", "0.5", "--beta", "0", "--n", "3", "--replicates", "50")
    assert status == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    values = {r[2]: float(r[3]) for r in rows}
    assert values["t_restricted_0"] == 1.0
    assert all(values[f"t_restricted_{k}"] == 0.0 for k in (1, 2, 3))


def test_repeat_is_byte_identical(tmp_path):
    argv = ["tail", *BASE, "--cap", "128"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("command", [["susceptibility", "--n", "6"], ["sample", "--n", "4", "--format", "jsonl"]])
def test_workers_do_not_change_output(tmp_path, command):
    argv = [*command, *BASE, "--replicates", "60000"]
    a, b = tmp_path / "w1", tmp_path / "w2"
    assert cli.main(argv + ["--workers", "1", "--out", str(a)]) == 0
    assert cli.main(argv + ["--workers", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_manifest_round_trip(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["susceptibility", *BASE, "--n", "3", "--out", str(out)]) == 0
    data = json.loads((tmp_path / "s.csv.manifest.json").read_text())
    assert data["exit_status"] == 0 and data["total_replicates"] == 2000
    assert data["version"] == cli.__version__
    cfg = cli.config_from_manifest(data)
    assert cfg == cli.parse_config(["susceptibility", *BASE, "--n", "3", "--out", str(out)])
    text, status = cli.execute(cfg)
    assert status == 0 and text == out.read_text()


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "run.cfg"
    conf.write_text("alpha=0.5\nbeta=0.2\nn=3\nreplicates=500\nseed=9\n")
    cfg = cli.parse_config(["susceptibility", "--config", str(conf), "--beta", "0.9"])
    assert cfg.params.beta == 0.9 and cfg.replicates == 500 and cfg.n == 3
    conf.write_text("alpha=0.5\nbeta=0.2\nbogus=1\n")
    status, _, err = run(capsys, "susceptibility", "--config", str(conf))
    assert status == 1 and "bogus" in err


def test_sample_jsonl_fields(capsys):
    status, out, _ = run(capsys, "sample", *BASE, "--n", "4", "--replicates", "2", "--marks", "0,3", "--format", "jsonl")
    assert status == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert len(recs) == 2
    assert recs[0]["marks_connected"][0] is True
    assert len(recs[0]["open_edges"]) == 4
    assert recs[1]["replicate"] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hierperc", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == cli.__version__
