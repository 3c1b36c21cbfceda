import json
import subprocess
import sys

import oracle
import pytest

from sapforge.cli import run, write_atomic
from sapforge.polygon import Polygon

SQUARE = Polygon.from_cycle([(0, 0), (1, 0), (1, 1), (0, 1)])


def test_enumerate_writes_csv_and_stream(tmp_path):
    out, stream = tmp_path / "c.csv", tmp_path / "s.jsonl"
    assert run(["enumerate", "--max-len", "8", "--threads", "1",
                "--out", str(out), "--stream", str(stream)]) == 0
    assert "sap,2,8,7" in out.read_text().splitlines()
    lines = stream.read_text().splitlines()
    assert len(lines) == 1 + 2 + 7
    assert all(json.loads(line)["dim"] == 2 for line in lines)


def test_enumerate_bridges_to_stdout(capsys):
    assert run(["enumerate", "--model", "bridge", "--max-len", "4", "--threads", "1"]) == 0
    assert f"bridge,2,4,{len(oracle.bridges(4))}" in capsys.readouterr().out.splitlines()


def test_closing_prints_the_fraction(capsys):
    assert run(["closing", "--n", "3", "--threads", "1"]) == 0
    assert capsys.readouterr().out.strip() == "2/9"


def test_input_errors_exit_with_one(capsys):
    assert run(["closing", "--n", "4"]) == 1
    with pytest.raises(SystemExit) as exc:
        run(["enumerate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run(["no-such-command"])
    assert exc.value.code == 1


def test_join_then_unjoin(tmp_path, capsys):
    sigma = SQUARE.translated(0, 1)
    assert run(["join", "--tau", SQUARE.to_json(), "--sigma", sigma.to_json()]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["joined"]["n"] == 24
    joined = tmp_path / "joined.json"
    joined.write_text(json.dumps(record["joined"]))
    junction = ",".join(map(str, record["junction"]))
    assert run(["unjoin", "--joined", f"@{joined}", "--junction", junction]) == 0
    tau, back = (Polygon.from_json(line) for line in capsys.readouterr().out.splitlines())
    assert tau.same_position(SQUARE)
    assert back == sigma


def test_unjoin_of_a_non_junction_fails_verification(capsys):
    assert run(["unjoin", "--joined", SQUARE.to_json(), "--junction", "5,5"]) == 2


def test_corner_join(capsys):
    assert run(["join", "--step-a", "--tau", SQUARE.to_json(), "--sigma", SQUARE.to_json()]) == 0
    assert json.loads(capsys.readouterr().out)["joined"]["n"] == 8


def test_verify_report(tmp_path):
    out = tmp_path / "report.json"
    code = run(["verify", "--suite", "counts-oracle,closing-identity", "--max-len", "9",
                "--threads", "1", "--out", str(out)])
    report = json.loads(out.read_text())
    assert code == 0 and report["passed"]
    assert [s["suite"] for s in report["suites"]] == ["counts-oracle", "closing-identity"]
    assert "generated" in report and report["seed"] == 0


def test_verify_rejects_unknown_suites():
    assert run(["verify", "--suite", "nonsense"]) == 1


def test_analyze_outputs(tmp_path, capsys):
    assert run(["analyze", "--max-len", "10", "--threads", "1", "--out-dir", str(tmp_path),
                "--plot"]) == 0
    for name in ("exponents.csv", "gj_hist.csv", "propagation.json", "theta.svg", "mu_lower.svg"):
        assert (tmp_path / name).stat().st_size > 0
    report = json.loads((tmp_path / "propagation.json").read_text())
    assert report["mu_ref_provenance"].startswith("certified")
    assert "mu lower bound" in capsys.readouterr().out


def test_atomic_write_replaces_whole_file(tmp_path):
    target = tmp_path / "nested" / "f.txt"
    write_atomic(target, "first")
    write_atomic(target, "second")
    assert target.read_text() == "second"
    assert [p.name for p in target.parent.iterdir()] == ["f.txt"]


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "sapforge", "closing", "--n", "5", "--threads", "1"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert done.stdout.strip() == str(oracle.closing_fraction(5))
