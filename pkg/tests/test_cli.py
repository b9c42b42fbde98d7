import json

import numpy as np
import pytest

from qprelax.cli import main
from qprelax.core import load_instance
from qprelax.generators import horn_instance


@pytest.fixture
def horn_file(tmp_path):
    rc = main(["generate", "horn", "--out", str(tmp_path)])
    assert rc == 0
    return tmp_path / "horn5.json"


def write_vector(path, x):
    path.write_text(json.dumps({"x": list(x)}))
    return str(path)


class TestGenerate:
    def test_horn_files(self, horn_file, tmp_path):
        inst = load_instance(horn_file)
        ref, dtilde = horn_instance()
        assert np.array_equal(inst.Q, ref.Q)
        meta = json.loads((tmp_path / "horn5.meta.json").read_text())
        assert np.array_equal(np.array(meta["certificate"]), dtilde)
        assert meta["certificate_objective"] == -5

    def test_family_and_random(self, tmp_path, capsys):
        assert main(["generate", "horn-family", "--n", "6", "--seed", "1",
                     "--out", str(tmp_path)]) == 0
        assert main(["generate", "random", "--kind", "BOUNDED", "--n", "3",
                     "--m", "1", "--seed", "2", "--out", str(tmp_path)]) == 0
        capsys.readouterr()
        files = {p.name for p in tmp_path.glob("*.json")}
        assert "horn-family-n6-s1.json" in files
        assert "bounded-n3-m1-s2.json" in files
        assert "bounded-n3-m1-s2.meta.json" in files


class TestCommands:
    def test_analyze(self, horn_file, capsys):
        assert main(["analyze", str(horn_file)]) == 0
        out = capsys.readouterr().out
        assert "feasible: True" in out
        assert "recession cone: nontrivial" in out

    def test_analyze_json(self, horn_file, capsys):
        assert main(["--json", "analyze", str(horn_file)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["feasible"] is True
        assert payload["psd_on_nullspace"]["holds"] is False

    def test_solve_unbounded(self, horn_file, capsys):
        assert main(["--json", "solve", "--cone", "dnn", str(horn_file)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "UNBOUNDED"
        assert payload["value"] == "-inf"
        assert payload["certificate"]["objective_rate"] <= -0.1

    def test_solve_at_point(self, horn_file, tmp_path, capsys):
        xfile = write_vector(tmp_path / "x.json", [0, 1, 0, 0, 4])
        assert main(["--json", "solve", "--cone", "dnn", "--at", xfile,
                     str(horn_file)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "UNBOUNDED"

    def test_certificate(self, horn_file, capsys):
        assert main(["--json", "certificate", "--cone", "dnn", "--mode", "objective",
                     str(horn_file)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "FOUND"
        assert payload["certificate"]["verified"] is True

    def test_oracle(self, horn_file, capsys):
        assert main(["--json", "oracle", str(horn_file)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "OPTIMAL"
        assert payload["value"] == pytest.approx(27.0)

    def test_localmin(self, horn_file, tmp_path, capsys):
        xfile = write_vector(tmp_path / "v.json", [0, 0, 0, 0, 4.5])
        assert main(["--json", "localmin", "--at", xfile, str(horn_file)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert "is_local_min" in payload

    def test_envelope_csv(self, horn_file, tmp_path, capsys):
        a = write_vector(tmp_path / "a.json", [0, 9, 0, 0, 0])
        b = write_vector(tmp_path / "b.json", [0, 0, 0, 0, 4.5])
        assert main(["envelope", "--cone", "dnn", "--from", a, "--to", b,
                     "--samples", "3", str(horn_file)]) == 0
        out = capsys.readouterr().out
        lines = out.strip().split("\n")
        assert lines[0] == "t,q,lK,status"
        assert len(lines) == 4
        assert all(line.endswith("UNBOUNDED") for line in lines[1:])

    def test_envelope_to_file(self, horn_file, tmp_path, capsys):
        a = write_vector(tmp_path / "a.json", [0, 9, 0, 0, 0])
        b = write_vector(tmp_path / "b.json", [0, 0, 0, 0, 4.5])
        out = tmp_path / "env.csv"
        assert main(["envelope", "--from", a, "--to", b, "--samples", "3",
                     "--out", str(out), str(horn_file)]) == 0
        capsys.readouterr()
        assert out.read_text().startswith("t,q,lK,status\n")

    def test_compare(self, horn_file, capsys):
        assert main(["compare", str(horn_file)]) == 0
        out = capsys.readouterr().out
        assert "cross-checks" in out
        assert "[FAIL]" not in out

    def test_compare_directory_jobs(self, tmp_path, capsys):
        main(["generate", "random", "--kind", "BOUNDED", "--n", "3", "--m", "1",
              "--seed", "0", "--out", str(tmp_path)])
        main(["generate", "random", "--kind", "INFEASIBLE", "--n", "3", "--m", "2",
              "--seed", "0", "--out", str(tmp_path)])
        capsys.readouterr()
        assert main(["--json", "compare", "--jobs", "2", str(tmp_path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload) == 2


class TestExitCodes:
    def test_missing_file(self, capsys):
        assert main(["analyze", "/nonexistent/instance.json"]) == 2

    def test_bad_instance(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "name": "bad", "n": 2, "m": 1,
            "Q": [[0, 1], [0, 0]], "c": [0, 0], "A": [[1, 1]], "b": [1],
        }))
        assert main(["analyze", str(path)]) == 2

    def test_desk_scale_limit(self, horn_file, monkeypatch, capsys):
        monkeypatch.setenv("QPRELAX_ENUM_CAP", "3")
        assert main(["oracle", str(horn_file)]) == 3
