import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from disco_rmt.cli import main


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestExitCodes:
    def test_ok(self, tmp_path):
        out = tmp_path / "m.csv"
        assert main(["moments", "--ensemble", "wigner", "--size", "32", "--trials", "2", "--out", str(out)]) == 0
        assert read_csv(out)[0] == ["order", "estimate", "std_error", "exact_limit", "abs_dev"]

    def test_bad_ensemble(self):
        assert main(["esd", "--ensemble", "hankel", "--size", "16"]) == 1

    def test_bad_trials(self):
        assert main(["esd", "--trials", "0"]) == 1

    def test_argparse_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["esd", "--size", "many"])
        assert exc.value.code == 1

    def test_budget(self):
        assert main(["limit-moments", "--moments", "2,16"]) == 1

    def test_numerical_failure(self, monkeypatch):
        def boom(a):
            raise np.linalg.LinAlgError("did not converge")

        monkeypatch.setattr(np.linalg, "eigvalsh", boom)
        assert main(["esd", "--ensemble", "wigner", "--size", "8", "--trials", "1"]) == 2

    def test_check_fails(self, tmp_path):
        # a 2x2 spectrum has nothing to do with the limit; a tiny tolerance must trip
        args = ["moments", "--ensemble", "pst", "--size", "2", "--trials", "3", "--moments", "4",
                "--check", "--tol", "1e-9", "--out", str(tmp_path / "x.csv")]
        assert main(args) == 3

    def test_check_passes(self, tmp_path):
        args = ["moments", "--ensemble", "wigner", "--size", "256", "--trials", "5", "--moments", "2",
                "--check", "--tol", "0.1", "--out", str(tmp_path / "x.csv")]
        assert main(args) == 0

    def test_bad_output_path(self, tmp_path):
        assert main(["counterexample", "--out", str(tmp_path / "missing" / "x.csv")]) == 1


class TestSchemas:
    def test_esd(self, tmp_path):
        out = tmp_path / "esd.csv"
        assert main(["esd", "--ensemble", "wigner", "--size", "64", "--trials", "2", "--bins", "5",
                     "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["bin_lo", "bin_hi", "count"]
        assert len(rows) == 6 and sum(int(r[2]) for r in rows[1:]) == 128
        assert (tmp_path / "esd.moments.csv").exists()

    def test_conjecture(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["conjecture", "--ensemble", "pst", "--ensemble-b", "wigner", "--size", "64",
                     "--trials", "3", "--moments", "4,6", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["k", "m_a", "se_a", "m_disco", "se_disco", "m_b", "se_b", "verdict"]
        assert [r[0] for r in rows[1:]] == ["4", "6"]

    def test_gaps(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["gaps", "--ensemble", "pst", "--size", "32", "--depth", "1", "--trials", "1",
                     "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["index", "spacing"] and len(rows) == 64
        assert (tmp_path / "g.hist.csv").exists()

    def test_dsweep(self, tmp_path):
        out = tmp_path / "d.csv"
        assert main(["dsweep", "--size", "16", "--depth", "0,1,2", "--trials", "2", "--moments", "4",
                     "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0][0] == "depth" and [r[0] for r in rows[1:]] == ["0", "1", "2"]

    def test_json(self, tmp_path):
        out = tmp_path / "m.json"
        assert main(["moments", "--ensemble", "wigner", "--size", "16", "--trials", "2",
                     "--format", "json", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["experiment"] == "moments" and doc["config"]["size"] == 16

    def test_counterexample_stdout(self, capsys):
        assert main(["counterexample"]) == 0
        text = capsys.readouterr().out
        assert "normalized,1336343790,1336343790,true" in text
        assert "tr_a4,886801750,889801750,false" in text


class TestLimitMoments:
    def test_csv(self, capsys):
        assert main(["limit-moments", "--depth", "1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "series,two_k,exact_num,exact_den,float"
        assert "disco_d1,4,9,4,2.25" in lines
        assert "semicircle,8,14,1,14.0" in lines
        assert "gaussian,8,105,1,105.0" in lines

    def test_json(self, tmp_path):
        out = tmp_path / "lm.json"
        assert main(["limit-moments", "--depth", "2", "--format", "json", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        names = [t["name"] for t in doc["tables"]]
        assert names == ["semicircle", "disco_d2", "gaussian"]
        d2 = doc["tables"][1]["rows"][1]
        assert (d2["exact_num"], d2["exact_den"]) == (33, 16)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "disco_rmt", "limit-moments", "--moments", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "disco_d1,2,1,1,1.0" in proc.stdout
