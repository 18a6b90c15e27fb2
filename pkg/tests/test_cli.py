import json

import pytest

from scinol.cli import EXIT_IO, EXIT_USAGE, EXIT_VIOLATION, cli_main


@pytest.fixture(scope="module")
def toy_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("toy")
    assert cli_main(["synth", "--out", str(out), "--n-train", "300", "--n-test", "200"]) == 0
    return out


class TestCli:
    def test_stats(self, toy_dir, capsys):
        assert cli_main(["stats", str(toy_dir / "toy_train.csv")]) == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["features"] == 21 and stats["classes"] == 2
        assert 2.0 ** 19 < stats["scale"] < 2.0 ** 21

    def test_run_bound_verify(self, toy_dir, tmp_path, capsys):
        metrics, hist = tmp_path / "m.csv", tmp_path / "h.json"
        argv = ["run", "--train", str(toy_dir / "toy_train.csv"),
                "--test", str(toy_dir / "toy_test.csv"), "--learner", "scinol1",
                "--epsilon", "1", "--metrics", str(metrics), "--history", str(hist),
                "--comparator", str(toy_dir / "toy.json")]
        assert cli_main(argv) == 0
        first = metrics.read_bytes()
        assert first.startswith(b"step,epoch,avg_test_loss,test_accuracy,cum_train_loss,cum_regret\n")
        assert cli_main(argv) == 0
        assert metrics.read_bytes() == first
        capsys.readouterr()
        assert cli_main(["bound", "--history", str(hist), "--comparator",
                         str(toy_dir / "toy.json")]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["linearized_regret"] <= out["theorem1_bound"]
        report = tmp_path / "r.json"
        assert cli_main(["verify", "--grid", "100x100", "--random", "500", "--conjugate", "50",
                         "--history", str(hist), "--json", str(report)]) == 0
        results = json.loads(report.read_text())
        assert all(r["pass"] for r in results)
        assert max(r["max_violation"] for r in results if r["check_name"].endswith("grid")) <= 1e-12

    def test_eta_grid_outputs(self, toy_dir, tmp_path):
        m = tmp_path / "g.csv"
        assert cli_main(["run", "--train", str(toy_dir / "toy_train.csv"), "--test",
                         str(toy_dir / "toy_test.csv"), "--learner", "sgd", "--eta", "0.1,1",
                         "--metrics", str(m)]) == 0
        assert (tmp_path / "g.eta0.1.csv").exists() and (tmp_path / "g.eta1.csv").exists()

    def test_usage_errors(self, toy_dir, tmp_path):
        assert cli_main(["frobnicate"]) == EXIT_USAGE
        assert cli_main(["verify", "--grid", "ten"]) == EXIT_USAGE
        assert cli_main(["run", "--train", str(toy_dir / "toy_train.csv"), "--test",
                         str(toy_dir / "toy_test.csv"), "--learner", "adam",
                         "--metrics", str(tmp_path / "x.csv")]) == EXIT_USAGE

    def test_io_errors(self, tmp_path):
        assert cli_main(["stats", str(tmp_path / "missing.csv")]) == EXIT_IO
        bad = tmp_path / "bad.svm"
        bad.write_text("1 2:1 1:1\n")
        assert cli_main(["stats", str(bad)]) == EXIT_IO

    def test_violation_exit_code(self):
        assert EXIT_VIOLATION not in (0, EXIT_IO, EXIT_USAGE)
