"""End-to-end CLI checks driven through subprocess."""

import os
import subprocess

import pytest

CLI = os.environ.get("KERNELCF_CLI")

pytestmark = pytest.mark.skipif(CLI is None, reason="KERNELCF_CLI not set")


def run_cli(*args, expect=0):
    result = subprocess.run([CLI, *args], capture_output=True, text=True)
    assert result.returncode == expect, result.stderr
    return result


def write_two_cliques(path):
    """Two 10-user cliques over disjoint item sets plus one bridge rating."""
    lines = []
    for prefix, items in (("a", "A"), ("b", "B")):
        for u in range(10):
            for i in range(10):
                lines.append(f"{prefix}{u},{items}{i},{3 + (u + i) % 3}")
            lines.append(f"{prefix}{u},{items}{10 + u % 6},5")
    lines.append("a0,B0,4")
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def ratings_file(tmp_path):
    path = tmp_path / "ratings.csv"
    write_two_cliques(path)
    return path


def test_ingest_reports_shape(ratings_file):
    result = run_cli("ingest", "--ratings", str(ratings_file))
    assert "users = 20" in result.stdout
    assert "entries = 221" in result.stdout


def test_ingest_split_manifests(ratings_file, tmp_path):
    train = tmp_path / "train.csv"
    test = tmp_path / "test.csv"
    run_cli("ingest", "--ratings", str(ratings_file), "--holdout", "0.2", "--seed", "3",
            "--train-out", str(train), "--test-out", str(test))
    n_train = len(train.read_text().splitlines())
    n_test = len(test.read_text().splitlines())
    assert n_train + n_test == 221
    assert n_test == round(0.2 * 221)


def test_layout_zero_iterations_keeps_seeded_placement(ratings_file, tmp_path):
    out1 = tmp_path / "layout1.csv"
    out2 = tmp_path / "layout2.csv"
    run_cli("layout", "--ratings", str(ratings_file), "--iterations", "0", "--seed", "9",
            "--output", str(out1))
    run_cli("layout", "--ratings", str(ratings_file), "--iterations", "0", "--seed", "9",
            "--output", str(out2))
    body = out1.read_text()
    assert body == out2.read_text()
    assert body.startswith("node_id,t,u\n")
    for line in body.splitlines()[1:]:
        _, t, u = line.split(",")
        assert -1.0 <= float(t) <= 1.0
        assert -1.0 <= float(u) <= 1.0


def test_evaluate_deterministic_with_seed(ratings_file, tmp_path):
    out1 = tmp_path / "report1.txt"
    out2 = tmp_path / "report2.txt"
    args = ("evaluate", "--ratings", str(ratings_file), "--method", "all", "--holdout", "0.2",
            "--seed", "7")
    run_cli(*args, "--output", str(out1))
    run_cli(*args, "--output", str(out2))
    assert out1.read_bytes() == out2.read_bytes()
    assert "classic-user.rmse = " in out1.read_text()
    assert "kernel-cf.rmse = " in out1.read_text()


def test_recommend_same_clique_items(ratings_file, tmp_path):
    out = tmp_path / "recs.csv"
    run_cli("recommend", "--ratings", str(ratings_file), "--user", "a1", "--top-n", "5",
            "--seed", "11", "--output", str(out))
    lines = out.read_text().splitlines()
    assert lines[0] == "rank,item_id,score"
    assert len(lines) == 6
    for rank, line in enumerate(lines[1:], start=1):
        fields = line.split(",")
        assert int(fields[0]) == rank
        assert fields[1].startswith("A")


def test_predict_kernel_cf(ratings_file):
    result = run_cli("predict", "--ratings", str(ratings_file), "--user", "a0", "--item", "A15",
                     "--seed", "3")
    assert "score = " in result.stdout
    assert "method = kernel-cf" in result.stdout


def test_diagnose_lists_bandwidths(ratings_file):
    result = run_cli("diagnose", "--ratings", str(ratings_file), "--seed", "5")
    assert "b_t = " in result.stdout
    assert "nodes = 20" in result.stdout
    assert "fallback = " in result.stdout


def test_config_file_roundtrip(ratings_file, tmp_path):
    config = tmp_path / "pipeline.cfg"
    config.write_text("kernel = gaussian\nmax_iterations = 150\nseed = 4\n")
    result = run_cli("evaluate", "--ratings", str(ratings_file), "--config", str(config),
                     "--method", "kernel-cf")
    assert "seed = 4" in result.stdout


def test_unknown_flag_exits_2(ratings_file):
    run_cli("evaluate", "--ratings", str(ratings_file), "--bogus", expect=2)
    run_cli("nonsense", expect=2)


def test_missing_file_exits_1():
    run_cli("ingest", "--ratings", "/nonexistent/r.csv", expect=1)
