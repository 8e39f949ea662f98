import json

import pytest

from purelab import cli


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_no_arguments_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.parse_args([])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["hbac", "--n", "20"], "--n"),
        (["hbac", "--delta", "0"], "--delta"),
        (["montecarlo", "--dim", "1"], "--dim"),
        (["oracle-check", "--dim", "6"], "--dim"),
        (["montecarlo", "--seed", "-1"], "--seed"),
        (["mixer-grid", "--steps", "1"], "--steps"),
        (["distill", "--n", "9"], "--n"),
    ],
)
def test_out_of_range_flags(argv, flag, capsys):
    with pytest.raises(SystemExit) as info:
        cli.parse_args(argv)
    assert info.value.code == 2
    assert flag in capsys.readouterr().err


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as info:
        cli.parse_args(["hbac", "--bogus"])
    assert info.value.code == 2


def test_parse_montecarlo_config():
    cfg = cli.parse_args("montecarlo --dim 5 --densities 100 --unitaries 100 --seed 42 --out fig1b.csv".split())
    assert (cfg.command, cfg.dim, cfg.densities, cfg.unitaries, cfg.seed, cfg.out) == (
        "montecarlo", 5, 100, 100, 42, "fig1b.csv")
    cfg = cli.parse_args("hbac --n 3 --eps0 0.2 --delta 1e-6".split())
    assert (cfg.n, cfg.eps0, cfg.delta) == (3, 0.2, 1e-6)


def test_defaults_mirror_figure_parameters():
    cfg = cli.parse_args(["montecarlo"])
    assert (cfg.dim, cfg.densities, cfg.unitaries) == (5, 100, 100)


def test_threads_flag_and_env(monkeypatch):
    monkeypatch.setenv("PURELAB_THREADS", "2")
    assert cli.parse_args(["montecarlo"]).threads == 2
    assert cli.parse_args(["montecarlo", "--threads", "5"]).threads == 5


def test_theorems(capsys):
    code, out = run(["theorems", "--seed", "7", "--samples", "200"], capsys)
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("status=ok")


def test_oracle_check(capsys):
    code, out = run(["oracle-check", "--dim", "4", "--samples", "5"], capsys)
    assert code == 0 and "oracle-d4: 105/105 ok" in out


def test_mixer_grid_writes_dataset_and_manifest(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    code, stdout = run(["mixer-grid", "--steps", "101", "--out", str(out)], capsys)
    assert code == 0
    assert stdout.startswith("status=ok max_gap=")
    assert len(out.read_text().splitlines()) == 10202
    manifest = json.loads((tmp_path / "grid.csv.manifest.json").read_text())
    assert manifest["record_count"] == 10201 and manifest["max_gap"] <= 1e-12


def test_montecarlo_summary_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["montecarlo", "--dim", "3", "--densities", "10", "--unitaries", "10", "--seed", "5", "--format", "jsonl"]
    code, out = run(args + ["--out", str(a)], capsys)
    assert code == 0 and out.startswith("status=ok max_y=")
    run(args + ["--out", str(b), "--threads", "3"], capsys)
    assert a.read_bytes() == b.read_bytes()
    manifest = json.loads((tmp_path / "a.jsonl.manifest.json").read_text())
    assert manifest["seed"] == 5 and manifest["record_count"] == 100 and manifest["max_y"] <= 1


def test_hbac_and_distill(capsys):
    code, out = run(["hbac", "--n", "3", "--eps0", "0.2", "--delta", "1e-6"], capsys)
    assert code == 0 and "final_eps_n=0.39" in out
    code, out = run(["distill", "--n", "4", "--eps", "0.2"], capsys)
    assert code == 0 and "fixed_point_distance=0.0" in out


def test_nonconvergence_exit_code(capsys):
    code, out = run(["hbac", "--n", "4", "--eps0", "0.1", "--delta", "1e-14", "--max-iterations", "5"], capsys)
    assert code == 1 and out.startswith("status=violation")


def test_violation_exit_code(monkeypatch, capsys):
    from purelab.errors import BoundViolationError

    def boom(*a, **k):
        raise BoundViolationError("fake counterexample")

    monkeypatch.setattr(cli.ex, "run_fig1b", boom)
    code, out = run(["montecarlo", "--densities", "1", "--unitaries", "1"], capsys)
    assert code == 1 and out.startswith("status=violation")


def test_io_error_exit_code(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _ = run(["mixer-grid", "--steps", "3", "--out", str(blocker / "sub" / "g.csv")], capsys)
    assert code == 3
