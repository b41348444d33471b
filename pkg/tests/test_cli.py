"""Command-line interface: exit codes, golden JSON output, determinism."""
import json

import pytest

from util import BARTHOLDI, ODOMETER_TEXT, run_cli

BW = ",".join(str(w) for w in BARTHOLDI)


def test_bound_prints_the_exponent():
    code, out, err = run_cli(["bound", "--eta", "0.8106", "--d", "2"])
    assert code == 0
    assert out == "alpha 0.767496\n"


def test_bound_rejects_ratio_above_one():
    code, out, err = run_cli(["bound", "--eta", "1.2", "--d", "2"])
    assert code == 1
    assert "exceeds 1" in err


def test_validate_smoke():
    code, out, _ = run_cli(["validate", "grigorchuk"])
    assert code == 0
    assert out.startswith("grigorchuk: ok (5 states, degree 2")


def test_target_found_json_golden():
    code, out, _ = run_cli(
        ["target", "grigorchuk", "--target", "0.9", "--weights", BW, "--json"]
    )
    assert code == 0
    d = json.loads(out)
    assert d["status"] == "found"
    assert d["radius"] == 2
    assert d["egg_size"] == 4
    assert d["eta"] == pytest.approx(0.8105362, abs=1e-6)
    assert d["alpha"] == pytest.approx(0.7674294, abs=1e-6)
    assert d["machine"] == "grigorchuk"
    assert d["aux"]["kind"] == "free_product"
    assert d["aux"]["blocks"] == [["a"], ["b", "c", "d"]]
    assert d["per_level_sizes"] == [[1, 4], [2, 3]]
    assert "package" in d["versions"]


def test_target_exit_codes():
    ok, _, _ = run_cli(["target", "grigorchuk", "--target", "0.9", "--weights", BW])
    stuck, out, _ = run_cli(
        ["target", "grigorchuk", "--target", "0.9", "--radius-cap", "8"]
    )
    assert ok == 0
    assert stuck == 2
    assert "status radius-exceeded" in out


def test_target_output_is_deterministic():
    argv = ["target", "grigorchuk", "--target", "0.9", "--weights", BW, "--json"]
    runs = [run_cli(list(argv)) for _ in range(2)]
    assert runs[0] == runs[1]


def test_workers_do_not_change_the_answer():
    base = ["target", "grigorchuk", "--target", "0.9", "--weights", BW, "--json"]
    _, solo, _ = run_cli(base + ["--workers", "1"])
    _, multi, _ = run_cli(base + ["--workers", "3"])
    assert solo == multi


def test_unnormalized_weights_are_noted_on_stderr():
    code, _, err = run_cli(
        ["target", "grigorchuk", "--target", "0.9", "--weights", "3,3,2,2",
         "--radius-cap", "4"]
    )
    assert "normalized to [0.3, 0.3, 0.2, 0.2]" in err


def test_opt_reaches_the_tuned_bound_from_uniform():
    code, out, _ = run_cli(
        ["opt", "grigorchuk", "--targets", "0.9", "--update", "4", "--json"]
    )
    assert code == 0
    d = json.loads(out)
    assert d["strategy"] == "opt"
    assert d["status"] == "found"
    assert d["eta"] == pytest.approx(0.8105362, abs=5e-4)
    assert len(d["rounds"]) == 1
    assert d["rounds"][0]["weights_in"] == [0.25] * 4


def test_opt_seed_makes_runs_reproducible():
    argv = ["opt", "grigorchuk", "--targets", "0.9", "--update", "4",
            "--opt-seed", "7", "--json"]
    assert run_cli(list(argv)) == run_cli(list(argv))


def test_ovi_with_updates_closes_at_radius_two():
    code, out, _ = run_cli(["ovi", "grigorchuk", "--target", "0.9", "--update", "2"])
    assert code == 0
    assert "status found" in out
    assert "radius 2" in out
    assert "egg 4" in out


def test_growth_smoke():
    code, out, _ = run_cli(["growth", "grigorchuk", "--maxlen", "6"])
    assert code == 0
    assert out.strip() == "gamma: 1 5 11 23 40 68 109"


def test_superpoly_smoke():
    code, out, _ = run_cli(["superpoly", "grigorchuk", "--maxlen", "6"])
    assert code == 0
    assert "verdict: consistent" in out


def test_export_dot_both_flavors(tmp_path):
    code, out, _ = run_cli(["export-dot", "grigorchuk"])
    assert code == 0
    assert out.startswith("digraph")
    dest = tmp_path / "g.dot"
    code, _, _ = run_cli(["export-dot", "grigorchuk", "--schreier", "-o", str(dest)])
    assert code == 0
    assert '"0" -> "1"' in dest.read_text()


def test_machine_argument_accepts_a_file(tmp_path):
    path = tmp_path / "odo.txt"
    path.write_text(ODOMETER_TEXT)
    code, out, _ = run_cli(["validate", str(path)])
    assert code == 0
    assert "ok" in out


def test_unknown_machine_is_an_error():
    code, _, err = run_cli(["target", "nope", "--target", "0.9"])
    assert code == 1
    assert "unknown machine" in err


def test_aux_blocks_flag():
    code, out, _ = run_cli(
        ["target", "grigorchuk", "--target", "0.9", "--weights", BW,
         "--aux-blocks", "a;b,c,d", "--json"]
    )
    assert code == 0
    assert json.loads(out)["aux"]["blocks"] == [["a"], ["b", "c", "d"]]
    free, out, _ = run_cli(
        ["target", "grigorchuk", "--target", "0.9", "--weights", BW,
         "--aux-blocks", "free", "--radius-cap", "2", "--json"]
    )
    assert json.loads(out)["aux"]["kind"] == "free"
