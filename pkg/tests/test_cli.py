import csv
import json
from pathlib import Path

import pytest

from rhcircles import cli

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

ROUND_TRIP = [
    ("identity_solve.json", "solve", 0),
    ("rational_solve.json", "solve", 0),
    ("rational_near_singular.json", "solve", 3),
    ("index_power.json", "index", 0),
    ("scalar_winding.json", "factorize-scalar", 0),
    ("hermitian_scalar.json", "factorize-hermitian", 0),
    ("symmetric_check.json", "check-symmetry", 0),
    ("idnls_soliton.json", "idnls", 0),
    ("idnls_defocusing.json", "idnls", 0),
]


def run(mode, problem, tmp_path, *extra):
    out = tmp_path / "report.json"
    code = cli.main([mode, "--problem", str(problem), "--out", str(out), *extra])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def write_problem(tmp_path, doc):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.mark.parametrize("name,mode,expected", ROUND_TRIP)
def test_shipped_problems_round_trip(name, mode, expected, tmp_path):
    code, report = run(mode, PROBLEMS / name, tmp_path)
    assert code == expected
    if expected == 0:
        assert report["mode"] == mode
        assert report["per_circle_nodes"]
        assert report["timing_seconds"] >= 0.0
        for key, value in report.items():
            if isinstance(value, float):
                assert value == value and abs(value) != float("inf"), key


def test_identity_report_values(tmp_path):
    code, report = run("solve", PROBLEMS / "identity_solve.json", tmp_path)
    assert code == 0
    assert report["residual_jump"] == 0.0
    assert report["smallest_singular_value"] > 0.5


def test_index_report_values(tmp_path):
    code, report = run("index", PROBLEMS / "index_power.json", tmp_path)
    assert code == 0
    assert (report["dim_ker"], report["dim_coker"]) == (1, 0)
    below, above = report["ker_gap"]
    assert below < 1e-7 < above
    assert above > 100.0 * below


def test_scalar_report_values(tmp_path):
    code, report = run(
        "factorize-scalar", PROBLEMS / "scalar_winding.json", tmp_path
    )
    assert code == 0
    assert report["winding_index"] == 2
    assert report["residual_jump"] < 1e-12


def test_soliton_report_values(tmp_path):
    code, report = run("idnls", PROBLEMS / "idnls_soliton.json", tmp_path)
    assert code == 0
    assert (report["dim_ker"], report["dim_coker"]) == (0, 0)
    assert report["min_re_eig"] > 0.0
    assert report["symmetric_off_circle"] is True
    assert report["residual_jump"] <= 1e-8
    assert report["residue_condition_residual"] <= 1e-8


def test_reports_are_deterministic(tmp_path):
    _, first = run("solve", PROBLEMS / "rational_solve.json", tmp_path)
    _, second = run("solve", PROBLEMS / "rational_solve.json", tmp_path)
    first.pop("timing_seconds")
    second.pop("timing_seconds")
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_samples_csv(tmp_path):
    out = tmp_path / "report.json"
    samples = tmp_path / "samples.csv"
    code = cli.main(
        [
            "solve",
            "--problem",
            str(PROBLEMS / "rational_solve.json"),
            "--out",
            str(out),
            "--samples",
            str(samples),
            "--grid",
            "6x5",
            "--bbox=-8,8,-8,8",
        ]
    )
    assert code == 0
    with samples.open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["region", "re_z", "im_z", "row", "col", "re_m", "im_m"]
    assert len(rows) > 10
    for region, re_z, im_z, row, col, re_m, im_m in rows[1:]:
        assert region in ("plus", "minus")
        assert (int(row), int(col)) == (0, 0)
        complex(float(re_m), float(im_m))
        assert abs(complex(float(re_z), float(im_z))) <= 8 * 2**0.5 + 1e-9


def test_samples_rejected_for_sampleless_mode(tmp_path):
    out = tmp_path / "report.json"
    code = cli.main(
        [
            "index",
            "--problem",
            str(PROBLEMS / "index_power.json"),
            "--out",
            str(out),
            "--samples",
            str(tmp_path / "samples.csv"),
        ]
    )
    assert code == 1


def test_nodes_override(tmp_path):
    code, report = run(
        "solve", PROBLEMS / "identity_solve.json", tmp_path, "--nodes", "32"
    )
    assert code == 0
    assert report["per_circle_nodes"] == [32]


def test_tolerance_override(tmp_path):
    code, _ = run(
        "solve",
        PROBLEMS / "rational_solve.json",
        tmp_path,
        "--tol",
        "sigma_min=1e-6",
    )
    assert code == 0
    code, _ = run(
        "solve", PROBLEMS / "rational_solve.json", tmp_path, "--tol", "bogus=1"
    )
    assert code == 1
    code, _ = run(
        "solve",
        PROBLEMS / "rational_solve.json",
        tmp_path,
        "--tol",
        "sigma_min=tiny",
    )
    assert code == 1


def test_mode_mismatch_is_input_error(tmp_path):
    code, _ = run("solve", PROBLEMS / "index_power.json", tmp_path)
    assert code == 1


def test_unreadable_problems_are_input_errors(tmp_path):
    code, _ = run("solve", tmp_path / "missing.json", tmp_path)
    assert code == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run("solve", bad, tmp_path)
    assert code == 1
    wrong_version = write_problem(tmp_path, {"version": 2, "mode": "solve"})
    code, _ = run("solve", wrong_version, tmp_path)
    assert code == 1


def test_bad_grid_is_input_error(tmp_path):
    code, _ = run(
        "solve", PROBLEMS / "identity_solve.json", tmp_path, "--grid", "wide"
    )
    assert code == 1


def test_unknown_mode_exits_one():
    with pytest.raises(SystemExit) as info:
        cli.main(["transmogrify", "--problem", "x", "--out", "y"])
    assert info.value.code == 1


def test_indefinite_symbol_fails_check(tmp_path):
    problem = write_problem(
        tmp_path,
        {
            "version": 1,
            "mode": "check-symmetry",
            "contour": [
                {"center": [0.0, 0.0], "radius": 1.0, "orientation": "cw", "nodes": 32}
            ],
            "jump": [["z"]],
        },
    )
    code, report = run("check-symmetry", problem, tmp_path)
    assert code == 2
    assert report["min_re_eig"] <= 0.0


def test_asymmetric_jump_fails_check(tmp_path):
    # unit circle plus a mirror pair; the constants 2 and 3 break the
    # v(z) = v(1/conj(z))^* relation between the paired circles
    problem = write_problem(
        tmp_path,
        {
            "version": 1,
            "mode": "check-symmetry",
            "contour": [
                {"center": [0.0, 0.0], "radius": 1.0, "orientation": "cw", "nodes": 32},
                {"center": [2.0, 0.0], "radius": 0.5, "orientation": "cw", "nodes": 32},
                {
                    "center": [0.5333333333333333, 0.0],
                    "radius": 0.13333333333333333,
                    "orientation": "ccw",
                    "nodes": 32,
                },
            ],
            "jump": [[["4"]], [["2"]], [["3"]]],
        },
    )
    code, report = run("check-symmetry", problem, tmp_path)
    assert code == 2
    assert report["symmetric_off_circle"] is False
    assert report["symmetry_deviation"] > 0.5
    assert report["min_re_eig"] > 0.0


def test_noninvariant_contour_fails_check(tmp_path):
    problem = write_problem(
        tmp_path,
        {
            "version": 1,
            "mode": "check-symmetry",
            "contour": [
                {"center": [5.0, 0.0], "radius": 1.0, "orientation": "ccw", "nodes": 32}
            ],
            "jump": [["2"]],
        },
    )
    code, _ = run("check-symmetry", problem, tmp_path)
    assert code == 2


def test_indefinite_symbol_fails_hermitian_factorization(tmp_path):
    problem = write_problem(
        tmp_path,
        {
            "version": 1,
            "mode": "factorize-hermitian",
            "contour": [
                {"center": [0.0, 0.0], "radius": 1.0, "orientation": "ccw", "nodes": 64}
            ],
            "jump": [["0.5 + z + 1/z"]],
        },
    )
    code, _ = run("factorize-hermitian", problem, tmp_path)
    assert code == 2


def test_matrix_jump_rejected_for_scalar_factorization(tmp_path):
    problem = write_problem(
        tmp_path,
        {
            "version": 1,
            "mode": "factorize-scalar",
            "contour": [
                {"center": [0.0, 0.0], "radius": 1.0, "orientation": "ccw", "nodes": 32}
            ],
            "jump": [["1", "0"], ["0", "1"]],
        },
    )
    code, _ = run("factorize-scalar", problem, tmp_path)
    assert code == 1


def test_singular_expression_at_node_is_input_error(tmp_path):
    # the 32-node unit circle places a node exactly at z = 1
    problem = write_problem(
        tmp_path,
        {
            "version": 1,
            "mode": "solve",
            "contour": [
                {"center": [0.0, 0.0], "radius": 1.0, "orientation": "ccw", "nodes": 32}
            ],
            "jump": [["1/(z - 1)"]],
        },
    )
    code, _ = run("solve", problem, tmp_path)
    assert code == 1


def test_per_circle_jump_matrices(tmp_path):
    problem = write_problem(
        tmp_path,
        {
            "version": 1,
            "mode": "solve",
            "contour": [
                {"center": [0.0, 0.0], "radius": 1.0, "orientation": "ccw", "nodes": 64},
                {"center": [4.0, 0.0], "radius": 1.0, "orientation": "ccw", "nodes": 64},
            ],
            "jump": [[["1"]], [["1 + 0.3/(z - 4)"]]],
        },
    )
    code, report = run("solve", problem, tmp_path)
    assert code == 0
    assert report["per_circle_nodes"] == [64, 64]
    assert report["residual_jump"] < 1e-12
    mismatched = write_problem(
        tmp_path, json.loads(problem.read_text()) | {"jump": [[["1"]]]}
    )
    code, _ = run("solve", mismatched, tmp_path)
    assert code == 1
