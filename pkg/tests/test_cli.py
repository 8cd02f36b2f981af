import json
import logging
import math
import subprocess
import sys

import numpy as np
import pytest

from _util import REF_H
from holoflow.cli import main
from holoflow.io import decode_matrix, encode_matrix, parse_problem
from holoflow.synth import rotation


def reference_doc(**overrides):
    doc = {
        "ambient_dim": 3,
        "frame": encode_matrix(np.eye(3)[:, :2]),
        "g0": encode_matrix(np.diag([1j, -1])),
        "omega": encode_matrix(rotation(math.pi / 4)),
        "winding": 1,
    }
    doc.update(overrides)
    return doc


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="doc.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
        return str(path)

    return _write


def read_csv(path):
    lines = open(path, encoding="utf-8").read().splitlines()
    return lines[0], np.array([[float(x) for x in line.split(",")] for line in lines[1:]])


# -- synth ------------------------------------------------------------------


def test_synth_reference(write, tmp_path):
    out = tmp_path / "out.json"
    assert main(["synth", write(reference_doc()), "--output", str(out)]) == 0
    result = json.loads(out.read_text())
    assert np.max(np.abs(decode_matrix(result["H"], "H") - REF_H)) <= 1e-12
    np.testing.assert_allclose(decode_matrix(result["U"], "U"), np.diag([1j, -1, -1]), atol=1e-15)
    assert result["report"]["nontrivial"] is True
    assert set(result["report"]) == {
        "proj_residual",
        "restriction_residual",
        "skew_residual",
        "commutator_norm",
        "nontrivial",
    }


def test_synth_zero_winding_is_warning(write, tmp_path):
    out = tmp_path / "out.json"
    assert main(["synth", write(reference_doc(winding=0)), "--output", str(out)]) == 2
    assert json.loads(out.read_text())["report"]["nontrivial"] is False


def test_synth_non_unitary_omega(write, caplog):
    with caplog.at_level(logging.ERROR):
        assert main(["synth", write(reference_doc(omega=[[2, 0], [0, 1]]))]) == 1
    assert "omega: not unitary" in caplog.text


def test_synth_stdout(write, capsys):
    assert main(["synth", write(reference_doc())]) == 0
    assert json.loads(capsys.readouterr().out)["version"]


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"frame": encode_matrix(np.eye(2)), "g0": encode_matrix(np.eye(2)), "ambient_dim": 2}, "frame"),
        ({"frame": [[1, 0], [1, 0], [0, 0]]}, "frame"),
        ({"g0": [[2, 0], [0, 1]]}, "g0"),
        ({"g0": [[1]]}, "g0"),
        ({"winding": 1.5}, "winding"),
        ({"pivot": 3}, "pivot"),
        ({"ambient_dim": 4}, "ambient_dim"),
        ({"frame": [[[1, 0], "x"], [0, 1], [0, 0]]}, "frame[0][1]"),
        ({"flow": {"steps": 10, "stride": 3}}, "flow"),
    ],
)
def test_synth_errors_name_the_field(write, caplog, overrides, field):
    with caplog.at_level(logging.ERROR):
        assert main(["synth", write(reference_doc(**overrides))]) == 1
    assert f"{field}:" in caplog.text


def test_synth_missing_field(write, caplog):
    doc = reference_doc()
    del doc["omega"]
    with caplog.at_level(logging.ERROR):
        assert main(["synth", write(doc)]) == 1
    assert "omega: missing field" in caplog.text


def test_synth_bad_json_reports_line(write, caplog):
    with caplog.at_level(logging.ERROR):
        assert main(["synth", write('{\n"frame": [1,\n}')]) == 1
    assert "line 3" in caplog.text


def test_synth_missing_file(tmp_path, caplog):
    with caplog.at_level(logging.ERROR):
        assert main(["synth", str(tmp_path / "nope.json")]) == 1


def test_synth_pivot_flag(write, tmp_path):
    out = tmp_path / "out.json"
    assert main(["synth", write(reference_doc()), "--pivot", "1", "--output", str(out)]) == 0
    result = json.loads(out.read_text())
    np.testing.assert_allclose(result["phases"], [math.pi, math.pi / 2])


def test_synth_is_deterministic(write, tmp_path):
    src = write(reference_doc(g0=encode_matrix(rotation(0.7)), omega=encode_matrix(rotation(1.1)), winding=-2))
    outs = []
    for k in range(2):
        out = tmp_path / f"out{k}.json"
        main(["synth", src, "--output", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_result_round_trip(write, tmp_path):
    out = tmp_path / "out.json"
    main(["synth", write(reference_doc(omega=encode_matrix(rotation(0.4)))), "--output", str(out)])
    doc = json.loads(out.read_text())
    for key in ("H", "U", "basis"):
        assert encode_matrix(decode_matrix(doc[key], key)) == doc[key]
    assert json.loads(json.dumps(doc)) == doc


def test_problem_round_trip():
    doc = reference_doc(pivot=1, flow={"steps": 40, "stride": 4, "retraction": True})
    parsed = parse_problem(json.loads(json.dumps(doc)))
    assert encode_matrix(parsed.problem.frame) == doc["frame"]
    assert encode_matrix(parsed.problem.g0) == doc["g0"]
    assert encode_matrix(parsed.params.omega) == doc["omega"]
    assert (parsed.params.winding, parsed.params.pivot) == (1, 1)
    assert (parsed.flow.steps, parsed.flow.stride, parsed.flow.retraction) == (40, 4, True)


# -- verify -----------------------------------------------------------------


def test_verify_synthesized(write, tmp_path):
    out = tmp_path / "out.json"
    main(["synth", write(reference_doc()), "--output", str(out)])
    doc = reference_doc(H=json.loads(out.read_text())["H"])
    report_path = tmp_path / "report.json"
    assert main(["verify", write(doc, "h.json"), "--output", str(report_path)]) == 0
    report = json.loads(report_path.read_text())["report"]
    assert report["proj_residual"] <= 1e-10
    assert math.isclose(report["commutator_norm"], math.pi * math.sqrt(2), abs_tol=1e-10)


def test_verify_zero_generator_fails(write, capsys):
    assert main(["verify", write(reference_doc(H=encode_matrix(np.zeros((3, 3)))))]) == 1
    report = json.loads(capsys.readouterr().out)["report"]
    assert math.isclose(report["restriction_residual"], math.sqrt(6))


def test_verify_non_skew(write, capsys):
    h = np.zeros((2, 2))
    h[0, 1] = 1
    doc = {"frame": encode_matrix(np.eye(2)[:, :1]), "g0": [[1]], "H": encode_matrix(h)}
    assert main(["verify", write(doc)]) == 1
    assert json.loads(capsys.readouterr().out)["report"]["skew_residual"] > 0


def test_verify_needs_h(write, caplog):
    with caplog.at_level(logging.ERROR):
        assert main(["verify", write(reference_doc())]) == 1
    assert "H: missing field" in caplog.text


def test_verify_h_shape(write, caplog):
    with caplog.at_level(logging.ERROR):
        assert main(["verify", write(reference_doc(H=encode_matrix(np.zeros((2, 2)))))]) == 1
    assert "H:" in caplog.text


# -- simulate ---------------------------------------------------------------


def test_simulate_reference_exact(write, tmp_path):
    csv = tmp_path / "t.csv"
    assert main(["simulate", write(reference_doc()), "--exact", "--steps", "100", "--output", str(csv)]) == 0
    header, rows = read_csv(csv)
    assert header == "t,dist_to_start,idempotency_drift,hermiticity_drift,trace"
    assert rows.shape == (101, 5)
    assert rows[-1, 1] <= 1e-9
    assert np.any(rows[1:-1, 1] > 0.5)
    np.testing.assert_allclose(rows[:, 4], 2.0, atol=1e-12)


def test_simulate_number_format(write, tmp_path):
    csv = tmp_path / "t.csv"
    main(["simulate", write(reference_doc()), "--steps", "4", "--output", str(csv)])
    raw = open(csv, "rb").read()
    assert b"\r" not in raw and b"e" not in raw.split(b"\n", 1)[1]
    first = raw.decode().splitlines()[2].split(",")[0]
    assert first == "0.25000000000000000"


def test_simulate_zero_winding_constant(write, tmp_path):
    csv = tmp_path / "t.csv"
    assert main(["simulate", write(reference_doc(winding=0)), "--output", str(csv)]) == 0
    _, rows = read_csv(csv)
    assert np.all(rows[:, 1] <= 1e-12)


def test_simulate_rk4(write, tmp_path):
    csv = tmp_path / "t.csv"
    assert main(["simulate", write(reference_doc()), "--rk4", "--steps", "200", "--output", str(csv)]) == 0
    _, rows = read_csv(csv)
    assert rows[-1, 1] <= 1e-6
    assert rows.shape[0] == 201


def test_simulate_rk4_retraction_stride(write, tmp_path):
    csv = tmp_path / "t.csv"
    args = ["simulate", write(reference_doc()), "--rk4", "--steps", "200", "--stride", "20", "--retraction"]
    assert main(args + ["--output", str(csv)]) == 0
    _, rows = read_csv(csv)
    assert rows.shape[0] == 11
    assert np.all(rows[:, 2] <= 1e-12)


def test_simulate_uses_document_h(write, tmp_path):
    h = np.zeros((3, 3), dtype=complex)
    h[2, 0], h[0, 2] = math.pi / 4, -math.pi / 4
    doc = {"frame": encode_matrix(np.eye(3)[:, :1]), "g0": [[1]], "H": encode_matrix(h)}
    csv = tmp_path / "t.csv"
    assert main(["simulate", write(doc), "--output", str(csv)]) == 1
    _, rows = read_csv(csv)
    assert math.isclose(rows[-1, 1], 1.0, rel_tol=1e-12)


def test_simulate_bad_stride(write, tmp_path):
    assert main(["simulate", write(reference_doc()), "--steps", "10", "--stride", "3", "--output", str(tmp_path / "x.csv")]) == 1


def test_simulate_conflicting_modes(write, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", write(reference_doc()), "--exact", "--rk4", "--output", str(tmp_path / "x.csv")])
    assert exc.value.code == 1


def test_simulate_unwritable_output(write, tmp_path, caplog):
    with caplog.at_level(logging.ERROR):
        assert main(["simulate", write(reference_doc()), "--output", str(tmp_path / "missing" / "x.csv")]) == 1
    assert "output:" in caplog.text


# -- expm -------------------------------------------------------------------


def run_expm(write, capsys, m):
    assert main(["expm", write({"M": encode_matrix(m)})]) == 0
    out = json.loads(capsys.readouterr().out)
    return decode_matrix(out["expm"], "expm"), out


def test_expm_zero(write, capsys):
    e, out = run_expm(write, capsys, np.zeros((3, 3)))
    np.testing.assert_array_equal(e, np.eye(3))
    assert out["disagreement"] == 0


def test_expm_diagonal(write, capsys):
    e, _ = run_expm(write, capsys, np.diag([1j * math.pi / 2, 1j * math.pi]))
    np.testing.assert_allclose(e, np.diag([1j, -1]), atol=1e-15)


def test_expm_reference_omega(write, capsys):
    e, out = run_expm(write, capsys, 1j * math.pi * np.array([[2, -1], [-1, 2]]))
    np.testing.assert_allclose(e, -np.eye(2), atol=1e-13)
    np.testing.assert_allclose(decode_matrix(out["expm_spectral"], "s"), -np.eye(2), atol=1e-13)
    assert out["disagreement"] <= 1e-12


def test_expm_non_skew_has_no_spectral(write, capsys):
    _, out = run_expm(write, capsys, np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert out["expm_spectral"] is None


def test_expm_non_square(write, caplog):
    with caplog.at_level(logging.ERROR):
        assert main(["expm", write({"M": [[1, 2, 3], [4, 5, 6]]})]) == 1
    assert "M:" in caplog.text


def test_console_entry_point(write, tmp_path):
    out = tmp_path / "out.json"
    proc = subprocess.run(
        [sys.executable, "-m", "holoflow.cli", "synth", write(reference_doc(winding=0)), "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert proc.stdout == ""
    assert "constant" in proc.stderr
