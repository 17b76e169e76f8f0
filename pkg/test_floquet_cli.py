import json

import numpy as np
import pytest

from coefficients import CoefficientSet, save_coefficients
from floquet_cli import main, parse_complex
from floquet_errors import ParameterError


@pytest.fixture
def zero_scalar(tmp_path):
    path = tmp_path / "zero_scalar.json"
    save_coefficients(CoefficientSet.zeros(1, 1), path)
    return str(path)


@pytest.fixture
def zero_cubic(tmp_path):
    path = tmp_path / "zero_cubic.json"
    save_coefficients(CoefficientSet.zeros(3, 1), path)
    return str(path)


def test_parse_complex():
    assert parse_complex("1.5") == 1.5
    assert parse_complex("1-0.5j") == 1 - 0.5j
    assert parse_complex("2+3i") == 2 + 3j
    with pytest.raises(ParameterError):
        parse_complex("abc")


def test_multipliers_scalar(zero_scalar, capsys):
    assert main(["multipliers", "--config", zero_scalar, "--lambda", "3.141592653589793"]) == 0
    record = json.loads(capsys.readouterr().out)
    (re, im), = record["multipliers"]
    assert re == pytest.approx(-1.0, abs=1e-8)
    assert im == pytest.approx(0.0, abs=1e-8)
    assert record["dimension_split"] == {"inside": 0, "on": 1, "outside": 0}
    assert record["liouville_residual"] <= 1e-8


def test_multipliers_cubic(zero_cubic, capsys):
    assert main(["multipliers", "--config", zero_cubic, "--lambda", "1"]) == 0
    moduli = sorted(json.loads(capsys.readouterr().out)["moduli"])
    np.testing.assert_allclose(moduli, [0.4204, 1.0, 2.3774], atol=1e-4)


def test_multipliers_negative_lambda(zero_scalar, capsys):
    assert main(["multipliers", "--config", zero_scalar, "--lambda=-1-0.5j", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "re_mu,im_mu,modulus,position,quasimomentum,liouville_residual"
    fields = lines[1].split(",")
    assert float(fields[2]) == pytest.approx(np.exp(-0.5), rel=1e-8)
    assert fields[3] == "inside"
    assert fields[4] == ""
    assert float(fields[5]) <= 1e-8


def test_multipliers_csv_carries_quasimomenta(zero_cubic, capsys):
    assert main(["multipliers", "--config", zero_cubic, "--lambda", "1", "--format", "csv"]) == 0
    rows = [line.split(",") for line in capsys.readouterr().out.splitlines()[1:]]
    assert sorted(row[3] for row in rows) == ["inside", "on", "outside"]
    (on_row,) = [row for row in rows if row[3] == "on"]
    # the unit-modulus multiplier is exp(-i)
    assert float(on_row[4]) == pytest.approx(2.0 * np.pi - 1.0, abs=1e-8)


def test_missing_file_names_the_path(tmp_path, capsys):
    missing = str(tmp_path / "nowhere.json")
    assert main(["multipliers", "--config", missing, "--lambda", "0"]) == 2
    assert missing in capsys.readouterr().err


def test_malformed_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 1, "m": 1}))
    assert main(["multipliers", "--config", str(path), "--lambda", "0"]) == 2


@pytest.mark.parametrize("payload", [
    {"n": 1, "m": 1, "P": [5]},
    {"n": "one", "m": 1, "P": [[[{"a": [0.0]}]]]},
    {"n": 1.7, "m": 1, "P": [[[{"a": [0.0]}]]]},
    {"n": 1, "m": 1, "P": [[[{"a": "12"}]]]},
])
def test_wrongly_typed_config_is_a_usage_error(tmp_path, capsys, payload):
    path = tmp_path / "typed.json"
    path.write_text(json.dumps(payload))
    assert main(["multipliers", "--config", str(path), "--lambda", "0"]) == 2
    assert "❌" in capsys.readouterr().err


def test_scan_real_csv(zero_scalar, capsys):
    assert main(["scan-real", "--config", zero_scalar, "--min", "-5", "--max", "5", "--N", "11", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "lambda,distance,in_spectrum"
    assert len(lines) == 12
    assert all(line.endswith(",1") for line in lines[1:])


def test_scan_real_grid_too_small(zero_scalar):
    assert main(["scan-real", "--config", zero_scalar, "--min", "-5", "--max", "5", "--N", "1"]) == 2


def test_scan_region_json_and_plot(zero_scalar, tmp_path, capsys):
    plot = tmp_path / "heatmap.json"
    argv = ["scan-region", "--config", zero_scalar, "--re-min", "-1", "--re-max", "1",
            "--im-min", "-1", "--im-max", "1", "--n-re", "3", "--n-im", "5", "--plot", str(plot)]
    assert main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["mode"] == "region"
    assert payload["shape"] == [5, 3]
    assert [row["in_spectrum"] for row in payload["rows"]] == [0] * 6 + [1] * 3 + [0] * 6
    assert json.loads(plot.read_text())["data"][0]["type"] == "heatmap"


def test_outputs_are_byte_identical(zero_cubic, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        argv = ["scan-real", "--config", zero_cubic, "--min", "-2", "--max", "2", "--N", "5",
                "--format", "csv", "--out", str(out)]
        assert main(argv) == 0
    assert first.read_bytes() == second.read_bytes()


def test_eigs_t(zero_scalar, capsys):
    argv = ["eigs-t", "--config", zero_scalar, "--t", str(np.pi / 2.0), "--re-min", str(-np.pi),
            "--re-max", str(3.0 * np.pi), "--im-min", "-1", "--im-max", "1"]
    assert main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["winding_number"] == 2
    found = sorted(root["re"] for root in payload["roots"])
    np.testing.assert_allclose(found, [-np.pi / 2.0, 1.5 * np.pi], atol=1e-8)
    assert all(root["residual"] <= 1e-10 for root in payload["roots"])


def test_eigs_t_keeps_roots_on_the_boundary(zero_scalar, capsys):
    argv = ["eigs-t", "--config", zero_scalar, "--t", str(np.pi), f"--re-min={-np.pi}",
            "--re-max", str(3.0 * np.pi), "--im-min=-1", "--im-max", "1"]
    assert main(argv) == 0
    captured = capsys.readouterr()
    payload = json.loads(captured.out)
    assert payload["winding_number"] == 3
    found = sorted(root["re"] for root in payload["roots"])
    np.testing.assert_allclose(found, [-np.pi, np.pi, 3.0 * np.pi], atol=1e-8)
    assert payload["attempts"]
    assert payload["contour"]["re_min"] < payload["rectangle"]["re_min"]
    assert "⚠️" in captured.err


def test_eigs_t_empty_rectangle(zero_scalar, capsys):
    argv = ["eigs-t", "--config", zero_scalar, "--t", "0", "--re-min", "2", "--re-max", "3",
            "--im-min", "-0.5", "--im-max", "0.5"]
    assert main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["roots"] == []
    assert payload["winding_number"] == 0


def test_eigs_t_out_of_range(zero_scalar):
    argv = ["eigs-t", "--config", zero_scalar, "--t", "7", "--re-min", "-1", "--re-max", "1",
            "--im-min", "-1", "--im-max", "1"]
    assert main(argv) == 2


def test_curves(zero_scalar, capsys):
    argv = ["curves", "--config", zero_scalar, "--t-count", "2", "--re-min", "-3.3", "--re-max", "3.4",
            "--im-min", "-1.3", "--im-max", "1.3", "--format", "csv"]
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,re_lambda,im_lambda,residual,refined,multiplicity"
    # t = 0 gives lambda = 0; t = pi gives lambda = -pi and pi
    assert len(lines) == 4


def test_verify_list(capsys):
    assert main(["verify", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert "multiplier_involution" in names
    assert "liouville" in names


def test_verify_single_config(zero_scalar, capsys):
    assert main(["verify", "--config", zero_scalar]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] is True
    assert payload["failed"] == 0


def test_verify_negative_control(zero_scalar, capsys):
    assert main(["verify", "--config", zero_scalar, "--break-pt"]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] is False


def test_generate_is_seeded(capsys):
    assert main(["generate", "--n", "2", "--m", "2", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert main(["generate", "--n", "2", "--m", "2", "--seed", "7"]) == 0
    assert capsys.readouterr().out == first
    coefficients = CoefficientSet.from_dict(json.loads(first))
    assert (coefficients.n, coefficients.m, coefficients.degree) == (2, 2, 2)


def test_bad_environment_value(zero_scalar, monkeypatch, capsys):
    monkeypatch.setenv("FLOQUET_TOL_CIRCLE", "tight")
    assert main(["multipliers", "--config", zero_scalar, "--lambda", "0"]) == 2
    assert "FLOQUET_TOL_CIRCLE" in capsys.readouterr().err


def test_flag_overrides_environment(zero_scalar, monkeypatch, capsys):
    monkeypatch.setenv("FLOQUET_OUTPUT_FORMAT", "csv")
    assert main(["multipliers", "--config", zero_scalar, "--lambda", "0", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["moduli"] == pytest.approx([1.0])


def test_unknown_subcommand():
    assert main(["bands"]) == 2


def test_numerical_failure_exit_code(zero_scalar, monkeypatch):
    monkeypatch.setenv("FLOQUET_MAX_STEPS", "2")
    assert main(["multipliers", "--config", zero_scalar, "--lambda", "1"]) == 3
