import copy
import csv
import io
import json

import numpy as np
import pytest

from calabi.reports import (
    CSV_COLUMNS,
    ReportEnvelope,
    failed_targets,
    format_number,
    key_values_to_csv,
    plot_data,
    rows_to_csv,
    solve_conical_envelope,
    solve_smooth_envelope,
    sweep_row,
    verify_report,
)


@pytest.fixture(scope="module")
def conical_env():
    return solve_conical_envelope(1.0, 1.0, 1e-10, 1025, {"command": "solve-conical"})


@pytest.fixture(scope="module")
def smooth_env():
    return solve_smooth_envelope(1.0, 1e-10, 257, {"command": "solve-smooth"}, [0.7])


def test_round_trip_is_lossless(conical_env, smooth_env):
    for env in (conical_env, smooth_env):
        again = ReportEnvelope.from_json(env.to_json())
        assert again == env


def test_envelope_fields(conical_env):
    data = json.loads(conical_env.to_json())
    assert {"schema_version", "inputs", "results", "timings", "paper_targets"} <= set(data)
    for t in data["paper_targets"].values():
        assert set(t) == {"target", "computed", "deviation", "tolerance"}
    assert data["results"]["solve"]["alpha_star"] < 0.0
    assert "profile" in data["results"]


def test_all_targets_met(conical_env, smooth_env):
    assert failed_targets(conical_env.paper_targets) == []
    assert failed_targets(smooth_env.paper_targets) == []


def test_smooth_line_point_zeroes_closed_form(smooth_env):
    row = smooth_env.results["futaki"][1]
    assert row["beta0"] == 0.7
    assert abs(row["closed_form"]) < 1e-12
    assert abs(row["quadrature"]) < 1e-6


def test_missing_fields_rejected():
    with pytest.raises(ValueError):
        ReportEnvelope.from_json('{"schema_version": "1.0"}')


def test_verify_accepts_untouched_report(conical_env):
    checks = verify_report(ReportEnvelope.from_json(conical_env.to_json()))
    assert all(c["ok"] for c in checks.values()), {k: c for k, c in checks.items() if not c["ok"]}
    assert any(k.startswith("profile:") for k in checks)


def test_verify_catches_scaled_profile(conical_env):
    env = copy.deepcopy(conical_env)
    prof = env.results["profile"]
    prof["phi"] = [1.01 * x for x in prof["phi"]]
    checks = verify_report(env)
    assert not checks["profile:fd_slope_at_1"]["ok"]
    assert not checks["profile:fd_slope_at_end"]["ok"]


def test_verify_catches_edited_target(conical_env):
    env = copy.deepcopy(conical_env)
    env.paper_targets["chern_integral"]["computed"] = -3.9
    assert not verify_report(env)["target:chern_integral"]["ok"]


def test_number_format():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(None) == ""
    assert format_number(-4.0) == "-4"
    assert float(format_number(np.pi)) == np.pi


def test_csv_layout():
    rows = [dict.fromkeys(CSV_COLUMNS, 1.5) | {"error": ""}, dict.fromkeys(CSV_COLUMNS) | {"m": 2.0, "error": "SolverError: x, y"}]
    text = rows_to_csv(rows)
    assert "\r" not in text and text.endswith("\n")
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == list(CSV_COLUMNS) + ["error"]
    assert parsed[2][-1] == "SolverError: x, y"
    assert parsed[2][1] == ""


def test_failed_cell_recorded_in_row():
    row = sweep_row(1e-9, 1.0, None, 1e-10)
    assert row["error"].startswith("DomainError")
    assert row["alpha_star"] is None


def test_sweep_rows_byte_identical():
    a = rows_to_csv([sweep_row(m, b, None, 1e-10) for m in (0.5, 1.0) for b in (0.5, 1.0)])
    b = rows_to_csv([sweep_row(m, b, None, 1e-10) for m in (0.5, 1.0) for b in (0.5, 1.0)])
    assert a == b


def test_key_value_csv_skips_arrays(conical_env):
    text = key_values_to_csv(conical_env.results)
    keys = [r[0] for r in csv.reader(io.StringIO(text))][1:]
    assert "solve.alpha_star" in keys and "poly.gamma00" in keys
    assert not any(k.startswith("profile") for k in keys)


def test_plot_data_columns(conical_env, tmp_path):
    paths = plot_data(conical_env, tmp_path)
    assert [p.name for p in paths] == ["v.tsv", "phi.tsv", "lambda.tsv", "potential.tsv"]
    v = np.loadtxt(paths[0], skiprows=1)
    phi = np.loadtxt(paths[1], skiprows=1)
    lam = np.loadtxt(paths[2], skiprows=1)
    pot = np.loadtxt(paths[3], skiprows=1)
    assert v[0, 1] == 2.0
    assert abs(phi[0, 1]) < 1e-8 and abs(phi[-1, 1]) < 1e-8
    B = conical_env.results["solve"]["B"]
    assert np.max(np.abs(lam[1:-1, 1] - B)) < 1e-6 * abs(B)
    assert np.all(np.diff(pot[:, 0]) > 0) and np.all(np.diff(pot[:, 1]) > 0)


def test_plot_data_for_smooth_report(smooth_env, tmp_path):
    lam = np.loadtxt(plot_data(smooth_env, tmp_path)[2], skiprows=1)
    A, B = smooth_env.results["solve"]["A"], smooth_env.results["solve"]["B"]
    assert np.max(np.abs(lam[:, 1] - (A * lam[:, 0] + B))) < 1e-6


def test_plot_data_needs_profile():
    env = ReportEnvelope("1.0", "line", {}, {"line": {}})
    with pytest.raises(ValueError):
        plot_data(env, "unused")
