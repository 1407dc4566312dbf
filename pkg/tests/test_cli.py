import io
import json
import math

import numpy as np
import pytest

from robggm.cli import run
from robggm.inference import deviance_test
from robggm.graph import Graph

from conftest import ANXIETY_LABELS, find_anxieties
from test_graph import gad_hub_adjacency
from test_io import adjacency_csv


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = run([str(a) for a in argv], out, err)
    return status, out.getvalue(), err.getvalue()


@pytest.fixture
def dataset(tmp_path):
    rng = np.random.default_rng(5)
    X = rng.standard_t(4, size=(60, 4)) @ np.array(
        [[1.0, 0.4, 0.0, 0.0], [0.0, 1.0, 0.4, 0.0], [0.0, 0.0, 1.0, 0.4], [0.0, 0.0, 0.0, 1.0]]
    )
    labels = ("w", "x", "y", "z")
    data = tmp_path / "data.csv"
    data.write_text(",".join(labels) + "\n" + "\n".join(",".join(repr(float(v)) for v in row) for row in X) + "\n")
    A = np.eye(4, dtype=int) + np.eye(4, k=1, dtype=int) + np.eye(4, k=-1, dtype=int)
    amat = tmp_path / "amat.csv"
    amat.write_text(adjacency_csv(A, labels))
    return X, data, amat


def test_test_subcommand(dataset):
    X, data, amat = dataset
    status, out, err = invoke("test", data, "--amat", amat)
    assert status == 0 and err == ""
    doc = json.loads(out)
    ref = deviance_test(X, Graph(4, [(0, 1), (1, 2), (2, 3)]), 3.0)
    assert doc["p_value"] == ref.p_value
    assert doc["df"] == 3 and doc["mode"] == "plug_in"
    for key in ("deviance", "sigma1", "converged", "scatter", "constrained_scatter", "partials_fitted"):
        assert key in doc


def test_json_matrices_round_trip(dataset):
    X, data, amat = dataset
    doc = json.loads(invoke("test", data, "--amat", amat)[1])
    ref = deviance_test(X, Graph(4, [(0, 1), (1, 2), (2, 3)]), 3.0)
    np.testing.assert_array_equal(np.array(doc["constrained_scatter"]), ref.constrained_scatter)
    np.testing.assert_array_equal(np.array(doc["scatter"]), ref.unconstrained_scatter)


def test_output_is_byte_identical(dataset):
    _, data, amat = dataset
    a = invoke("search", data, "--seed", 17)
    b = invoke("search", data, "--seed", 17)
    assert a == b and a[0] == 0
    assert json.loads(a[1])["seed"] == 17


def test_conflicting_flags_single_warning(dataset):
    _, data, amat = dataset
    status, out, err = invoke("test", data, "--amat", amat, "--direct", "--plug-in")
    assert status == 0
    assert json.loads(out)["mode"] == "plug_in"
    lines = err.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("warning:")
    assert out == invoke("test", data, "--amat", amat)[1]


def test_direct_flag(dataset):
    _, data, amat = dataset
    status, out, _ = invoke("test", data, "--amat", amat, "--direct")
    assert status == 0 and json.loads(out)["mode"] == "direct"


def test_constants_tyler():
    status, out, _ = invoke("constants", "--p", 8, "--df", 0)
    doc = json.loads(out)
    assert status == 0 and doc["sigma1"] == 1.25 and doc["eta"] is None


def test_constants_inf_literal():
    status, out, _ = invoke("constants", "--p", 4, "--df", "INF", "--df-data", "inf")
    doc = json.loads(out)
    assert doc["df_est"] == "inf" and doc["sigma1"] == pytest.approx(1.0)
    status, out, _ = invoke("constants", "--p", 8, "--df", 3, "--output", "text")
    assert "sigma1 = 1.12679" in out


def test_fit_partials_dot(dataset):
    _, data, amat = dataset
    status, out, _ = invoke("fit", data, "--amat", amat)
    assert status == 0 and json.loads(out)["mode"] == "plug_in"
    status, out, _ = invoke("partials", data, "--output", "text")
    assert status == 0 and out.startswith("correlations")
    doc = json.loads(invoke("partials", data)[1])
    assert np.allclose(np.diag(doc["partial_correlation"]), 1.0)
    status, out, _ = invoke("dot", data, "--amat", amat)
    assert status == 0 and out.startswith("graph")
    assert sum("--" in line for line in out.splitlines()) == 3


def test_search_subcommand(dataset):
    _, data, _ = dataset
    status, out, _ = invoke("search", data, "--tau", 0.1, "--alpha", 0.05)
    doc = json.loads(out)
    assert status == 0 and "explorative" in doc["note"]
    counts = [s["n_edges"] for s in doc["steps"]]
    assert counts == sorted(counts, reverse=True)


def test_user_errors_exit_1(dataset, tmp_path):
    _, data, _ = dataset
    status, _, err = invoke("test", tmp_path / "missing.csv")
    assert status == 1 and json.loads(err)["error"] == "FileNotFoundError"
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,\n2,3\n4,5\n")
    status, _, err = invoke("test", bad)
    assert status == 1 and json.loads(err)["error"] == "NonNumericCell"
    assert invoke("test", data, "--df", "-2")[0] == 1
    assert invoke("test", data, "--df", 0)[0] == 1
    assert invoke("search", data, "--alpha", 1.5)[0] == 1
    assert invoke("frobnicate")[0] == 1
    assert invoke("constants", "--p", 1)[0] == 1


def test_degenerate_data_exit_1(tmp_path):
    sing = tmp_path / "sing.csv"
    # second column is a multiple of the first, so no scatter estimate exists
    sing.write_text("a,b,c\n" + "\n".join(f"{k},{2 * k},{(k * 7) % 5}" for k in range(10)) + "\n")
    status, _, err = invoke("test", sing)
    assert status == 1 and json.loads(err)["error"] == "DegenerateData"
    # sample covariance at t_3 data: moments missing, an invalid query
    assert invoke("constants", "--p", 4, "--df", "inf", "--df-data", 3)[0] == 1


def test_numeric_failure_exit_2():
    # a vanishing df_est makes E phi(R / eta) - p flat beyond the bracket limits
    status, out, err = invoke("constants", "--p", 2, "--df", "1e-300")
    assert status == 2 and out == ""
    assert json.loads(err)["error"] == "BracketFailure"


def test_non_convergence_warns(dataset):
    _, data, _ = dataset
    status, out, err = invoke("fit", data, "--max-iter", 2)
    assert status == 0
    assert json.loads(out)["converged"] is False
    assert err.startswith("warning:")


def test_data_files_untouched(dataset):
    _, data, amat = dataset
    before = data.read_bytes(), amat.read_bytes()
    invoke("test", data, "--amat", amat)
    invoke("dot", data, "--amat", amat)
    assert (data.read_bytes(), amat.read_bytes()) == before


def test_case_gad_hub(tmp_path):
    path = find_anxieties()
    if path is None:
        pytest.skip("anxieties.csv not available")
    amat = tmp_path / "gad_hub.csv"
    amat.write_text(adjacency_csv(gad_hub_adjacency(), ANXIETY_LABELS, row_labels=True))
    status, out, _ = invoke("test", path, "--amat", amat, "--df", 3)
    assert status == 0
    assert json.loads(out)["p_value"] == pytest.approx(0.881159, abs=1e-3)
    assert math.isfinite(json.loads(out)["deviance"])
