import csv
import io
import os

import numpy as np
import pytest

import opaug

SCALAR = [(0.5, np.array([[0.5]])), (0.5, np.array([[1.5]]))]
ONE = np.eye(1)


def test_scalar_oracles():
    assert opaug.exact_beta_energy(SCALAR, ONE, ONE) == pytest.approx(0.4, abs=1e-12)
    star, lower = opaug.exact_beta_ag(SCALAR, ONE, ONE, ONE)
    assert star == pytest.approx(0.4, abs=1e-12)
    assert lower == pytest.approx(0.2, abs=1e-12)
    assert opaug.exact_truncated_factor(SCALAR, ONE, ONE, 1) == pytest.approx(0.1, abs=1e-12)
    assert opaug.exact_truncated_factor(SCALAR, ONE, ONE, 1, "hard") == pytest.approx(2 / 7, abs=1e-12)
    assert opaug.ensemble_shift(SCALAR, ONE) == pytest.approx(1.5)


def test_poisson_matrix_is_tridiagonal():
    a = opaug.poisson1d_matrix(4)
    expected = 2 * np.eye(4) - np.eye(4, k=1) - np.eye(4, k=-1)
    np.testing.assert_allclose(a, expected)


def test_benchmark_csv_round_trip():
    rows, text = opaug.run_benchmark("poisson1d", n=16, methods="naive,eag", trials=40, samples=10, seed=3)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert [r["method"] for r in parsed] == ["naive", "eag"]
    assert rows[1]["r_emse"] < rows[0]["r_emse"]
    _, again = opaug.run_benchmark("poisson1d", n=16, methods="naive,eag", trials=40, samples=10, seed=3, threads=3)
    assert again == text


def test_estimate_beta_in_unit_interval():
    d = opaug.estimate_beta(32, method="eag", samples=50, seed=1)
    assert 0.0 <= d["beta"] <= 1.0


def test_bad_noise_raises():
    with pytest.raises(opaug.OpaugError):
        opaug.noise_describe("gauss:1")
    with pytest.raises(ValueError):
        opaug.run_benchmark(methods="teag-s:3", trials=4, samples=4)


def test_lemma_suites_pass():
    for suite in opaug.run_lemma_suites(5):
        assert suite["failures"] == 0, suite["name"]


@pytest.mark.skipif("OPAUG_DATA_DIR" not in os.environ, reason="data dir not set")
def test_sparsify_on_bundled_graph():
    path = os.path.join(os.environ["OPAUG_DATA_DIR"], "graphs", "preferential.txt")
    rows, _ = opaug.run_benchmark("sparsify", edges=path, noise="bernoulli:0.75", methods="naive,eag",
                                  trials=20, samples=10, seed=2)
    assert len(rows) == 2
