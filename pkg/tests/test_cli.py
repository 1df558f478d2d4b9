import csv
import json

import pytest

from quartic_det.cli import DET_COLUMNS, RunConfig, run
from quartic_det.exceptions import ConfigurationError
from quartic_det.parallel import pmap, thread_count
from quartic_det.validation import GENERIC_PAIR

FREE = {"gamma": 1.0, "p": {"family": "zero"}}
GRID8 = [[0.5, 0.1], [1.0, 0.0], [1.5, 0.5], [0.3, -0.7], [2.0, 1.0], [-1.0, 0.4], [0.7, 0.7], [2.5, -0.2]]


@pytest.fixture
def write(tmp_path):
    def _write(cfg, name="cfg.json"):
        path = tmp_path / name
        path.write_text(json.dumps(cfg))
        return str(path)

    return _write


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_det_free(write, tmp_path):
    out = tmp_path / "free.csv"
    assert run(["det", "--config", write({"potential": FREE, "k": GRID8}), "--out", str(out)]) == 0
    rows = _rows(out)
    assert tuple(rows[0]) == DET_COLUMNS
    assert len(rows) == 16
    for r in rows:
        assert abs(complex(float(r["D_re"]), float(r["D_im"])) - 1) <= 1e-9
        assert float(r["residual"]) <= 1e-9
    assert len({r["config_hash"] for r in rows}) == 1


def test_det_bump_routes_agree_and_output_is_deterministic(write, tmp_path):
    cfg = write({"potential": GENERIC_PAIR, "case": "line", "k": GRID8[:3]})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["det", "--config", cfg, "--out", str(a), "--emit-gnuplot"]) == 0
    assert run(["det", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.gp").read_text().startswith("# plot script")
    assert all(float(r["residual"]) <= 1e-6 for r in _rows(a))


def test_det_threads_do_not_change_output(write, tmp_path, monkeypatch):
    cfg = write({"potential": GENERIC_PAIR, "k": GRID8})
    outs = []
    for n in ("1", "3"):
        monkeypatch.setenv("QUARTIC_DET_THREADS", n)
        path = tmp_path / f"t{n}.csv"
        assert run(["det", "--config", cfg, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_zero_in_grid_is_config_error(write, capsys):
    assert run(["det", "--config", write({"potential": FREE, "k": [0.0]})]) == 2
    assert "laurent" in capsys.readouterr().err


@pytest.mark.parametrize(
    "cfg",
    [
        {"potential": FREE, "k": [1.0], "bogus": 1},
        {"potential": {**FREE, "extra": 1}, "k": [1.0]},
        {"potential": FREE, "k": [1.0], "integrator": {"rtol": 1e-9}},
        {"potential": FREE, "k": [[1.0, "x"]]},
        {"potential": FREE, "case": "strip", "k": [1.0]},
    ],
)
def test_config_errors(write, cfg):
    assert run(["det", "--config", write(cfg)]) == 2


def test_missing_or_malformed_file(tmp_path):
    assert run(["det", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["det", "--config", str(bad)]) == 2


def test_numerical_error_exit_code(write):
    assert run(["det", "--config", write({"potential": FREE, "k": [45.0]})]) == 3


def test_printed_convention_fails_validation(write):
    cfg = write({"potential": GENERIC_PAIR, "k": [[0.5, 0.1]]})
    assert run(["det", "--config", cfg, "--convention", "printed"]) == 4


def test_laurent_free(write, tmp_path):
    out = tmp_path / "l.json"
    cfg = write({"potential": FREE, "laurent": {"n_nodes": 64}})
    assert run(["laurent", "--config", cfg, "--format", "json", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["pole_order"] == 0 and "config_hash" in rep


def test_laurent_bump_halfline(write, tmp_path):
    out = tmp_path / "l.json"
    assert run(["laurent", "--config", write({"potential": GENERIC_PAIR}), "--format", "json", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["pole_order"] == 1 and rep["match"] is True


def test_zeros_free_and_empty(write, tmp_path):
    out = tmp_path / "z.json"
    cfg = write({"potential": FREE, "region": {"re": [-1, 1], "im": [-1, 1]}})
    assert run(["zeros", "--config", cfg, "--format", "json", "--out", str(out)]) == 0
    zs = json.loads(out.read_text())
    assert len(zs) == 1 and zs[0]["multiplicity"] == 1 and abs(complex(*zs[0]["k"])) < 1e-10
    cfg = write({"potential": FREE, "region": {"re": [0.5, 1], "im": [0.5, 1]}}, "e.json")
    assert run(["zeros", "--config", cfg, "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0].startswith("k_re,k_im,lambda_re")
    assert len(out.read_text().splitlines()) == 1


def test_square_check(write, tmp_path):
    p = {"family": "poly_bump", "params": {"amplitude": 3.0, "start": 0.1, "stop": 0.9, "power": 3}}
    cfg = write({"potential": {"gamma": 1.0, "p": p, "q": "schrodinger_square"}, "case": "line", "k": GRID8[:4]})
    out = tmp_path / "s.csv"
    assert run(["square-check", "--config", cfg, "--out", str(out)]) == 0
    assert {r["route"] for r in _rows(out)} == {"determinant", "jost_product"}
    assert run(["square-check", "--config", write({"potential": GENERIC_PAIR, "k": [1.0]}, "g.json")]) == 2


def test_validate_subset_and_fault_injection(write, tmp_path):
    out = tmp_path / "v.json"
    assert run(["validate", "--config", write({"potential": FREE, "validate": {"criteria": [1, 10]}}), "--format", "json", "--out", str(out)]) == 0
    assert [r["passed"] for r in json.loads(out.read_text())] == [True, True]
    # a tolerance no integrator can meet
    cfg = write({"potential": FREE, "validate": {"criteria": [1], "tolerances": {"free": 1e-18}}}, "f.json")
    assert run(["validate", "--config", cfg]) == 4
    # the transposed orientation breaks the free identity
    assert run(["validate", "--config", write({"potential": FREE, "validate": {"criteria": [1]}}, "c.json"), "--convention", "printed"]) == 4


def test_gnuplot_needs_csv_file(write):
    assert run(["det", "--config", write({"potential": FREE, "k": [1.0]}), "--emit-gnuplot"]) == 2


def test_runconfig_hash_ignores_output_location():
    a = RunConfig.from_dict({"potential": FREE, "k": [1.0], "out": "a.csv"})
    b = RunConfig.from_dict({"potential": FREE, "k": [1.0], "out": "b.csv"})
    c = RunConfig.from_dict({"potential": FREE, "k": [2.0]})
    assert a.digest() == b.digest() != c.digest()
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"potential": FREE, "laurent": {"radius": 0.1, "nodes": 3}})


def test_thread_env(monkeypatch):
    monkeypatch.setenv("QUARTIC_DET_THREADS", "2")
    assert thread_count() == 2
    assert pmap(lambda x: x * x, range(10)) == [x * x for x in range(10)]
    monkeypatch.setenv("QUARTIC_DET_THREADS", "0")
    with pytest.raises(ValueError):
        thread_count()
