import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema

from gsf.cli import main
from gsf.gauge import STANDARD as G


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def schema(name):
    return json.loads(resources.files("gsf").joinpath("schemas", f"{name}.json").read_text())


def test_classify_example(capsys):
    code, out, _ = run(capsys, "classify", "--expr", "eps^3", "--gauge", "eps")
    assert code == 0
    data = json.loads(out)
    assert data["classification"] == "Moderate"
    assert abs(data["slope"] - 3.0) < 1e-6
    jsonschema.validate(data, schema("classify"))


def test_output_is_byte_identical(capsys):
    argv = ("integrate", "--f", "delta", "--a", "-1", "--b", "1", "--seed", "3")
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second and first.endswith("\n")
    assert json.dumps(json.loads(first), sort_keys=True) == first.strip()


def test_compose_delta_delta_slice(capsys):
    code, out, _ = run(capsys, "compose", "--outer", "delta", "--inner", "delta", "--eps-index", "20",
                       "--xmin", "-0.01", "--xmax", "0.01", "--points", "2001")
    assert code == 0 and "\r" not in out
    table = {float(r["x"]): float(r["value"]) for r in rows(out)}
    e = G.eps_at(20)
    b = 1 / e
    assert abs(table[0.0]) <= e ** 10 * b
    one_over_b = min(table, key=lambda x: abs(x - 1 / b))
    assert abs(table[one_over_b] - b) <= 1e-8 * b


def test_embed_delta_slice_extremes(capsys):
    code, out, _ = run(capsys, "embed", "--dist", "delta", "--eps-index", "16")
    assert code == 0
    table = {float(r["x"]): float(r["value"]) for r in rows(out)}
    b = 1 / G.eps_at(16)
    assert abs(table[0.0] - b) <= 1e-12 * b
    for k in (1, 2, 3):
        assert abs(table[k / b]) <= 1e-10 * b and abs(table[-k / b]) <= 1e-10 * b


def test_json_outputs_validate(capsys):
    cases = [
        (("embed", "--dist", "delta", "--x", "0"), "report"),
        (("derive", "--f", "heaviside", "--x", "0"), "report"),
        (("measure", "--set", "interval(0, 1)", "--mmax", "6"), "measure"),
        (("hyperlim", "--seq", "1/n^2", "--limit", "0", "--qmax", "3"), "hyperlim"),
        (("mollifier", "check"), "mollifier_check"),
    ]
    for argv, name in cases:
        code, out, err = run(capsys, *argv)
        assert code == 0, err
        jsonschema.validate(json.loads(out), schema(name))


def test_usage_errors_exit_two(capsys):
    assert run(capsys, "classify")[0] == 2
    assert run(capsys, "classify", "--expr", "eps +")[0] == 2
    assert run(capsys, "classify", "--expr", "y")[0] == 2
    assert run(capsys, "classify", "--expr", "eps", "--theta", "2")[0] == 2


def test_failed_expectation_exits_one(capsys):
    code, out, _ = run(capsys, "hyperlim", "--seq", "1/log(n)", "--limit", "0", "--qmax", "3", "--expect", "confirmed")
    assert code == 1
    assert json.loads(out)["verdict"] == "Refuted"
    code, _, _ = run(capsys, "measure", "--set", "interval(0, 1)", "--mmax", "6", "--expect", "Measurable")
    assert code == 0


def test_config_precedence(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "gsf.cfg"
    cfg.write_text("# grid\nkmax = 30\ngauge = eps\n")
    data = json.loads(run(capsys, "classify", "--expr", "eps", "--config", str(cfg))[1])
    assert data["points"] == 14
    data = json.loads(run(capsys, "classify", "--expr", "eps", "--config", str(cfg), "--kmax", "40")[1])
    assert data["points"] == 19
    monkeypatch.setenv("GSF_CONFIG", str(cfg))
    data = json.loads(run(capsys, "classify", "--expr", "eps")[1])
    assert data["points"] == 14
    cfg.write_text("colour = blue\n")
    assert run(capsys, "classify", "--expr", "eps")[0] == 2


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "classify", "--expr", "eps^2", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["classification"] == "Moderate"


def test_selftest_subprocess(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gsf", "selftest", "--trace-dir", str(tmp_path)],
                          capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert proc.stdout.count("[PASS]") == 13
    assert (tmp_path / "measure_unit_interval.json").exists()
