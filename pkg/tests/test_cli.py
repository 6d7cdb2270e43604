import json
import subprocess
import sys

import pytest

from quasimodular import tables
from quasimodular.cli import main
from quasimodular.report import Report


@pytest.fixture
def cache(tmp_path):
    tables.forget_tables()
    yield str(tmp_path / "cache")
    tables.forget_tables()


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize("argv, first", [
    (("-N", "2", "-g", "x", "-n", "2"), "2*x^3 - 6*x*y + 4*z"),
    (("-N", "3", "-g", "x", "-n", "3"), "6*x^4 - 36*x^2*y + 48*x*z - 6*y^2 - 12*y^-1*z^2"),
    (("-N", "1", "-g", "x", "-n", "0"), "x"),
])
def test_derive(capsys, argv, first):
    code, out = run(capsys, "derive", *argv)
    assert code == 0 and out.splitlines()[0] == first


def test_derive_reduced_and_unscaled(capsys):
    _, out = run(capsys, "derive", "-N", "3", "-n", "3")
    assert out.splitlines()[1] == "reduced: (6*x^4*y - 36*x^2*y^2 + 48*x*y*z - 6*y^3 - 12*z^2) / y^1"
    _, out = run(capsys, "derive", "-N", "2", "-n", "1", "--unscaled")
    assert out.splitlines()[0] == "1/8*x^2 - 1/8*y"


def test_verify_ramanujan_json_round_trip(capsys):
    code, out = run(capsys, "verify", "ramanujan", "-N", "2", "--prec", "100", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] and len(data["checks"]) == 3
    assert set(data) >= {"command", "checks", "timing", "versions"}
    assert Report.from_json(out).to_dict() == data


def test_verify_ngcd(capsys):
    code, out = run(capsys, "verify", "ngcd", "-N", "3", "--n-max", "6")
    assert code == 0 and "FAIL" not in out


def test_verify_theta_e2_numerators_flags_bad_term(capsys):
    code, out = run(capsys, "verify", "prop41", "-N", "2")
    assert code == 0 and "25*x*y^3" in out


def test_verify_report_sorted(capsys):
    _, out = run(capsys, "verify", "congruences", "-N", "2", "-N", "3", "--format", "json")
    names = [c["name"] for c in json.loads(out)["checks"]]
    assert names == sorted(names)


def test_zeros_commands(capsys):
    code, out = run(capsys, "zeros", "-N", "1", "-k", "6", "-j", "0", "--rect", "-0.1", "0.1", "0.9", "1.1")
    assert code == 0 and out.startswith("+0.000000000000 +1.000000000000i")
    code, out = run(capsys, "zeros", "-N", "2", "-k", "2", "-j", "1", "--strip", "--format", "csv")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "re,im,residual,deriv_mag,simple"
    assert all(r.endswith(",true") for r in rows[1:])


def test_zeros_exit_code_on_multiple_zero(capsys, tmp_path):
    plot = tmp_path / "pts.json"
    code, out = run(capsys, "zeros", "-N", "2", "-k", "4", "--arc-check", "--plot-data", str(plot))
    assert code == 1
    assert "[PASS] arc deviation" in out and "NOT simple" in out
    (pt,) = json.loads(plot.read_text())
    assert abs(complex(*pt) - (0.5 + 0.5j)) < 1e-9


def test_cache_commands(capsys, cache):
    code, out = run(capsys, "cache", "build", "-N", "2", "-g", "x", "--n-max", "10", "--cache-dir", cache,
                    "--format", "json")
    assert code == 0 and json.loads(out)["checks"][0]["witness"]["entries"] == 11
    code, out = run(capsys, "cache", "status", "--cache-dir", cache)
    assert code == 0 and "checksum OK" in out

    path = tables.cache_path(tables.resolve_cache_dir(cache), tables.get_level(2), "x")
    path.write_text(path.read_text().replace("5: ", "5: 3 + "))
    code, out = run(capsys, "cache", "status", "--cache-dir", cache)
    assert code == 1 and "checksum mismatch" in out
    tables.forget_tables()
    code, out = run(capsys, "cache", "build", "-N", "2", "-g", "x", "--cache-dir", cache)
    assert code == 0 and "discarding cache" in out

    code, _ = run(capsys, "cache", "clear", "--cache-dir", cache)
    assert code == 0 and not path.exists()
    code, out = run(capsys, "derive", "-N", "2", "-n", "2", "--cache-dir", cache)
    assert code == 0 and out.startswith("2*x^3")


def test_config_file_defaults_and_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"level": 3, "prec": 30, "format": "json"}))
    _, out = run(capsys, "verify", "ramanujan", "--config", str(cfg))
    assert all("N=3" in c["name"] for c in json.loads(out)["checks"])
    _, out = run(capsys, "verify", "ramanujan", "--config", str(cfg), "-N", "1", "--format", "text")
    assert out.startswith("[PASS] ramanujan N=1")


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.txt"
    code, out = run(capsys, "derive", "-N", "2", "-n", "2", "--output", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("2*x^3")


@pytest.mark.parametrize("argv", [
    ("verify", "nonsense"),
    ("derive", "-N", "7"),
    ("verify", "rho", "--prec", "100000"),
    ("derive", "-g", "w"),
])
def test_bad_arguments_exit_nonzero(argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    assert exc.value.code != 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quasimodular", "derive", "-N", "2", "-n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("2*x^3 - 6*x*y + 4*z")
