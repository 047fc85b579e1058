import io
import json
import math

import pytest

from ieit import cli
from ieit.tables import parse_csv_table, parse_json_table, render_json

BASE = {
    "units": "kappa",
    "params": {"omega_m": 1000, "gamma_m": 4, "g": 0.001, "pump": {"G": 4}},
}


def run(tmp_path, command, doc=None, *extra):
    argv = [command]
    if doc is not None:
        path = tmp_path / "cfg.json"
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=2))
        argv += ["--config", str(path)]
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv + list(extra), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def report(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_sweep_is_byte_deterministic(tmp_path):
    a = run(tmp_path, "sweep", BASE, "--set", "sweep.points=51")
    b = run(tmp_path, "sweep", BASE, "--set", "sweep.points=51")
    assert a[0] == 0 and a[1] == b[1]


def test_json_round_trip(tmp_path):
    code, csv_text, _ = run(tmp_path, "sweep", BASE, "--set", "sweep.points=21")
    code2, json_text, _ = run(tmp_path, "sweep", BASE, "--set", "sweep.points=21", "--format", "json")
    cols, rows = parse_csv_table(csv_text)
    jcols, jrows = parse_json_table(json_text)
    assert code == code2 == 0
    assert cols == jcols == list(cli.SWEEP_COLUMNS)
    assert rows == jrows  # exact: 17 digits survive the text round trip


def test_json_reemit_is_byte_identical(tmp_path):
    _, text, _ = run(tmp_path, "sweep", BASE, "--format", "json")
    assert render_json(*parse_json_table(text)) == text
    assert render_json(["a"], parse_json_table(render_json(["a"], [[-0.0], [3]]))[1]) == \
        render_json(["a"], [[-0.0], [3.0]])


def test_sweep_zero_at_center(tmp_path):
    code, text, _ = run(tmp_path, "sweep", BASE, "--set", "params.pump.G=2",
                        "--set", "sweep.points=3", "--set", "sweep.x_min=-1", "--set", "sweep.x_max=1")
    _, rows = parse_csv_table(text)
    assert rows[1][0] == 0 and rows[1][1] < 1e-12
    assert rows[1][3] == pytest.approx(0.5, abs=1e-12)


def test_sweep_minima_at_splitting(tmp_path):
    code, text, _ = run(tmp_path, "sweep", BASE, "--set", "params.pump.G=6")
    _, rows = parse_csv_table(text)
    assert len(rows) == 2001
    low = sorted(rows, key=lambda r: r[1])[:2]
    assert sorted(r[0] for r in low) == pytest.approx([-4 * math.sqrt(2), 4 * math.sqrt(2)], abs=0.01)


def test_uncoupled_sweep(tmp_path):
    code, text, _ = run(tmp_path, "sweep", BASE, "--set", "params.pump.G=0",
                        "--set", "sweep.points=2", "--set", "sweep.x_min=-1", "--set", "sweep.x_max=1")
    _, rows = parse_csv_table(text)
    for r in rows:
        assert r[1] == pytest.approx(1.0, rel=1e-14)
        assert r[3] == pytest.approx(8 / 5, rel=1e-14)


def test_ieit_report(tmp_path):
    code, text, _ = run(tmp_path, "ieit", BASE)
    rep = report(text)
    assert code == 0 and rep["exists"] == "true" and rep["zeros_found"] == "2"
    assert float(rep["x_plus_over_kappa"]) == pytest.approx(math.sqrt(12), rel=1e-14)


def test_ieit_below_threshold(tmp_path):
    code, text, _ = run(tmp_path, "ieit", BASE, "--set", "params.pump.G=1.9")
    assert code == 0
    assert report(text)["exists"] == "false"


def test_ieit_json_report(tmp_path):
    code, text, _ = run(tmp_path, "ieit", BASE, "--format", "json")
    doc = json.loads(text)
    assert doc["exists"] is True and doc["units"] == "kappa"


def test_steady_table(tmp_path):
    doc = {"units": "kappa",
           "params": {"omega_m": 50, "gamma_m": 4, "g": 0.02, "delta0": 10, "pump": {"eps_c": 200}}}
    code, text, _ = run(tmp_path, "steady", doc)
    assert code == 0
    assert text.splitlines()[0].startswith("index,")


def test_evolve_modes(tmp_path):
    code, text, _ = run(tmp_path, "evolve", BASE, "--set", "evolve.t_max=1", "--set", "drive.x=1")
    cols, rows = parse_csv_table(text)
    assert code == 0 and cols == list(cli.TRAJECTORY_COLUMNS) and rows[-1][0] == pytest.approx(1.0)
    code, text, _ = run(tmp_path, "evolve", BASE, "--mode", "full", "--set", "evolve.t_max=0.2")
    assert code == 0


def test_qswitch_report_and_table(tmp_path):
    out = tmp_path / "traj.csv"
    code, text, _ = run(tmp_path, "qswitch", BASE, "--set", "qswitch.kappa_factor=1",
                        "--out", str(out))
    assert code == 0
    assert float(report(text)["budget_error"]) < 1e-4
    cols, rows = parse_csv_table(out.read_text())
    assert rows[-1][0] == pytest.approx(30.0)


def test_si_units_match_kappa_units(tmp_path):
    k = 2 * math.pi * 1e6
    si = {"units": "si",
          "params": {"omega_m": 1000 * k, "gamma_m": 4 * k, "kappa": k, "g": 0.001 * k,
                     "pump": {"G": 6 * k}},
          "sweep": {"points": 41}}
    kap = dict(BASE, params=dict(BASE["params"], pump={"G": 6}), sweep={"points": 41})
    _, a, _ = run(tmp_path, "sweep", si)
    _, b, _ = run(tmp_path, "sweep", kap)
    ra, rb = parse_csv_table(a)[1], parse_csv_table(b)[1]
    for u, v in zip(ra, rb):
        assert u == pytest.approx(v, rel=1e-12, abs=1e-24)


@pytest.mark.parametrize("text,needle", [
    ('{\n  "units": "kappa",\n  "params": {"omega_m": 10, "gamma_m": 4, "g": 1,\n'
     '    "bogus": 3, "pump": {"G": 1}}\n}', "line 4"),
    ('{\n  "units": "kappa",\n  "params": {"omega_m": "ten", "gamma_m": 4, "g": 1,'
     ' "pump": {"G": 1}}\n}', "line 3"),
    ('{"units": "kappa"}', "params"),
    ('{"units": "furlongs", "params": {"omega_m": 10, "gamma_m": 4, "g": 1, "pump": {"G": 1}}}',
     "units"),
    ('{"units": "kappa",\n "params": {"omega_m": 10, "gamma_m": 4, "g": 1, "pump": {}}}', "pump"),
    ("{not json", "cfg.json:1"),
])
def test_config_errors(tmp_path, text, needle):
    code, out, err = run(tmp_path, "sweep", text)
    assert code == 2 and out == ""
    assert err.startswith("error: config:") and needle in err


def test_missing_config_file(tmp_path):
    out, err = io.StringIO(), io.StringIO()
    assert cli.main(["sweep", "--config", str(tmp_path / "nope.json")], out, err) == 2


def test_bad_override(tmp_path):
    code, _, err = run(tmp_path, "sweep", BASE, "--set", "params.omega_m")
    assert code == 2 and "key=value" in err


def test_numerical_failure_exit_code(tmp_path):
    code, out, err = run(tmp_path, "evolve", BASE, "--mode", "full",
                         "--set", "params.omega_m=5", "--set", "evolve.t_max=500")
    assert code == 3 and err.startswith("error: numerical:")
