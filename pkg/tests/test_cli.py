import copy
import csv
import io
import json
import math
import subprocess
import sys

import pytest

from rffso import (FisherSnedecorParams as FS, GammaGammaParams as GG, OutageQuery,
                   RelaySystem, db_to_linear, outage_floor_mu1, outage_probability)
from rffso.cli import (CSV_COLUMNS, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, ConfigError,
                       linear_to_db, main, parse_config, reproduce_figure, run_scenario)
from rffso.specfun import ConvergenceError

EXPLICIT = {
    "rf": {"m": 1.12, "m_s": 1.42, "mu1_db": 20},
    "fso": {"mu2_db": 20, "explicit": {"alpha": 4.0, "beta": 2.0}},
    "gamma_th_db": 0,
    "sweep": {"axis": "mu2", "start": 0, "stop": 10, "step": 5},
}

FIG1_LOS = {
    "rf": {"m": 1.12, "m_s": 1.42},
    "fso": {"geometric": {"cn2": 2e-14, "wavelength_m": 1550e-9, "length_m": 1000}},
    "gamma_th_db": 0,
    "sweep": {"axis": "mu1_and_mu2", "start": 0, "stop": 40, "step": 1},
}


def doc(base, **patch):
    d = copy.deepcopy(base)
    for path, value in patch.items():
        *head, last = path.split("__")
        node = d
        for k in head:
            node = node[k]
        if value is None:
            node.pop(last, None)
        else:
            node[last] = value
    return json.dumps(d)


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# -- parsing -----------------------------------------------------------------

def test_parse_minimal_explicit():
    cfg = parse_config(json.dumps(EXPLICIT))
    assert (cfg.alpha, cfg.beta) == (4.0, 2.0)
    assert cfg.cn2 is None and cfg.wavelength_m is None and cfg.length_m is None
    assert not cfg.geometric and cfg.mc is None
    assert cfg.sweep.grid() == [0.0, 5.0, 10.0]
    assert cfg.beta_exponent_variant == "paper_7_6"


def test_parse_rejects_both_fso_blocks():
    bad = doc(EXPLICIT, fso__geometric={"cn2": 2e-14, "wavelength_m": 1550e-9, "length_m": 1e3})
    with pytest.raises(ConfigError) as exc:
        parse_config(bad)
    assert any("both" in e and "explicit" in e and "geometric" in e for e in exc.value.errors)


def test_parse_accepts_h2p_nlos():
    cfg = parse_config(doc(EXPLICIT, rf__m=0.75, rf__m_s=4.27))
    assert (cfg.m, cfg.m_s) == (0.75, 4.27)


def test_parse_collects_every_error():
    bad = doc(EXPLICIT, rf__m=-1, rf__colour="red", gamma_th_db=None, sweep__axis="snr",
              mc={"samples": 0})
    with pytest.raises(ConfigError) as exc:
        parse_config(bad)
    joined = "\n".join(exc.value.errors)
    for needle in ("rf.m: must be > 0", "rf.colour: unknown field", "gamma_th_db: missing",
                   "sweep.axis", "mc:"):
        assert needle in joined


def test_parse_reports_syntax_location():
    with pytest.raises(ConfigError) as exc:
        parse_config('{\n  "rf": {"m": 1,}\n}')
    assert exc.value.errors[0].startswith("line 2 column")


@pytest.mark.parametrize("patch", [
    dict(sweep__step=-1), dict(sweep__stop=-5), dict(sweep__step=0),
    dict(beta_exponent_variant="kolmogorov"), dict(fso__explicit=None),
    dict(fso__mu2_db=None, sweep__axis="mu1"), dict(sweep__axis="fso_length"),
    dict(rf__m="1.1"), dict(fso__explicit__alpha=math.inf),
])
def test_parse_invalid(patch):
    with pytest.raises(ConfigError):
        parse_config(doc(EXPLICIT, **patch))


def test_parse_not_an_object():
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


def test_db_round_trip():
    assert db_to_linear(0) == 1.0
    assert db_to_linear(30) == pytest.approx(1000.0, rel=1e-15)
    assert linear_to_db(db_to_linear(17.3)) == pytest.approx(17.3, rel=1e-12)


# -- run ---------------------------------------------------------------------

def test_fig1_los_scenario_csv():
    text = run_scenario(parse_config(json.dumps(FIG1_LOS)))
    header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert header == ",".join(CSV_COLUMNS)
    rows = table(text)
    assert len(rows) == 41
    p = [float(r["pout_analytic"]) for r in rows]
    assert all(b <= a for a, b in zip(p, p[1:]))
    assert all(r["pout_mc"] == "" and r["mc_stderr"] == "" for r in rows)
    assert float(rows[0]["sigma_r2"]) == pytest.approx(0.39819087702254, abs=1e-13)
    # 17 significant digits reproduce the doubles exactly
    assert float(rows[10]["pout_analytic"]) == 0.12625662417145478


def test_single_point_scenario():
    rows = table(run_scenario(parse_config(doc(EXPLICIT, sweep__stop=0, sweep__step=None))))
    assert len(rows) == 1 and rows[0]["sigma_r2"] == ""


def test_rows_recompute_independently():
    for base, fixed in ((EXPLICIT, "mu1"), (FIG1_LOS, None)):
        cfg = parse_config(json.dumps(base))
        q = OutageQuery(db_to_linear(cfg.gamma_th_db))
        for r in table(run_scenario(cfg)):
            x = db_to_linear(float(r["axis_value"]))
            mu1 = x if fixed is None else db_to_linear(cfg.mu1_db)
            sys_ = RelaySystem(FS(cfg.m, cfg.m_s, mu1), GG(float(r["alpha"]), float(r["beta"]), x))
            assert abs(outage_probability(sys_, q) - float(r["pout_analytic"])) <= 1e-12


def test_length_axis_scenario():
    d = doc(FIG1_LOS, sweep={"axis": "fso_length", "start": 500, "stop": 3000, "step": 500},
            fso__geometric__length_m=None, rf__mu1_db=20, fso__mu2_db=20)
    rows = table(run_scenario(parse_config(d)))
    assert [float(r["axis_value"]) for r in rows] == [500, 1000, 1500, 2000, 2500, 3000]
    p = [float(r["pout_analytic"]) for r in rows]
    assert all(b >= a for a, b in zip(p, p[1:]))
    assert len({r["alpha"] for r in rows}) == 6


def test_mc_scenario_agrees_with_analytic():
    d = doc(FIG1_LOS, sweep__stop=30, sweep__step=10,
            mc={"samples": 1_000_000, "seed": 3, "streams": 4})
    rows = table(run_scenario(parse_config(d), workers=4))
    for r in rows:
        p, p_hat, se = (float(r[k]) for k in ("pout_analytic", "pout_mc", "mc_stderr"))
        if p >= 1e-4:
            assert abs(p - p_hat) <= 4 * se


# -- entry point -------------------------------------------------------------

def write(tmp_path, text, name="cfg.json"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_is_byte_deterministic(tmp_path):
    cfg = write(tmp_path, doc(FIG1_LOS, mc={"samples": 20_000, "seed": 42, "streams": 3}))
    outs = []
    for i, workers in enumerate(("1", "4")):
        out = tmp_path / f"out{i}.csv"
        assert main(["--workers", workers, "run", "--config", cfg, "--out", str(out)]) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_exit_codes(tmp_path, capsys, monkeypatch):
    good = write(tmp_path, json.dumps(EXPLICIT))
    assert main(["validate", "--config", good]) == EXIT_OK
    assert main(["validate", "--config", write(tmp_path, "{", "bad.json")]) == EXIT_CONFIG
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_IO
    assert main(["run", "--config", good, "--out", str(tmp_path / "no" / "dir.csv")]) == EXIT_IO
    assert main(["figure", "fig9"]) == EXIT_CONFIG
    assert main(["figure", "fig3", "--lengths", "1000,-5"]) == EXIT_CONFIG

    def boom(*a, **k):
        raise ConvergenceError("no convergence")
    monkeypatch.setattr("rffso.cli.run_scenario", boom)
    assert main(["run", "--config", good]) == EXIT_NUMERIC
    err = capsys.readouterr().err
    assert "numerical failure" in err and "config error" in err


def test_run_stdout_and_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(EXPLICIT)))
    assert main(["run", "--config", "-"]) == EXIT_OK
    assert len(table(capsys.readouterr().out)) == 3


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, json.dumps(EXPLICIT))
    proc = subprocess.run([sys.executable, "-m", "rffso", "run", "--config", cfg],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and len(table(proc.stdout)) == 3


# -- figures -----------------------------------------------------------------

def test_figure_defaults_are_reported():
    out = reproduce_figure("fig2", dict(stop=10.0))
    assert len(out.curves) == 6
    keys = " ".join(out.defaults_applied)
    for k in ("gamma_th_db", "cn2_strong", "length_m", "mu_fixed_db"):
        assert k in keys
    for text in out.curves.values():
        assert "# default: cn2_strong not supplied" in text


def test_figure_overrides_silence_defaults():
    out = reproduce_figure("fig3", dict(gamma_th_db=3.0, lengths=(800.0, 1600.0),
                                        mu_fixed_db=25.0, stop=5.0))
    assert out.defaults_applied == []
    assert list(out.curves) == ["fig3_L800m", "fig3_L1600m"]
    with pytest.raises(ConfigError):
        reproduce_figure("fig1", dict(lengthz=3))


def test_fig3_curves_approach_fso_floor():
    out = reproduce_figure("fig3", dict(start=60.0, stop=140.0, step=80.0))
    for label, rows in out.rows.items():
        last = rows[-1]
        floor = outage_floor_mu1(
            RelaySystem(FS(1.12, 1.42, 1.0), GG(last.alpha, last.beta, db_to_linear(20.0))),
            OutageQuery(1.0))
        assert abs(last.pout_analytic - floor) <= 1e-6


def test_figure_command_writes_one_file_per_curve(tmp_path, capsys):
    assert main(["figure", "fig1", "--stop", "2", "--out", str(tmp_path)]) == EXIT_OK
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["fig1_h2h_los.csv", "fig1_h2h_nlos.csv", "fig1_h2p_los.csv",
                     "fig1_h2p_nlos.csv"]
    assert "assuming outage threshold" in capsys.readouterr().err
    assert main(["figure", "fig1", "--stop", "2", "--gamma-th-db", "0"]) == EXIT_OK
    assert capsys.readouterr().out.count("axis_value,pout_analytic") == 4
