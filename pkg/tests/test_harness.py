from __future__ import annotations

import math
import os

import numpy as np
import pytest
from scipy import stats

from leakscope.harness import cli
from leakscope.harness.config import (
    ConfigError,
    ScenarioConfig,
    build_params,
    db_to_linear,
    default_seed,
    from_mapping,
    load_config,
    parse_config_text,
    parse_sweep,
    resolve_params,
)
from leakscope.harness.io import emit, parse, parse_csv_text, to_csv_text
from leakscope.harness.runner import (
    ResultTable,
    TooFewSamplesError,
    config_from_provenance,
    ecdf_ks,
    run_scenario,
)

from conftest import philox

STAMP = "2000-01-01T00:00:00+00:00"


def small(experiment, *pairs):
    base = ScenarioConfig(experiment=experiment, seed=7, mc_samples=10_000)
    return from_mapping(list(pairs), base)


class TestConfig:
    def test_grammar(self):
        text = """
        # comment line
        rho_db = 10        # trailing comment
        k = 6
        fading_e = Rician
        k_e_db = 0
        sweep.n = 100,200
        seed = 0x10
        methods = exact, saddle
        """
        cfg = parse_config_text(text)
        assert cfg.params["rho"] == pytest.approx(10.0)
        assert cfg.params["k"] == 6 and cfg.params["fading_e"] == "rician"
        assert cfg.params["k_e"] == pytest.approx(1.0)
        assert cfg.seed == 16 and cfg.methods == ("exact", "saddle")
        assert cfg.sweep[0].values == (100.0, 200.0)

    @pytest.mark.parametrize("text", ["rhoo = 1", "sweep.bogus = 1,2", "k = 2.5", "rho = abc",
                                      "fading_b = nakagami", "just text", "methods = exact,guess",
                                      "sweep.rho_db = 0:10:3"])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_config_text(text)

    def test_error_names_source_and_line(self):
        with pytest.raises(ConfigError, match=r"scenario\.cfg:2"):
            parse_config_text("k = 4\nnonsense\n", source="scenario.cfg")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "absent.cfg"))

    def test_db_conversion(self):
        assert db_to_linear(20.0) == pytest.approx(100.0)
        assert from_mapping([("rho_db", "-10")]).params["rho"] == pytest.approx(0.1)

    def test_seed_env(self, monkeypatch):
        monkeypatch.delenv("LEAKSCOPE_SEED", raising=False)
        assert default_seed() == 2024
        monkeypatch.setenv("LEAKSCOPE_SEED", "99")
        assert default_seed() == 99
        monkeypatch.setenv("LEAKSCOPE_SEED", "-1")
        with pytest.raises(ConfigError):
            default_seed()

    def test_precedence(self):
        cfg = small("fig3", ("alpha", "0.5"))
        merged = resolve_params(cfg, {"n": 700.0})
        assert merged["alpha"] == 0.5 and merged["n"] == 700

    def test_invalid_params_surface_as_config_errors(self):
        with pytest.raises(ConfigError):
            build_params({"k": 1, "scheme": "an"})


class TestSweep:
    def test_linear(self):
        axis = parse_sweep("n", "100:1000:4")
        assert axis.values == (100.0, 400.0, 700.0, 1000.0)

    def test_log(self):
        axis = parse_sweep("epsilon", "1e-5:1e-1:5:log")
        np.testing.assert_allclose(axis.values, [1e-5, 1e-4, 1e-3, 1e-2, 1e-1])

    def test_db(self):
        axis = parse_sweep("rho", "-10:20:4:dB")
        np.testing.assert_allclose(axis.values, [0.1, 1.0, 10.0, 100.0])
        np.testing.assert_allclose(axis.shown, [-10, 0, 10, 20])
        assert axis.column == "rho_db"

    def test_list(self):
        assert parse_sweep("m", "50, 100,150").values == (50.0, 100.0, 150.0)

    def test_integers_are_rounded(self):
        assert parse_sweep("n", "100:200:3").values == (100.0, 150.0, 200.0)

    @pytest.mark.parametrize("text", ["1:2", "0:1:3:log", "a,b", "1:2:0", ""])
    def test_bad(self, text):
        with pytest.raises(ConfigError):
            parse_sweep("rho", text)


class TestKs:
    def test_self_sampling(self):
        s = philox(31, 1).exponential(2.0, 100_000)
        assert ecdf_ks(s, lambda x: stats.expon(scale=2.0).cdf(x)) <= 0.01

    def test_constant_samples(self):
        c = 0.3
        cdf = stats.norm.cdf
        assert ecdf_ks(np.full(200, c), cdf) == pytest.approx(max(cdf(c), 1 - cdf(c)))

    def test_disjoint_support(self):
        assert ecdf_ks(np.linspace(5, 6, 500), lambda x: stats.uniform.cdf(x)) == pytest.approx(1.0)

    def test_too_few(self):
        with pytest.raises(TooFewSamplesError):
            ecdf_ks(np.ones(10), stats.norm.cdf)


def _table():
    return ResultTable(("name", "n", "value", "gap"),
                       [("a,b \"quoted\"", 3, 0.1 + 0.2, None), ("plain", -7, 1e-300, math.pi),
                        ("x", 0, float("inf"), -0.0)],
                       {"experiment": "custom", "seed": "5", "note": "key: value, with colon"})


class TestIo:
    def test_round_trip(self, tmp_path):
        t = _table()
        (path,) = emit(t, "csv", str(tmp_path), "t")
        assert parse(path) == t

    def test_crlf_and_header(self, tmp_path):
        (path,) = emit(_table(), "csv", str(tmp_path), "t")
        raw = open(path, "rb").read()
        assert raw.startswith(b"# experiment: custom\r\n")
        assert b"\n" not in raw.replace(b"\r\n", b"")
        assert b"NA" in raw

    def test_missing_directory(self, tmp_path):
        missing = str(tmp_path / "nowhere")
        with pytest.raises(FileNotFoundError, match="nowhere"):
            emit(_table(), "csv", missing)

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit(_table(), "xlsx", str(tmp_path))

    def test_plot_output(self, tmp_path):
        table = run_scenario(small("fig3", ("sweep.epsilon", "1e-4,1e-2")), timestamp=STAMP)
        paths = emit(table, "plot", str(tmp_path), "fig3")
        assert [os.path.basename(p) for p in paths] == ["fig3.csv", "fig3.svg"]
        svg = open(paths[1], encoding="utf-8").read()
        assert svg.lstrip().startswith("<?xml") and "<svg" in svg

    def test_rejects_multiline_provenance(self):
        t = ResultTable(("a",), [(1,)], {"bad": "two\nlines"})
        with pytest.raises(ValueError):
            to_csv_text(t)


class TestRunner:
    def test_empty_sweep_single_row(self):
        t = run_scenario(small("custom"), timestamp=STAMP)
        assert len(t.rows) == 1
        assert t.columns == ("ail_exact", "ail_saddle", "ail_mc", "mc_stderr")

    def test_fig3_schema(self):
        t = run_scenario(small("fig3", ("sweep.epsilon", "1e-4,1e-2")), timestamp=STAMP)
        assert t.columns == ("epsilon", "ail_exact", "ail_saddle", "ail_mc", "mc_stderr")
        assert len(t.rows) == 2

    def test_byte_identical_rerun(self):
        cfg = small("custom", ("sweep.rho", "-5:15:3:dB"))
        a = to_csv_text(run_scenario(cfg, timestamp="first"))
        b = to_csv_text(run_scenario(cfg, timestamp="second"))
        strip = lambda s: "\n".join(l for l in s.splitlines() if not l.startswith("# timestamp"))
        assert strip(a) == strip(b)

    def test_workers_do_not_change_rows(self):
        cfg = small("custom", ("sweep.n", "100,400,900"))
        serial = run_scenario(cfg, timestamp=STAMP)
        pooled = run_scenario(from_mapping([("workers", "2")], cfg), timestamp=STAMP)
        assert serial.rows == pooled.rows

    def test_provenance_rebuilds_config(self):
        cfg = small("custom", ("rho_db", "5"), ("sweep.n", "100,200"))
        t = run_scenario(cfg, timestamp=STAMP)
        again = config_from_provenance(t)
        assert to_csv_text(run_scenario(again, timestamp=STAMP)) == to_csv_text(t)

    def test_fig2_rows(self):
        t = run_scenario(small("fig2", ("sweep.rho", "0:dB")), timestamp=STAMP)
        ks = set(t.column("ks"))
        assert len(ks) == 1 and 0 < ks.pop() < 0.05

    def test_fig4_branches(self):
        t = run_scenario(small("fig4", ("sweep.rho", "10:dB")), timestamp=STAMP)
        assert t.column("branch") == ["rayleigh-an", "rayleigh-mrt", "rician-an", "rician-mrt"]
        assert t.rows[3][t.columns.index("ail_exact")] is None

    def test_validate(self):
        t = run_scenario(small("validate"), timestamp=STAMP)
        passes = [p for p in t.column("pass") if p is not None]
        assert passes and all(passes)

    def test_bad_parameter_fails_before_work(self):
        with pytest.raises(ConfigError):
            run_scenario(small("custom", ("sweep.epsilon", "0.1,1.5")))


class TestCli:
    def test_ail_stdout(self, capsys):
        assert cli.main(["ail", "--seed", "3", "--samples", "5000", "--set", "rho_db=10"]) == 0
        out = capsys.readouterr().out
        table = parse_csv_text(out)
        assert table.meta("seed") == "3"
        assert table.columns[0] == "ail_exact"

    def test_out_dir_created(self, tmp_path, capsys):
        out = tmp_path / "new" / "dir"
        rc = cli.main(["ail", "--samples", "5000", "--sweep", "n=100,300", "--methods", "saddle",
                       "--out", str(out)])
        assert rc == 0
        assert (out / "ail.csv").exists()
        assert str(out / "ail.csv") in capsys.readouterr().out

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "s.cfg"
        path.write_text("rho_db = 0\nmethods = saddle,closed\n")
        assert cli.main(["ail", "--config", str(path), "--samples", "5000"]) == 0
        table = parse_csv_text(capsys.readouterr().out)
        assert table.columns == ("ail_saddle", "ail_closed")

    def test_config_errors_exit_2(self, capsys):
        assert cli.main(["ail", "--set", "bogus=1"]) == 2
        assert "bogus" in capsys.readouterr().err
        assert cli.main(["ail", "--set", "novalue"]) == 2

    def test_selfcheck(self, capsys):
        assert cli.main(["selfcheck", "--seed", "1"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 5 and all(l.startswith("PASS") for l in lines)

    def test_fig_number_range(self):
        with pytest.raises(SystemExit):
            cli.main(["fig", "9"])

    def test_module_entry(self):
        import subprocess
        import sys

        res = subprocess.run([sys.executable, "-m", "leakscope", "--help"], capture_output=True, text=True)
        assert res.returncode == 0 and "selfcheck" in res.stdout
