import hashlib
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavesynth import cli
from wavesynth.exceptions import ConfigError, NumericalError
from wavesynth.reports import emit_csv, format_value, read_csv, read_sidecar, write_report
from wavesynth.scenarios import Table


def run(argv, tmp_path):
    code = cli.main(list(argv) + ["--out", str(tmp_path)])
    return code


class TestFormatting:
    @given(st.floats(allow_nan=False))
    def test_float_round_trip(self, v):
        assert float(format_value(v)) == v

    def test_special_values(self):
        assert format_value(True) == "true"
        assert format_value(np.int64(7)) == "7"
        assert format_value(float("nan")) == "nan"
        assert format_value(-math.inf) == "-inf"
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value("sobol") == "sobol"

    def test_table_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        rows = [[int(i), float(x), "random", bool(i % 2)] for i, x in enumerate(rng.standard_normal(50) * 1e-7)]
        t = Table(["i", "x", "strategy", "flag"], rows)
        path = emit_csv(t, tmp_path / "t.csv")
        back, comment = read_csv(path)
        assert comment is None
        assert back.columns == t.columns
        assert back.rows == t.rows
        raw = path.read_bytes()
        assert b"\r" not in raw and raw.endswith(b"\n")

    def test_empty_table_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="table"):
            emit_csv(Table(["a"]), tmp_path / "e.csv")

    def test_unwritable_path_named(self, tmp_path):
        target = tmp_path / "missing" / "t.csv"
        with pytest.raises(ConfigError, match="missing"):
            emit_csv(Table(["a"], [[1]]), target)

    def test_sidecar_checksum(self, tmp_path):
        csv_path, side = write_report(Table(["a"], [[1.5]]), tmp_path, "density", {"kappa": 16.0})
        first = csv_path.read_text().split("\n")[0]
        digest = hashlib.sha256(side.read_bytes()).hexdigest()
        assert first == f"# sidecar=density.config.json sha256={digest}"
        assert read_sidecar(side) == ("density", {"kappa": 16.0})

    def test_bad_sidecar(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="config"):
            read_sidecar(p)
        p.write_text("{")
        with pytest.raises(ConfigError, match="JSON"):
            read_sidecar(p)


class TestCommands:
    def test_density(self, tmp_path, capsys):
        assert run(["density", "--kappa", "16", "--P", "64"], tmp_path) == 0
        assert capsys.readouterr().out.strip() == str(tmp_path / "density.csv")
        table, comment = read_csv(tmp_path / "density.csv")
        assert table.columns == ["zeta", "rho", "cdf"]
        assert len(table.rows) > 1000
        assert comment.startswith("sidecar=density.config.json")
        _, cfg = read_sidecar(tmp_path / "density.config.json")
        assert cfg["P"] == 64 and cfg["kappa"] == 16.0

    def test_epw_headline(self, tmp_path):
        argv = ["epw-stability", "--kappa", "16", "--P", "64", "--M", "512", "--strategy", "sobol"]
        assert run(argv, tmp_path) == 0
        table, _ = read_csv(tmp_path / "epw-stability.csv")
        assert len(table.rows) == 129
        assert table.column("residual").max() < 1e-10

    def test_ppw_header(self, tmp_path):
        assert run(["ppw-instability", "--kappa", "4", "--M-values", "16,32", "--p-values", "0,2"], tmp_path) == 0
        lines = (tmp_path / "ppw-instability.csv").read_text().split("\n")
        assert lines[1] == "p,M,S,eps,residual,coeff_norm,eps_rank"
        assert len([ln for ln in lines[2:] if ln]) == 4

    def test_defaults_recorded(self, tmp_path):
        assert run(["sample", "--M", "10"], tmp_path) == 0
        _, cfg = read_sidecar(tmp_path / "sample.config.json")
        assert (cfg["kappa"], cfg["eps"], cfg["oversampling"], cfg["strategy"], cfg["seed"]) == (16.0, 1e-14, 2.0, "sobol", 0)

    def test_rerun_and_replay_are_byte_identical(self, tmp_path):
        a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        argv = ["surrogate", "--kappa", "8", "--P", "8", "--M-values", "40,68", "--strategy", "random", "--seed", "11"]
        assert run(argv, a) == 0 and run(argv, b) == 0
        assert run(["surrogate", "--config", str(a / "surrogate.config.json")], c) == 0
        for name in ("surrogate.csv", "surrogate.config.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes()

    def test_replay_flags_override(self, tmp_path):
        assert run(["tau-table", "--kappas", "4", "--P", "8"], tmp_path / "a") == 0
        side = tmp_path / "a" / "tau-table.config.json"
        assert run(["tau-table", "--config", str(side), "--P", "4"], tmp_path / "b") == 0
        table, _ = read_csv(tmp_path / "b" / "tau-table.csv")
        assert len(table.rows) == 5

    def test_replay_wrong_subcommand(self, tmp_path, capsys):
        assert run(["density", "--P", "8"], tmp_path) == 0
        assert run(["sample", "--config", str(tmp_path / "density.config.json")], tmp_path) == 2
        assert "config" in capsys.readouterr().err

    def test_triangle_subset(self, tmp_path):
        argv = ["triangle", "--M-values", "40", "--kinds", "epw", "--sources", "vertex", "--bulk-error"]
        assert run(argv, tmp_path) == 0
        table, _ = read_csv(tmp_path / "triangle.csv")
        assert table.columns[-1] == "bulk_error" and len(table.rows) == 1

    def test_quasi_opt_small(self, tmp_path):
        assert run(["quasi-opt", "--kappa", "4", "--P-values", "4", "--sigma", "1e-10"], tmp_path) == 0
        table, _ = read_csv(tmp_path / "quasi-opt.csv")
        assert np.isfinite(table.column("ratio")).all()


class TestExitCodes:
    def test_negative_kappa(self, tmp_path, capsys):
        assert run(["density", "--kappa", "-1"], tmp_path) == 2
        assert "kappa" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "argv,name",
        [
            (["sample", "--strategy", "halton"], "strategy"),
            (["density", "--eps", "0"], "eps"),
            (["triangle", "--sources", "edge,corner"], "sources"),
        ],
    )
    def test_invalid_values(self, tmp_path, capsys, argv, name):
        assert run(argv, tmp_path) == 2
        assert name in capsys.readouterr().err

    def test_malformed_list(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["ppw-instability", "--M-values", "8,x"], tmp_path)
        assert exc.value.code == 2
        assert "M-values" in capsys.readouterr().err

    def test_unknown_flag(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(["density", "--kapa", "3"], tmp_path)
        assert exc.value.code == 2

    def test_flag_of_other_subcommand(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(["density", "--kinds", "ppw"], tmp_path)
        assert exc.value.code == 2

    def test_strict_repro(self, tmp_path, capsys):
        assert run(["sample", "--M", "4", "--strict-repro"], tmp_path) == 2
        assert "seed" in capsys.readouterr().err
        assert run(["sample", "--M", "4", "--strict-repro", "--seed", "0"], tmp_path) == 0
        # deterministic subcommands need no seed
        assert run(["density", "--P", "8", "--strict-repro"], tmp_path) == 0

    def test_numerical_failure(self, tmp_path, capsys, monkeypatch):
        def boom(cfg):
            raise NumericalError("SVD did not converge")

        monkeypatch.setitem(cli.RUNNERS, "density", boom)
        assert run(["density"], tmp_path) == 3
        assert "SVD" in capsys.readouterr().err

    def test_unwritable_output(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert cli.main(["density", "--P", "8", "--out", str(blocker / "sub")]) == 2
        assert "output" in capsys.readouterr().err


class TestPlot:
    def test_svg_from_csv(self, tmp_path):
        assert run(["ppw-instability", "--kappa", "4", "--M-values", "16,32", "--p-values", "0,1,2,3"], tmp_path) == 0
        csv_path = tmp_path / "ppw-instability.csv"
        assert cli.main(["plot", str(csv_path)]) == 0
        svg = csv_path.with_suffix(".svg")
        assert svg.read_text().lstrip().startswith("<?xml")

    def test_explicit_columns(self, tmp_path):
        emit_csv(Table(["a", "b", "g"], [[1, 2.0, "x"], [2, 3.0, "x"], [1, 1.0, "y"]]), tmp_path / "t.csv")
        out = tmp_path / "o.svg"
        assert cli.main(["plot", str(tmp_path / "t.csv"), "--x", "a", "--y", "b", "--group", "g", "--output", str(out)]) == 0
        assert out.exists()

    def test_unknown_column(self, tmp_path, capsys):
        emit_csv(Table(["a", "b"], [[1, 2.0]]), tmp_path / "t.csv")
        assert cli.main(["plot", str(tmp_path / "t.csv"), "--x", "zz", "--y", "b"]) == 2
        assert "zz" in capsys.readouterr().err

    def test_missing_csv(self, tmp_path, capsys):
        assert cli.main(["plot", str(tmp_path / "none.csv")]) == 2
        assert "none.csv" in capsys.readouterr().err

