"""Config resolution, CSV round-trips, SVG output and the exit-code contract."""
import json

import numpy as np
import pytest

from vqelab.cli import UsageError, build_parser, execute, main, resolve_config
from vqelab.output import SCHEMAS, format_cell, read_csv, sha256_file, write_csv
from vqelab.plotting import emit_plot


def resolve(argv):
    return resolve_config(build_parser().parse_args(argv))


class TestConfigResolution:
    def test_documented_defaults(self):
        cfg = resolve(["vqe", "--model", "ising", "--n", "4", "--L", "10", "--seed", "7"])
        assert cfg.experiment == "vqe"
        assert cfg["model"]["kind"] == "ising"
        assert cfg["model"]["g"] == 2.0
        assert cfg["optimizer"]["alpha"] == 0.05
        assert cfg["optimizer"]["beta1"] == 0.9
        assert cfg["optimizer"]["beta2"] == 0.999
        assert cfg["optimizer"]["steps"] == 500
        assert cfg["optimizer"]["schedule"] == {"kind": "exponential", "c": 0.3, "period": 500}
        assert cfg.master_seed == 7
        assert cfg["n"] == 4 and cfg["L"] == 10
        assert str(cfg.out_dir) == "vqelab-vqe"

    def test_flags_beat_file(self, tmp_path):
        f = tmp_path / "c.json"
        f.write_text(json.dumps({"experiment": "vqe", "n": 6, "L": 12}))
        cfg = resolve(["vqe", "--config", str(f), "--n", "4"])
        assert cfg["n"] == 4  # flag wins
        assert cfg["L"] == 12  # file beats default

    def test_nested_file_keys(self, tmp_path):
        f = tmp_path / "c.json"
        f.write_text(json.dumps({"model": {"kind": "syk", "seed": 4}, "optimizer": {"steps": 7}}))
        cfg = resolve(["vqe", "--config", str(f), "--n", "3", "--L", "2"])
        assert cfg["model"]["kind"] == "syk"
        assert cfg["model"]["seed"] == 4
        assert cfg["optimizer"]["steps"] == 7
        assert cfg["optimizer"]["alpha"] == 0.05  # untouched default

    def test_unknown_file_key_rejected(self, tmp_path):
        f = tmp_path / "c.json"
        f.write_text(json.dumps({"banana": 1}))
        with pytest.raises(UsageError, match="banana"):
            resolve(["vqe", "--config", str(f), "--n", "3", "--L", "2"])

    def test_experiment_mismatch_rejected(self, tmp_path):
        f = tmp_path / "c.json"
        f.write_text(json.dumps({"experiment": "bp"}))
        with pytest.raises(UsageError, match="experiment"):
            resolve(["vqe", "--config", str(f), "--n", "3", "--L", "2"])

    def test_constant_lr_flag(self):
        cfg = resolve(["vqe", "--n", "3", "--L", "2", "--constant-lr"])
        assert cfg["optimizer"]["schedule"]["kind"] == "constant"
        adam = cfg.adam()
        from vqelab import lr_at

        assert lr_at(adam, 400) == 0.05

    def test_grid_flags(self):
        # the grid subcommands reuse the common spellings --L / --n
        cfg = resolve(["rate", "--model", "ising", "--n", "4", "--L", "8,16,32"])
        assert cfg["L_grid"] == [8, 16, 32]
        cfg2 = resolve(["trh2fit", "--model", "ising", "--n", "3,4,5"])
        assert cfg2["n_grid"] == [3, 4, 5]

    def test_validation_failures(self):
        cases = [
            ["vqe", "--n", "0", "--L", "2"],
            ["vqe", "--n", "3", "--L", "0"],
            ["vqe", "--n", "13", "--L", "2"],  # dense diagonalization cap
            ["vqe", "--n", "3", "--L", "2", "--beta1", "1.5"],
            ["vqe", "--n", "3", "--L", "2", "--alpha", "-0.1"],
            ["vqe", "--n", "3", "--L", "2", "--steps", "0"],
            ["bp", "--n", "3", "--L", "2", "--samples", "1"],
            ["ensemble", "--n", "3", "--L", "2", "--runs", "0"],
            ["rate", "--n", "3", "--L", "16,16,32"],
            ["vqe", "--n", "3", "--L", "2", "--model", "ising", "--seed", "-1"],
        ]
        for argv in cases:
            with pytest.raises(UsageError):
                resolve(argv)

    def test_express_has_no_model(self):
        cfg = resolve(["express", "--n", "3", "--L", "4"])
        assert "model" not in cfg.resolved


class TestMainExitCodes:
    def test_missing_subcommand(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_unknown_flag(self, capsys):
        assert main(["vqe", "--granularity", "9"]) == 2
        capsys.readouterr()

    def test_usage_error_path(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{ not json")
        assert main(["vqe", "--config", str(bad), "--n", "3", "--L", "2"]) == 2
        assert "usage error" in capsys.readouterr().err

    def test_runtime_error_path(self, tmp_path, capsys):
        blocker = tmp_path / "occupied"
        blocker.write_text("a file, not a directory")
        code = main(
            ["spectrum", "--model", "ising", "--n", "2", "--out", str(blocker)]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err
        assert not (tmp_path / "occupied" / "manifest.json").exists()

    def test_version_flag(self, capsys):
        assert main(["--version"]) == 0
        assert "vqelab" in capsys.readouterr().out


class TestCsv:
    def test_round_trip_typed_cells(self, tmp_path):
        p = tmp_path / "t.csv"
        rows = [
            (0, 1.5, -0.25, 0.999, 0.01, 0.05),
            (1, float("1e-12"), 0.0, None, 0.25, 0.049),
        ]
        write_csv(p, "trajectory", rows)
        header, got = read_csv(p)
        assert header == SCHEMAS["trajectory"]
        assert got[0] == [0, 1.5, -0.25, 0.999, 0.01, 0.05]
        assert got[1][3] is None
        assert isinstance(got[0][0], int) and isinstance(got[0][1], float)

    def test_exact_header_line(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(p, "trajectory", [])
        assert p.read_text().splitlines()[0] == "tau,loss,error,fidelity,grad_norm,lr"

    def test_header_only_when_no_rows(self, tmp_path):
        p = tmp_path / "e.csv"
        write_csv(p, "ensemble", [])
        assert p.read_text() == "run_id,seed,final_error,best_tau,bound_met\n"
        header, rows = read_csv(p)
        assert rows == []

    def test_bool_cells(self, tmp_path):
        p = tmp_path / "b.csv"
        write_csv(p, "ensemble", [(0, 42, 1e-9, 17, True), (1, 43, 0.5, 3, False)])
        text = p.read_text()
        assert ",true" in text and ",false" in text
        _, rows = read_csv(p)
        assert rows[0][4] is True and rows[1][4] is False

    def test_float_cells_round_trip_exactly(self, tmp_path):
        p = tmp_path / "f.csv"
        vals = [0.1, 1 / 3, -8.543116820279426, 2**-52]
        write_csv(p, "spectrum", list(enumerate(vals)))
        _, rows = read_csv(p)
        assert [r[1] for r in rows] == vals

    def test_unknown_schema(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(tmp_path / "x.csv", "mystery", [])

    def test_row_length_checked(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(tmp_path / "x.csv", "spectrum", [(1, 2.0, 3.0)])

    def test_format_cell(self):
        assert format_cell(None) == ""
        assert format_cell(True) == "true"
        assert format_cell(False) == "false"
        assert format_cell(3) == "3"
        assert format_cell(0.1) == "0.1"
        assert format_cell(np.float64(0.25)) == "0.25"


class TestPlots:
    def make_csv(self, tmp_path, rows):
        p = tmp_path / "spectrum.csv"
        write_csv(p, "spectrum", rows)
        return p

    def test_svg_written_next_to_csv(self, tmp_path):
        p = self.make_csv(tmp_path, [(1, -2.0), (2, 0.5), (3, 1.5)])
        svg, dropped = emit_plot(p, x="rank", y="eigenvalue")
        assert svg == tmp_path / "spectrum.svg"
        head = svg.read_bytes()[:200]
        assert head.startswith(b"<?xml") and b"svg" in head
        assert dropped == 0

    def test_log_axis_drops_nonpositive(self, tmp_path):
        p = self.make_csv(tmp_path, [(1, -2.0), (2, 0.0), (3, 1.5)])
        _, dropped = emit_plot(p, x="rank", y="eigenvalue", log_y=True)
        assert dropped == 2

    def test_blank_cells_dropped(self, tmp_path):
        p = tmp_path / "trajectory.csv"
        write_csv(p, "trajectory", [(0, 1.0, 0.5, None, 0.1, 0.05), (1, 0.9, 0.4, 0.99, 0.1, 0.05)])
        _, dropped = emit_plot(p, x="tau", y="fidelity")
        assert dropped == 1

    def test_missing_column(self, tmp_path):
        p = self.make_csv(tmp_path, [(1, 1.0)])
        with pytest.raises(ValueError):
            emit_plot(p, x="rank", y="height")

    def test_byte_identical_replots(self, tmp_path):
        p = self.make_csv(tmp_path, [(1, -2.0), (2, 0.5), (3, 1.5)])
        a, _ = emit_plot(p, x="rank", y="eigenvalue", out_path=tmp_path / "a.svg")
        b, _ = emit_plot(p, x="rank", y="eigenvalue", out_path=tmp_path / "b.svg")
        assert a.read_bytes() == b.read_bytes()

    def test_series_grouping(self, tmp_path):
        p = tmp_path / "norms.csv"
        write_csv(
            p,
            "norms",
            [(4, 16, 1.0, 0.9, 1.1, 5.0), (4, 32, 1.4, 1.3, 1.5, 5.0), (6, 16, 0.5, 0.4, 0.6, 2.0), (6, 32, 0.7, 0.6, 0.8, 2.0)],
        )
        svg, dropped = emit_plot(p, x="L", y="norm_mean", series="n")
        assert svg.exists() and dropped == 0


class TestExecute:
    def test_spectrum_end_to_end(self, tmp_path):
        out = tmp_path / "spec"
        code = main(["spectrum", "--model", "ising", "--n", "3", "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out / "spectrum.csv")
        assert header == ("rank", "eigenvalue")
        assert [r[0] for r in rows] == list(range(1, 9))
        evals = [r[1] for r in rows]
        assert evals == sorted(evals)
        assert evals[0] == pytest.approx(-6.464101615137754, abs=1e-12)

        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["model"]["kind"] == "ising"
        assert manifest["summary"]["degeneracy"] >= 1
        for name, digest in manifest["checksums"].items():
            assert sha256_file(out / name) == digest
        assert "config.json" in manifest["checksums"]
        assert "spectrum.svg" in manifest["checksums"]
        assert "manifest.json" not in manifest["checksums"]

    def test_trh2fit_recovers_scaling(self, tmp_path):
        out = tmp_path / "fit"
        code = main(["trh2fit", "--model", "ising", "--out", str(out)])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["summary"]["a"] == pytest.approx(5.0, abs=1e-6)
        assert manifest["summary"]["b"] == pytest.approx(1.0, abs=1e-6)

    def test_vqe_outputs_and_replay(self, tmp_path):
        first = tmp_path / "first"
        argv = [
            "vqe", "--model", "ising", "--n", "3", "--L", "4",
            "--seed", "5", "--steps", "40", "--out", str(first),
        ]
        assert main(argv) == 0
        header, rows = read_csv(first / "trajectory.csv")
        assert header == SCHEMAS["trajectory"]
        assert len(rows) == 41
        assert rows[0][0] == 0 and rows[-1][0] == 40
        blanks = [r for r in rows if r[3] is None]
        sampled = [r for r in rows if r[3] is not None]
        assert sampled and blanks  # fidelity only at snapshot taus

        # replay from the emitted config: byte-identical artifacts
        second = tmp_path / "second"
        code = main(
            ["vqe", "--config", str(first / "config.json"), "--out", str(second)]
        )
        assert code == 0
        assert (first / "trajectory.csv").read_bytes() == (second / "trajectory.csv").read_bytes()
        assert (first / "trajectory.svg").read_bytes() == (second / "trajectory.svg").read_bytes()

    def test_express_csv(self, tmp_path):
        out = tmp_path / "ex"
        code = main(
            ["express", "--n", "2", "--L", "3", "--targets", "2", "--steps", "60", "--out", str(out)]
        )
        assert code == 0
        header, rows = read_csv(out / "express.csv")
        assert header == ("target_id", "min_distance")
        assert [r[0] for r in rows] == [0, 1]
        assert all(r[1] >= 0 for r in rows)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["summary"]["epsilon_m"] == pytest.approx(
            sum(r[1] for r in rows) / 2
        )

    def test_ensemble_csv(self, tmp_path):
        out = tmp_path / "ens"
        code = main(
            ["ensemble", "--model", "ising", "--n", "3", "--L", "4",
             "--runs", "3", "--steps", "60", "--out", str(out)]
        )
        assert code == 0
        header, rows = read_csv(out / "ensemble.csv")
        assert header == ("run_id", "seed", "final_error", "best_tau", "bound_met")
        assert [r[0] for r in rows] == [0, 1, 2]
        assert all(isinstance(r[4], bool) for r in rows)

    def test_bp_csvs(self, tmp_path):
        out = tmp_path / "bp"
        code = main(
            ["bp", "--model", "ising", "--n", "3", "--L", "2",
             "--samples", "25", "--out", str(out)]
        )
        assert code == 0
        gh, grows = read_csv(out / "gradients.csv")
        assert gh == ("n", "L", "component", "variance")
        assert len(grows) == 6
        nh, nrows = read_csv(out / "norms.csv")
        assert nh == ("n", "L", "norm_mean", "norm_q1", "norm_q3", "bound")
        assert len(nrows) == 1
        assert nrows[0][5] == pytest.approx(4 * 2**3 * 3 * 5 / 4**3)

    def test_landscape_outputs(self, tmp_path):
        out = tmp_path / "land"
        code = main(
            ["landscape", "--model", "ising", "--n", "2", "--L", "3",
             "--k", "5", "--steps", "120", "--out", str(out)]
        )
        assert code == 0
        hh, hrows = read_csv(out / "hessian.csv")
        assert hh == ("rank", "eigenvalue")
        assert len(hrows) == 5
        evs = [r[1] for r in hrows]
        assert evs == sorted(evs, reverse=True)
        ph, prows = read_csv(out / "projection.csv")
        assert ph == ("tau", "projected_distance", "error")
        taus = [r[0] for r in prows]
        assert taus == sorted(taus)
