import dataclasses

import numpy as np
import pytest

from exner1d.cli import (
    compare_mode,
    convergence_study,
    load_config,
    main,
    parse_config,
    read_snapshot,
    run_and_write,
    serialize_config,
    snapshot_filename,
    write_snapshot,
)
from exner1d.driver import RunConfig, make_grid, run
from exner1d.errors import ConfigError
from exner1d.stepper import State


def tiny_config_text():
    return """
# small, fast scenario
x_left=-2.0
x_interface=0.0
x_right=1.0
n_cells=60
t_final=0.5
snapshot_times=0.25,0.5
"""


class TestParseConfig:
    def test_empty_gives_defaults(self):
        cfg = parse_config("")
        assert cfg.x_left == -2.0 and cfg.x_interface == 4.0 and cfg.x_right == 10.0
        assert cfg.n_cells == 1200
        assert cfg.cfl == 7.7
        assert cfg.params.a_g == 0.1 and cfg.params.rho0 == 0.2 and cfg.params.m == 3.0
        assert cfg.params.g == 9.81
        assert cfg.h0 == 1.0 and cfg.u0 == 0.2 and cfg.zb0 == 0.1
        assert cfg.forcing.amplitude == 0.01 and cfg.forcing.omega == 14.0
        assert cfg.scheme == "second"
        assert make_grid(dataclasses.replace(cfg, bc="ac")).dx == pytest.approx(0.01)

    def test_comments_and_values(self):
        cfg = parse_config(tiny_config_text())
        assert cfg.n_cells == 60
        assert cfg.snapshot_times == (0.25, 0.5)

    def test_unknown_key_names_key_and_line(self):
        with pytest.raises(ConfigError, match=r"line 2.*'grav'"):
            parse_config("cfl=7.7\ngrav=9.81\n")

    def test_bad_value_names_key(self):
        with pytest.raises(ConfigError, match="cfl"):
            parse_config("cfl=fast\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("cfl=7.7\ncfl=1.0\n")

    def test_singular_porosity_names_key(self):
        with pytest.raises(ConfigError, match="rho0"):
            parse_config("rho0=1.0\n")

    def test_absorbing_without_sigma_uses_default(self):
        cfg = parse_config("bc=ac\n")
        assert cfg.sigma == 3.0

    def test_roundtrip_identity(self):
        for text in (
            "",
            tiny_config_text(),
            "bc=ac\nsigma=2.5\nscheme=first\nfixed_dt=0.011\n",
        ):
            cfg = parse_config(text)
            assert parse_config(serialize_config(cfg)) == cfg


class TestSnapshotIO:
    def test_roundtrip_bit_exact(self, tmp_path):
        cfg = parse_config(tiny_config_text())
        grid = make_grid(cfg)
        rng = np.random.default_rng(3)
        state = State.uniform(grid, 1.0, 0.2, 0.1)
        state.eta[1:-1] += 1e-3 * rng.standard_normal(grid.n_cells)
        path = write_snapshot(state, 0.25, grid, tmp_path)
        assert path.name == "snapshot_t0.25.csv"
        data = read_snapshot(path)
        np.testing.assert_array_equal(data["eta"], state.eta[1:-1])
        np.testing.assert_array_equal(data["q"], state.q[1:-1])
        np.testing.assert_array_equal(data["x"], grid.centers())
        np.testing.assert_array_equal(data["h"], state.h()[1:-1])

    def test_uniform_state_rows_identical(self, tmp_path):
        cfg = parse_config(tiny_config_text())
        grid = make_grid(cfg)
        state = State.uniform(grid, 1.0, 0.2, 0.1)
        data = read_snapshot(write_snapshot(state, 0.5, grid, tmp_path))
        for name in ("eta", "q", "zb", "h", "u"):
            assert np.ptp(data[name]) == 0.0

    def test_cell_center_convention(self, tmp_path):
        cfg = parse_config(tiny_config_text())
        grid = make_grid(cfg)
        state = State.uniform(grid, 1.0, 0.2, 0.1)
        data = read_snapshot(write_snapshot(state, 0.5, grid, tmp_path))
        assert data["x"][0] == pytest.approx(-2.0 + 0.5 * grid.dx)
        assert np.all(np.diff(data["x"]) > 0)

    def test_filename_format(self):
        assert snapshot_filename(1.0) == "snapshot_t1.csv"
        assert snapshot_filename(0.25) == "snapshot_t0.25.csv"


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    out = tmp_path_factory.mktemp("cmp")
    cfg = dataclasses.replace(
        parse_config(tiny_config_text()),
        snapshot_times=(0.25, 0.5),
        out_dir=str(out),
    )
    rows = compare_mode(cfg)
    return out, rows


class TestCompareMode:
    def test_outputs_per_strategy(self, report):
        out, rows = report
        for sub in ("nc", "sc", "ac", "reference"):
            assert (out / sub / "snapshot_t0.5.csv").exists()
            assert (out / sub / "diagnostics.csv").exists()
        assert (out / "reflection_report.csv").exists()

    def test_rows_cover_strategies_and_times(self, report):
        _, rows = report
        assert {(r["strategy"], r["t"]) for r in rows} == {
            (s, t) for s in ("nc", "sc", "ac") for t in (0.25, 0.5)
        }

    def test_pre_contact_metrics_tiny(self, report):
        # first boundary contact near t = 2 / 3.35 ~ 0.6; at t = 0.25 the
        # front is still well inside, so only implicit precursors remain
        _, rows = report
        for row in rows:
            if row["t"] == 0.25:
                assert row["linf_h"] < 1e-5


class TestConvergenceStudy:
    def test_orders_reported(self):
        cfg = dataclasses.replace(
            parse_config(tiny_config_text()), t_final=0.3, snapshot_times=()
        )
        rows = convergence_study(cfg, [30, 60, 120])
        assert rows[0]["order"] is None
        assert rows[1]["order"] is not None
        assert rows[1]["l1_h"] < rows[0]["l1_h"]

    def test_requires_doubling(self):
        cfg = parse_config(tiny_config_text())
        with pytest.raises(ConfigError):
            convergence_study(cfg, [30, 90])


class TestMain:
    def test_run_command(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.txt"
        cfg_path.write_text(tiny_config_text() + f"out_dir={tmp_path / 'out'}\n")
        assert main(["run", "--config", str(cfg_path)]) == 0
        assert (tmp_path / "out" / "snapshot_t0.5.csv").exists()
        assert (tmp_path / "out" / "diagnostics.csv").exists()
        assert "max MCFL" in capsys.readouterr().out

    def test_flag_overrides_file(self, tmp_path):
        cfg_path = tmp_path / "cfg.txt"
        cfg_path.write_text(tiny_config_text())
        out = tmp_path / "flagged"
        assert main([
            "run", "--config", str(cfg_path), "--bc", "sc",
            "--t-final", "0.25", "--out", str(out),
        ]) == 0
        assert (out / "snapshot_t0.25.csv").exists()
        assert not (out / "snapshot_t0.5.csv").exists()

    def test_bad_config_exit_code(self, tmp_path, capsys):
        cfg_path = tmp_path / "bad.txt"
        cfg_path.write_text("grav=1\n")
        assert main(["run", "--config", str(cfg_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_convergence_command(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.txt"
        cfg_path.write_text(
            tiny_config_text() + f"out_dir={tmp_path / 'conv'}\n"
        )
        assert main([
            "convergence", "--config", str(cfg_path), "--levels", "2",
            "--base-n", "30",
        ]) == 0
        assert (tmp_path / "conv" / "convergence.csv").exists()
        assert "order" in capsys.readouterr().out


class TestDiagnosticsFile:
    def test_header_and_rows(self, tmp_path):
        cfg = dataclasses.replace(
            parse_config(tiny_config_text()), out_dir=str(tmp_path)
        )
        result = run_and_write(cfg)
        lines = (tmp_path / "diagnostics.csv").read_text().splitlines()
        assert lines[0] == "t,dt,mcfl,lambda_max,total_eta,total_zb,max_abs_u,min_h"
        assert len(lines) == len(result.diagnostics) + 1
