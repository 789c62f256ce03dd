"""CLI contract tests: config handling, CSV formats and round-trips, exit
codes, determinism of emitted artifacts, and the check suite's negative
control."""

import subprocess
import sys

import numpy as np
import pytest

from telefid.cli import (ConfigError, PROFILE_HEADER, SWEEP_HEADER, fmt12,
                         load_config, main, run_checks, _read_csv)

RUN = [sys.executable, "-m", "telefid"]


def run_cli(*args, cwd=None):
    return subprocess.run(RUN + list(args), capture_output=True, text=True,
                          cwd=cwd)


@pytest.fixture(scope="module")
def light_args():
    """Coarse-but-valid numeric settings to keep subprocess runs quick."""
    return ["--set", "quad.radial_order=16", "--set", "quad.angular_order=8",
            "--set", "quad.panels=2", "--set", "quad.rel_tol=1e-7"]


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory, light_args):
    out = tmp_path_factory.mktemp("cli") / "sweep.csv"
    res = run_cli("sweep", "--out", str(out), "--quiet",
                  "--set", "grid.g=1.2,1.6", "--set", "grid.m_c=1.8,3.0",
                  *light_args)
    assert res.returncode == 0, res.stderr
    return out


class TestFmt12:
    @pytest.mark.parametrize("x,expect", [
        (0.78125, "0.781250000000"),
        (0.0, "0.000000000000"),
        (1.0, "1.00000000000"),
        (1e-98, "1.00000000000e-98"),
        (-21.2265051787, "-21.2265051787"),
        (None, ""),
    ])
    def test_known_values(self, x, expect):
        assert fmt12(x) == expect

    def test_twelve_significant_digits(self):
        s = fmt12(2.0 / 3.0)
        assert len(s.replace("0.", "")) == 12

    def test_idempotent_under_roundtrip(self):
        rng = np.random.default_rng(3)
        vals = np.concatenate([rng.uniform(-1e3, 1e3, 200),
                               10.0 ** rng.uniform(-120, 18, 200)
                               * rng.choice([-1, 1], 200)])
        for x in vals:
            s = fmt12(float(x))
            assert fmt12(float(s)) == s


class TestConfig:
    def test_defaults_are_reference_parameters(self):
        rc = load_config(None)
        assert rc.params.V_n == 0.5 and rc.params.V_eps == 0.1
        assert rc.params.kappa == 0.6 and rc.prior.sigma == 2.0
        assert rc["lambda"] == 3.0

    def test_file_then_flags_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("params.V_n = 0.7\nlambda = 2\n# comment\n")
        rc = load_config(str(cfg), overrides=["params.V_n=0.9"], lam=5.0)
        assert rc.params.V_n == 0.9
        assert rc["lambda"] == 5.0

    def test_key_path_in_errors(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("prior.sigma = -2\n")
        with pytest.raises(ConfigError, match=r"prior\.sigma"):
            load_config(str(cfg))
        with pytest.raises(ConfigError, match="unknown key"):
            load_config(None, overrides=["no.such=1"])

    def test_malformed_line_reports_location(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("params.V_n 0.5\n")
        with pytest.raises(ConfigError, match="bad.cfg:1"):
            load_config(str(cfg))


class TestProfileCommand:
    def test_accept_all_cells(self, tmp_path, light_args):
        out = tmp_path / "aa.csv"
        res = run_cli("profile", "--out", str(out), "--quiet",
                      "--set", "filter.variant=accept_all",
                      "--set", "profile.n_points=5", *light_args)
        assert res.returncode == 0, res.stderr
        rows = _read_csv(str(out), PROFILE_HEADER)
        assert len(rows) == 5
        content = out.read_text()
        assert content.count("0.781250000000") == 5
        for row in rows:
            assert row["tail_bound"] is None  # empty for the control

    def test_tail_bound_column_and_inequality(self, tmp_path, light_args):
        out = tmp_path / "prof.csv"
        res = run_cli("profile", "--out", str(out), "--quiet",
                      "--set", "profile.n_points=41", *light_args)
        assert res.returncode == 0, res.stderr
        rows = _read_csv(str(out), PROFILE_HEADER)
        seen_tail = 0
        for row in rows:
            if row["r"] < 3.0:
                assert row["tail_bound"] is None
            else:
                seen_tail += 1
                assert row["f_succ"] <= row["tail_bound"] + 1e-8
        assert seen_tail > 0

    def test_row_failure_annotated_in_flag_column(self, tmp_path,
                                                  monkeypatch):
        """A quadrature failure at one radius lands in that row's flag cell
        and flips the exit status; the other rows survive."""
        import telefid.cli as cli
        import telefid.profile as profile
        from telefid.quadrature import QuadratureError

        real = profile.profile_point

        def flaky(r, proto, cfg):
            if abs(r - 3.0) < 1e-9:
                raise QuadratureError("synthetic failure")
            return real(r, proto, cfg)

        monkeypatch.setattr(profile, "profile_point", flaky)
        monkeypatch.setattr(cli, "profile_point", flaky)
        out = tmp_path / "flaky.csv"
        rc = cli.load_config(None, overrides=["profile.n_points=5",
                                              "profile.r_max=6"])
        assert cli.cmd_profile(rc, str(out), quiet=True) == 1
        lines = out.read_text().splitlines()
        bad = [ln for ln in lines if "synthetic failure" in ln]
        assert len(bad) == 1 and bad[0].startswith("3.00000000000,,,,")
        assert sum(1 for ln in lines[1:] if ln.endswith(",")) == 4

    def test_empty_grid_is_usage_error(self, tmp_path):
        out = tmp_path / "x.csv"
        res = run_cli("profile", "--out", str(out), "--set",
                      "profile.n_points=0")
        assert res.returncode == 2
        assert not out.exists()

    def test_lf_line_endings(self, tmp_path, light_args):
        out = tmp_path / "lf.csv"
        run_cli("profile", "--out", str(out), "--quiet",
                "--set", "profile.n_points=5", *light_args)
        raw = out.read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")


class TestMomentsCommand:
    def test_control_report(self, tmp_path, light_args):
        out = tmp_path / "m.csv"
        res = run_cli("moments", "--out", str(out), "--quiet",
                      "--set", "filter.variant=accept_all", *light_args)
        assert res.returncode == 0, res.stderr
        kv = dict(line.split(",") for line in
                  out.read_text().strip().splitlines()[1:])
        assert kv["F"] == "0.781250000000"
        assert kv["D"] == "0.000000000000"
        assert kv["P_succ"] == "1.00000000000"
        assert kv["cantelli_guarantee"] == "0.900000000000"
        for key in ("S1", "S2", "I_sel", "I_alpha_S"):
            assert float(kv[key]) == 0.0

    def test_stdout_report(self, light_args):
        res = run_cli("moments", "--set", "filter.variant=accept_all",
                      *light_args)
        assert res.returncode == 0
        assert "J_lambda = 0.781250000000" in res.stdout


class TestSweepAndFrontier:
    def test_sweep_csv_contract(self, sweep_csv):
        rows = _read_csv(str(sweep_csv), SWEEP_HEADER)
        assert len(rows) == 5  # control + 2x2 grid
        control = rows[0]
        assert control["g"] is None and control["m_c"] is None
        assert control["D"] == 0.0 and control["P_succ"] == 1.0
        keys = [(r["g"], r["m_c"]) for r in rows[1:]]
        assert keys == [(1.2, 1.8), (1.2, 3.0), (1.6, 1.8), (1.6, 3.0)]

    def test_sweep_rerun_byte_identical(self, sweep_csv, tmp_path,
                                        light_args):
        out2 = tmp_path / "sweep2.csv"
        res = run_cli("sweep", "--out", str(out2), "--quiet",
                      "--set", "grid.g=1.2,1.6", "--set", "grid.m_c=1.8,3.0",
                      *light_args)
        assert res.returncode == 0
        assert out2.read_bytes() == sweep_csv.read_bytes()

    def test_emit_parse_emit_is_identity(self, sweep_csv, tmp_path):
        rows = _read_csv(str(sweep_csv), SWEEP_HEADER)
        lines = [",".join(SWEEP_HEADER)]
        for row in rows:
            lines.append(",".join(
                fmt12(row[k]) if k != "flag" else row[k]
                for k in SWEEP_HEADER))
        rebuilt = "\n".join(lines) + "\n"
        assert rebuilt == sweep_csv.read_text()

    def test_frontier_report(self, sweep_csv):
        res = run_cli("frontier", str(sweep_csv), "--d-max", "0",
                      "--p-min", "1")
        assert res.returncode == 0, res.stderr
        assert "pareto frontier" in res.stdout
        assert "constrained best" in res.stdout and "control" in res.stdout
        assert "objective best" in res.stdout

    def test_single_row_file_is_its_own_best(self, sweep_csv, tmp_path):
        text = sweep_csv.read_text().splitlines()
        single = tmp_path / "single.csv"
        single.write_text("\n".join([text[0], text[2]]) + "\n")
        res = run_cli("frontier", str(single))
        assert res.returncode == 0
        assert res.stdout.count("g=1.20000000000 m_c=1.80000000000") == 3

    def test_frontier_infeasible(self, sweep_csv, tmp_path):
        rows = _read_csv(str(sweep_csv), SWEEP_HEADER)
        trimmed = tmp_path / "nocontrol.csv"
        text = sweep_csv.read_text().splitlines()
        trimmed.write_text("\n".join([text[0]] + text[2:]) + "\n")
        res = run_cli("frontier", str(trimmed), "--d-max", "0", "--p-min", "1")
        assert res.returncode == 0
        assert "infeasible" in res.stdout

    def test_malformed_csv_rejected_with_location(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(",".join(SWEEP_HEADER) + "\n1.2,3.0\n")
        res = run_cli("frontier", str(bad))
        assert res.returncode == 2
        assert "bad.csv:2" in res.stderr

    def test_header_mismatch_rejected(self, tmp_path):
        bad = tmp_path / "hdr.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        res = run_cli("frontier", str(bad))
        assert res.returncode == 2
        assert "header mismatch" in res.stderr


class TestPlotCommand:
    @pytest.mark.parametrize("mode", ["fd_curves", "fd_density"])
    def test_modes_render_and_are_deterministic(self, sweep_csv, tmp_path,
                                                mode):
        a = tmp_path / f"{mode}_a.svg"
        b = tmp_path / f"{mode}_b.svg"
        assert run_cli("plot", str(sweep_csv), "--mode", mode, "--out",
                       str(a), "--quiet").returncode == 0
        assert run_cli("plot", str(sweep_csv), "--mode", mode, "--out",
                       str(b), "--quiet").returncode == 0
        data = a.read_bytes()
        assert data == b.read_bytes()
        assert data.startswith(b"<?xml")
        assert b"</svg>" in data
        assert b"http://www.w3.org/2000/svg" in data

    def test_profile_mode_control_is_flat_line(self, tmp_path, light_args):
        prof = tmp_path / "aa.csv"
        run_cli("profile", "--out", str(prof), "--quiet",
                "--set", "filter.variant=accept_all",
                "--set", "profile.n_points=9", *light_args)
        svg = tmp_path / "aa.svg"
        assert run_cli("plot", str(prof), "--mode", "profile", "--out",
                       str(svg)).returncode == 0
        text = svg.read_text()
        start = text.index('<polyline points="') + len('<polyline points="')
        pts = text[start:text.index('"', start)].split()
        ys = {p.split(",")[1] for p in pts}
        assert len(ys) == 1  # constant fidelity renders at one height

    def test_wrong_header_for_mode(self, sweep_csv, tmp_path):
        res = run_cli("plot", str(sweep_csv), "--mode", "profile", "--out",
                      str(tmp_path / "x.svg"))
        assert res.returncode == 2


class TestCheckCommand:
    def test_default_suite_passes_end_to_end(self):
        res = run_cli("check", "--seed", "20260811",
                      "--set", "oracle.n_outer=100",
                      "--set", "oracle.n_inner=50000",
                      "--set", "check.n_samples=2000")
        assert res.returncode == 0, res.stdout + res.stderr
        assert res.stdout.count("PASS") == 8
        assert "FAIL" not in res.stdout

    def test_negative_control_fails_flatness(self):
        """Corrupting the expected baseline must break the flatness check."""
        rc = load_config(None, overrides=[
            "quad.radial_order=16", "quad.angular_order=8", "quad.panels=2",
            "quad.rel_tol=1e-7", "oracle.n_outer=100", "oracle.n_inner=2000",
            "check.n_samples=1000"])
        results = run_checks(rc, baseline_shift=0.01)
        by_name = {r.name: r for r in results}
        assert not by_name["flatness"].passed
        assert by_name["flatness"].margin == pytest.approx(0.01, rel=1e-4)

    def test_exit_code_contract(self, monkeypatch, capsys):
        """main() maps check failures to exit code 3."""
        import telefid.cli as cli

        def fake_checks(rc, baseline_shift=0.0):
            return [cli.CheckResult("stub", False, 1.0, "forced failure")]

        monkeypatch.setattr(cli, "run_checks", fake_checks)
        assert main(["check"]) == 3
        out = capsys.readouterr()
        assert "FAIL stub" in out.out


class TestOracleCommand:
    def test_point_estimate(self, tmp_path):
        out = tmp_path / "pt.csv"
        res = run_cli("oracle", "--r", "0", "--seed", "20260811",
                      "--set", "oracle.n_inner=100000",
                      "--set", "oracle.n_outer=100", "--out", str(out),
                      "--quiet")
        assert res.returncode == 0, res.stderr
        kv = dict(line.split(",") for line in
                  out.read_text().strip().splitlines()[1:])
        assert abs(float(kv["f_hat"]) - 0.761928725560437) \
            < 3 * float(kv["f_err"])

    def test_ensemble_smoke(self):
        res = run_cli("oracle", "--seed", "3",
                      "--set", "oracle.n_outer=150",
                      "--set", "oracle.n_inner=1000")
        assert res.returncode == 0, res.stderr
        assert "se_F" in res.stdout
