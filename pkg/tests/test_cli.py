"""CLI subcommands: exit codes, file layout, determinism."""

import filecmp
import json
import os

import pytest

from cqm.cli import GRID_N_ENV, main


def run(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out


def load_summary(out, command):
    with open(out / f"{command}_summary.json") as fh:
        return json.load(fh)


def all_pass(summary):
    return all(entry["pass"] for entry in summary["checks"].values())


class TestQuadrature:
    def test_run(self, tmp_path):
        code, out = run(tmp_path, "q", [
            "quadrature", "--state", "sho:1",
            "--theta", "pi/6,pi/4", "--grid-n", "512"])
        assert code == 0
        s = load_summary(out, "quadrature")
        assert all_pass(s)
        assert (out / "tomogram_0.csv").exists()
        assert (out / "tomogram_1.csv").exists()
        assert s["state"] == "sho:n=1"

    def test_value_at_zero_reported(self, tmp_path):
        code, out = run(tmp_path, "q", [
            "quadrature", "--state", "sho:1", "--theta", "pi/3",
            "--grid-n", "512"])
        assert code == 0
        s = load_summary(out, "quadrature")
        assert s["tomograms"][0]["value_at_zero"] < 1e-8


class TestDensity1d:
    def test_point_mass_angle(self, tmp_path):
        code, out = run(tmp_path, "d", [
            "density1d", "--state", "sho:1", "--theta", "0,3pi/4"])
        assert code == 0
        s = load_summary(out, "density1d")
        angles = s["angles"]
        assert angles[0]["point_mass"] is False
        assert angles[1]["point_mass"] is True
        assert angles[1]["tv"] > 0.99
        assert (out / "curve_samples.csv").exists()
        assert (out / "marginal_theta_1.csv").exists()

    def test_degenerate_state_exit(self, tmp_path):
        code, _ = run(tmp_path, "d", [
            "density1d", "--theta", "0",
            "--state", "super:gauss:-6,0,0.4*1;gauss:6,0,0.4*1"])
        assert code == 7


class TestDensity2d:
    def test_run(self, tmp_path):
        code, out = run(tmp_path, "d2", [
            "density2d", "--state", "prod2d:sho:1,sho:0",
            "--theta", "pi/6", "--grid-n", "192"])
        assert code == 0
        s = load_summary(out, "density2d")
        assert all_pass(s)
        for name in ("position", "mixed", "momentum"):
            assert (out / f"{name}_marginal_0.csv").exists()

    def test_needs_two_particle_state(self, tmp_path):
        code, _ = run(tmp_path, "d2", [
            "density2d", "--state", "sho:1", "--grid-n", "64"])
        assert code == 2

    def test_rejects_two_particle_state_elsewhere(self, tmp_path):
        code, _ = run(tmp_path, "q", [
            "quadrature", "--state", "prod2d:sho:0,sho:0",
            "--grid-n", "64"])
        assert code == 2


class TestDbb:
    def test_run(self, tmp_path):
        code, out = run(tmp_path, "b", [
            "dbb", "--state", "gauss:1,0,0.7071067811865476",
            "--t-max", "pi/2", "--n-traj", "4", "--n-frames", "9"])
        assert code == 0
        s = load_summary(out, "dbb")
        assert s["checks"]["position_marginal_l1"]["pass"]
        assert s["momentum_mismatch"]["mismatch"] is True
        with open(out / "trajectories.csv") as fh:
            header = fh.readline().strip().split(",")
        assert header == ["t", "x0", "x1", "x2", "x3"]

    def test_mismatch_reported(self, tmp_path):
        code, out = run(tmp_path, "b", [
            "dbb", "--state", "sho:1", "--t-max", "pi/4",
            "--n-traj", "4", "--n-frames", "5"])
        assert code == 0
        s = load_summary(out, "dbb")
        assert s["momentum_mismatch"]["mismatch"] is True
        assert s["momentum_mismatch"]["tv"] > 0.9


class TestKs:
    def test_run(self, tmp_path):
        code, out = run(tmp_path, "k", ["ks"])
        assert code == 0
        s = load_summary(out, "ks")
        assert all_pass(s)
        assert s["prefix_counts"] == [512, 256, 128, 64,
                                                 32, 16, 0]
        assert len(s["deletion_counts"]) == 6


class TestWigner:
    def test_run(self, tmp_path):
        code, out = run(tmp_path, "w", ["wigner", "--state", "sho:1"])
        assert code == 0
        s = load_summary(out, "wigner")
        assert all_pass(s)
        assert abs(s["min_value"] + 1.0 / 3.141592653589793) \
            < 1e-3
        assert s["min_at"] == [0.0, 0.0]
        assert (out / "wigner_grid.csv").exists()


class TestErrors:
    def test_parse_error(self, tmp_path):
        code, _ = run(tmp_path, "e", [
            "quadrature", "--state", "blah:3", "--grid-n", "64"])
        assert code == 2

    def test_bad_angle(self, tmp_path):
        code, _ = run(tmp_path, "e", [
            "quadrature", "--state", "sho:1", "--theta", "bogus",
            "--grid-n", "64"])
        assert code == 2

    def test_bad_grid(self, tmp_path):
        code, _ = run(tmp_path, "e", [
            "quadrature", "--state", "sho:1", "--grid-n", "4"])
        assert code == 2

    def test_narrow_grid(self, tmp_path):
        code, _ = run(tmp_path, "e", [
            "quadrature", "--state", "gauss:9,0,0.5"])
        assert code == 3

    def test_zero_norm(self, tmp_path):
        code, _ = run(tmp_path, "e", [
            "quadrature", "--state", "super:sho:0*1;sho:0*-1"])
        assert code == 5


class TestConfig:
    def test_env_grid_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv(GRID_N_ENV, "512")
        code, out = run(tmp_path, "c", [
            "quadrature", "--state", "sho:1", "--theta", "pi/6"])
        assert code == 0
        assert load_summary(out, "quadrature")["config"]["grid_n"] == 512

    def test_env_overridden_by_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv(GRID_N_ENV, "512")
        code, out = run(tmp_path, "c", [
            "quadrature", "--state", "sho:1", "--theta", "pi/6",
            "--grid-n", "256"])
        assert code == 0
        assert load_summary(out, "quadrature")["config"]["grid_n"] == 256

    def test_bad_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(GRID_N_ENV, "many")
        code, _ = run(tmp_path, "c", [
            "quadrature", "--state", "sho:1"])
        assert code == 2

    def test_json_tables(self, tmp_path):
        code, out = run(tmp_path, "c", [
            "quadrature", "--state", "sho:1", "--theta", "pi/6",
            "--grid-n", "256", "--format", "json"])
        assert code == 0
        with open(out / "tomogram_0.json") as fh:
            table = json.load(fh)
        assert table["columns"][0] == "X"
        assert len(table["rows"]) == 256


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["quadrature", "--state", "super:sho:0*1;sho:1*1i",
         "--theta", "pi/6,pi/3", "--grid-n", "512"],
        ["ks"],
        ["density1d", "--state", "sho:1", "--theta", "pi/4",
         "--grid-n", "512"],
    ])
    def test_repeat_runs_byte_identical(self, tmp_path, argv):
        code_a, out_a = run(tmp_path, "a", list(argv))
        code_b, out_b = run(tmp_path, "b", list(argv))
        assert code_a == code_b
        names = sorted(os.listdir(out_a))
        assert names == sorted(os.listdir(out_b))
        for name in names:
            assert filecmp.cmp(out_a / name, out_b / name,
                               shallow=False), name
