# packages/second_order_regularity/tests/test_sor_runner.py

"""Command orchestration, exit codes, artifacts and the CLI entry point."""

import json
import math

import pandas as pd
import pytest

from second_order_regularity import main as main_module
from second_order_regularity.io.emit import read_json
from second_order_regularity.runner import NORM_TABLE_COLUMNS, build_path, resolve_output_dir, run
from second_order_regularity.utils.data_validation import PathConfig
from second_order_regularity.utils.errors import ConfigError

SCALAR_11 = {"A": {"kind": "scalar", "a": 1}, "B": {"kind": "scalar", "a": 1}}
SCALAR_12 = {"A": {"kind": "scalar", "a": 1}, "B": {"kind": "scalar", "a": 2}}
SMALL_SECTOR = {"radial_count": 60, "angular_count": 11}


@pytest.fixture
def out(tmp_path):
    return tmp_path / "out"


class TestCheck:
    def test_beyond_the_critical_angle_exits_2(self, write_config, out):
        cfg = write_config({"command": "check", "problem": SCALAR_11, "sector": {"phi2": 2.5, **SMALL_SECTOR}})
        assert run("check", cfg, out) == 2
        report = read_json(out / "hypothesis_report.json")
        assert report["passes"] is False
        assert report["certified_failure"] is True
        assert report["sup_H"] == math.inf

    def test_pass_writes_all_reports(self, write_config, out):
        cfg = write_config({"problem": SCALAR_11, "sector": SMALL_SECTOR})
        assert run("check", cfg, out) == 0
        for name in ("hypothesis_report.json", "symbol_bounds.csv", "sectoriality_report.json"):
            assert (out / name).is_file()
        assert read_json(out / "hypothesis_report.json")["passes"] is True

    def test_explicit_radii_without_refinement(self, write_config, out):
        sector = {"phi2": 2.5, "r_min": 0.01, "r_max": 100.0, "refine": False, **SMALL_SECTOR}
        cfg = write_config({"problem": SCALAR_11, "sector": sector})
        assert run("check", cfg, out) == 2
        report = read_json(out / "hypothesis_report.json")
        assert report["certified_failure"] is None
        assert report["grid"]["r_min"] == 0.01

    def test_gallery_problem(self, write_config, out):
        cfg = write_config({"problem": {"gallery": {"name": "strong_damping", "n": 4, "N": 16}}, "sector": SMALL_SECTOR})
        assert run("check", cfg, out) == 0

    def test_default_output_dir(self, write_config, isolated_dirs):
        cfg = write_config({"problem": SCALAR_11, "sector": SMALL_SECTOR})
        assert run("check", cfg) == 0
        assert (isolated_dirs / "data" / "check" / "hypothesis_report.json").is_file()

    def test_output_dir_relative_to_the_config(self, write_config):
        cfg = write_config({"problem": SCALAR_11, "sector": SMALL_SECTOR, "output_dir": "results"})
        assert run("check", cfg) == 0
        assert (cfg.parent / "results" / "hypothesis_report.json").is_file()


class TestSolve:
    def test_minimal_scalar_solve(self, write_config, out):
        problem = {**SCALAR_12, "N": 64, "forcing": {"kind": "smooth"}}
        cfg = write_config({"command": "solve", "problem": problem})
        assert run("solve", cfg, out) == 0
        for method in ("contour", "timestep"):
            assert (out / f"solve_report_{method}.json").is_file()
            for comp in ("u", "du", "ddu", "Bdu", "Au"):
                assert (out / f"components_{method}_{comp}.csv").is_file()
        agreement = read_json(out / "agreement.json")
        assert agreement["relative_sup_disagreement"] <= 1e-2
        assert agreement["maxreg_ratio_contour"] > 0
        frame = pd.read_csv(out / "components_contour_u.csv")
        assert list(frame.columns) == ["t", "re(u_1)", "im(u_1)"]
        assert len(frame) == 64

    def test_incompatible_forcing_exits_3(self, write_config, out):
        cfg = write_config({"problem": {**SCALAR_12, "N": 32, "forcing": {"kind": "constant", "value": [1]}}})
        assert run("solve", cfg, out) == 3
        err = read_json(out / "error.json")
        assert list(err) == ["command", "error", "message", "exit_code"]
        assert (err["command"], err["error"], err["exit_code"]) == ("solve", "CompatibilityError", 3)

    def test_low_besov_mode_accepts_the_same_data(self, write_config, out):
        cfg = write_config(
            {
                "problem": {**SCALAR_12, "N": 32, "forcing": {"kind": "constant", "value": [1]}},
                "mode": {"kind": "besov", "theta": 0.25, "p": 2, "q": 2},
            }
        )
        assert run("solve", cfg, out) == 0

    def test_initial_data_and_samples(self, write_config, out):
        samples = [[3.0]] * 16
        problem = {**SCALAR_12, "N": 16, "forcing": {"kind": "samples", "samples": samples}, "u0": [1], "u1": [1]}
        assert run("solve", write_config({"problem": problem}), out) == 0
        report = read_json(out / "solve_report_timestep.json")
        assert report["compatibility_defect"] == pytest.approx(0.0, abs=1e-12)

    def test_sample_shape_mismatch_exits_4(self, write_config, out):
        problem = {**SCALAR_12, "N": 16, "forcing": {"kind": "samples", "samples": [[1.0]] * 4}}
        assert run("solve", write_config({"problem": problem}), out) == 4

    def test_artifacts_are_deterministic(self, write_config, tmp_path):
        cfg = write_config({"problem": {**SCALAR_12, "N": 32, "forcing": {"kind": "smooth"}}})
        assert run("solve", cfg, tmp_path / "a") == 0
        assert run("solve", cfg, tmp_path / "b") == 0
        names = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
        for name in names:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


class TestSweepAndNorms:
    def test_sweep_writes_the_phase_diagram(self, write_config, out):
        sweep = {"eps": [0.5], "alpha": [1.0], "phi": [0.3, 1.5], "radial_count": 40, "angular_count": 9}
        assert run("sweep", write_config({"sweep": sweep}), out) == 0
        lines = (out / "phase_diagram.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "eps,alpha,phi,predicted,certified,certified_failure,sup_H,sup_l2H,sup_lBH,sup_AH"
        assert len(lines) == 3

    def test_norm_table(self, write_config, out):
        data = {
            "paths": [{"label": "t", "kind": "power", "k": 1, "N": 101}],
            "norms": [{"kind": "holder", "theta": 0.5}, {"kind": "sup"}, {"kind": "besov", "theta": 0.25, "p": 2, "q": 2}],
            "interp": {"theta": 0.25},
        }
        assert run("norms", write_config(data), out) == 0
        table = pd.read_csv(out / "norm_table_t.csv")
        assert list(table.columns) == NORM_TABLE_COLUMNS
        assert table["norm_kind"].tolist() == ["holder", "sup", "besov", "interp"]
        assert table.loc[0, "value"] == pytest.approx(2.0)
        assert table.loc[1, "value"] == pytest.approx(1.0)
        assert (table["N"] == 101).all()

    def test_gallery_forcing_path(self, write_config, out):
        data = {
            "problem": {"gallery": {"name": "scalar", "N": 33, "forcing": "rough", "theta": 0.3}},
            "paths": [{"label": "f", "kind": "gallery_forcing"}],
            "norms": [{"kind": "holder", "theta": 0.3, "seminorm": True}],
        }
        assert run("norms", write_config(data), out) == 0
        assert pd.read_csv(out / "norm_table_f.csv").loc[0, "value"] > 0

    def test_interp_needs_a_scalar_path(self, write_config, out):
        data = {
            "problem": {"gallery": {"name": "strong_damping", "n": 3, "N": 16}},
            "paths": [{"label": "f", "kind": "gallery_forcing"}],
            "interp": {"theta": 0.25},
        }
        assert run("norms", write_config(data), out) == 4

    @pytest.mark.parametrize(
        "kind, extra, at_half",
        [("power", {"k": 2.0}, 0.25), ("abs_power", {"k": 1.0, "c": 0.25}, 0.25), ("sine", {"freq": 0.25}, math.sqrt(0.5))],
    )
    def test_path_catalogue(self, kind, extra, at_half):
        path = build_path(PathConfig(label="p", kind=kind, N=5, **extra), None)
        assert path.values[2, 0].real == pytest.approx(at_half)

    def test_gallery_forcing_without_problem(self):
        with pytest.raises(ConfigError):
            build_path(PathConfig(label="p", kind="gallery_forcing"), None)


class TestFailures:
    def test_malformed_json_exits_4(self, tmp_path, out):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops", encoding="utf-8")
        assert run("check", bad, out) == 4
        assert read_json(out / "error.json")["error"] == "ConfigError"

    def test_missing_config_exits_4(self, tmp_path, out):
        assert run("check", tmp_path / "absent.json", out) == 4

    def test_invalid_thread_cap_exits_4(self, write_config, out, monkeypatch):
        monkeypatch.setenv("PARAB2_THREADS", "many")
        assert run("check", write_config({"problem": SCALAR_11}), out) == 4

    def test_unexpected_error_exits_1(self, write_config, out, mocker):
        mocker.patch("second_order_regularity.runner.run_check", side_effect=RuntimeError("boom"))
        logger = mocker.Mock()
        assert run("check", write_config({"problem": SCALAR_11}), out, logger=logger) == 1
        err = read_json(out / "error.json")
        assert (err["error"], err["message"], err["exit_code"]) == ("RuntimeError", "boom", 1)
        logger.exception.assert_called_once()

    def test_resolve_output_dir_prefers_the_flag(self, tmp_path):
        assert resolve_output_dir("check", tmp_path / "x", None, None) == (tmp_path / "x").resolve()


class TestMain:
    def test_exit_code_is_propagated(self, mocker):
        mocker.patch.object(main_module, "load_dotenv")
        run_mock = mocker.patch.object(main_module, "run", return_value=2)
        with pytest.raises(SystemExit) as info:
            main_module.main(["check", "--config", "c.json"])
        assert info.value.code == 2
        args, kwargs = run_mock.call_args
        assert args == ("check", "c.json", None)
        assert kwargs["verbose"] is False

    def test_usage_error_exits_4_with_json_on_stderr(self, mocker, capsys):
        mocker.patch.object(main_module, "load_dotenv")
        with pytest.raises(SystemExit) as info:
            main_module.main(["bogus"])
        assert info.value.code == 4
        err = json.loads(capsys.readouterr().err)
        assert (err["command"], err["exit_code"]) == (None, 4)

    def test_crash_in_run_exits_1(self, mocker):
        mocker.patch.object(main_module, "load_dotenv")
        mocker.patch.object(main_module, "run", side_effect=RuntimeError("boom"))
        with pytest.raises(SystemExit) as info:
            main_module.main(["sweep", "--config", "c.json"])
        assert info.value.code == 1

    def test_log_file_is_created(self, mocker, isolated_dirs):
        mocker.patch.object(main_module, "load_dotenv")
        mocker.patch.object(main_module, "run", return_value=0)
        with pytest.raises(SystemExit):
            main_module.main(["norms", "--config", "c.json", "--verbose"])
        logs = list((isolated_dirs / "logs" / "second_order_regularity").glob("run_norms_*.log"))
        assert len(logs) == 1
