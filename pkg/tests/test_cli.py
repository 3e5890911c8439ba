import json

import pytest

from simrt import (Policy, SimConfig, builtin_profiles, convolution_batch,
                   dump_scenario, load_scenario, simulate)
from simrt.cli import main


def run_cli(capsys, *argv):
    capsys.readouterr()  # discard anything printed during setup
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def conv_scenario(tmp_path):
    path = tmp_path / "conv.json"
    path.write_text(dump_scenario(convolution_batch(40)))
    return str(path)


class TestRun:
    def test_table_has_one_row_per_policy(self, capsys, conv_scenario):
        code, out, _ = run_cli(capsys, "run", "-p", "sd820", "-s", conv_scenario,
                               "--policy", "throughput,latency,energy")
        assert code == 0
        lines = [l for l in out.splitlines() if l.strip()]
        assert "seed: 0" in lines[0]
        body = lines[3:]
        assert len(body) == 3
        assert [row.split()[0] for row in body] == ["throughput", "latency", "energy"]

    def test_json_round_trips(self, capsys, conv_scenario):
        code, out, _ = run_cli(capsys, "run", "-p", "sd820", "-s", conv_scenario,
                               "--policy", "latency", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["seed"] == 0
        metrics, _ = simulate(load_scenario(open(conv_scenario).read()),
                              builtin_profiles()["sd820"], Policy.latency(),
                              SimConfig())
        assert doc["results"][0]["metrics"] == metrics.to_dict()

    def test_missing_profile_exits_2(self, capsys, conv_scenario):
        code, _, err = run_cli(capsys, "run", "-p", "no-such-profile",
                               "-s", conv_scenario)
        assert code == 2
        assert "no-such-profile" in err

    def test_malformed_scenario_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"tasks": [{"id": 1}]}')
        code, _, err = run_cli(capsys, "run", "-p", "sd820", "-s", str(bad))
        assert code == 2
        assert "workload" in err

    def test_unresolvable_missing_cost_exits_2(self, capsys, tmp_path):
        scenario = tmp_path / "s.json"
        scenario.write_text('{"tasks":[{"id":1,"workload":"unknown_thing"}]}')
        code, _, err = run_cli(capsys, "run", "-p", "sd820", "-s", str(scenario))
        assert code == 2
        assert "unknown_thing" in err

    def test_profile_dir_search_path(self, capsys, tmp_path, monkeypatch, conv_scenario):
        from simrt.builtins import BUILTIN_PROFILE_TEXTS
        (tmp_path / "mine.json").write_text(BUILTIN_PROFILE_TEXTS["sd820"])
        monkeypatch.setenv("SIMRT_PROFILE_DIR", str(tmp_path))
        code, out, _ = run_cli(capsys, "run", "-p", "mine", "-s", conv_scenario)
        assert code == 0


class TestValidate:
    def test_sd820_matrix(self, capsys):
        code, out, _ = run_cli(capsys, "validate", "sd820")
        assert code == 0
        rows = {line.split()[0]: line.split()[1:]
                for line in out.splitlines()
                if line and line.split()[0] in (
                    "gaussian_blur", "convolution", "sobel", "undistort",
                    "feature_detect")}
        assert rows["gaussian_blur"] == ["CPU", "mGPU"]
        assert rows["convolution"] == ["mGPU", "mGPU"]
        assert rows["sobel"] == ["mGPU", "DSP"]
        assert rows["undistort"] == ["mGPU", "mGPU"]
        assert rows["feature_detect"] == ["DSP", "DSP"]
        assert out.strip().endswith("ok")

    def test_malformed_profile_exits_2(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "validate", str(path))
        assert code == 2
        assert "error" in err


class TestTrace:
    def test_trace_csv_matches_library_output(self, capsys, tmp_path, conv_scenario):
        out_path = tmp_path / "trace.csv"
        code, _, _ = run_cli(capsys, "trace", "-p", "sd820", "-s", conv_scenario,
                             "--policy", "latency", "--out", str(out_path))
        assert code == 0
        scenario = load_scenario(open(conv_scenario).read())
        _, trace = simulate(scenario, builtin_profiles()["sd820"],
                            Policy.latency(), SimConfig())
        assert out_path.read_text() == trace.to_csv()

    def test_breakdown_shows_setup_dominating_per_offload(self, capsys, tmp_path,
                                                          conv_scenario):
        out_path = tmp_path / "trace.csv"
        code, out, _ = run_cli(capsys, "trace", "-p", "sd820", "-s", conv_scenario,
                               "--policy", "throughput",
                               "--setup-mode", "per_offload",
                               "--out", str(out_path), "--breakdown")
        assert code == 0
        for line in out.splitlines():
            cells = line.split()
            if cells and cells[0] == "mGPU":
                setup_us, kernel_us = int(cells[1]), int(cells[3])
                assert setup_us > kernel_us
                break
        else:
            pytest.fail("no mGPU row in breakdown output")

    def test_breakdown_amortized_setup_is_zero(self, capsys, tmp_path, conv_scenario):
        out_path = tmp_path / "trace.csv"
        code, out, _ = run_cli(capsys, "trace", "-p", "sd820", "-s", conv_scenario,
                               "--policy", "throughput", "--out", str(out_path),
                               "--breakdown")
        assert code == 0
        for line in out.splitlines():
            cells = line.split()
            if cells and cells[0] in ("CPU", "mGPU", "DSP"):
                assert int(cells[1]) == 0

    def test_empty_scenario_header_only(self, capsys, tmp_path):
        scenario = tmp_path / "empty.json"
        scenario.write_text('{"tasks": []}')
        out_path = tmp_path / "trace.csv"
        code, _, _ = run_cli(capsys, "trace", "-p", "sd820", "-s", str(scenario),
                             "--out", str(out_path))
        assert code == 0
        assert out_path.read_text() == "time_us,task_id,workload,unit,phase\n"


class TestGen:
    def test_gen_robot_writes_loadable_scenario(self, capsys, tmp_path):
        path = tmp_path / "robot.json"
        code, out, _ = run_cli(capsys, "gen", "--scenario", "robot",
                               "--duration", "2", "--camera-fps", "25",
                               "--imu-hz", "200", "--dl-fps", "3",
                               "--out", str(path))
        assert code == 0
        g = load_scenario(path.read_text())
        assert sum(1 for t in g if t.workload == "capture") == 50

    def test_gen_inference_variants(self, capsys, tmp_path):
        path = tmp_path / "inf.json"
        code, _, _ = run_cli(capsys, "gen", "--scenario", "inference",
                             "--variant", "cloud", "--out", str(path))
        assert code == 0
        g = load_scenario(path.read_text())
        assert not g.task(1).tags.real_time

    def test_gen_bad_rate_exits_2(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "gen", "--scenario", "robot",
                             "--duration", "0", "--out", str(tmp_path / "x.json"))
        assert code == 2
