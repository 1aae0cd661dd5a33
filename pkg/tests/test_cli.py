import math

import numpy as np
import pytest
import yaml

from rmodesim.cli import main
from rmodesim.ingest import MEASUREMENT_COLUMNS

from helpers import destination_point


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_fit_stdout(out):
    jitter = {}
    c_m = None
    for line in out.splitlines():
        if line.startswith("C = "):
            c_m = float(line.split()[2])
        elif ": J = " in line:
            sid, rest = line.split(": J = ")
            jitter[sid] = float(rest.split()[0])
    return jitter, c_m


class TestFit:
    def test_noiseless_round_trip(self, config_factory, tmp_path, capsys):
        def mutate(cfg):
            cfg["stations"][2]["jitter_m"] = 1.41

        config = config_factory(mutate=mutate)
        code, out, err = run(
            capsys, "synth", "--config", str(config), "--out-dir", str(tmp_path / "logs"),
            "--noise", "none", "--windows", "60",
        )
        assert code == 0, err
        logs = sorted((tmp_path / "logs").glob("*.csv"))
        assert len(logs) == 3

        code, out, err = run(
            capsys, "fit", "--config", str(config), *[str(p) for p in logs]
        )
        assert code == 0, err
        jitter, c_m = parse_fit_stdout(out)
        assert c_m == pytest.approx(22.15, rel=1e-6)
        assert jitter["s2"] == pytest.approx(1.41, rel=1e-6)
        assert jitter["s0"] == 0.0 and jitter["s1"] == 0.0

        params = yaml.safe_load((tmp_path / "fitted_params.yaml").read_text())
        assert params["c_m"] == pytest.approx(22.15, rel=1e-6)
        report = (tmp_path / "fit_report.csv").read_text().splitlines()
        assert report[0] == "station_id,jitter_m,n_samples,rss_contribution"
        assert report[-1].startswith("C,")

    def test_noisy_round_trip(self, config_factory, tmp_path, capsys):
        # chi-squared scatter of a 400-record window is ~7% per sample;
        # at 600 windows/station the unweighted fit lands C within 5%
        # and the 1.41 m jitter within 10% (measured worst case over 10
        # seeds: 2.9% and 5.0%)
        def mutate(cfg):
            cfg["stations"][2]["jitter_m"] = 1.41
            cfg["fit"]["window_len"] = 400

        config = config_factory(mutate=mutate)
        code, _, err = run(
            capsys, "synth", "--config", str(config), "--out-dir", str(tmp_path / "logs"),
            "--noise", "gauss", "--windows", "600", "--snr-spacing", "linear", "--seed", "7",
        )
        assert code == 0, err
        logs = sorted((tmp_path / "logs").glob("*.csv"))
        code, out, err = run(capsys, "fit", "--config", str(config), *[str(p) for p in logs])
        assert code == 0, err
        jitter, c_m = parse_fit_stdout(out)
        assert c_m == pytest.approx(22.15, rel=0.05)
        assert jitter["s2"] == pytest.approx(1.41, rel=0.10)
        assert jitter["s0"] < 1.0 and jitter["s1"] < 1.0

    def test_missing_file_exit_2_names_path(self, config_factory, capsys):
        config = config_factory()
        code, _, err = run(capsys, "fit", "--config", str(config), "/no/such/file.csv")
        assert code == 2
        assert "/no/such/file.csv" in err

    def test_empty_measurements_exit_3(self, config_factory, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text(",".join(MEASUREMENT_COLUMNS) + "\n")
        code, _, err = run(capsys, "fit", "--config", str(config_factory()), str(empty))
        assert code == 3
        assert "samples" in err

    def test_constant_snr_exit_3(self, config_factory, tmp_path, capsys):
        rows = [",".join(MEASUREMENT_COLUMNS)]
        rng = np.random.default_rng(0)
        for i in range(400):
            rows.append(f"{float(i)},s0,{rng.normal(0, 0.01)},10.0")
        log = tmp_path / "log.csv"
        log.write_text("\n".join(rows) + "\n")
        code, _, err = run(capsys, "fit", "--config", str(config_factory()), str(log))
        assert code == 3

    def test_unknown_station_exit_2(self, config_factory, tmp_path, capsys):
        rows = [",".join(MEASUREMENT_COLUMNS)]
        for i in range(200):
            rows.append(f"{float(i)},mystery,0.0,10.0")
        log = tmp_path / "log.csv"
        log.write_text("\n".join(rows) + "\n")
        code, _, err = run(capsys, "fit", "--config", str(config_factory()), str(log))
        assert code == 2
        assert "mystery" in err

    def test_malformed_row_exit_2_with_row_number(self, config_factory, tmp_path, capsys):
        log = tmp_path / "log.csv"
        log.write_text(",".join(MEASUREMENT_COLUMNS) + "\n1.0,s0,zzz,10.0\n")
        code, _, err = run(capsys, "fit", "--config", str(config_factory()), str(log))
        assert code == 2
        assert "row 2" in err

    def test_csv_format(self, config_factory, tmp_path, capsys):
        config = config_factory()
        run(capsys, "synth", "--config", str(config), "--out-dir", str(tmp_path / "logs"),
            "--noise", "none", "--windows", "40")
        logs = sorted((tmp_path / "logs").glob("*.csv"))
        code, out, _ = run(
            capsys, "fit", "--config", str(config), "--format", "csv", *[str(p) for p in logs]
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "station_id,jitter_m,n_samples,rss_contribution"
        assert lines[-1].startswith("C,")


class TestAccuracy:
    def test_point_inside_coverage(self, config_factory, capsys):
        code, out, err = run(
            capsys, "accuracy", "--config", str(config_factory()), "--lat", "36.0", "--lon", "127.0"
        )
        assert code == 0, err
        assert "usable stations: 3" in out
        acc_line = [l for l in out.splitlines() if l.startswith("accuracy_m,")]
        assert len(acc_line) == 1
        assert float(acc_line[0].split(",")[1]) > 0.0

    def test_masked_point(self, config_factory, capsys):
        def mutate(cfg):
            cfg["noise"]["level_dbuv_m"] = 150.0

        code, out, _ = run(
            capsys, "accuracy", "--config", str(config_factory(mutate=mutate)),
            "--lat", "36.0", "--lon", "127.0",
        )
        assert code == 0
        assert "masked,TooFewStations" in out

    def test_csv_format_station_rows(self, config_factory, capsys):
        code, out, _ = run(
            capsys, "accuracy", "--config", str(config_factory()),
            "--lat", "36.0", "--lon", "127.0", "--format", "csv",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "station_id,snr_db,snr_linear,sigma2_m2,azimuth_rad,usable"
        assert len(lines) == 5  # header + 3 stations + result
        for line in lines[1:4]:
            fields = line.split(",")
            assert len(fields) == 6
            assert fields[5] in ("0", "1")

    def test_latitude_out_of_range_exit_2(self, config_factory, capsys):
        code, _, err = run(
            capsys, "accuracy", "--config", str(config_factory()), "--lat", "91", "--lon", "0"
        )
        assert code == 2
        assert "latitude" in err

    def test_matches_equiangular_closed_form(self, config_factory, tmp_path, capsys):
        # stations at equal distance on bearings 0/120/240 from the query point
        entries = []
        for i, b in enumerate([0.0, 120.0, 240.0]):
            lat, lon = destination_point(36.0, 127.0, math.radians(b), 150_000.0)
            entries.append({"id": f"s{i}", "lat_deg": lat, "lon_deg": lon,
                            "power_w": 300.0, "carrier_hz": 300000.0, "jitter_m": 0.0})

        def mutate(cfg):
            cfg["stations"] = entries
            cfg["propagation"]["atten_db_per_km"] = 0.0

        code, out, _ = run(
            capsys, "accuracy", "--config", str(config_factory(mutate=mutate)),
            "--lat", "36.0", "--lon", "127.0", "--format", "csv",
        )
        assert code == 0
        lines = out.splitlines()
        snr_linear = float(lines[1].split(",")[1 + 1])
        sigma = math.sqrt(22.15 ** 2 / snr_linear)
        expected = 4.0 * sigma / math.sqrt(3.0)
        acc = float(lines[-1].split(",")[1])
        assert acc == pytest.approx(expected, rel=1e-4)


class TestCoverage:
    def test_writes_outputs_and_summary(self, config_factory, tmp_path, capsys):
        config = config_factory()
        code, out, err = run(capsys, "coverage", "--config", str(config))
        assert code == 0, err
        assert (tmp_path / "coverage.csv").exists()
        assert (tmp_path / "coverage.pgm").exists()
        assert "cells: 81" in out
        assert "unmasked: " in out

    def test_rerun_is_bitwise_identical(self, config_factory, tmp_path, capsys):
        config = config_factory()
        run(capsys, "coverage", "--config", str(config))
        first = (tmp_path / "coverage.csv").read_bytes()
        run(capsys, "coverage", "--config", str(config))
        assert (tmp_path / "coverage.csv").read_bytes() == first

    def test_thread_count_is_bitwise_identical(self, config_factory, tmp_path, capsys):
        config = config_factory()
        run(capsys, "coverage", "--config", str(config), "--threads", "1")
        serial = (tmp_path / "coverage.csv").read_bytes()
        run(capsys, "coverage", "--config", str(config), "--threads", "8")
        assert (tmp_path / "coverage.csv").read_bytes() == serial

    def test_grid_too_large_exit_4(self, config_factory, capsys):
        def mutate(cfg):
            cfg["grid"]["step_deg"] = 1e-4  # ~400M cells

        code, _, err = run(capsys, "coverage", "--config", str(config_factory(mutate=mutate)))
        assert code == 4
        assert "exceeds" in err

    def test_no_grid_section_exit_2(self, config_factory, capsys):
        def mutate(cfg):
            del cfg["grid"]

        code, _, err = run(capsys, "coverage", "--config", str(config_factory(mutate=mutate)))
        assert code == 2

    def test_config_error_exit_2(self, config_factory, capsys):
        def mutate(cfg):
            cfg["stations"][0]["id"] = cfg["stations"][1]["id"]

        code, _, err = run(capsys, "coverage", "--config", str(config_factory(mutate=mutate)))
        assert code == 2

    def test_missing_config_exit_2(self, capsys):
        code, _, err = run(capsys, "coverage", "--config", "/no/run.yaml")
        assert code == 2
        assert "/no/run.yaml" in err

    def test_halving_step_scales_cell_count(self, config_factory, tmp_path, capsys):
        config = config_factory()
        _, out_coarse, _ = run(capsys, "coverage", "--config", str(config))
        def mutate(cfg):
            cfg["grid"]["step_deg"] = 0.125
        config2 = config_factory(mutate=mutate, name="run2.yaml")
        _, out_fine, _ = run(capsys, "coverage", "--config", str(config2))
        coarse = int(out_coarse.splitlines()[0].split(": ")[1])
        fine = int(out_fine.splitlines()[0].split(": ")[1])
        assert coarse == 9 * 9 and fine == 17 * 17  # floor(2/0.25)+1 vs floor(2/0.125)+1

    def test_contour_output(self, config_factory, tmp_path, capsys):
        def mutate(cfg):
            cfg["outputs"]["contour_csv"] = "contour.csv"
            cfg["outputs"]["contour_limit_m"] = 10.0

        code, _, err = run(capsys, "coverage", "--config", str(config_factory(mutate=mutate)))
        assert code == 0, err
        lines = (tmp_path / "contour.csv").read_text().splitlines()
        assert lines[0] == "lat_deg,lon_deg"


class TestSynth:
    def test_same_seed_same_bytes(self, config_factory, tmp_path, capsys):
        config = config_factory()
        run(capsys, "synth", "--config", str(config), "--out-dir", str(tmp_path / "a"),
            "--seed", "5", "--windows", "20")
        run(capsys, "synth", "--config", str(config), "--out-dir", str(tmp_path / "b"),
            "--seed", "5", "--windows", "20")
        run(capsys, "synth", "--config", str(config), "--out-dir", str(tmp_path / "c"),
            "--seed", "6", "--windows", "20")
        a = (tmp_path / "a" / "s0.csv").read_bytes()
        b = (tmp_path / "b" / "s0.csv").read_bytes()
        c = (tmp_path / "c" / "s0.csv").read_bytes()
        assert a == b
        assert a != c

    def test_logs_parse_cleanly(self, config_factory, tmp_path, capsys):
        from rmodesim import parse_measurement_file

        config = config_factory()
        run(capsys, "synth", "--config", str(config), "--out-dir", str(tmp_path / "logs"),
            "--windows", "5")
        records = parse_measurement_file(tmp_path / "logs" / "s1.csv")
        assert len(records) == 500
        assert all(r.station_id == "s1" for r in records)
        assert all(-math.pi <= r.phase_rad < math.pi for r in records)
