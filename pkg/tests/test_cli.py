import json
from pathlib import Path

import numpy as np
import pytest

from xrdfilter.cli.protocol import (
    load_sample_spec,
    read_profile,
    read_report,
    write_profile,
    write_series,
)
from xrdfilter.errors import ConfigError, NegativeIntensity, NonUniformGrid, ParseError
from xrdfilter.cli import handler
from xrdfilter.cli.handler import CommandHandler
from xrdfilter.main import build_parser, main
from xrdfilter.models import AngularGrid, IntensityProfile, NoiseSpec, OrderScan, ScanPair
from xrdfilter.services.bench import CSV_COLUMNS
from xrdfilter.services.noise import poissonize
from xrdfilter.services.signal_model import reconstruct_real

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def profile_file(tmp_path, positive_profile):
    path = tmp_path / "profile.dat"
    write_profile(path, positive_profile, units="radians")
    return path


@pytest.fixture
def spec_file(tmp_path, small_sample_spec):
    path = tmp_path / "sample.json"
    path.write_text(small_sample_spec.model_dump_json(), encoding="utf-8")
    return path


def test_read_two_rows_in_degrees(tmp_path):
    path = tmp_path / "two.dat"
    path.write_text("# header\n10 5\n11 7\n", encoding="utf-8")
    profile = read_profile(path, "degrees")
    assert profile.grid.n == 2
    assert profile.grid.theta0 == pytest.approx(np.deg2rad(10.0))
    assert profile.grid.dtheta == pytest.approx(np.deg2rad(1.0))
    np.testing.assert_array_equal(profile.values, [5.0, 7.0])
    assert profile.sigma is None


def test_three_columns_fill_sigma(tmp_path):
    path = tmp_path / "three.dat"
    path.write_text("0.1 5 2\n0.2 7 3\n0.3 9 3\n", encoding="utf-8")
    profile = read_profile(path, "radians")
    np.testing.assert_array_equal(profile.sigma, [2.0, 3.0, 3.0])


def test_jittered_angles_rejected(tmp_path):
    path = tmp_path / "jitter.dat"
    path.write_text("0.1 5\n0.2 5\n0.3001 5\n0.4 5\n", encoding="utf-8")
    with pytest.raises(NonUniformGrid):
        read_profile(path, "radians")


def test_parse_errors_carry_line(tmp_path):
    path = tmp_path / "bad.dat"
    path.write_text("# ok\n0.1 5\n0.2 five\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        read_profile(path, "radians")
    assert info.value.line == 3
    path.write_text("0.1 5 1 1\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_profile(path, "radians")


def test_negative_intensity_rejected(tmp_path):
    path = tmp_path / "neg.dat"
    path.write_text("0.1 5\n0.2 -1\n", encoding="utf-8")
    with pytest.raises(NegativeIntensity):
        read_profile(path, "radians")


@pytest.mark.parametrize("units", ["degrees", "radians"])
def test_profile_round_trip(tmp_path, positive_profile, units):
    noisy = positive_profile.with_values(positive_profile.values, sigma=np.sqrt(positive_profile.values))
    path = tmp_path / f"round.{units}"
    write_profile(path, noisy, units=units)
    back = read_profile(path, units)
    assert back.grid == noisy.grid
    np.testing.assert_array_equal(back.values, noisy.values)
    np.testing.assert_array_equal(back.sigma, noisy.sigma)


def test_series_format(tmp_path):
    path = tmp_path / "series.dat"
    write_series(path, [[1.0, 2.0], [0.1, 0.25]], ["two columns"])
    assert path.read_text(encoding="utf-8") == "# two columns\n1 0.10000000000000001\n2 0.25\n"


def test_bad_config_is_config_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"structures": []}', encoding="utf-8")
    with pytest.raises(ConfigError):
        load_sample_spec(path)


def test_shipped_config_loads():
    spec = load_sample_spec(CONFIGS / "mixture_3nm.json")
    assert spec.wavelength == 0.15418
    assert spec.grid == AngularGrid(theta0=0.3, dtheta=0.00024, n=500)


def test_synth_is_deterministic(tmp_path, spec_file):
    first, second = tmp_path / "a.dat", tmp_path / "b.dat"
    assert main(["synth", "--config", str(spec_file), "--out", str(first)]) == 0
    assert main(["synth", "--config", str(spec_file), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert np.all(read_profile(first).values > 0)


def test_noise_command(tmp_path, profile_file):
    out_a, out_b = tmp_path / "na.dat", tmp_path / "nb.dat"
    args = ["noise", "--in", str(profile_file), "--units", "radians", "--F", "10", "--seed", "5"]
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    noisy = read_profile(out_a, "radians")
    assert noisy.sigma is not None


def test_filter_with_fixed_order(tmp_path, profile_file, positive_profile):
    out, report = tmp_path / "filtered.dat", tmp_path / "report.json"
    code = main([
        "filter", "--in", str(profile_file), "--units", "radians", "--K", "5",
        "--out", str(out), "--report", str(report),
    ])
    assert code == 0
    filtered = read_profile(out, "radians")
    np.testing.assert_allclose(filtered.values, positive_profile.values, atol=1e-8)
    grid, estimation = read_report(report)
    assert estimation.model.order == 5
    offline = reconstruct_real(estimation.model, grid)
    np.testing.assert_allclose(offline.values, filtered.values, atol=1e-10)
    payload = json.loads(report.read_text(encoding="utf-8"))
    assert len(payload["report"]["singular_values"]) == 5


def test_filter_rejects_zero_order(tmp_path, profile_file, capsys):
    code = main(["filter", "--in", str(profile_file), "--K", "0", "--out", str(tmp_path / "x.dat")])
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_usage_errors():
    assert main([]) == 2
    assert main(["filter", "--bogus"]) == 2


def test_missing_input_is_data_error(tmp_path):
    assert main(["nsr", "--in", str(tmp_path / "missing.dat")]) == 3


def test_parse_failure_exit_code(tmp_path):
    path = tmp_path / "bad.dat"
    path.write_text("0.1 x\n0.2 1\n", encoding="utf-8")
    assert main(["nsr", "--in", str(path)]) == 3


def test_nsr_command(tmp_path, capsys):
    grid = AngularGrid(theta0=0.2, dtheta=0.001, n=64)
    path = tmp_path / "flat.dat"
    write_profile(path, IntensityProfile(grid=grid, values=np.full(64, 100.0)), units="radians")
    assert main(["nsr", "--in", str(path), "--units", "radians"]) == 0
    assert capsys.readouterr().out.strip() == "NSR=0.1"
    curve = tmp_path / "curve.dat"
    assert main(["nsr", "--in", str(path), "--units", "radians", "--curve", "1,4", "--out", str(curve)]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 2
    assert len(read_profile(curve, "radians").values) == 2


def test_order_command(tmp_path, profile_file, capsys):
    series, svg = tmp_path / "scan.dat", tmp_path / "scan.svg"
    args = ["order", "--in", str(profile_file), "--units", "radians", "--kmax", "12", "--out", str(series)]
    assert main(args + ["--svg", str(svg), "--dft", str(tmp_path / "dft.dat")]) == 0
    assert capsys.readouterr().out.startswith("K=")
    rows = [line for line in series.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]
    assert len(rows) == 12
    first_svg = svg.read_bytes()
    assert b"<svg" in first_svg
    assert main(args + ["--svg", str(svg)]) == 0
    assert svg.read_bytes() == first_svg


def test_bench_command(tmp_path, small_sample_spec):
    config = tmp_path / "bench.json"
    config.write_text(
        json.dumps({
            "samples": [{"label": "tiny", "spec": json.loads(small_sample_spec.model_dump_json())}],
            "nsr_targets": [0.05],
            "runs": 2,
            "k_policy": {"mode": "fixed", "K": 5},
        }),
        encoding="utf-8",
    )
    out = tmp_path / "bench"
    code = main(["bench", "--config", str(config), "--out", str(out)])
    assert code == 0
    header = (out / "table1.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    assert (out / "table2.csv").exists()
    assert "tiny" in (out / "tables.txt").read_text(encoding="utf-8")


@pytest.fixture
def noisy_file(tmp_path, positive_profile):
    path = tmp_path / "noisy.dat"
    write_profile(path, poissonize(positive_profile.scaled(100.0), NoiseSpec(F=1.0, seed=5)), units="radians")
    return path


def test_noise_rejects_nonpositive_scaling(tmp_path, profile_file, capsys):
    for F in ("0", "-1.5"):
        code = main(["noise", "--in", str(profile_file), "--F", F, "--out", str(tmp_path / "n.dat")])
        assert code == 2
        assert "USAGE" in capsys.readouterr().err


def test_noise_seed_defaults_to_zero(tmp_path, profile_file):
    implicit, explicit = tmp_path / "implicit.dat", tmp_path / "explicit.dat"
    base = ["noise", "--in", str(profile_file), "--units", "radians", "--F", "3"]
    assert main(base + ["--out", str(implicit)]) == 0
    assert main(base + ["--seed", "0", "--out", str(explicit)]) == 0
    assert implicit.read_bytes() == explicit.read_bytes()


def test_seed_defaults_are_per_command(tmp_path):
    parser = build_parser()
    assert parser.parse_args(["order", "--in", "x", "--out", "y"]).seed == 0
    assert parser.parse_args(["filter", "--in", "x", "--out", "y"]).seed == 0
    assert parser.parse_args(["bench", "--out", "y"]).seed is None
    config = tmp_path / "bench.json"
    config.write_text(json.dumps({"master_seed": 11, "runs": 2}), encoding="utf-8")
    kept = CommandHandler(parser.parse_args(["bench", "--config", str(config), "--out", "y"]))._bench_config()
    assert kept.master_seed == 11
    override = parser.parse_args(["bench", "--config", str(config), "--out", "y", "--seed", "4"])
    assert CommandHandler(override)._bench_config().master_seed == 4


def test_filter_output_is_byte_identical_across_runs(tmp_path, noisy_file):
    outputs = []
    for attempt in range(2):
        out, report = tmp_path / f"f{attempt}.dat", tmp_path / f"r{attempt}.json"
        args = ["filter", "--in", str(noisy_file), "--units", "radians", "--K", "9"]
        assert main(args + ["--out", str(out), "--report", str(report)]) == 0
        outputs.append((out.read_bytes(), report.read_bytes()))
    assert outputs[0] == outputs[1]


def test_report_reproduces_noisy_filter_output(tmp_path, noisy_file):
    out, report = tmp_path / "filtered.dat", tmp_path / "report.json"
    args = ["filter", "--in", str(noisy_file), "--units", "radians", "--K", "9"]
    assert main(args + ["--out", str(out), "--report", str(report)]) == 0
    filtered = read_profile(out, "radians")
    grid, estimation = read_report(report)
    assert estimation.model.conjugate_closed
    offline = reconstruct_real(estimation.model, grid)
    scale = np.abs(filtered.values).max()
    np.testing.assert_allclose(offline.values, filtered.values, rtol=0, atol=1e-10 * scale)


def test_filter_auto_prints_order_and_cutoff(tmp_path, profile_file, capsys, monkeypatch):
    frequencies = (0.0, 10.0, 10.0, 20.0, 20.0, 45.0, 45.0, 60.0)
    values = (100.0, 50.0, 50.0, 20.0, 20.0, 1e-3, 1e-3, 1e-4)
    pairs = [ScanPair(frequency=f, singular_value=s, component=i) for i, (f, s) in enumerate(zip(frequencies, values))]
    scan = OrderScan(pairs=tuple(pairs), k_max=8)
    monkeypatch.setattr(handler, "order_scan", lambda *args, **kwargs: scan)
    report = tmp_path / "auto.json"
    args = ["filter", "--in", str(profile_file), "--units", "radians", "--auto", "--kmax", "8"]
    assert main(args + ["--out", str(tmp_path / "auto.dat"), "--report", str(report)]) == 0
    assert capsys.readouterr().out.strip() == "K=5 f_cutoff=32.5"
    payload = json.loads(report.read_text(encoding="utf-8"))
    assert payload["f_cutoff"] == pytest.approx(32.5)
    assert len(payload["report"]["model"]["components"]) == 5
