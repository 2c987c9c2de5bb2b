"""Command-line runs: config resolution, file outputs, reproducibility."""

import json
import os

import numpy as np
import pytest

from mindenom.cli import main
from mindenom.surfaces import ST6, format_origami
from mindenom.runio import (
    ConfigError,
    RunConfig,
    cdf_csv_text,
    fmt_float,
    merged_cdf_csv,
    samples_csv_text,
)


def run_cli(*argv):
    return main(list(argv))


def read(path):
    with open(path) as fh:
        return fh.read()


def manifest(outdir):
    return json.loads(read(os.path.join(outdir, "manifest.json")))


# -- configuration ------------------------------------------------------------


def test_defaults_per_experiment():
    cfg = RunConfig("theorem-1.2")
    assert cfg.n == 100000 and cfg.deltas == (1e-2, 1e-4, 1e-6)
    cfg = RunConfig("theorem-1.5")
    assert cfg.origami == "torus" and cfg.refine == 16


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("no-such-experiment")
    with pytest.raises(ConfigError):
        RunConfig("theorem-1.2", n=0)
    with pytest.raises(ConfigError):
        RunConfig("theorem-1.2", deltas=(0.5, 0.5))
    with pytest.raises(ConfigError):
        RunConfig("theorem-1.2", deltas=(2.0,))
    with pytest.raises(ConfigError):
        RunConfig("theorem-1.2", frobnicate=1)
    with pytest.raises(ConfigError):
        RunConfig("siegel-check", region=(1.0, -1.0, 0.0, 1.0))
    with pytest.raises(ConfigError):
        RunConfig("theorem-1.4", n=10, m=0)


def test_toml_and_flag_precedence(tmp_path):
    cfgfile = tmp_path / "run.toml"
    cfgfile.write_text('n = 50\nseed = 4\ndeltas = [0.01]\n')
    cfg = RunConfig.from_sources("theorem-1.2", toml_path=str(cfgfile), n=10)
    assert cfg.n == 10  # flag wins
    assert cfg.seed == 4  # file wins over default
    assert cfg.deltas == (0.01,)


def test_bad_toml(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("n = [unclosed\n")
    with pytest.raises(ConfigError):
        RunConfig.from_sources("theorem-1.2", toml_path=str(bad))
    unknown = tmp_path / "unknown.toml"
    unknown.write_text("wibble = 3\n")
    with pytest.raises(ConfigError):
        RunConfig.from_sources("theorem-1.2", toml_path=str(unknown))


# -- csv rendering ------------------------------------------------------------


def test_samples_csv_shapes():
    text = samples_csv_text([0.5, (1.0, 2.0), None], [3.0, 4.0, 5.0])
    lines = text.strip().splitlines()
    assert lines[0] == "index,input,statistic"
    assert lines[1] == "0,0.5,3"
    assert lines[2] == "1,1;2,4"
    assert lines[3] == "2,,5"


def test_cdf_csv_and_float_format():
    text = cdf_csv_text([0.1], [0.25])
    assert text.splitlines()[0] == "T,xi_hat"
    v = 0.1234567890123456789
    assert float(fmt_float(v)) == v


def test_merged_cdf_grid_mismatch(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("T,xi_hat\n1,0.5\n2,1\n")
    b.write_text("T,xi_hat\n1,0.5\n3,1\n")
    with pytest.raises(ConfigError):
        merged_cdf_csv([str(a), str(b)])
    merged = merged_cdf_csv([str(a), str(a)])
    assert merged.splitlines()[0] == "T,a,a"


# -- end-to-end runs ----------------------------------------------------------


def test_scalar_run_writes_expected_files(tmp_path):
    out = tmp_path / "run"
    code = run_cli("theorem-1.2", "--n", "400", "--delta", "1e-4", "--out", str(out))
    assert code == 0
    names = sorted(os.listdir(out))
    assert names == [
        "cdf-haar.csv",
        "cdf-horocycle.csv",
        "cdf.csv",
        "manifest.json",
        "samples-haar.csv",
        "samples.csv",
    ]
    doc = manifest(out)
    assert doc["schema_version"] == 1
    assert doc["config"]["experiment"] == "theorem-1.2"
    assert set(doc["files"]) == set(names)
    entry = doc["results"]["deltas"]["0.0001"]
    assert 0.0 <= entry["ks_lhs_haar"] <= 1.0
    assert 0.0 <= entry["ks_horocycle_haar"] <= 1.0
    assert doc["results"]["mean_target_documented"] == pytest.approx(1.6211389382774044)
    assert doc["results"]["mean_open_interval_limit"] == pytest.approx(1.1463183365015126)


def test_rerun_reproduces_data_files(tmp_path):
    out1 = tmp_path / "one"
    out2 = tmp_path / "two"
    args = ("theorem-1.2", "--n", "300", "--delta", "1e-3", "--seed", "5")
    assert run_cli(*args, "--out", str(out1)) == 0
    assert run_cli(*args, "--out", str(out2)) == 0
    for name in os.listdir(out1):
        if name == "manifest.json":
            continue
        assert read(os.path.join(out1, name)) == read(os.path.join(out2, name))
    d1, d2 = manifest(out1), manifest(out2)
    for d in (d1, d2):
        d.pop("wall_time_seconds")
        d["config"].pop("out")
    assert d1 == d2


def test_threads_do_not_change_output(tmp_path):
    out1 = tmp_path / "serial"
    out2 = tmp_path / "forked"
    args = ("theorem-1.2", "--n", "9000", "--delta", "1e-3")
    assert run_cli(*args, "--out", str(out1)) == 0
    assert run_cli(*args, "--out", str(out2), "--threads", "2") == 0
    assert read(os.path.join(out1, "samples.csv")) == read(os.path.join(out2, "samples.csv"))
    assert read(os.path.join(out1, "cdf.csv")) == read(os.path.join(out2, "cdf.csv"))


def test_multi_delta_suffixes(tmp_path):
    out = tmp_path / "multi"
    code = run_cli(
        "theorem-1.4", "--n", "60", "--m", "2", "--delta", "1e-2", "--delta", "1e-3",
        "--out", str(out),
    )
    assert code == 0
    names = set(os.listdir(out))
    assert {"samples-0.01.csv", "samples-0.001.csv", "cdf-0.01.csv", "cdf-0.001.csv"} <= names
    doc = manifest(out)
    assert "ks_vs_coarser" in doc["results"]["deltas"]["0.001"]
    first_input = read(os.path.join(out, "samples-0.01.csv")).splitlines()[1].split(",")[1]
    assert len(first_input.split(";")) == 2  # m = 2 coordinates


def test_config_error_writes_nothing(tmp_path):
    out = tmp_path / "empty"
    assert run_cli("theorem-1.2", "--n", "0", "--out", str(out)) == 2
    assert not out.exists()


def test_cap_error_writes_nothing(tmp_path):
    out = tmp_path / "capped"
    code = run_cli(
        "theorem-1.4", "--n", "8", "--m", "2", "--delta", "1e-3", "--qcap", "3",
        "--out", str(out),
    )
    assert code == 3
    assert not out.exists()


def test_oracle_suite_clean(tmp_path):
    out = tmp_path / "oracle"
    assert run_cli("oracle-suite", "--n", "40", "--out", str(out)) == 0
    doc = manifest(out)
    assert doc["results"] == {"cases": 40, "mismatches": 0}


def test_siegel_check_run(tmp_path):
    out = tmp_path / "siegel"
    code = run_cli(
        "siegel-check", "--n", "2000", "--out", str(out),
        "--x0", "-1", "--x1", "1", "--y0", "-1", "--y1", "1",
    )
    assert code == 0
    doc = manifest(out)
    assert doc["results"]["area"] == 4.0
    assert abs(doc["results"]["mean_count"] - 4.0) < 0.5
    assert run_cli("siegel-check", "--n", "10", "--x0", "0.0", "--out", str(out)) == 2


def test_surface_run_torus_and_file(tmp_path):
    out = tmp_path / "torus"
    code = run_cli(
        "theorem-1.5", "--n", "200", "--delta", "1e-2", "--origami", "torus",
        "--out", str(out),
    )
    assert code == 0
    doc = manifest(out)
    assert doc["results"]["alpha"] == 1
    assert doc["results"]["degree"] == 1
    assert doc["results"]["printed_cone_value"] == 1
    assert "ks_haar" in doc["results"]["deltas"]["0.01"]

    spec = tmp_path / "surface.txt"
    spec.write_text(format_origami(ST6) + "\n")
    out2 = tmp_path / "st6"
    code = run_cli(
        "theorem-1.5", "--n", "60", "--delta", "1e-2", "--origami", str(spec),
        "--alpha", "6", "--out", str(out2),
    )
    assert code == 0
    doc2 = manifest(out2)
    assert doc2["results"]["degree"] == 6
    assert "ks_haar" not in doc2["results"]["deltas"]["0.01"]

    assert run_cli("theorem-1.5", "--n", "10", "--origami", "nonesuch", "--out", str(out)) == 2


def test_plot_outputs(tmp_path):
    out = tmp_path / "run"
    assert run_cli("theorem-1.2", "--n", "200", "--delta", "1e-3", "--out", str(out)) == 0
    svg_path = tmp_path / "plots" / "overlay.svg"
    code = run_cli(
        "plot", "--out", str(svg_path),
        str(out / "cdf.csv"), str(out / "cdf-haar.csv"),
    )
    assert code == 0
    svg = read(str(svg_path))
    assert svg.startswith("<svg") and "polyline" in svg
    merged = read(str(tmp_path / "plots" / "overlay-merged.csv"))
    assert merged.splitlines()[0] == "T,cdf,cdf-haar"
    assert run_cli("plot", "--out", str(svg_path), str(tmp_path / "missing.csv")) == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("--version")
    assert exc.value.code == 0
    assert "lab" in capsys.readouterr().out
