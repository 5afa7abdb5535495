"""Command-line interface tests: files, schemas, determinism, exit codes."""
import json
import math
from pathlib import Path

import numpy as np
import pytest

from ofdm_im.cli import main


def run_cli(*argv: str) -> int:
    return main([str(a) for a in argv])


def read_table(path: Path) -> tuple[dict, dict]:
    meta: dict[str, str] = {}
    header = None
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("# "):
            key, value = line[2:].split(" = ", 1)
            meta[key] = value
        elif header is None:
            header = line.split(",")
        else:
            rows.append([float(x) for x in line.split(",")])
    assert header is not None
    cols = {name: [row[i] for row in rows] for i, name in enumerate(header)}
    return meta, cols


def test_index_error_outputs(tmp_path):
    code = run_cli("index-error", "--out", tmp_path, "--trials", 2000,
                   "--nf", "2,4", "--snr-db", "0:10:5", "--seed", 20250801)
    assert code == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert names == {"index_error_nf2_analytic.csv",
                     "index_error_nf2_simulated.csv",
                     "index_error_nf4_analytic.csv",
                     "index_error_nf4_simulated.csv",
                     "index_error_combined.csv"}
    meta, cols = read_table(tmp_path / "index_error_combined.csv")
    assert meta["command"] == "index-error"
    assert meta["seed"] == "20250801"
    assert meta["trials"] == "2000"
    assert "artifact_version" in meta
    assert cols["nf"] == [2.0, 2.0, 2.0, 4.0, 4.0, 4.0]
    assert cols["x_db"] == [0.0, 5.0, 10.0] * 2
    for analytic, simulated, stderr in zip(cols["analytic"],
                                           cols["simulated"], cols["stderr"]):
        assert abs(analytic - simulated) <= 3.0 * stderr
    ana_meta, ana_cols = read_table(tmp_path / "index_error_nf4_analytic.csv")
    assert ana_meta["provenance"] == "analytic"
    assert ana_meta["n_f"] == "4"
    assert ana_cols["p_err"] == cols["analytic"][3:]


def test_index_error_rejects_zero_trials(tmp_path, capsys):
    code = run_cli("index-error", "--out", tmp_path, "--trials", 0)
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_bad_config_and_grid_specs(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("mc.trials\n")
    assert run_cli("index-error", "--out", tmp_path, "--config", bad) == 2
    assert run_cli("index-error", "--out", tmp_path,
                   "--config", tmp_path / "missing.cfg") == 2
    notint = tmp_path / "notint.cfg"
    notint.write_text("mc.trials = abc\n")
    assert run_cli("index-error", "--out", tmp_path, "--config", notint) == 2
    assert run_cli("single-cell-rates", "--out", tmp_path,
                   "--snr-db", "0:10") == 2
    assert run_cli("single-cell-rates", "--out", tmp_path,
                   "--snr-db", "0:10:0") == 2
    assert run_cli("single-cell-rates", "--out", tmp_path,
                   "--snr-db", "a,b") == 2
    capsys.readouterr()


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nmc.trials = 500\nmc.seed = 7\n"
                   "singlecell.nf_list = 2\nsinglecell.snr_db = 0,10\n")
    out1 = tmp_path / "fromconfig"
    assert run_cli("index-error", "--out", out1, "--config", cfg) == 0
    meta, cols = read_table(out1 / "index_error_combined.csv")
    assert meta["trials"] == "500"
    assert meta["seed"] == "7"
    assert cols["x_db"] == [0.0, 10.0]
    out2 = tmp_path / "overridden"
    assert run_cli("index-error", "--out", out2, "--config", cfg,
                   "--trials", 800, "--seed", 11) == 0
    meta2, _ = read_table(out2 / "index_error_combined.csv")
    assert meta2["trials"] == "800"
    assert meta2["seed"] == "11"


def test_single_cell_rates_outputs(tmp_path):
    code = run_cli("single-cell-rates", "--out", tmp_path, "--nf", "2,4",
                   "--snr-db=-10:30:10", "--fixed-snr-db", "0,10,20,30",
                   "--nf-max", 16)
    assert code == 0
    for n_f in (2, 4):
        meta, cols = read_table(tmp_path / f"single_cell_rates_nf{n_f}.csv")
        assert meta["label"] == f"single_cell_rates_nf{n_f}"
        for r1, r2, r_total in zip(cols["r1"], cols["r2"], cols["r_total"]):
            assert r_total == r1 + r2
        assert all(0.0 <= p <= 1.0 for p in cols["p_err"])
    meta, cols = read_table(tmp_path / "index_rate_vs_nf.csv")
    assert meta["nf_max"] == "16"
    assert len(cols["nf"]) == 15 * 4
    best_by_snr = {}
    for snr_db, n, flag in zip(cols["snr_db"], cols["nf"], cols["is_optimal"]):
        if flag == 1.0:
            assert snr_db not in best_by_snr
            best_by_snr[snr_db] = n
    marks = [best_by_snr[s] for s in sorted(best_by_snr)]
    assert len(marks) == 4
    assert marks == sorted(marks)


def test_sinr_cdf_outputs(tmp_path):
    code = run_cli("sinr-cdf", "--out", tmp_path, "--trials", 3000,
                   "--nf", "1,4", "--snr-db=-10:40:5", "--seed", 20250801)
    assert code == 0
    for n_f in (1, 4):
        meta, cols = read_table(tmp_path / f"sinr_cdf_nf{n_f}.csv")
        assert meta["command"] == "sinr-cdf"
        assert meta["n_f"] == str(n_f)
        assert meta["alpha"] == "3.0"
        analytic = cols["analytic"]
        assert analytic == sorted(analytic)
        gap = max(abs(a - e) for a, e in zip(analytic, cols["empirical"]))
        assert gap < 0.05


def test_ici_pdf_outputs(tmp_path):
    out = tmp_path / "run1"
    code = run_cli("ici-pdf", "--out", out, "--trials", 20_000,
                   "--bins", 81, "--q-prime", 2, "--restarts", 2,
                   "--exact-enum", "--dump-samples", "--seed", 20250801)
    assert code == 0
    meta, cols = read_table(out / "ici_pdf.csv")
    assert set(cols) == {"x", "histogram", "mog_fit", "gaussian_baseline",
                         "exact"}
    width = cols["x"][1] - cols["x"][0]
    mass = sum(cols["histogram"]) * width
    assert abs(mass - 1.0) < 1e-3
    hist = np.array(cols["histogram"])
    l1_fit = float(np.sum(np.abs(np.array(cols["mog_fit"]) - hist)) * width)
    l1_gauss = float(np.sum(np.abs(np.array(cols["gaussian_baseline"]) - hist))
                     * width)
    assert l1_fit < l1_gauss
    fit = json.loads((out / "ici_fit.json").read_text())
    assert set(fit) == {"weights", "variances", "meta"}
    assert len(fit["weights"]) == len(fit["variances"])
    assert math.isclose(sum(fit["weights"]), 1.0, rel_tol=1e-9)
    assert fit["meta"]["n_f"] == 4
    assert fit["meta"]["trials"] == 20_000
    sample_lines = (out / "ici_samples.csv").read_text().splitlines()
    header_at = next(i for i, line in enumerate(sample_lines)
                     if not line.startswith("#"))
    assert sample_lines[header_at] == "re,im"
    assert len(sample_lines) - header_at - 1 == 20_000
    # second run with the same seed reproduces the main file byte for byte
    out2 = tmp_path / "run2"
    assert run_cli("ici-pdf", "--out", out2, "--trials", 20_000,
                   "--bins", 81, "--q-prime", 2, "--restarts", 2,
                   "--exact-enum", "--dump-samples", "--seed", 20250801) == 0
    assert (out / "ici_pdf.csv").read_bytes() == (out2 / "ici_pdf.csv").read_bytes()
    assert (out / "ici_fit.json").read_bytes() == (out2 / "ici_fit.json").read_bytes()
    # without the flag there is no enumeration column and no sample dump
    out3 = tmp_path / "run3"
    assert run_cli("ici-pdf", "--out", out3, "--trials", 20_000,
                   "--bins", 81, "--q-prime", 2, "--restarts", 2,
                   "--seed", 20250801) == 0
    _, cols3 = read_table(out3 / "ici_pdf.csv")
    assert "exact" not in cols3
    assert not (out3 / "ici_samples.csv").exists()


def test_sum_rate_outputs(tmp_path):
    code = run_cli("sum-rate", "--out", tmp_path, "--trials", 10_000,
                   "--snr-db", "0:20:10", "--q-prime", 2, "--restarts", 1,
                   "--seed", 20250801)
    assert code == 0
    meta, cols = read_table(tmp_path / "sum_rate.csv")
    assert meta["command"] == "sum-rate"
    assert set(cols) == {"x_db", "r3_upper", "r3_upper_printed", "mi_estimate",
                         "mi_stderr", "single_cell_r1", "single_cell_r2",
                         "single_cell_r_total"}
    assert cols["x_db"] == [0.0, 10.0, 20.0]
    for bound, mi in zip(cols["r3_upper"], cols["mi_estimate"]):
        # same fits feed both numbers, so the ordering has no slack at all
        assert bound >= mi
    for r1, r2, total in zip(cols["single_cell_r1"], cols["single_cell_r2"],
                             cols["single_cell_r_total"]):
        assert total == r1 + r2
    fits = json.loads((tmp_path / "sum_rate_fits.json").read_text())
    assert len(fits) == 3
    for entry in fits:
        assert set(entry) == {"snr_db", "noise_var", "noise_ici", "received"}
        assert set(entry["noise_ici"]) == {"weights", "variances", "meta"}


def test_bench_outputs(tmp_path, capsys):
    code = run_cli("bench", "--out", tmp_path, "--trials", 4000)
    assert code == 0
    assert "kernel benchmark" in capsys.readouterr().out
    lines = (tmp_path / "bench.csv").read_text().splitlines()
    assert lines[0] == "kernel,backend,trials,best_seconds"
    from ofdm_im import available_backends
    assert len(lines) == 1 + 4 * len(available_backends())


def test_workers_do_not_change_bytes(tmp_path):
    args = ("index-error", "--trials", 9000, "--nf", "4",
            "--snr-db", "0,10", "--seed", 20250801)
    out1 = tmp_path / "w1"
    out2 = tmp_path / "w3"
    assert run_cli(*args, "--out", out1, "--workers", 1) == 0
    assert run_cli(*args, "--out", out2, "--workers", 3) == 0
    for name in ("index_error_nf4_analytic.csv", "index_error_nf4_simulated.csv",
                 "index_error_combined.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_version_flag():
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
