"""Command-line driver: artifact layout, subcommand chaining, exit codes.

All invocations go through main() in-process so exit codes and stderr
text can be asserted directly.
"""

import json

import numpy as np
import pytest

from csdmd.cli import main
from csdmd.io import read_matrix, read_pgm, write_matrix


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A generated planted-wave dataset plus its full-state decomposition."""
    root = tmp_path_factory.mktemp("cli")
    code = main(
        ["gen", "example1", "--nx", "16", "--ny", "16", "--k", "2",
         "--dt", "0.05", "--t1", "1.0", "--seed", "3", "--out",
         str(root / "data")]
    )
    assert code == 0
    code = main(
        ["dmd", "--snapshots", str(root / "data"), "--tol", "1e-6",
         "--out", str(root / "full")]
    )
    assert code == 0
    return root


def test_gen_writes_dataset(workspace):
    data = workspace / "data"
    for name in ("X.bin", "X.json", "Xp.bin", "truth_lambdas.bin", "system.json"):
        assert (data / name).exists()
    X, side = read_matrix(str(data), "X")
    assert X.shape == (256, 20)
    assert side["grid"] == [16, 16]
    assert side["dt"] == 0.05
    meta = json.loads((data / "system.json").read_text())
    assert meta["K"] == 2 and meta["m"] == 20


def test_dmd_outputs(workspace):
    full = workspace / "full"
    summary = json.loads((full / "result.json").read_text())
    assert summary["rank"] == 4
    assert summary["path"] == "1A"
    lambdas, _ = read_matrix(str(full), "lambdas")
    modes, _ = read_matrix(str(full), "modes")
    assert lambdas.shape == (4, 1)
    assert modes.shape == (256, 4)


def test_compressed_and_recovery_chain(workspace):
    data, full = workspace / "data", workspace / "full"
    comp = workspace / "comp"
    assert main(
        ["cdmd", "--snapshots", str(data), "--measure", "gaussian", "-p", "12",
         "--seed", "5", "--tol", "1e-6", "--out", str(comp)]
    ) == 0
    Y, _ = read_matrix(str(comp), "Y")
    assert Y.shape == (12, 20)
    assert json.loads((comp / "result.json").read_text())["path"] == "1B"

    sparse = workspace / "sparse"
    assert main(
        ["csdmd", "--measured", str(comp), "--measure-file",
         str(comp / "measure.json"), "--sparsity", "2", "--tol", "1e-6",
         "--out", str(sparse)]
    ) == 0
    summary = json.loads((sparse / "result.json").read_text())
    assert summary["path"] == "2B"
    for entry in summary["recovery"]:
        assert entry["residual"] <= 1e-8

    for other in (comp, sparse):
        out = workspace / f"cmp_{other.name}.json"
        assert main(
            ["compare", "--a", str(full), "--b", str(other), "--out", str(out)]
        ) == 0
        report = json.loads(out.read_text())
        assert report["max_abs_delta"] <= 1e-8
        assert min(report["mode_alignments"]) >= 1.0 - 1e-8
        assert report["unmatched_a"] == []


def test_compare_result_with_itself(workspace):
    full = workspace / "full"
    out = workspace / "self.json"
    assert main(["compare", "--a", str(full), "--b", str(full), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["max_abs_delta"] == 0.0
    assert min(report["mode_alignments"]) >= 1.0 - 1e-12


def test_pixel_measure_file_roundtrip(workspace):
    data, full = workspace / "data", workspace / "full"
    comp = workspace / "pix"
    assert main(
        ["cdmd", "--snapshots", str(data), "--measure", "pixel", "-p", "24",
         "--seed", "9", "--tol", "1e-6", "--out", str(comp)]
    ) == 0
    meta = json.loads((comp / "measure.json").read_text())
    assert meta["kind"] == "pixel"
    assert meta["indices"] == sorted(set(meta["indices"]))

    # the persisted measurement description must reproduce the operator:
    # sparse recovery from the saved artifacts alone
    sparse = workspace / "pix_sparse"
    assert main(
        ["csdmd", "--measured", str(comp), "--measure-file",
         str(comp / "measure.json"), "--sparsity", "2", "--tol", "1e-6",
         "--out", str(sparse)]
    ) == 0
    assert json.loads((sparse / "result.json").read_text())["path"] == "2B"

    recon = workspace / "pix_recon"
    assert main(
        ["csdmd", "--measured", str(comp), "--measure-file",
         str(comp / "measure.json"), "--sparsity", "4", "--tol", "1e-6",
         "--reconstruct-snapshots", "--out", str(recon)]
    ) == 0
    out = workspace / "cmp_recon.json"
    assert main(
        ["compare", "--a", str(full), "--b", str(recon), "--out", str(out)]
    ) == 0
    assert json.loads(out.read_text())["max_abs_delta"] <= 1e-6


def test_mode_images(workspace):
    imgs = workspace / "imgs"
    assert main(
        ["dmd", "--snapshots", str(workspace / "data"), "--tol", "1e-6",
         "--out", str(imgs), "--images", "2", "--imag"]
    ) == 0
    for name in ("mode00.pgm", "mode00_imag.pgm", "mode01.pgm"):
        assert (imgs / name).exists()
    img, maxval = read_pgm(str(imgs / "mode00.pgm"))
    assert img.shape == (16, 16)
    assert maxval == 255
    side = json.loads((imgs / "mode00.pgm.json").read_text())
    assert side["component"] == "real"


def test_verify_reports_all_checks(workspace, capsys):
    assert main(
        ["verify", "--snapshots", str(workspace / "data"), "--tol", "1e-6"]
    ) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.strip()]
    assert len(lines) == 5
    assert all(ln.startswith("pass") for ln in lines)


def test_config_error_exit_codes(workspace, tmp_path, capsys):
    assert main(["bogus"]) == 2
    assert main(["dmd", "--wat"]) == 2
    capsys.readouterr()

    assert main(
        ["dmd", "--snapshots", str(tmp_path / "nope"), "--out", str(tmp_path / "o")]
    ) == 2
    assert "configuration error in dmd" in capsys.readouterr().err

    comp = workspace / "comp"
    assert main(
        ["csdmd", "--measured", str(comp), "--measure-file",
         str(comp / "measure.json"), "--sparsity", "2", "--basis", "wavelet",
         "--out", str(tmp_path / "w")]
    ) == 2
    assert "configuration error in csdmd" in capsys.readouterr().err


def test_numerical_failure_exit_code(workspace, tmp_path, capsys):
    # one measurement row cannot carry a rank-4 system
    code = main(
        ["cdmd", "--snapshots", str(workspace / "data"), "--measure",
         "gaussian", "-p", "1", "--tol", "1e-6", "--out", str(tmp_path / "o")]
    )
    assert code == 3
    assert "numerical failure in cdmd" in capsys.readouterr().err


def test_verify_size_guard(tmp_path, capsys):
    big = np.ones((4097, 3))
    write_matrix(str(tmp_path), "X", big, dt=1.0)
    write_matrix(str(tmp_path), "Xp", big, dt=1.0)
    assert main(["verify", "--snapshots", str(tmp_path)]) == 2
    assert "configuration error in verify" in capsys.readouterr().err


def test_gyre_generation(tmp_path):
    out = tmp_path / "gyre"
    assert main(
        ["gen", "gyre", "--nx", "24", "--ny", "12", "--t1", "2.0", "--dt",
         "0.1", "--out", str(out)]
    ) == 0
    X, side = read_matrix(str(out), "X")
    assert X.shape == (288, 20)
    assert side["grid"] == [24, 12]
    assert json.loads((out / "system.json").read_text())["observable"] == "vorticity"
    assert main(
        ["dmd", "--snapshots", str(out), "--tol", "1e-4", "--out",
         str(tmp_path / "res")]
    ) == 0


def test_compressed_run_is_deterministic(workspace):
    args = ["cdmd", "--snapshots", str(workspace / "data"), "--measure",
            "gaussian", "-p", "12", "--seed", "5", "--tol", "1e-6"]
    a, b = workspace / "det_a", workspace / "det_b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert (a / "lambdas.bin").read_bytes() == (b / "lambdas.bin").read_bytes()
    assert (a / "result.json").read_text() == (b / "result.json").read_text()
