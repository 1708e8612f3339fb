import os

import numpy as np
import pytest

from qwave.cli import main
from qwave.image import ChannelImage
from qwave.pngio import load_channel_image, read_png, save_channel_image

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def structured_planes(side):
    """Piecewise-smooth content: a gradient with two solid rectangles."""
    i = np.arange(side)
    base = 0.25 + 0.5 * (i[:, None] + i[None, :]) / (2 * side)
    planes = []
    for shift in range(4):
        plane = base.copy()
        plane[4 + shift : side // 2, 6 : side // 2] = 0.85
        plane[side // 2 :, side // 2 + shift :] *= 0.4
        planes.append(plane)
    return planes


@pytest.fixture
def workspace(tmp_path):
    """A 32x32 RGB-NIR test pair on disk plus an output directory."""
    side = 32
    nir_p, r_p, g_p, b_p = structured_planes(side)
    img = ChannelImage(r=r_p, g=g_p, b=b_p, nir=nir_p)
    rgb = tmp_path / "input.png"
    nir = tmp_path / "input_nir.pgm"
    save_channel_image(img, rgb, nir, bit_depth=8)
    return tmp_path, str(rgb), str(nir)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def grab(out, key):
    for line in out.splitlines():
        if line.startswith(key + ":"):
            return line.split(":", 1)[1].strip()
    raise KeyError(f"{key!r} not found in output:\n{out}")


def test_validate_filters(capsys):
    code, out, _ = run(capsys, "validate-filters", "--bank", "qhaar")
    assert code == 0
    assert float(grab(out, "roundtrip_max_error")) < 1e-9
    assert grab(out, "valid") == "True"


def test_validate_filters_detects_corruption(capsys, tmp_path):
    from qwave.filters import FilterBank, builtin, save_bank

    bank = builtin("haar")
    broken = FilterBank("broken", bank.analysis.copy(), bank.synthesis.copy())
    broken.analysis[0, 0, 0, 0] += 0.1
    path = tmp_path / "broken.qwfb"
    save_bank(broken, path)
    with pytest.warns(UserWarning):
        code, out, _ = run(capsys, "validate-filters", "--bank", str(path))
    assert code == 1
    assert grab(out, "valid") == "False"


def test_roundtrip(capsys, workspace):
    _tmp, rgb, nir = workspace
    code, out, _ = run(capsys, "roundtrip", "--rgb", rgb, "--nir", nir,
                       "--bank", "qhaar", "--levels", "5")
    assert code == 0
    assert float(grab(out, "max_modulus_error")) < 1e-9
    assert grab(out, "psnr_db") == "inf"


def test_roundtrip_rejects_non_power_of_two(capsys, tmp_path):
    rng = np.random.default_rng(201)
    img = ChannelImage(
        r=rng.uniform(size=(20, 20)),
        g=rng.uniform(size=(20, 20)),
        b=rng.uniform(size=(20, 20)),
    )
    rgb = tmp_path / "odd.png"
    save_channel_image(img, rgb)
    code, _out, err = run(capsys, "roundtrip", "--rgb", str(rgb))
    assert code == 2
    assert "power-of-two" in err


def test_roundtrip_rejects_excess_levels(capsys, workspace):
    _tmp, rgb, nir = workspace
    code, _out, err = run(capsys, "roundtrip", "--rgb", rgb, "--nir", nir,
                          "--levels", "20")
    assert code == 2
    assert "maximum is 5" in err


def test_decompose_reconstruct_files(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    pyr_path = str(tmp_path / "coeffs.qpyr")
    out_rgb = str(tmp_path / "rebuilt.png")
    out_nir = str(tmp_path / "rebuilt_nir.png")
    code, _out, _ = run(capsys, "decompose", "--rgb", rgb, "--nir", nir,
                        "--levels", "4", "--out", pyr_path)
    assert code == 0
    code, _out, _ = run(capsys, "reconstruct", "--pyramid", pyr_path,
                        "--out", out_rgb, "--out-nir", out_nir)
    assert code == 0
    original, _ = load_channel_image(rgb, nir)
    rebuilt, _ = load_channel_image(out_rgb, out_nir)
    assert rebuilt.isclose(original, tol=1e-9)


def test_compress_defaults_and_report(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    out = str(tmp_path / "compressed.png")
    report = str(tmp_path / "kept.txt")
    code, stdout, _ = run(capsys, "compress", "--rgb", rgb, "--nir", nir,
                          "--levels", "5", "--out", out, "--report", report)
    assert code == 0
    assert int(grab(stdout, "kept_count")) == int(np.floor(0.10 * 32 * 32))
    assert int(grab(stdout, "total_count")) == 1024
    assert os.path.exists(out)
    lines = open(report).read().splitlines()
    assert len(lines) == 1 + int(grab(stdout, "kept_count"))
    assert float(grab(stdout, "psnr_clamped_db")) > 10.0


def test_enhance_identity_gain(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    out = str(tmp_path / "enhanced.png")
    code, stdout, _ = run(capsys, "enhance", "--rgb", rgb, "--nir", nir,
                          "--levels", "5", "--gain", "1.0", "--out", out)
    assert code == 0
    # gain 1 is the identity; 8-bit quantization reproduces the input bytes
    original, _ = read_png(rgb)
    produced, _ = read_png(out)
    np.testing.assert_array_equal(produced, original)
    assert float(grab(stdout, "psnr_float_db")) > 250.0


def test_enhance_with_blur_reports_reference(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    out = str(tmp_path / "sharp.png")
    code, stdout, _ = run(capsys, "enhance", "--rgb", rgb, "--nir", nir,
                          "--levels", "5", "--gain", "1.25", "--blur", "1.25",
                          "--out", out)
    assert code == 0
    assert float(grab(stdout, "blurred_psnr_db")) > 0
    assert float(grab(stdout, "blurred_ssim")) < 1.0


def test_edges_command(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    out = str(tmp_path / "edges.png")
    code, stdout, _ = run(capsys, "edges", "--rgb", rgb, "--nir", nir,
                          "--levels", "5", "--out", out)
    assert code == 0
    # discarding the approximation darkens the image drastically
    produced, _ = read_png(out)
    assert produced.mean() < 64


def test_denoise_improves_noisy_input(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    out = str(tmp_path / "denoised.png")
    code, stdout, _ = run(capsys, "denoise", "--rgb", rgb, "--nir", nir,
                          "--levels", "3", "--mode", "soft", "--sigma", "0.1",
                          "--add-noise", "0.1", "--seed", "3", "--out", out)
    assert code == 0
    assert float(grab(stdout, "psnr_float_db")) > float(grab(stdout, "noisy_psnr_db"))


def test_denoise_is_seed_deterministic(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    outs = []
    for name in ("a.png", "b.png"):
        out = str(tmp_path / name)
        code, _stdout, _ = run(capsys, "denoise", "--rgb", rgb, "--nir", nir,
                               "--levels", "3", "--add-noise", "0.05",
                               "--seed", "11", "--out", out)
        assert code == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]


def test_profile_csv(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    out = str(tmp_path / "profiles.csv")
    code, _stdout, _ = run(capsys, "profile", "--rgb", rgb, "--nir", nir,
                           "--levels", "5", "--out", out)
    assert code == 0
    rows = open(out).read().splitlines()
    assert rows[0] == "rank,image,decomposition"
    assert len(rows) == 1 + 32 * 32
    image_col = np.array([float(r.split(",")[1]) for r in rows[1:]])
    decomp_col = np.array([float(r.split(",")[2]) for r in rows[1:]])
    for col in (image_col, decomp_col):
        assert np.all(np.diff(col) >= -1e-12)
        assert col[-1] == pytest.approx(1.0, abs=1e-12)


def test_locations_ratio_bounds(capsys, workspace, tmp_path):
    _tmp, rgb, nir = workspace
    report_dir = str(tmp_path / "reports")
    code, stdout, _ = run(capsys, "locations", "--rgb", rgb, "--nir", nir,
                          "--levels", "5", "--keep", "0.1",
                          "--report", report_dir)
    assert code == 0
    ratio = float(grab(stdout, "union_over_quaternionic"))
    assert 1.0 <= ratio <= 4.0
    assert grab(stdout, "channel_bank") == "haar"
    for name in ("quaternionic", "channel_NIR", "channel_R"):
        assert os.path.exists(os.path.join(report_dir, f"{name}.txt"))


def test_locations_keep_all_is_ratio_one(capsys, workspace):
    _tmp, rgb, nir = workspace
    code, stdout, _ = run(capsys, "locations", "--rgb", rgb, "--nir", nir,
                          "--levels", "2", "--keep", "1.0")
    assert code == 0
    assert float(grab(stdout, "union_over_quaternionic")) == 1.0


def test_locations_rgb_only_uses_three_channels(capsys, workspace, tmp_path):
    _tmp, rgb, _nir = workspace
    code, stdout, _ = run(capsys, "locations", "--rgb", rgb,
                          "--levels", "3", "--keep", "0.1")
    assert code == 0
    assert "channel_NIR_count" not in stdout
    ratio = float(grab(stdout, "union_over_quaternionic"))
    assert 1.0 <= ratio <= 3.0


def test_dr_bundled_instance(capsys, tmp_path):
    sets = os.path.join(DATA_DIR, "two_disks.sets")
    trace = str(tmp_path / "trace.csv")
    code, stdout, _ = run(capsys, "dr", "--sets", sets,
                          "--x0=-5.2347,3.9969", "--tol", "1e-6",
                          "--out", trace)
    assert code == 0
    assert grab(stdout, "converged") == "True"
    assert float(grab(stdout, "residual")) < 1e-6
    assert open(trace).read().startswith("iteration,")


def test_dr_feasible_start(capsys):
    sets = os.path.join(DATA_DIR, "two_disks.sets")
    code, stdout, _ = run(capsys, "dr", "--sets", sets, "--x0=-0.1,0")
    assert code == 0
    assert int(grab(stdout, "iterations")) == 0


def test_dr_iteration_cap_fails(capsys):
    sets = os.path.join(DATA_DIR, "two_disks.sets")
    code, stdout, _ = run(capsys, "dr", "--sets", sets,
                          "--x0=-5.2347,3.9969", "--max-iter", "1")
    assert code == 1
    assert grab(stdout, "converged") == "False"


def test_bank_file_flag(capsys, workspace):
    _tmp, rgb, nir = workspace
    bank = os.path.join(DATA_DIR, "qhaar.qwfb")
    code, out, _ = run(capsys, "roundtrip", "--rgb", rgb, "--nir", nir,
                       "--bank", bank, "--levels", "3")
    assert code == 0
    assert float(grab(out, "max_modulus_error")) < 1e-9


def test_unknown_bank_is_usage_error(capsys, workspace):
    _tmp, rgb, nir = workspace
    code, _out, err = run(capsys, "roundtrip", "--rgb", rgb, "--nir", nir,
                          "--bank", "db4")
    assert code == 2
    assert "builtin" in err


def test_sixteen_bit_depth_mirrored(capsys, tmp_path):
    rng = np.random.default_rng(202)
    img = ChannelImage(
        r=rng.uniform(size=(16, 16)),
        g=rng.uniform(size=(16, 16)),
        b=rng.uniform(size=(16, 16)),
    )
    rgb = str(tmp_path / "deep.png")
    save_channel_image(img, rgb, bit_depth=16)
    out = str(tmp_path / "deep_out.png")
    code, _stdout, _ = run(capsys, "enhance", "--rgb", rgb, "--gain", "1.0",
                           "--levels", "2", "--out", out)
    assert code == 0
    _, depth = read_png(out)
    assert depth == 16


def test_missing_input_is_usage_error(capsys):
    code, _out, err = run(capsys, "compress", "--out", "/tmp/x.png")
    assert code == 2
    assert "required" in err
