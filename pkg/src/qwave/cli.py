"""Command-line interface.

Every pipeline follows the same five steps: embed the colour image into
quaternions, decompose with a filter bank, process coefficients,
reconstruct, extract channels.  Subcommands::

    validate-filters   round-trip certificate of a bank
    roundtrip          decompose + reconstruct, report the error
    decompose          write the coefficient pyramid (QPYR1 binary)
    reconstruct        rebuild an image from a saved pyramid
    compress           keep the top fraction of coefficients
    enhance            amplify detail coefficients (optionally pre-blur)
    edges              discard the approximation
    denoise            soft/hard threshold the details
    profile            export cumulative energy profiles (CSV)
    locations          quaternionic vs channel-by-channel kept locations
    dr                 Douglas-Rachford feasibility run (trace CSV)

Images are PNG (8- or 16-bit greyscale/RGB) plus an optional separate
NIR plane (PNG or PGM); outputs mirror the input bit depth.  All
commands are deterministic for a fixed flag set including --seed.
Exit codes: 0 on success (and convergence/validity where applicable),
1 when a run completes but fails its goal, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
from scipy.ndimage import correlate1d

from . import engine, feasibility, filters, metrics, pipelines, pngio
from .image import ChannelImage, embed, extract

PIPELINE_DEFAULTS = {
    "compress": {"levels": 8, "keep": 0.10},
    "enhance": {"levels": 8, "gain": 1.25},
    "edges": {"levels": 6},
    "denoise": {"levels": 4, "sigma": 0.1},
}


class CommandError(Exception):
    """Usage-level failure; message goes to stderr, exit code 2."""


def _get_bank(selector: str) -> filters.FilterBank:
    if selector in filters.BUILTIN_NAMES:
        return filters.builtin(selector)
    if not os.path.exists(selector):
        raise CommandError(
            f"bank {selector!r} is neither a builtin ({', '.join(filters.BUILTIN_NAMES)}) "
            "nor a readable file"
        )
    return filters.load_bank(selector)


def _load_input(args):
    if args.rgb is None:
        raise CommandError("an input image is required (--rgb PATH [--nir PATH])")
    try:
        img, depth = pngio.load_channel_image(args.rgb, args.nir)
    except (OSError, ValueError) as exc:
        raise CommandError(str(exc)) from exc
    side = img.height
    if img.width != side or side & (side - 1):
        raise CommandError(
            f"input is {img.height}x{img.width}; the transform requires a square "
            "image with a power-of-two side"
        )
    return img, depth


def _check_levels(side: int, bank, levels: int) -> None:
    admissible = engine.max_levels(side, bank)
    if not 1 <= levels <= admissible:
        raise CommandError(
            f"levels={levels} is out of range for a {side}x{side} image with this "
            f"bank; the maximum is {admissible}"
        )


def _nir_out_path(args) -> str | None:
    if getattr(args, "out_nir", None):
        return args.out_nir
    if args.out is None:
        return None
    stem, ext = os.path.splitext(args.out)
    return f"{stem}.nir{ext or '.png'}"


def _write_output(img: ChannelImage, args, depth: int) -> None:
    if args.out is None:
        raise CommandError("--out PATH is required to write the processed image")
    nir_path = _nir_out_path(args) if img.nir is not None else None
    pngio.save_channel_image(img, args.out, nir_path, depth)
    print(f"wrote {args.out}" + (f" and {nir_path}" if nir_path else ""))


def _print_metrics(reference: ChannelImage, q_ref, q_out, want_nir: bool) -> None:
    """PSNR in the float (pre-clamp) domain and after clamping, plus SSIM."""
    out_img = extract(q_out, want_nir=want_nir)
    print(f"psnr_float_db: {metrics.psnr(q_ref, q_out):.4f}")
    print(f"psnr_clamped_db: {metrics.psnr(reference, out_img):.4f}")
    print(f"ssim_clamped: {metrics.ssim(reference, out_img):.4f}")


def _gaussian_blur(q: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur, kernel radius ceil(3*sigma), periodic
    boundary (matching the transform's boundary rule)."""
    radius = int(np.ceil(3.0 * sigma))
    taps = np.exp(-0.5 * (np.arange(-radius, radius + 1) / sigma) ** 2)
    taps /= taps.sum()
    out = q.copy()
    for axis in (0, 1):
        out = correlate1d(out, taps, axis=axis, mode="wrap")
    return out


def _add_noise(q: np.ndarray, sigma: float, seed: int, has_nir: bool) -> np.ndarray:
    """Independent Gaussian noise per present channel component, pre-clamp."""
    rng = np.random.default_rng(seed)
    noisy = q.copy()
    components = (0, 1, 2, 3) if has_nir else (1, 2, 3)
    for comp in components:
        noisy[..., comp] += rng.normal(0.0, sigma, size=q.shape[:2])
    return noisy


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate_filters(args) -> int:
    bank = _get_bank(args.bank)
    err = filters.validate_pr(bank, trials=args.trials, size=args.size, seed=args.seed)
    ok = err < filters.PR_TOLERANCE
    print(f"bank: {bank.name}")
    print(f"roundtrip_max_error: {err:.3e}")
    print(f"valid: {ok}")
    return 0 if ok else 1


def cmd_roundtrip(args) -> int:
    img, depth = _load_input(args)
    bank = _get_bank(args.bank)
    _check_levels(img.height, bank, args.levels)
    q = embed(img)
    rebuilt = engine.reconstruct(engine.decompose(q, bank, args.levels), bank)
    err = float(np.max(np.sqrt(np.sum((rebuilt - q) ** 2, axis=-1))))
    out_img = extract(rebuilt, want_nir=img.has_nir)
    # PSNR between the input samples and the output that would be
    # written at the input depth: an exact round trip reports inf
    peak = 255.0 if depth == 8 else 65535.0
    quantize = lambda planes: np.rint(np.stack(planes) * peak)
    print(f"max_modulus_error: {err:.3e}")
    print(f"psnr_db: {metrics.psnr(quantize(img.planes()) / peak, quantize(out_img.planes()) / peak)}")
    return 0 if err < filters.PR_TOLERANCE else 1


def cmd_decompose(args) -> int:
    img, _depth = _load_input(args)
    bank = _get_bank(args.bank)
    _check_levels(img.height, bank, args.levels)
    pyr = engine.decompose(embed(img), bank, args.levels)
    if args.out is None:
        raise CommandError("--out PATH is required for the pyramid file")
    engine.save_pyramid(pyr, args.out)
    print(f"wrote {args.out} ({pyr.levels} levels, {pyr.coefficient_count} coefficients)")
    return 0


def cmd_reconstruct(args) -> int:
    try:
        pyr = engine.load_pyramid(args.pyramid)
    except (OSError, ValueError) as exc:
        raise CommandError(str(exc)) from exc
    bank = _get_bank(args.bank)
    q = engine.reconstruct(pyr, bank)
    img = extract(q, want_nir=bool(getattr(args, "out_nir", None)))
    _write_output(img, args, args.depth)
    return 0


def _run_pipeline(args, levels: int, transform, reference_noisy=None):
    """Shared embed/decompose/process/reconstruct/extract skeleton."""
    img, depth = _load_input(args)
    bank = _get_bank(args.bank)
    _check_levels(img.height, bank, levels)
    q_ref = embed(img)
    q_in = q_ref if reference_noisy is None else reference_noisy(q_ref, img)
    pyr = engine.decompose(q_in, bank, levels)
    pyr, extras = transform(pyr)
    q_out = engine.reconstruct(pyr, bank)
    out_img = extract(q_out, want_nir=img.has_nir)
    _write_output(out_img, args, depth)
    _print_metrics(img, q_ref, q_out, img.has_nir)
    return img, q_in, q_out, extras


def cmd_compress(args) -> int:
    report_holder = {}

    def transform(pyr):
        out, report = pipelines.compress(pyr, args.keep)
        report_holder["report"] = report
        return out, report

    _run_pipeline(args, args.levels, transform)
    report = report_holder["report"]
    print(f"kept_count: {report.kept_count}")
    print(f"total_count: {report.total_count}")
    print(f"threshold_value: {report.threshold_value!r}")
    if args.report:
        pipelines.write_report(report, args.report)
        print(f"wrote {args.report}")
    return 0


def cmd_enhance(args) -> int:
    def noisy(q_ref, img):
        return _gaussian_blur(q_ref, args.blur) if args.blur else q_ref

    img, q_in, _q_out, _ = _run_pipeline(
        args, args.levels, lambda p: (pipelines.enhance(p, args.gain), None),
        reference_noisy=noisy,
    )
    if args.blur:
        blurred = extract(q_in, want_nir=img.has_nir)
        print(f"blurred_psnr_db: {metrics.psnr(img, blurred):.4f}")
        print(f"blurred_ssim: {metrics.ssim(img, blurred):.4f}")
    return 0


def cmd_edges(args) -> int:
    _run_pipeline(args, args.levels, lambda p: (pipelines.edges(p), None))
    return 0


def cmd_denoise(args) -> int:
    def noisy(q_ref, img):
        if args.add_noise:
            return _add_noise(q_ref, args.add_noise, args.seed, img.has_nir)
        return q_ref

    def transform(pyr):
        n = pyr.original_size[0] * pyr.original_size[1]
        t = args.threshold if args.threshold is not None else pipelines.visu_threshold(args.sigma, n)
        print(f"threshold: {t:.6f}")
        return pipelines.denoise(pyr, t, mode=args.mode), None

    img, q_in, _q_out, _ = _run_pipeline(args, args.levels, transform,
                                         reference_noisy=noisy)
    if args.add_noise:
        noisy_img = extract(q_in, want_nir=img.has_nir)
        print(f"noisy_psnr_db: {metrics.psnr(img, noisy_img):.4f}")
        print(f"noisy_ssim: {metrics.ssim(img, noisy_img):.4f}")
    return 0


def cmd_profile(args) -> int:
    img, _depth = _load_input(args)
    bank = _get_bank(args.bank)
    _check_levels(img.height, bank, args.levels)
    q = embed(img)
    try:
        image_profile = metrics.cumulative_profile(q)
    except ValueError as exc:
        raise CommandError(str(exc)) from exc
    pyramid_profile = metrics.cumulative_profile(engine.decompose(q, bank, args.levels))
    if args.out is None:
        raise CommandError("--out PATH is required for the profile CSV")
    metrics.write_profiles_csv(
        args.out, {"image": image_profile, "decomposition": pyramid_profile}
    )
    print(f"wrote {args.out}")
    return 0


def cmd_locations(args) -> int:
    img, _depth = _load_input(args)
    bank = _get_bank(args.bank)
    _check_levels(img.height, bank, args.levels)
    q = embed(img)
    _, q_report = pipelines.compress(engine.decompose(q, bank, args.levels), args.keep)

    # per-channel runs need real taps; fall back to haar for a
    # quaternion-valued bank
    channel_bank = bank if not np.any(bank.analysis[..., 1:]) else filters.builtin("haar")
    names = img.channel_names()
    channel_reports = []
    for plane in img.planes():
        scalar = np.zeros(plane.shape + (4,))
        scalar[..., 0] = plane
        _, rep = pipelines.compress(
            engine.decompose(scalar, channel_bank, args.levels), args.keep
        )
        channel_reports.append(rep)

    if len(channel_reports) == 4:
        comparison = pipelines.location_overhead(q_report, channel_reports)
        union, ratio = comparison.union_count, comparison.ratio
    else:
        stacked = np.vstack([r.kept_locations for r in channel_reports])
        union = int(np.unique(stacked, axis=0).shape[0])
        ratio = union / q_report.kept_count

    print(f"channel_bank: {channel_bank.name}")
    print(f"quaternionic_count: {q_report.kept_count}")
    for name, rep in zip(names, channel_reports):
        print(f"channel_{name}_count: {rep.kept_count}")
    print(f"union_count: {union}")
    print(f"union_over_quaternionic: {ratio:.4f}")
    if args.report:
        os.makedirs(args.report, exist_ok=True)
        pipelines.write_report(q_report, os.path.join(args.report, "quaternionic.txt"))
        for name, rep in zip(names, channel_reports):
            pipelines.write_report(rep, os.path.join(args.report, f"channel_{name}.txt"))
        print(f"wrote reports to {args.report}")
    return 0


def cmd_dr(args) -> int:
    try:
        sets = feasibility.load_sets(args.sets)
    except (OSError, ValueError) as exc:
        raise CommandError(str(exc)) from exc
    try:
        x0 = [float(tok) for tok in args.x0.replace(",", " ").split()]
    except ValueError:
        raise CommandError(f"could not parse --x0 {args.x0!r}") from None
    trace = feasibility.solve(sets, x0, tol=args.tol, max_iter=args.max_iter)
    print(f"sets: {len(sets)}")
    print(f"iterations: {trace.iterations}")
    print(f"converged: {trace.converged}")
    print(f"residual: {trace.residual:.3e}")
    if args.out:
        feasibility.write_trace_csv(trace, args.out)
        print(f"wrote {args.out}")
    return 0 if trace.converged else 1


# ---------------------------------------------------------------------------
# argument parsing


def _add_image_flags(p, levels_default):
    p.add_argument("--rgb", help="input RGB PNG (square, power-of-two side)")
    p.add_argument("--nir", help="optional NIR plane (PNG or PGM)")
    p.add_argument("--bank", default="qhaar",
                   help="builtin bank name or QWFB file (default: qhaar)")
    p.add_argument("--levels", type=int, default=levels_default,
                   help=f"decomposition depth (default: {levels_default})")
    p.add_argument("--out", help="output RGB PNG")
    p.add_argument("--out-nir", dest="out_nir",
                   help="output NIR plane (default: <out>.nir.png)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwave",
        description="Holistic colour-image processing with quaternion-valued wavelets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-filters", help="round-trip certificate of a bank")
    p.add_argument("--bank", default="qhaar")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate_filters)

    p = sub.add_parser("roundtrip", help="decompose + reconstruct, report the error")
    _add_image_flags(p, levels_default=8)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("decompose", help="write the coefficient pyramid")
    _add_image_flags(p, levels_default=8)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reconstruct", help="rebuild an image from a pyramid")
    p.add_argument("--pyramid", required=True, help="QPYR1 pyramid file")
    p.add_argument("--bank", default="qhaar")
    p.add_argument("--out", help="output RGB PNG")
    p.add_argument("--out-nir", dest="out_nir", help="output NIR plane")
    p.add_argument("--depth", type=int, default=8, choices=(8, 16),
                   help="output bit depth (default: 8)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("compress", help="keep the top fraction of coefficients")
    _add_image_flags(p, levels_default=PIPELINE_DEFAULTS["compress"]["levels"])
    p.add_argument("--keep", type=float, default=PIPELINE_DEFAULTS["compress"]["keep"],
                   help="fraction of coefficients to keep (default: 0.10)")
    p.add_argument("--report", help="write the kept-location report here")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("enhance", help="amplify detail coefficients")
    _add_image_flags(p, levels_default=PIPELINE_DEFAULTS["enhance"]["levels"])
    p.add_argument("--gain", type=float, default=PIPELINE_DEFAULTS["enhance"]["gain"],
                   help="detail gain (default: 1.25)")
    p.add_argument("--blur", type=float, default=0.0,
                   help="pre-blur the input with this Gaussian sigma (demo parity)")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("edges", help="discard the approximation coefficients")
    _add_image_flags(p, levels_default=PIPELINE_DEFAULTS["edges"]["levels"])
    p.set_defaults(func=cmd_edges)

    p = sub.add_parser("denoise", help="soft/hard threshold the details")
    _add_image_flags(p, levels_default=PIPELINE_DEFAULTS["denoise"]["levels"])
    p.add_argument("--mode", choices=("soft", "hard"), default="soft")
    p.add_argument("--sigma", type=float, default=PIPELINE_DEFAULTS["denoise"]["sigma"],
                   help="noise level for the universal threshold (default: 0.1)")
    p.add_argument("--threshold", type=float, default=None,
                   help="explicit threshold (overrides --sigma)")
    p.add_argument("--add-noise", dest="add_noise", type=float, default=0.0,
                   help="corrupt the input with Gaussian noise of this sigma first")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("profile", help="export cumulative energy profiles")
    _add_image_flags(p, levels_default=8)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("locations", help="kept-location comparison")
    _add_image_flags(p, levels_default=8)
    p.add_argument("--keep", type=float, default=0.10)
    p.add_argument("--report", help="directory for the per-run location reports")
    p.set_defaults(func=cmd_locations)

    p = sub.add_parser("dr", help="Douglas-Rachford feasibility run")
    p.add_argument("--sets", required=True, help="set-specification file")
    p.add_argument("--x0", required=True, help="start point, e.g. '-5.23,4.0'")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=1000)
    p.add_argument("--out", help="trace CSV path")
    p.set_defaults(func=cmd_dr)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
