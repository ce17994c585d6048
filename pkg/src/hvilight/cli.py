"""Command-line surface: convert, stats, train, enhance, eval.

Each subcommand wraps one library workflow; every numeric default
mirrors the corresponding module default, errors surface as a single
diagnostic line naming the module, and `--seed` makes the stochastic
command (train) bit-deterministic end to end.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import tensor as T
from .dataio import (checkpoint_load, checkpoint_save, load_image,
                     load_manifest, save_image)
from .hvi import HviConfig, HviImage, hvi_to_rgb, rgb_to_hvi
from .loss import LossConfig
from .metrics import (DEFAULT_COV_THRESHOLDS, EvalReport, covariance_report,
                      psnr, ssim, write_buckets_csv, write_records_csv,
                      write_report_json)
from .network import NetworkConfig, build
from .optim import TrainConfig, train


def _add_arch_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--base-channels", type=int, default=16,
                   help="width of the first level (default: %(default)s)")
    p.add_argument("--blocks-per-level", type=int, default=1,
                   help="interaction blocks stacked per level (default: %(default)s)")
    p.add_argument("--heads", type=int, default=4,
                   help="attention heads (default: %(default)s)")
    p.add_argument("--k", type=float, default=1.0,
                   help="chroma density exponent (default: %(default)s)")
    p.add_argument("--no-fusion-pre", action="store_true",
                   help="disable the fusion stage before the enhancement core")
    p.add_argument("--no-fusion-post", action="store_true",
                   help="disable the fusion stage after the enhancement core")
    p.add_argument("--plain-attention", action="store_true",
                   help="swap the dynamic enhancement core for plain cross attention")


def _net_config(args) -> NetworkConfig:
    return NetworkConfig(
        base_channels=args.base_channels,
        blocks_per_level=args.blocks_per_level,
        heads=args.heads,
        density_k=args.k,
        fuse_pre=not args.no_fusion_pre,
        fuse_post=not args.no_fusion_post,
        enhancement="plain" if args.plain_attention else "dynamic",
    )


def _parse_thresholds(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hvilight",
        description="Low-light enhancement in a decoupled luminance/chrominance space.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "convert",
        help="convert an image between RGB and the decoupled color planes",
        description="RGB -> planes stores (H, V, I) as a 3-channel image with the "
                    "signed chroma planes remapped via (x+1)/2; hvi2rgb inverts that.")
    p.add_argument("--in", dest="input", required=True, help="input image (PNG or PPM)")
    p.add_argument("--out", dest="output", required=True, help="output image path")
    p.add_argument("--direction", choices=("rgb2hvi", "hvi2rgb"), default="rgb2hvi",
                   help="conversion direction (default: %(default)s)")
    p.add_argument("--k", type=float, default=1.0,
                   help="chroma density exponent (default: %(default)s)")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser(
        "stats",
        help="chroma-covariance report over a paired manifest",
        description="Buckets ground-truth images by |Cov(H, V)| of their chroma planes.")
    p.add_argument("--manifest", required=True, help="CSV manifest (low_path,gt_path)")
    p.add_argument("--out", required=True, help="per-image report CSV path")
    p.add_argument("--thresholds", default=",".join(str(t) for t in DEFAULT_COV_THRESHOLDS),
                   help="bucket thresholds (default: %(default)s)")
    p.add_argument("--json", default=None, help="also write the full report as JSON")
    p.add_argument("--plane-source", choices=("gt", "low"), default="gt",
                   help="which member's planes to analyze (default: %(default)s)")
    p.add_argument("--k", type=float, default=1.0,
                   help="chroma density exponent (default: %(default)s)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("train", help="train on a paired manifest",
                       description="Patch-based training with Adam and cosine annealing.")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--patch", type=int, default=32,
                   help="square patch size (default: %(default)s)")
    p.add_argument("--batch", type=int, default=4,
                   help="batch size (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0,
                   help="controls init and sampling (default: %(default)s)")
    p.add_argument("--log", default=None, help="training log CSV path")
    p.add_argument("--lr-max", type=float, default=1e-4,
                   help="initial learning rate (default: %(default)s)")
    p.add_argument("--lr-min", type=float, default=1e-7,
                   help="final learning rate (default: %(default)s)")
    p.add_argument("--loss", choices=("covariance", "l1", "l2"), default="covariance",
                   help="training objective (default: %(default)s)")
    p.add_argument("--rgb-loss", action="store_true",
                   help="add a plain RGB MSE companion term")
    p.add_argument("--holdout", type=int, default=None,
                   help="manifest index excluded from training and scored periodically")
    _add_arch_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("enhance", help="run a checkpoint on one image")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    _add_arch_flags(p)
    p.set_defaults(func=_cmd_enhance)

    p = sub.add_parser("eval", help="PSNR/SSIM over a paired manifest",
                       description="Writes per-pair metrics plus corpus means; optionally "
                                   "groups mean PSNR by chroma-covariance bucket.")
    p.add_argument("--manifest", required=True)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--out", required=True, help="evaluation CSV path")
    p.add_argument("--by-covariance", action="store_true",
                   help="also write per-bucket mean PSNR next to --out")
    p.add_argument("--thresholds", default=",".join(str(t) for t in DEFAULT_COV_THRESHOLDS),
                   help="bucket thresholds (default: %(default)s)")
    _add_arch_flags(p)
    p.set_defaults(func=_cmd_eval)

    return parser


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------

def _cmd_convert(args) -> int:
    cfg = HviConfig(density_k=args.k)
    img = load_image(args.input)
    if args.direction == "rgb2hvi":
        planes = rgb_to_hvi(img, cfg)
        stored = T.concat([
            T.mul(T.add(planes.h, 1.0), 0.5),
            T.mul(T.add(planes.v, 1.0), 0.5),
            planes.i,
        ], axis=1)
        save_image(stored, args.output)
    else:
        h = T.sub(T.mul(img[:, 0:1], 2.0), 1.0)
        v = T.sub(T.mul(img[:, 1:2], 2.0), 1.0)
        i = img[:, 2:3]
        save_image(hvi_to_rgb(HviImage(h, v, i), cfg), args.output)
    return 0


def _cmd_stats(args) -> int:
    rows = load_manifest(args.manifest)
    thresholds = _parse_thresholds(args.thresholds)
    cfg = HviConfig(density_k=args.k)
    images = []
    for row in rows:
        source = row.gt_path if args.plane_source == "gt" else row.low_path
        images.append((str(source), load_image(source)))
    records, buckets, summary = covariance_report(images, thresholds, cfg)
    write_records_csv(records, args.out)
    buckets_path = str(Path(args.out).with_suffix(".buckets.csv"))
    write_buckets_csv(buckets, buckets_path)
    if args.json:
        write_report_json(records, buckets, summary, args.json)
    print(f"{summary['total']} images: {summary['at_or_below_0.01']} at or below 0.01, "
          f"{summary['above_0.01']} above; buckets in {buckets_path}")
    return 0


def _cmd_train(args) -> int:
    rows = load_manifest(args.manifest)
    pairs = [(load_image(r.low_path), load_image(r.gt_path)) for r in rows]
    net = build(_net_config(args), seed=args.seed)
    cfg = TrainConfig(
        total_steps=args.steps, batch_size=args.batch, patch_size=args.patch,
        seed=args.seed, lr_max=args.lr_max, lr_min=args.lr_min,
        loss=LossConfig(variant=args.loss, rgb_companion=args.rgb_loss),
        holdout=args.holdout,
    )
    log = train(net, pairs, cfg, log_path=args.log)
    checkpoint_save(net.params, args.out)
    print(f"trained {args.steps} steps; final total loss {log[-1]['total']:.6f}; "
          f"checkpoint at {args.out}")
    return 0


def _cmd_enhance(args) -> int:
    net = build(_net_config(args), seed=0)
    checkpoint_load(args.ckpt, into=net.params)
    img = load_image(args.input)
    with T.no_grad():
        out, _ = net.forward(img)
    save_image(out, args.output)
    return 0


def _cmd_eval(args) -> int:
    rows = load_manifest(args.manifest)
    net = build(_net_config(args), seed=0)
    checkpoint_load(args.ckpt, into=net.params)
    thresholds = _parse_thresholds(args.thresholds)
    cfg = _net_config(args)

    gts = []
    psnr_in = []
    psnr_by_id = {}
    report = EvalReport(ids=[], psnr_values=[], ssim_values=[])
    for row in rows:
        low = load_image(row.low_path)
        gt = load_image(row.gt_path)
        with T.no_grad():
            out, _ = net.forward(low)
        pid = str(row.low_path)
        gts.append((pid, gt))
        psnr_in.append(float(psnr(low, gt)[0]))
        report.ids.append(pid)
        report.psnr_values.append(float(psnr(out, gt)[0]))
        report.ssim_values.append(float(ssim(out, gt)[0]))
        psnr_by_id[pid] = report.psnr_values[-1]

    lines = ["low_path,psnr_input,psnr_output,ssim_output"]
    for pid, pi, po, so in zip(report.ids, psnr_in, report.psnr_values,
                               report.ssim_values):
        lines.append(f"{pid},{pi!r},{po!r},{so!r}")
    mean_in = float(np.mean(psnr_in))
    lines.append(f"mean,{mean_in!r},{report.mean_psnr!r},{report.mean_ssim!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")

    if args.by_covariance:
        _, buckets, _ = covariance_report(gts, thresholds, cfg.hvi,
                                          psnr_by_id=psnr_by_id)
        write_buckets_csv(buckets, str(Path(args.out).with_suffix(".buckets.csv")))
    print(f"eval over {len(report.ids)} pairs: mean input PSNR {mean_in:.3f} dB, "
          f"mean output PSNR {report.mean_psnr:.3f} dB, "
          f"mean SSIM {report.mean_ssim:.4f}")
    return 0


def run(argv) -> int:
    """Parse and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own diagnostics
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # single-line diagnostic, never a stack dump
        module = getattr(type(exc), "module", None) or getattr(exc, "module", None)
        prefix = f"error[{module}]" if module else "error"
        print(f"{prefix}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
