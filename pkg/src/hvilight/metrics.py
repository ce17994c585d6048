"""Quality metrics and the chroma-covariance corpus analysis.

PSNR runs on full RGB tensors against a unit dynamic range. SSIM is the
standard single-scale measure on the luma channel with an 11x11 Gaussian
window (sigma 1.5, K1 = 0.01, K2 = 0.03), evaluated over valid window
positions only. The covariance report converts ground-truth images to
the decoupled color space, computes |E(HV) - E(H)E(V)| per image and
buckets the corpus by threshold, optionally attaching per-bucket mean
PSNR of supplied predictions.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .hvi import HviConfig, rgb_to_hvi
from .loss import covariance
from .tensor import Tensor

PSNR_CAP_DB = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
LUMA_WEIGHTS = (0.299, 0.587, 0.114)  # ITU-R 601
DEFAULT_COV_THRESHOLDS = (0.002, 0.004, 0.006, 0.008, 0.01)
HEADLINE_COV_SPLIT = 0.01


class MetricsError(ValueError):
    module = "metrics"


def _as_array(x) -> np.ndarray:
    a = x.data if isinstance(x, Tensor) else np.asarray(x)
    if a.ndim != 4 or a.shape[1] != 3:
        raise MetricsError(f"expected B x 3 x H x W, got {a.shape}")
    return a.astype(np.float64)


def psnr(a, b) -> np.ndarray:
    """Per-image PSNR in dB (peak 1.0); identical images cap at 99 dB."""
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape != bb.shape:
        raise MetricsError(f"shapes differ: {aa.shape} vs {bb.shape}")
    mse = ((aa - bb) ** 2).mean(axis=(1, 2, 3))
    out = np.empty(len(mse))
    for i, m in enumerate(mse):
        out[i] = PSNR_CAP_DB if m == 0.0 else min(PSNR_CAP_DB, 10.0 * math.log10(1.0 / m))
    return out


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size, dtype=np.float64) - half
    g1 = np.exp(-(coords ** 2) / (2.0 * sigma ** 2))
    win = np.outer(g1, g1)
    return win / win.sum()


def _luma(img: np.ndarray) -> np.ndarray:
    r, g, b = img[:, 0], img[:, 1], img[:, 2]
    return LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b


def _windowed_mean(plane: np.ndarray, win: np.ndarray) -> np.ndarray:
    # valid-position weighted local means via explicit windows; row chunks
    # keep the intermediate bounded
    view = np.lib.stride_tricks.sliding_window_view(plane, win.shape)
    out = np.empty(view.shape[:2])
    chunk = max(1, int(4e6 // (view.shape[1] * win.size)))
    for r0 in range(0, view.shape[0], chunk):
        out[r0:r0 + chunk] = np.tensordot(view[r0:r0 + chunk], win, axes=((2, 3), (0, 1)))
    return out


def ssim(a, b) -> np.ndarray:
    """Per-image SSIM on the luma channel, unit dynamic range."""
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape != bb.shape:
        raise MetricsError(f"shapes differ: {aa.shape} vs {bb.shape}")
    h, w = aa.shape[2], aa.shape[3]
    if h < SSIM_WINDOW or w < SSIM_WINDOW:
        raise MetricsError(
            f"image {h}x{w} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    win = gaussian_window()
    c1 = 0.01 ** 2
    c2 = 0.03 ** 2
    xl, yl = _luma(aa), _luma(bb)
    out = np.empty(len(aa))
    for i in range(len(aa)):
        x, y = xl[i], yl[i]
        mx = _windowed_mean(x, win)
        my = _windowed_mean(y, win)
        mxx = _windowed_mean(x * x, win)
        myy = _windowed_mean(y * y, win)
        mxy = _windowed_mean(x * y, win)
        vx = mxx - mx * mx
        vy = myy - my * my
        cxy = mxy - mx * my
        lum = (2 * mx * my + c1) / (mx * mx + my * my + c1)
        con = (2 * cxy + c2) / (vx + vy + c2)
        out[i] = float((lum * con).mean())
    return out


@dataclass
class EvalReport:
    """Per-image quality plus corpus means."""

    ids: list[str]
    psnr_values: list[float]
    ssim_values: list[float]

    @property
    def mean_psnr(self) -> float:
        return float(np.mean(self.psnr_values))

    @property
    def mean_ssim(self) -> float:
        return float(np.mean(self.ssim_values))


@dataclass
class CovRecord:
    image_id: str
    cov: float  # signed covariance of the ground-truth chroma planes
    bucket: str


@dataclass
class BucketRow:
    lo: float
    hi: float  # math.inf for the open top bucket
    count: int
    fraction: float
    mean_psnr: float | None = None

    @property
    def label(self) -> str:
        if self.lo == 0.0:
            return f"<={self.hi:g}"
        if math.isinf(self.hi):
            return f">{self.lo:g}"
        return f"({self.lo:g},{self.hi:g}]"


def bucket_edges(thresholds=DEFAULT_COV_THRESHOLDS) -> list[tuple[float, float]]:
    ts = sorted(float(t) for t in thresholds)
    if not ts or ts[0] <= 0:
        raise MetricsError("thresholds must be positive and non-empty")
    edges = [(0.0, ts[0])]
    edges += [(ts[i], ts[i + 1]) for i in range(len(ts) - 1)]
    edges.append((ts[-1], math.inf))
    return edges


def bucket_label(cov_abs: float, thresholds=DEFAULT_COV_THRESHOLDS) -> str:
    for lo, hi in bucket_edges(thresholds):
        if (cov_abs <= hi if lo == 0.0 else lo < cov_abs <= hi):
            return BucketRow(lo, hi, 0, 0.0).label
    raise MetricsError(f"unbucketable covariance {cov_abs}")  # pragma: no cover


def chroma_covariance(rgb, cfg: HviConfig = HviConfig()) -> float:
    """|signed| is what gets bucketed; this returns the signed value."""
    t = rgb if isinstance(rgb, Tensor) else Tensor(rgb)
    hvi = rgb_to_hvi(t, cfg)
    return covariance(hvi.h, hvi.v)


def covariance_report(images: list[tuple[str, object]],
                      thresholds=DEFAULT_COV_THRESHOLDS,
                      cfg: HviConfig = HviConfig(),
                      psnr_by_id: dict[str, float] | None = None,
                      ) -> tuple[list[CovRecord], list[BucketRow], dict]:
    """Bucket a corpus by absolute chroma covariance.

    images: (image_id, rgb tensor/array) pairs, usually ground truths.
    Returns per-image records, one row per bucket (finest partition, with
    mean prediction PSNR when supplied) and a summary with the explicit
    split at the headline 0.01 threshold.
    """
    edges = bucket_edges(thresholds)
    records = []
    for image_id, rgb in images:
        cov = chroma_covariance(rgb, cfg)
        records.append(CovRecord(image_id=image_id, cov=cov,
                                 bucket=bucket_label(abs(cov), thresholds)))
    rows = []
    total = len(records)
    for lo, hi in edges:
        members = [r for r in records
                   if (abs(r.cov) <= hi if lo == 0.0 else lo < abs(r.cov) <= hi)]
        row = BucketRow(lo=lo, hi=hi, count=len(members),
                        fraction=(len(members) / total) if total else 0.0)
        if psnr_by_id is not None and members:
            vals = [psnr_by_id[r.image_id] for r in members if r.image_id in psnr_by_id]
            row.mean_psnr = float(np.mean(vals)) if vals else None
        rows.append(row)
    below = sum(1 for r in records if abs(r.cov) <= HEADLINE_COV_SPLIT)
    summary = {
        "total": total,
        "at_or_below_0.01": below,
        "above_0.01": total - below,
        "fraction_at_or_below_0.01": (below / total) if total else 0.0,
    }
    return records, rows, summary


def write_records_csv(records: list[CovRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "cov", "bucket"])
        for r in records:
            writer.writerow([r.image_id, repr(r.cov), r.bucket])


def write_buckets_csv(rows: list[BucketRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bucket_lo", "bucket_hi", "count", "fraction", "mean_psnr"])
        for row in rows:
            writer.writerow([row.lo, "inf" if math.isinf(row.hi) else row.hi,
                             row.count, repr(row.fraction),
                             "" if row.mean_psnr is None else repr(row.mean_psnr)])


def write_report_json(records: list[CovRecord], rows: list[BucketRow],
                      summary: dict, path: str) -> None:
    payload = {
        "records": [{"image_id": r.image_id, "cov": r.cov, "bucket": r.bucket}
                    for r in records],
        "buckets": [{"lo": b.lo, "hi": None if math.isinf(b.hi) else b.hi,
                     "count": b.count, "fraction": b.fraction,
                     "mean_psnr": b.mean_psnr} for b in rows],
        "summary": summary,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
