"""The chroma-covariance lens on a corpus: images with large homogeneous
regions concentrate their chroma planes, giving near-zero covariance;
strongly two-toned images co-vary. The report buckets a corpus by
|Cov(H, V)| with the headline split at 0.01.

Run: python demos/05_covariance_stats.py
"""

import numpy as np

from hvilight.loss import covariance
from hvilight.hvi import rgb_to_hvi
from hvilight.metrics import covariance_report
from hvilight.synthetic import make_synthetic_pairs
from hvilight.tensor import Tensor

print("== constructed extremes ==")
flat = np.empty((1, 3, 16, 16), dtype=np.float32)
flat[0, 0], flat[0, 1], flat[0, 2] = 0.8, 0.4, 0.2

two_tone = np.zeros((1, 3, 16, 16), dtype=np.float32)
two_tone[0, 0] = 1.0
two_tone[0, 1, :, 8:] = 1.0  # left half red, right half yellow

for name, img in [("flat color", flat), ("two tone", two_tone)]:
    planes = rgb_to_hvi(Tensor(img))
    cov = covariance(planes.h, planes.v)
    print(f"{name:11s} Cov(H, V) = {cov:+.5f}")

print("\n== corpus report ==")
images = [(f"synthetic_{i}", gt)
          for i, (_, gt) in enumerate(make_synthetic_pairs(count=12, size=48, seed=3))]
images += [("flat", Tensor(flat)), ("two_tone", Tensor(two_tone))]
records, rows, summary = covariance_report(images)

print("image           cov         bucket")
for r in records:
    print(f"{r.image_id:14s} {r.cov:+.6f}   {r.bucket}")

print("\nbucket        count  fraction")
for row in rows:
    print(f"{row.label:12s} {row.count:>5d}  {row.fraction:.3f}")
print(f"\nat or below 0.01: {summary['at_or_below_0.01']} of {summary['total']} "
      f"({summary['fraction_at_or_below_0.01']:.0%})")
