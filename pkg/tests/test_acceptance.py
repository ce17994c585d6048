"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to see them).

Criteria cover: the finite-difference gradient gate across ops, blocks,
the full network and the objective; color-space round trips; block
arithmetic against straight-line transcriptions; closed-form loss
values; identity-at-init; the desk-scale training gate with bit-exact
reruns; covariance bucketing; metric values; file-format round trips
with named errors; and ablation wiring.
"""

import math
import time

import numpy as np
import pytest

import hvilight.tensor as T
from hvilight.attention import AttentionConfig
from hvilight.blocks import AttentionFusion, CrossEnhance, DualStreamBlock
from hvilight.cli import run as cli_run
from hvilight.dataio import (BadMagicError, RegistryMismatchError,
                             checkpoint_load, checkpoint_save, load_image,
                             save_image, to_bytes_image, write_manifest)
from hvilight.hvi import HviConfig, HviImage, c_k, hvi_to_rgb, rgb_to_hvi
from hvilight.loss import (LossConfig, covariance, joint_mean_loss,
                           luminance_weights, total_loss, weighted_chroma_loss)
from hvilight.metrics import (bucket_edges, covariance_report,
                              gaussian_window, psnr, ssim)
from hvilight.network import NetworkConfig, build
from hvilight.nn import ParamRegistry
from hvilight.optim import TrainConfig, cosine_lr, train
from hvilight.synthetic import make_synthetic_pairs
from hvilight.tensor import Tensor

from helpers import (FD_TOL, enhance_oracle, fd_worst_rel_err, float64_params,
                     fusion_oracle, loss_oracle, ssim_oracle)


def report(criterion: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"{status}: {criterion}{suffix}")


@pytest.fixture(scope="module")
def corpus16():
    return make_synthetic_pairs(count=16, size=64, seed=100)


class TestCriterion01GradientOracles:
    """Every differentiable op, each block, the full network and the
    objective agree with double-precision central differences."""

    def test_gradient_suite(self):
        start = time.monotonic()
        rng = np.random.default_rng(1001)
        worst_overall = 0.0

        def check(f, tensors, eps=1e-3, coords=20):
            nonlocal worst_overall
            for t in tensors:
                t.grad = None
            worst = fd_worst_rel_err(f, tensors, eps=eps,
                                     max_coords_per_tensor=coords, rng=rng)
            worst_overall = max(worst_overall, worst)
            assert worst <= FD_TOL, f"gradient mismatch {worst:.2e}"

        def mk(shape, lo=-2.0, hi=2.0):
            return Tensor(rng.uniform(lo, hi, shape), requires_grad=True,
                          dtype=np.float64)

        # elementwise, all kinds
        a, b = mk((3, 5)), mk((3, 5))
        pos = mk((3, 5), 0.3, 2.0)
        den = mk((3, 5), 0.5, 2.0)
        check(lambda: T.sum_(T.mul(T.add(a, b), T.sub(a, b))), [a, b])
        check(lambda: T.sum_(T.div(a, den)), [a, den])
        check(lambda: T.sum_(T.mul(T.sigmoid(a), T.exp(T.mul(b, 0.3)))), [a, b])
        check(lambda: T.sum_(T.add(T.sqrt(pos), T.log(pos))), [pos])
        check(lambda: T.sum_(T.abs_(den)), [den])          # away from the kink
        check(lambda: T.sum_(T.relu(den)), [den])
        check(lambda: T.sum_(T.gelu(a)), [a])
        check(lambda: T.sum_(T.mul(T.sin(a), T.cos(b))), [a, b])
        check(lambda: T.sum_(T.atan2(pos, den)), [pos, den])
        check(lambda: T.sum_(T.pow_scalar(pos, 1.7)), [pos])
        check(lambda: T.sum_(T.clamp(T.mul(a, 10.0), -30.0, 30.0)), [a])
        check(lambda: T.sum_(T.add(T.mul(a, 2.5), 1.25)), [a])  # scalar forms
        check(lambda: T.sum_(T.mul(T.maximum(a, b), T.minimum(a, b))), [a, b])
        check(lambda: T.sum_(T.mul(T.floor(T.add(pos, 0.05)), a)), [pos, a])

        # reductions
        x = mk((2, 4, 5))
        check(lambda: T.sum_(T.mul(T.mean(x, (0, 2)), T.mean(x, (0, 2)))), [x])
        check(lambda: T.sum_(T.mul(T.sum_(x, 1), T.sum_(x, 1))), [x])
        check(lambda: T.sum_(T.max_reduce(x, 2)), [x])
        check(lambda: T.variance(x, (1, 2)).sum(), [x])

        # matmul and conv2d
        m1, m2 = mk((2, 3, 4)), mk((2, 4, 5))
        check(lambda: T.variance(T.matmul(m1, m2)), [m1, m2])
        cx, cw, cb = mk((1, 2, 5, 5)), mk((3, 2, 3, 3), -1, 1), mk((3,), -1, 1)
        check(lambda: T.variance(T.conv2d(cx, cw, cb, stride=2, padding=1)),
              [cx, cw, cb])
        gx, gw = mk((1, 4, 5, 5)), mk((4, 2, 3, 3), -1, 1)
        check(lambda: T.variance(T.conv2d(gx, gw, dilation=2, padding=2, groups=2)),
              [gx, gw])

        # structural
        s = mk((1, 4, 4, 4))
        check(lambda: T.variance(T.reshape(T.permute(s, (0, 2, 3, 1)), (1, 64))), [s])
        c1, c2 = mk((1, 2, 3, 3)), mk((1, 3, 3, 3))
        check(lambda: T.variance(T.concat([c1, c2], 1)), [c1, c2])
        check(lambda: T.variance(s[:, 1:3, 1:, :2]), [s])
        check(lambda: T.variance(T.pad_zero(s, [(0, 0), (0, 0), (1, 2), (2, 1)])), [s])
        check(lambda: T.variance(T.upsample_nearest2x(s)), [s])
        check(lambda: T.sum_(T.mul(T.softmax(T.reshape(s, (4, 16)), -1),
                                   T.reshape(s, (4, 16)))), [s])

        # one dual-stream interaction block (finer step: deep composite)
        reg = ParamRegistry()
        blk = DualStreamBlock(reg, "d", AttentionConfig(channels=8),
                              np.random.default_rng(7))
        for name, t in reg.items():
            if name.endswith(".weight") and not np.any(t.data):
                t.data = rng.uniform(-0.2, 0.2, t.shape).astype(np.float32)
            t.data = t.data.astype(np.float64)
        bi, bh = mk((1, 8, 4, 4)), mk((1, 8, 4, 4))
        wgt = Tensor(rng.uniform(-1, 1, (1, 8, 4, 4)), dtype=np.float64)

        def block_loss():
            oi, oh = blk(bi, bh)
            return T.mean(T.mul(T.add(oi, oh), wgt))

        picked = [bi, bh, blk.fuse_pre_i.mix_channel, blk.core_i.ffn_scale,
                  blk.core_hv.cross.k_proj.weight, blk.fuse_post_i.pixel_gate_c.out.weight]
        check(block_loss, picked, eps=1e-4, coords=6)

        # full network on 1 x 3 x 8 x 8 through the training objective
        net = build(NetworkConfig(base_channels=4, heads=2), seed=3)
        for name, t in net.params.items():
            if name.endswith(".weight") and not np.any(t.data):
                t.data = rng.uniform(-0.05, 0.05, t.shape).astype(np.float32)
        params = float64_params(net)
        nx = Tensor(rng.uniform(0.1, 0.9, (1, 3, 8, 8)), requires_grad=True,
                    dtype=np.float64)
        gt = Tensor(rng.uniform(0.1, 0.9, (1, 3, 8, 8)), dtype=np.float64)
        with T.no_grad():
            gt_hvi = rgb_to_hvi(gt)
        _, out0 = net.forward(nx)
        frozen = luminance_weights(out0.i, gt_hvi.i)

        def net_loss():
            _, hvi_out = net.forward(nx)
            return total_loss(hvi_out, gt_hvi, weights_override=frozen).graph

        pick_rng = np.random.default_rng(5)
        net_picked = [nx] + [params[i]
                             for i in pick_rng.choice(len(params), 8, replace=False)]
        check(net_loss, net_picked, eps=1e-4, coords=4)

        # the objective alone, with respect to its prediction planes
        pr = HviImage(mk((2, 1, 4, 4), -0.8, 0.8), mk((2, 1, 4, 4), -0.8, 0.8),
                      mk((2, 1, 4, 4), 0.1, 0.9))
        gtp = HviImage(mk((2, 1, 4, 4), -0.8, 0.8), mk((2, 1, 4, 4), -0.8, 0.8),
                       mk((2, 1, 4, 4), 0.1, 0.9))
        frozen2 = luminance_weights(pr.i, gtp.i)
        check(lambda: total_loss(pr, gtp, weights_override=frozen2).graph,
              [pr.h, pr.v, pr.i], coords=12)

        elapsed = time.monotonic() - start
        ok = elapsed < 120.0
        report("criterion 1, gradient oracle suite",
               ok, f"worst rel err {worst_overall:.2e}, {elapsed:.1f}s")
        assert ok, f"gradient suite took {elapsed:.1f}s (budget 120s)"


class TestCriterion02ColorRoundTrip:
    def test_round_trip_and_monotone_density(self):
        rng = np.random.default_rng(1002)
        triples = rng.uniform(0, 1, (10_000, 3))
        fixtures = np.array([
            [0, 0, 0], [1, 1, 1], [0.5, 0.5, 0.5], [0.25, 0.25, 0.25],
            [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1], [1, 0, 1],
        ])
        all_rgb = np.concatenate([triples, fixtures])
        img = Tensor(np.ascontiguousarray(all_rgb.T)[None, :, None, :].astype(np.float32))
        back = hvi_to_rgb(rgb_to_hvi(img))
        worst = np.abs(back.data - img.data).max()

        gray = np.broadcast_to(rng.uniform(0, 1, (1, 1, 8, 8)), (1, 3, 8, 8))
        planes = rgb_to_hvi(Tensor(gray.copy().astype(np.float32)))
        gray_zero = np.all(planes.h.data == 0.0) and np.all(planes.v.data == 0.0)

        grid = np.linspace(0, 1, 1024)
        curve = c_k(Tensor(grid, dtype=np.float64), HviConfig()).data
        monotone = bool(np.all(np.diff(curve) > 0))

        ok = worst <= 1e-5 and gray_zero and monotone
        report("criterion 2, color-space round trip", ok,
               f"max abs err {worst:.2e}, grayscale zero chroma {gray_zero}, "
               f"density curve monotone {monotone}")
        assert worst <= 1e-5
        assert gray_zero and monotone


class TestCriterion03EquationOracles:
    def test_block_and_loss_transcriptions(self):
        rng = np.random.default_rng(1003)
        reg = ParamRegistry()
        cfg = AttentionConfig(channels=8)
        fuse = AttentionFusion(reg, "f", cfg, np.random.default_rng(11))
        core = CrossEnhance(reg, "c", cfg, np.random.default_rng(12))
        for conv in (core.cross.out_proj, core.ffn.project, core.multi_branch.fuse):
            conv.weight.data = rng.uniform(-0.3, 0.3, conv.weight.shape).astype(np.float32)
        core.fused_scale.data[:] = 0.4
        for t in reg.tensors():
            t.data = t.data.astype(np.float64)

        worst_fuse = worst_core = worst_loss = 0.0
        for _ in range(100):
            p = rng.uniform(-2, 2, (1, 8, 8, 8))
            o = rng.uniform(-2, 2, (1, 8, 8, 8))
            got = fuse(Tensor(p, dtype=np.float64), Tensor(o, dtype=np.float64)).data
            worst_fuse = max(worst_fuse, np.abs(got - fusion_oracle(fuse, p, o)).max())

            got = core(Tensor(p, dtype=np.float64), Tensor(o, dtype=np.float64)).data
            worst_core = max(worst_core, np.abs(got - enhance_oracle(core, p, o)).max())

            def planes(lo, hi):
                return Tensor(rng.uniform(lo, hi, (2, 1, 4, 4)), dtype=np.float64)

            pred = HviImage(planes(-0.9, 0.9), planes(-0.9, 0.9), planes(0, 1))
            gt = HviImage(planes(-0.9, 0.9), planes(-0.9, 0.9), planes(0, 1))
            bd = total_loss(pred, gt)
            expect = loss_oracle((pred.h.data, pred.v.data, pred.i.data),
                                 (gt.h.data, gt.v.data, gt.i.data))
            worst_loss = max(worst_loss, abs(bd.total - expect["total"]),
                             abs(bd.l_ihv - expect["l_ihv"]),
                             abs(bd.l_hv - expect["l_hv"]))

        ok = worst_fuse <= 1e-6 and worst_core <= 1e-6 and worst_loss <= 1e-9
        report("criterion 3, straight-line equation oracles", ok,
               f"fusion {worst_fuse:.2e}, enhancement {worst_core:.2e}, "
               f"loss {worst_loss:.2e}")
        assert ok


class TestCriterion04ClosedFormLossValues:
    def test_tagged_values(self):
        def plane(vals):
            return Tensor(np.asarray(vals, dtype=np.float64).reshape(1, 1, 1, -1),
                          dtype=np.float64)

        w_h, w_v = luminance_weights(plane([0.0, 0.4]), plane([0.0, 0.0]))
        cov = covariance(plane([0.0, 1.0]), plane([0.0, 1.0]))
        pred = HviImage(plane([1.0, 1.0]), plane([0.5, 0.5]), plane([0.0, 0.0]))
        gt = HviImage(plane([1.0, 1.0]), plane([0.3, 0.3]), plane([0.0, 0.0]))
        jm = joint_mean_loss(pred, gt).item()
        hand = weighted_chroma_loss(
            HviImage(plane([0.1, 0.1]), plane([math.sqrt(0.02)] * 2), plane([0.2, 0.2])),
            HviImage(plane([0.0, 0.0]), plane([0.0, 0.0]), plane([0.0, 0.0]))).item()

        checks = {
            "w_h": (w_h, 1.2), "w_v": (w_v, 1.2),
            "covariance": (cov, 0.25), "joint_mean": (jm, 0.04),
            "weighted_chroma": (hand, 0.032),
        }
        worst = max(abs(got - want) for got, want in checks.values())
        ok = worst <= 1e-9
        report("criterion 4, closed-form loss values", ok, f"worst abs err {worst:.2e}")
        assert ok, checks


class TestCriterion05IdentityAtInit:
    def test_identity_and_shapes(self):
        net = build(NetworkConfig(base_channels=8), seed=1004)
        rng = np.random.default_rng(1004)
        worst = 0.0
        for hw in (8, 33, 64, 65):
            x = rng.uniform(0, 1, (1, 3, hw, hw)).astype(np.float32)
            with T.no_grad():
                out, _ = net.forward(Tensor(x))
            assert out.shape == (1, 3, hw, hw)
            worst = max(worst, float(np.abs(out.data - x).max()))
        ok = worst <= 1e-5
        report("criterion 5, identity at init", ok,
               f"max |out - in| {worst:.2e} over sizes 8/33/64/65")
        assert ok


class TestCriterion06DeskScaleTraining:
    def test_training_gate(self, corpus16):
        cfg = TrainConfig(total_steps=300, batch_size=4, patch_size=32, seed=2024)

        def one_run():
            net = build(NetworkConfig(), seed=2024)
            log = train(net, corpus16, cfg)
            return net, log

        start = time.monotonic()
        net, log = one_run()
        elapsed = time.monotonic() - start

        early = float(np.mean([r["total"] for r in log[:5]]))
        late = float(np.mean([r["total"] for r in log[-5:]]))
        drop_ok = late <= 0.5 * early

        gains_in, gains_out = [], []
        for low, gt in corpus16:
            with T.no_grad():
                out, _ = net.forward(low)
            gains_in.append(float(psnr(low, gt)[0]))
            gains_out.append(float(psnr(out, gt)[0]))
        psnr_in = float(np.mean(gains_in))
        psnr_out = float(np.mean(gains_out))
        psnr_ok = psnr_out >= psnr_in + 3.0

        net2, _ = one_run()
        bits1 = b"".join(t.data.tobytes() for t in net.params.tensors())
        bits2 = b"".join(t.data.tobytes() for t in net2.params.tensors())
        deterministic = bits1 == bits2

        nan_free = all(np.isfinite(r["total"]) for r in log)
        time_ok = elapsed <= 600.0
        ok = drop_ok and psnr_ok and deterministic and nan_free and time_ok
        report("criterion 6, desk-scale training", ok,
               f"loss {early:.4f}->{late:.4f}, PSNR {psnr_in:.2f}->{psnr_out:.2f} dB, "
               f"bit-identical reruns {deterministic}, {elapsed:.0f}s")
        assert drop_ok, (early, late)
        assert psnr_ok, (psnr_in, psnr_out)
        assert deterministic and nan_free
        assert time_ok, f"{elapsed:.0f}s exceeds the 600s budget"


class TestCriterion07CovarianceAnalysis:
    def test_stats_fixtures(self, tmp_path):
        flat = np.empty((1, 3, 16, 16), dtype=np.float32)
        flat[0, 0], flat[0, 1], flat[0, 2] = 0.8, 0.4, 0.2
        corr = np.zeros((1, 3, 16, 16), dtype=np.float32)
        corr[0, 0] = 1.0
        corr[0, 1, :, 8:] = 1.0
        save_image(Tensor(flat), tmp_path / "flat.png")
        save_image(Tensor(corr), tmp_path / "corr.png")
        write_manifest([("flat.png", "flat.png"), ("corr.png", "corr.png")],
                       tmp_path / "m.csv")
        rc = cli_run(["stats", "--manifest", str(tmp_path / "m.csv"),
                      "--out", str(tmp_path / "report.csv")])
        assert rc == 0

        lines = (tmp_path / "report.csv").read_text().splitlines()[1:]
        by_name = {l.split(",")[0]: (float(l.split(",")[1]), l.split(",")[2])
                   for l in lines}
        flat_cov, flat_bucket = by_name[str(tmp_path / "flat.png")]
        corr_cov, corr_bucket = by_name[str(tmp_path / "corr.png")]

        records, rows, summary = covariance_report(
            [("flat", Tensor(flat)), ("corr", Tensor(corr))],
            psnr_by_id={"flat": 35.0, "corr": 22.0})
        fractions_ok = abs(sum(r.fraction for r in rows) - 1.0) <= 1e-12
        # the grouping: fine-grained buckets at and below the headline 0.01
        # threshold plus the single open bucket above it
        shape_ok = (len(rows) == len(bucket_edges()) == 6
                    and rows[-1].lo == 0.01 and math.isinf(rows[-1].hi)
                    and summary["at_or_below_0.01"] == 1
                    and summary["above_0.01"] == 1)
        psnr_table_ok = rows[0].mean_psnr == 35.0 and rows[-1].mean_psnr == 22.0

        ok = (abs(flat_cov) <= 1e-3 and flat_bucket == "<=0.002"
              and abs(corr_cov) > 0.01 and corr_bucket == ">0.01"
              and fractions_ok and shape_ok and psnr_table_ok)
        report("criterion 7, covariance bucket analysis", ok,
               f"flat |cov| {abs(flat_cov):.2e} -> {flat_bucket}, "
               f"correlated |cov| {abs(corr_cov):.3f} -> {corr_bucket}")
        assert ok


class TestCriterion08MetricCorrectness:
    def test_metric_values(self):
        a = np.full((1, 3, 8, 8), 0.5)
        b = np.full((1, 3, 8, 8), 0.6)
        err_20 = abs(psnr(a, b)[0] - 20.0)
        c = np.zeros((1, 3, 8, 8))
        d = np.full((1, 3, 8, 8), 0.5)
        err_6 = abs(psnr(c, d)[0] - 10 * math.log10(4.0))

        rng = np.random.default_rng(1008)
        x = rng.uniform(0, 1, (1, 3, 16, 16))
        y = np.clip(x + rng.uniform(-0.2, 0.2, x.shape), 0, 1)
        luma = lambda im: (0.299 * im[0, 0] + 0.587 * im[0, 1] + 0.114 * im[0, 2])
        ssim_err = abs(ssim(x, y)[0] - ssim_oracle(luma(x), luma(y), gaussian_window()))

        cfg = TrainConfig(total_steps=1000)
        ends_exact = (cosine_lr(0, cfg) == 1e-4) and (cosine_lr(1000, cfg) == 1e-7)

        ok = err_20 <= 1e-6 and err_6 <= 1e-6 and ssim_err <= 1e-6 and ends_exact
        report("criterion 8, metric correctness", ok,
               f"psnr errs {err_20:.2e}/{err_6:.2e}, ssim vs oracle {ssim_err:.2e}, "
               f"schedule endpoints exact {ends_exact}")
        assert ok


class TestCriterion09FormatRoundTrips:
    def test_formats_and_named_errors(self, tmp_path):
        rng = np.random.default_rng(1009)
        reg = ParamRegistry()
        reg.add("w", rng.uniform(-1, 1, (3, 2, 3, 3)).astype(np.float32))
        reg.add("b", rng.uniform(-1, 1, (3,)).astype(np.float32))
        ckpt = tmp_path / "w.ckpt"
        checkpoint_save(reg, ckpt)
        loaded = checkpoint_load(ckpt)
        ckpt_ok = all(loaded[n].data.tobytes() == reg[n].data.tobytes()
                      for n in reg.names())

        img_bytes = rng.integers(0, 256, (7, 9, 3), dtype=np.uint8)
        t = Tensor(np.ascontiguousarray(
            img_bytes.astype(np.float32).transpose(2, 0, 1) / 255.0)[None])
        save_image(t, tmp_path / "x.png")
        save_image(t, tmp_path / "x.ppm")
        png_ok = np.array_equal(to_bytes_image(load_image(tmp_path / "x.png")), img_bytes)
        ppm_ok = np.array_equal(to_bytes_image(load_image(tmp_path / "x.ppm")), img_bytes)

        raw = bytearray(ckpt.read_bytes())
        raw[0:4] = b"ICLX"
        (tmp_path / "bad.ckpt").write_bytes(bytes(raw))
        try:
            checkpoint_load(tmp_path / "bad.ckpt")
            magic_ok = False
        except BadMagicError:
            magic_ok = True

        other = ParamRegistry()
        other.add("w", rng.uniform(-1, 1, (3, 2, 3, 3)).astype(np.float32))
        other.add("b", rng.uniform(-1, 1, (4,)).astype(np.float32))
        try:
            checkpoint_load(ckpt, into=other)
            shape_ok = False
        except RegistryMismatchError as err:
            shape_ok = err.name == "b"

        ok = ckpt_ok and png_ok and ppm_ok and magic_ok and shape_ok
        report("criterion 9, format round trips", ok,
               f"checkpoint bit-exact {ckpt_ok}, png {png_ok}, ppm {ppm_ok}, "
               f"bad magic {magic_ok}, shape mismatch named {shape_ok}")
        assert ok


class TestCriterion10AblationWiring:
    VARIANTS = [
        ("no-fusion", NetworkConfig(base_channels=8, fuse_pre=False, fuse_post=False),
         LossConfig()),
        ("plain-attention", NetworkConfig(base_channels=8, enhancement="plain"),
         LossConfig()),
        ("loss-l1", NetworkConfig(base_channels=8), LossConfig(variant="l1")),
        ("loss-l2", NetworkConfig(base_channels=8), LossConfig(variant="l2")),
        ("fusion-pre-only", NetworkConfig(base_channels=8, fuse_post=False),
         LossConfig()),
        ("fusion-post-only", NetworkConfig(base_channels=8, fuse_pre=False),
         LossConfig()),
    ]

    def test_every_variant_trains_without_nan(self):
        pairs = make_synthetic_pairs(count=6, size=32, seed=1010)
        results = []
        for name, net_cfg, loss_cfg in self.VARIANTS:
            net = build(net_cfg, seed=1010)
            cfg = TrainConfig(total_steps=20, batch_size=2, patch_size=16,
                              seed=1010, loss=loss_cfg)
            log = train(net, pairs, cfg)
            finite_log = all(np.isfinite(r["total"]) for r in log)
            finite_params = all(np.all(np.isfinite(t.data))
                                for t in net.params.tensors())
            results.append((name, finite_log and finite_params))
        ok = all(flag for _, flag in results)
        report("criterion 10, ablation wiring", ok,
               ", ".join(f"{n} {'ok' if f else 'NaN'}" for n, f in results))
        assert ok, results
