"""CLI tests: help snapshot, subcommand workflows, determinism, errors."""

import numpy as np
import pytest

from hvilight.cli import build_parser, run
from hvilight.dataio import load_image, save_image, write_manifest
from hvilight.synthetic import write_synthetic_corpus
from hvilight.tensor import Tensor

TOP_HELP = """\
usage: hvilight [-h] {convert,stats,train,enhance,eval} ...

Low-light enhancement in a decoupled luminance/chrominance space.

positional arguments:
  {convert,stats,train,enhance,eval}
    convert             convert an image between RGB and the decoupled color planes
    stats               chroma-covariance report over a paired manifest
    train               train on a paired manifest
    enhance             run a checkpoint on one image
    eval                PSNR/SSIM over a paired manifest

options:
  -h, --help            show this help message and exit
"""


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    manifest = write_synthetic_corpus(root, count=4, size=32, seed=17)
    return root, manifest


@pytest.fixture(scope="module")
def trained(corpus, tmp_path_factory):
    root = tmp_path_factory.mktemp("trained")
    _, manifest = corpus
    ckpt = root / "weights.ckpt"
    rc = run(["train", "--manifest", str(manifest), "--out", str(ckpt),
              "--steps", "8", "--patch", "16", "--batch", "2", "--seed", "5",
              "--base-channels", "8", "--log", str(root / "log.csv")])
    assert rc == 0
    return ckpt


class TestHelp:
    def test_top_level_snapshot(self, capsys, monkeypatch):
        monkeypatch.setenv("COLUMNS", "100")
        assert build_parser().format_help() == TOP_HELP

    @pytest.mark.parametrize("command,flags", [
        ("convert", ["--in", "--out", "--direction", "--k",
                     "(default: rgb2hvi)", "(default: 1.0)"]),
        ("stats", ["--manifest", "--out", "--thresholds", "--json",
                   "--plane-source", "(default: gt)",
                   "(default: 0.002,0.004,0.006,0.008,0.01)"]),
        ("train", ["--steps", "--patch", "--batch", "--seed", "--log",
                   "--lr-max", "--lr-min", "--loss", "--rgb-loss", "--holdout",
                   "--base-channels", "--blocks-per-level", "--heads",
                   "--no-fusion-pre", "--no-fusion-post", "--plain-attention",
                   "(default: 32)", "(default: 4)", "(default: 0.0001)",
                   "(default: 1e-07)", "(default: covariance)", "(default: 16)"]),
        ("enhance", ["--ckpt", "--in", "--out", "--base-channels"]),
        ("eval", ["--manifest", "--ckpt", "--out", "--by-covariance",
                  "--thresholds"]),
    ])
    def test_flags_and_defaults_enumerated(self, monkeypatch, command, flags):
        monkeypatch.setenv("COLUMNS", "200")
        parser = build_parser()
        sub = next(a for a in parser._actions
                   if isinstance(a, type(parser._subparsers._group_actions[0])))
        text = sub.choices[command].format_help()
        for flag in flags:
            assert flag in text, f"{command} help missing {flag}"


class TestArgumentErrors:
    def test_missing_subcommand(self, capsys):
        assert run([]) == 2

    def test_unknown_flag_rejected(self, capsys):
        assert run(["convert", "--in", "x", "--out", "y", "--bogus"]) == 2

    def test_unknown_subcommand(self, capsys):
        assert run(["polish"]) == 2


class TestConvert:
    def test_round_trip_fixture_within_one_step(self, tmp_path):
        # saturated fixture: chroma bytes land near exact codes, so the
        # round trip stays within one quantization step
        fix = np.zeros((1, 3, 6, 6), dtype=np.float32)
        fix[0, 0, :, 0:2] = 1.0                      # red
        fix[0, 1, :, 2:4] = 1.0                      # green
        fix[0, 0, :, 4:6] = fix[0, 1, :, 4:6] = 1.0  # yellow
        src = tmp_path / "fix.png"
        save_image(Tensor(fix), src)
        planes = tmp_path / "planes.png"
        back = tmp_path / "back.png"
        assert run(["convert", "--in", str(src), "--out", str(planes)]) == 0
        assert run(["convert", "--in", str(planes), "--out", str(back),
                    "--direction", "hvi2rgb"]) == 0
        a = load_image(src)
        b = load_image(back)
        assert np.abs(a.data - b.data).max() <= 1.0 / 255.0 + 1e-5

    def test_round_trip_natural_image_bound(self, corpus, tmp_path):
        # near-neutral pixels amplify the chroma half-step (two planes,
        # remap gain 2), so arbitrary content is bounded by ~3 steps
        root, _ = corpus
        src = root / "gt_000.png"
        planes = tmp_path / "planes.png"
        back = tmp_path / "back.png"
        assert run(["convert", "--in", str(src), "--out", str(planes)]) == 0
        assert run(["convert", "--in", str(planes), "--out", str(back),
                    "--direction", "hvi2rgb"]) == 0
        a = load_image(src)
        b = load_image(back)
        assert np.abs(a.data - b.data).max() <= 3.0 / 255.0 + 1e-5

    def test_missing_input_is_single_line_error(self, tmp_path, capsys):
        rc = run(["convert", "--in", str(tmp_path / "ghost.png"),
                  "--out", str(tmp_path / "o.png")])
        assert rc == 1
        err = capsys.readouterr().err
        assert err.count("\n") == 1
        assert err.startswith("error[data_io]:")
        assert "Traceback" not in err


class TestStats:
    def test_fixture_buckets(self, tmp_path, capsys):
        flat = np.empty((1, 3, 12, 12), dtype=np.float32)
        flat[0, 0], flat[0, 1], flat[0, 2] = 0.8, 0.4, 0.2
        corr = np.zeros((1, 3, 12, 12), dtype=np.float32)
        corr[0, 0] = 1.0
        corr[0, 1, :, 6:] = 1.0
        save_image(Tensor(flat), tmp_path / "flat.png")
        save_image(Tensor(corr), tmp_path / "corr.png")
        write_manifest([("flat.png", "flat.png"), ("corr.png", "corr.png")],
                       tmp_path / "m.csv")
        out = tmp_path / "report.csv"
        assert run(["stats", "--manifest", str(tmp_path / "m.csv"),
                    "--out", str(out), "--json", str(tmp_path / "report.json")]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "image_id,cov,bucket"
        by_name = {l.split(",")[0]: l.split(",")[2] for l in lines[1:]}
        assert by_name[str(tmp_path / "flat.png")] == "<=0.002"
        assert by_name[str(tmp_path / "corr.png")] == ">0.01"
        buckets = (tmp_path / "report.buckets.csv").read_text().splitlines()
        fractions = [float(l.split(",")[3]) for l in buckets[1:]]
        assert sum(fractions) == pytest.approx(1.0, abs=1e-12)
        assert "1 at or below 0.01, 1 above" in capsys.readouterr().out


class TestTrainEnhanceEval:
    def test_seeded_training_is_bit_deterministic(self, corpus, tmp_path):
        _, manifest = corpus
        args = ["train", "--manifest", str(manifest), "--steps", "6",
                "--patch", "16", "--batch", "2", "--seed", "9",
                "--base-channels", "8"]
        assert run(args + ["--out", str(tmp_path / "a.ckpt"),
                           "--log", str(tmp_path / "a.csv")]) == 0
        assert run(args + ["--out", str(tmp_path / "b.ckpt"),
                           "--log", str(tmp_path / "b.csv")]) == 0
        assert (tmp_path / "a.ckpt").read_bytes() == (tmp_path / "b.ckpt").read_bytes()
        assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()

    def test_enhance_writes_image(self, corpus, trained, tmp_path):
        root, _ = corpus
        out = tmp_path / "enhanced.png"
        assert run(["enhance", "--ckpt", str(trained), "--in",
                    str(root / "low_000.png"), "--out", str(out),
                    "--base-channels", "8"]) == 0
        img = load_image(out)
        assert img.shape == (1, 3, 32, 32)

    def test_enhance_with_wrong_architecture_flags_fails_cleanly(
            self, corpus, trained, tmp_path, capsys):
        root, _ = corpus
        rc = run(["enhance", "--ckpt", str(trained), "--in",
                  str(root / "low_000.png"), "--out", str(tmp_path / "x.png"),
                  "--base-channels", "16"])
        assert rc == 1
        err = capsys.readouterr().err
        assert err.startswith("error[data_io]:")

    def test_eval_reports_means(self, corpus, trained, tmp_path, capsys):
        _, manifest = corpus
        out = tmp_path / "eval.csv"
        rc = run(["eval", "--manifest", str(manifest), "--ckpt", str(trained),
                  "--out", str(out), "--base-channels", "8", "--by-covariance"])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "low_path,psnr_input,psnr_output,ssim_output"
        assert len(lines) == 6  # header + 4 pairs + mean row
        assert lines[-1].startswith("mean,")
        assert (tmp_path / "eval.buckets.csv").exists()
        assert "mean output PSNR" in capsys.readouterr().out
