"""Image codecs, dataset manifests, and the versioned checkpoint container.

Only two image formats exist on purpose: 8-bit truecolor PNG (validated
by parsing the header before any decoding) and binary PPM (P6, maxval
255) so the test suite can carry hand-written fixtures. All writes are
atomic (temp file in the target directory, then rename), so interrupted
runs never leave half-written files.

Checkpoint layout, little-endian throughout:

    magic   4 bytes  b"ICLR"
    version u32      currently 1
    count   u32      number of entries
    entry:  name_len u16, name utf-8, rank u8, rank * u64 dims,
            raw float32 values in row-major order
"""

from __future__ import annotations

import csv
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .nn import ParamRegistry
from .tensor import Tensor

CHECKPOINT_MAGIC = b"ICLR"
CHECKPOINT_VERSION = 1

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


class DataIoError(ValueError):
    module = "data_io"


class UnsupportedFormatError(DataIoError):
    pass


class BadMagicError(DataIoError):
    pass


class VersionMismatchError(DataIoError):
    pass


class RegistryMismatchError(DataIoError):
    def __init__(self, name: str, message: str):
        super().__init__(message)
        self.name = name


# ---------------------------------------------------------------------------
# images
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, payload: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_png_header(raw: bytes, path: Path) -> None:
    if len(raw) < 33 or raw[:8] != _PNG_SIGNATURE:
        raise UnsupportedFormatError(f"{path}: not a PNG file")
    if raw[12:16] != b"IHDR":
        raise UnsupportedFormatError(f"{path}: malformed PNG header")
    bit_depth = raw[24]
    color_type = raw[25]
    if bit_depth != 8 or color_type != 2:
        raise UnsupportedFormatError(
            f"{path}: only 8-bit truecolor PNG is supported "
            f"(bit depth {bit_depth}, color type {color_type})")


def _load_ppm(raw: bytes, path: Path) -> np.ndarray:
    if raw[:2] != b"P6":
        raise UnsupportedFormatError(f"{path}: not a binary PPM (P6) file")
    # header: three whitespace-separated fields after P6, # comments allowed
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataIoError(f"{path}: truncated PPM header")
        fields.append(raw[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        w, h, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise DataIoError(f"{path}: bad PPM header") from exc
    if maxval != 255:
        raise UnsupportedFormatError(f"{path}: PPM maxval {maxval} unsupported (need 255)")
    need = w * h * 3
    body = raw[pos:pos + need]
    if len(body) != need:
        raise DataIoError(f"{path}: truncated PPM body ({len(body)} of {need} bytes)")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)


def load_image(path) -> Tensor:
    """Read an 8-bit RGB image into a 1 x 3 x H x W tensor in [0, 1]."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataIoError(f"cannot read {path}: {exc}") from exc
    if raw[:2] == b"P6":
        arr = _load_ppm(raw, path)
    else:
        _check_png_header(raw, path)
        with Image.open(path) as img:
            if img.mode != "RGB":
                raise UnsupportedFormatError(f"{path}: PNG decoded as {img.mode}, need RGB")
            arr = np.asarray(img, dtype=np.uint8)
    data = arr.astype(np.float32) / 255.0
    return Tensor._wrap(np.ascontiguousarray(data.transpose(2, 0, 1)[None]))


def to_bytes_image(t: Tensor) -> np.ndarray:
    """Clamp to [0, 1] and quantize (round half away from zero) to uint8 HWC."""
    if len(t.shape) != 4 or t.shape[0] != 1 or t.shape[1] != 3:
        raise DataIoError(f"expected 1 x 3 x H x W, got {t.shape}")
    clipped = np.clip(t.data, 0.0, 1.0)
    q = np.floor(clipped.astype(np.float64) * 255.0 + 0.5).astype(np.uint8)
    return q[0].transpose(1, 2, 0)


def save_image(t: Tensor, path) -> None:
    """Write PNG or PPM (by suffix) atomically."""
    path = Path(path)
    arr = to_bytes_image(t)
    suffix = path.suffix.lower()
    if suffix == ".ppm":
        header = f"P6\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode()
        _atomic_write(path, header + arr.tobytes())
    elif suffix == ".png":
        import io

        buf = io.BytesIO()
        Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
        _atomic_write(path, buf.getvalue())
    else:
        raise UnsupportedFormatError(f"{path}: unsupported output format {suffix!r}")


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifestRow:
    low_path: Path
    gt_path: Path
    split: str | None = None


def load_manifest(path) -> list[ManifestRow]:
    """CSV with header low_path,gt_path[,split]; order preserved, files must exist.

    Relative paths are resolved against the manifest's directory.
    """
    path = Path(path)
    base = path.parent
    rows: list[ManifestRow] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["low_path", "gt_path"]:
            raise DataIoError(f"{path}: manifest header must be low_path,gt_path")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2 or not row[0].strip() or not row[1].strip():
                raise DataIoError(f"{path}:{lineno}: manifest row needs two paths")
            low = Path(row[0].strip())
            gt = Path(row[1].strip())
            low = low if low.is_absolute() else base / low
            gt = gt if gt.is_absolute() else base / gt
            for p in (low, gt):
                if not p.exists():
                    raise DataIoError(f"{path}:{lineno}: missing file {p}")
            split = row[2].strip() if len(row) > 2 and row[2].strip() else None
            rows.append(ManifestRow(low, gt, split))
    return rows


def write_manifest(rows: list[tuple[str, str]], path) -> None:
    path = Path(path)
    lines = ["low_path,gt_path"] + [f"{low},{gt}" for low, gt in rows]
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

def checkpoint_save(params: ParamRegistry, path) -> None:
    path = Path(path)
    parts = [CHECKPOINT_MAGIC,
             struct.pack("<I", CHECKPOINT_VERSION),
             struct.pack("<I", len(params))]
    for name, t in params.items():
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<B", len(t.shape)))
        for dim in t.shape:
            parts.append(struct.pack("<Q", dim))
        parts.append(np.ascontiguousarray(t.data, dtype="<f4").tobytes())
    _atomic_write(path, b"".join(parts))


class _Reader:
    def __init__(self, raw: bytes, path: Path):
        self.raw = raw
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.raw):
            raise DataIoError(f"{self.path}: truncated checkpoint")
        chunk = self.raw[self.pos:self.pos + n]
        self.pos += n
        return chunk


def checkpoint_load(path, into: ParamRegistry | None = None) -> ParamRegistry:
    """Read a checkpoint; with ``into``, validate names/shapes against it
    (in order) and load values in place."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataIoError(f"cannot read {path}: {exc}") from exc
    rd = _Reader(raw, path)
    magic = rd.take(4)
    if magic != CHECKPOINT_MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}")
    version = struct.unpack("<I", rd.take(4))[0]
    if version != CHECKPOINT_VERSION:
        raise VersionMismatchError(
            f"{path}: version {version}, expected {CHECKPOINT_VERSION}")
    count = struct.unpack("<I", rd.take(4))[0]

    entries: list[tuple[str, np.ndarray]] = []
    for _ in range(count):
        name_len = struct.unpack("<H", rd.take(2))[0]
        name = rd.take(name_len).decode("utf-8")
        rank = struct.unpack("<B", rd.take(1))[0]
        dims = tuple(struct.unpack("<Q", rd.take(8))[0] for _ in range(rank))
        numel = 1
        for d in dims:
            numel *= d
        data = np.frombuffer(rd.take(4 * numel), dtype="<f4").reshape(dims)
        entries.append((name, data.astype(np.float32)))
    if rd.pos != len(raw):
        raise DataIoError(f"{path}: {len(raw) - rd.pos} trailing bytes")

    if into is None:
        reg = ParamRegistry()
        for name, data in entries:
            reg.add(name, data)
        return reg

    expected = into.names()
    if len(entries) != len(expected):
        raise RegistryMismatchError(
            "<count>", f"{path}: {len(entries)} entries, registry has {len(expected)}")
    for (name, data), want in zip(entries, expected):
        if name != want:
            raise RegistryMismatchError(
                name, f"{path}: entry {name!r} does not match registry name {want!r}")
        t = into[want]
        if data.shape != t.shape:
            raise RegistryMismatchError(
                name, f"{path}: {name!r} has shape {data.shape}, registry expects {t.shape}")
        t.data = data
    return into
