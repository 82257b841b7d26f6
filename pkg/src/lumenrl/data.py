"""Image file I/O, paired datasets, synthetic data, checkpoint serialization.

Checkpoint layout: 4-byte magic "RFLL", little-endian uint32 format
version, little-endian uint32 header length, a JSON header carrying the
architecture descriptor plus training metadata, then the parameter
tensors as little-endian float32 in declaration order. Load then save
reproduces a file byte for byte.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

CHECKPOINT_MAGIC = b"RFLL"
CHECKPOINT_VERSION = 1

IMAGE_SUFFIXES = (".png", ".ppm", ".pgm")


class CheckpointError(ValueError):
    """Malformed or inconsistent checkpoint file."""


def load_image(path) -> np.ndarray:
    """Read an 8-bit PNG/PPM/PGM file as an (H, W, 3) array in [0, 1]."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such image: {path}")
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode not in ("L", "RGB"):
                raise ValueError(f"unsupported image mode {mode!r} in {path}")
            arr = np.asarray(im, dtype=np.uint8)
    except (OSError, SyntaxError) as exc:
        raise ValueError(f"corrupt or unreadable image {path}: {exc}") from exc
    values = arr.astype(np.float64) / 255.0
    if values.ndim == 2:
        values = np.repeat(values[:, :, None], 3, axis=2)
    return values


def save_image(image, path) -> None:
    """Write an (H, W, 3) tensor as an 8-bit file; round-half-up quantization."""
    arr = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    quantized = np.floor(arr * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(quantized, mode="RGB").save(Path(path))


def image_to_bytes(image, format: str = "PNG") -> bytes:
    import io

    arr = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    quantized = np.floor(arr * 255.0 + 0.5).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(quantized, mode="RGB").save(buf, format=format)
    return buf.getvalue()


def image_from_bytes(data: bytes) -> np.ndarray:
    import io

    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.mode not in ("L", "RGB"):
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.uint8)
    except (OSError, SyntaxError) as exc:
        raise ValueError(f"undecodable image payload: {exc}") from exc
    values = arr.astype(np.float64) / 255.0
    if values.ndim == 2:
        values = np.repeat(values[:, :, None], 3, axis=2)
    return values


def downscale(image, max_edge: int) -> np.ndarray:
    """Box-downscale so the longer edge is at most `max_edge`."""
    arr = np.asarray(image, dtype=np.float64)
    h, w = arr.shape[:2]
    scale = max_edge / max(h, w)
    if scale >= 1.0:
        return arr
    new_size = (max(1, int(round(w * scale))), max(1, int(round(h * scale))))
    quantized = np.floor(np.clip(arr, 0, 1) * 255.0 + 0.5).astype(np.uint8)
    im = Image.fromarray(quantized, mode="RGB").resize(new_size, Image.BOX)
    return np.asarray(im, dtype=np.float64) / 255.0


# --- paired datasets --------------------------------------------------------

@dataclass
class PairedDataset:
    """Low/normal-light image pairs, index-aligned."""

    lows: list = field(default_factory=list)
    highs: list = field(default_factory=list)
    names: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.lows)

    def pairs(self):
        return zip(self.names, self.lows, self.highs)

    @classmethod
    def from_directory(cls, root) -> "PairedDataset":
        """Load a `low/` + `high/` directory tree paired by filename.

        Unpaired files are skipped with a warning; an empty pairing is
        an error.
        """
        root = Path(root)
        low_dir, high_dir = root / "low", root / "high"
        if not low_dir.is_dir() or not high_dir.is_dir():
            raise FileNotFoundError(f"{root} must contain low/ and high/ directories")
        ds = cls()
        for low_path in sorted(low_dir.iterdir()):
            if low_path.suffix.lower() not in IMAGE_SUFFIXES:
                continue
            high_path = high_dir / low_path.name
            if not high_path.exists():
                warnings.warn(f"skipping unpaired low image {low_path.name}")
                continue
            ds.lows.append(load_image(low_path))
            ds.highs.append(load_image(high_path))
            ds.names.append(low_path.name)
        if not ds.lows:
            raise ValueError(f"no usable image pairs under {root}")
        return ds


def _smooth_field(rng: np.random.Generator, size: int) -> np.ndarray:
    yy, xx = np.meshgrid(np.linspace(0, 1, size), np.linspace(0, 1, size),
                         indexing="ij")
    gx, gy = rng.uniform(-0.9, 0.9, 2)
    base = 0.5 + gx * (xx - 0.5) + gy * (yy - 0.5)
    for _ in range(int(rng.integers(2, 5))):
        cx, cy = rng.uniform(0, 1, 2)
        sigma = rng.uniform(0.1, 0.3)
        amp = rng.uniform(-0.5, 0.6)
        base += amp * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * sigma**2))
    return base


def _draw_shapes(rng: np.random.Generator, img: np.ndarray) -> None:
    size = img.shape[0]
    yy, xx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    for _ in range(int(rng.integers(3, 6))):
        color = rng.uniform(-0.6, 0.6, 3)
        if rng.random() < 0.5:
            y0, x0 = rng.integers(0, size, 2)
            hgt, wdt = rng.integers(size // 8, size // 2, 2)
            mask = (yy >= y0) & (yy < y0 + hgt) & (xx >= x0) & (xx < x0 + wdt)
        else:
            cy, cx = rng.integers(0, size, 2)
            r = int(rng.integers(size // 10, size // 3))
            mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
        img[mask] += color


def synth_dataset(seed: int, count: int, size: int) -> PairedDataset:
    """Generate a deterministic desk-scale paired dataset in memory.

    Normal-light images are smooth gradients plus random shapes with
    mean luminance in [0.4, 0.6]; each low-light counterpart is the
    normal image scaled by a factor drawn from [0.2, 0.4] plus Gaussian
    noise (sigma 0.01), clamped to [0, 1].
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if size < 16:
        raise ValueError("size must be >= 16")
    from .metrics import bt601_luminance

    rng = np.random.default_rng(seed)
    ds = PairedDataset()
    for i in range(count):
        base = _smooth_field(rng, size)
        tint = rng.uniform(-0.08, 0.08, 3)
        img = np.clip(base[:, :, None] + tint[None, None, :], 0.0, 1.0)
        _draw_shapes(rng, img)
        img = np.clip(img, 0.0, 1.0)

        # stretch luminance contrast so scenes are not washed out
        sigma_target = rng.uniform(0.28, 0.34)
        y = bt601_luminance(img)
        sigma = float(y.std())
        if 0 < sigma < sigma_target:
            img = np.clip(
                y.mean() + (img - y.mean()) * (sigma_target / sigma), 0.0, 1.0
            )

        target = rng.uniform(0.42, 0.58)
        for _ in range(10):
            mu = float(bt601_luminance(img).mean())
            if 0.4 <= mu <= 0.6:
                break
            img = np.clip(img + (target - mu), 0.0, 1.0)

        scale = rng.uniform(0.2, 0.4)
        noise = rng.normal(0.0, 0.01, img.shape)
        low = np.clip(scale * img + noise, 0.0, 1.0)

        ds.highs.append(img)
        ds.lows.append(low)
        ds.names.append(f"synth_{i:04d}.png")
    return ds


# --- checkpoints ------------------------------------------------------------

@dataclass
class Checkpoint:
    params: dict
    architecture: dict
    metadata: dict


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    declared = [p["name"] for p in ckpt.architecture["params"]]
    if set(declared) != set(ckpt.params):
        raise CheckpointError("architecture descriptor does not match parameters")
    header = json.dumps(
        {
            "format_version": CHECKPOINT_VERSION,
            "architecture": ckpt.architecture,
            "metadata": ckpt.metadata,
        },
        separators=(",", ":"),
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for name in declared:
            fh.write(np.ascontiguousarray(ckpt.params[name], dtype="<f4").tobytes())


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such checkpoint: {path}")
    blob = path.read_bytes()
    if len(blob) < 12 or blob[:4] != CHECKPOINT_MAGIC:
        raise CheckpointError(f"bad magic in {path}")
    version = struct.unpack("<I", blob[4:8])[0]
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint version {version} (expected {CHECKPOINT_VERSION})"
        )
    header_len = struct.unpack("<I", blob[8:12])[0]
    if len(blob) < 12 + header_len:
        raise CheckpointError(f"truncated checkpoint header in {path}")
    try:
        header = json.loads(blob[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"unreadable checkpoint header in {path}: {exc}") from exc

    offset = 12 + header_len
    params = {}
    for spec in header["architecture"]["params"]:
        shape = tuple(spec["shape"])
        nbytes = int(np.prod(shape)) * 4
        chunk = blob[offset : offset + nbytes]
        if len(chunk) < nbytes:
            raise CheckpointError(f"truncated parameter data in {path}")
        params[spec["name"]] = np.frombuffer(chunk, dtype="<f4").reshape(shape).copy()
        offset += nbytes
    if offset != len(blob):
        raise CheckpointError(f"trailing bytes in {path}")
    return Checkpoint(
        params=params,
        architecture=header["architecture"],
        metadata=header["metadata"],
    )
