"""Image-set datasets on disk: ``root/<class>/<set>/<frame files>``."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .descriptors import ImageSet
from .exceptions import EmptyDataset, FrameDecodeError, InsufficientSets, InvalidInput

log = logging.getLogger(__name__)

LUMA = np.array([0.299, 0.587, 0.114])


@dataclass
class SetEntry:
    path: Path
    frames: list


@dataclass
class DatasetManifest:
    root: Path
    classes: list
    sets_per_class: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    def entries(self):
        """``(class, SetEntry)`` pairs in manifest order."""
        return [(c, e) for c in self.classes for e in self.sets_per_class[c]]

    @property
    def n_sets(self):
        return sum(len(v) for v in self.sets_per_class.values())


def read_frame(path):
    """Decode one image file to an integer array, ``(h, w)`` or ``(h, w, 3)``."""
    try:
        with Image.open(path) as im:
            if im.mode in ("P", "RGBA", "LA", "CMYK", "YCbCr"):
                im = im.convert("RGB")
            arr = np.array(im)
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise FrameDecodeError(f"{path}: {exc}") from exc
    if arr.ndim not in (2, 3) or arr.size == 0:
        raise FrameDecodeError(f"{path}: unsupported image layout {arr.shape}")
    return arr


def load_dataset(root):
    """Scan a dataset tree; every frame is decoded once to weed out corrupt files."""
    root = Path(root)
    if not root.is_dir():
        raise EmptyDataset(f"{root} is not a directory")
    classes = sorted(p.name for p in root.iterdir() if p.is_dir())
    if not classes:
        raise EmptyDataset(f"no class directories under {root}")
    manifest = DatasetManifest(root, classes)
    for c in classes:
        entries = []
        for set_dir in sorted(p for p in (root / c).iterdir() if p.is_dir()):
            good = []
            for f in sorted(p for p in set_dir.iterdir() if p.is_file()):
                try:
                    read_frame(f)
                except FrameDecodeError as exc:
                    log.warning("skipping unreadable frame %s", exc)
                    manifest.skipped.append(str(f))
                    continue
                good.append(f)
            if len(good) < 2:
                log.warning("skipping image set %s: fewer than 2 readable frames", set_dir)
                manifest.skipped.append(str(set_dir))
                continue
            entries.append(SetEntry(set_dir, good))
        if len(entries) < 2:
            raise InsufficientSets(f"class {c!r} has {len(entries)} usable image set(s), need 2")
        manifest.sets_per_class[c] = entries
    return manifest


def to_gray(frame):
    """Luminance in [0, 1] from an integer or float frame."""
    a = np.asarray(frame)
    if np.issubdtype(a.dtype, np.integer):
        scale = 255.0 if a.dtype == np.uint8 or a.max(initial=0) <= 255 else 65535.0
        a = a.astype(float) / scale
    elif a.dtype == bool:
        a = a.astype(float)
    else:
        a = a.astype(float)
    if a.ndim == 3:
        a = a[..., :3] @ LUMA if a.shape[-1] >= 3 else a[..., 0]
    return a


def resize_bilinear(img, size):
    h, w = img.shape
    oh, ow = size
    if (h, w) == (oh, ow):
        return img.copy()
    return ndimage.zoom(img, (oh / h, ow / w), order=1, mode="nearest", grid_mode=True)


def preprocess(frames, resize_to=(24, 24), rotation=0, label=None, source_id=""):
    """Grayscale, bilinear resize, optional rotation (counter-clockwise degrees)."""
    if rotation not in (0, 90, 180, 270):
        raise InvalidInput(f"rotation must be 0, 90, 180 or 270, got {rotation}")
    out = []
    for f in frames:
        g = resize_bilinear(to_gray(f), tuple(resize_to))
        out.append(np.rot90(g, rotation // 90))
    arr = np.clip(np.stack(out), 0.0, 1.0)
    return ImageSet(arr, label, source_id)


def load_image_set(entry, label, resize_to=(24, 24), rotation=0):
    return preprocess([read_frame(f) for f in entry.frames], resize_to, rotation,
                      label, str(entry.path))


def _texture_filter(size, angle, long_scale, short_scale, freq):
    fy = np.fft.fftfreq(size)[:, None]
    fx = np.fft.fftfreq(size)[None, :]
    u = fx * np.cos(angle) + fy * np.sin(angle)
    v = -fx * np.sin(angle) + fy * np.cos(angle)
    # oriented band around +-freq along u, narrow in v
    amp = (np.exp(-0.5 * ((np.abs(u) - freq) * long_scale) ** 2)
           * np.exp(-0.5 * (v * short_scale) ** 2))
    return amp


def synth_dataset(out, classes=3, sets=10, frames=8, seed=0, size=24):
    """Write a synthetic dataset of class-specific Gaussian textures as binary PGM files.

    Each class splits the frame along a line of class-specific orientation
    and fills the two halves with Gaussian fields of different oriented
    band-pass spectra. Frames are independent draws; every image set gets
    its own brightness offset and contrast.
    """
    rng = np.random.default_rng(seed)
    out = Path(out)
    yy, xx = np.mgrid[0:size, 0:size] / size
    for c in range(classes):
        angle = np.pi * c / classes
        side = np.cos(angle) * (xx - 0.5) + np.sin(angle) * (yy - 0.5) > 0
        layers = [
            (_texture_filter(size, angle, 12.0, 6.0, 0.15), side),
            (_texture_filter(size, angle + np.pi / 2, 12.0, 6.0, 0.25), ~side),
        ]
        for s in range(sets):
            offset = rng.uniform(-0.1, 0.1)
            contrast = rng.uniform(0.8, 1.2)
            set_dir = out / f"class{c:02d}" / f"set{s:03d}"
            set_dir.mkdir(parents=True, exist_ok=True)
            for k in range(frames):
                img = np.full((size, size), 0.5 + offset)
                for H, mask in layers:
                    noise = rng.standard_normal((size, size))
                    field_ = np.real(np.fft.ifft2(np.fft.fft2(noise) * H))
                    img += 0.15 * contrast * mask * field_ / (field_.std() + 1e-12)
                img = np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)
                Image.fromarray(img).save(set_dir / f"frame{k:03d}.pgm")
    return out
