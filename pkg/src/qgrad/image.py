"""Classical image ingestion: decode, grayscale, resize, flatten, transpose."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .exceptions import ShapeError, UnsupportedFormatError

# ITU-R BT.601 luma weights
LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class GrayImage:
    pixels: np.ndarray  # (height, width), integer intensities
    bit_depth: int = 8

    def __post_init__(self):
        px = np.array(self.pixels, copy=True)
        if px.ndim != 2:
            raise ShapeError(f"expected a 2-D pixel grid, got shape {px.shape}")
        if px.size and not np.issubdtype(px.dtype, np.integer):
            if not np.all(px == np.round(px)):
                raise ValueError("pixels must be integer-valued")
        px = px.astype(np.int64)
        hi = (1 << self.bit_depth) - 1
        if px.size and (px.min() < 0 or px.max() > hi):
            raise ValueError(f"pixels must lie in [0, {hi}]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1


@dataclass(frozen=True)
class ImageVector:
    values: np.ndarray
    width: int
    height: int
    l2_norm: float = field(default=None)
    bit_depth: int = 8

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True).ravel()
        if v.size != self.width * self.height:
            raise ShapeError(f"{v.size} values cannot fill {self.height}x{self.width}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.l2_norm is None:
            object.__setattr__(self, "l2_norm", float(np.linalg.norm(v)))


def _check_png_depth(im: Image.Image, path) -> None:
    # Pillow reports 16-bit grayscale PNGs as I;16 / I modes
    if im.mode not in ("L", "RGB", "RGBA", "P", "1", "LA"):
        raise UnsupportedFormatError(f"{path}: unsupported PNG mode {im.mode!r}")
    bits = im.info.get("bitdepth")
    if bits is not None and bits not in (1, 2, 4, 8):
        raise UnsupportedFormatError(f"{path}: unsupported PNG bit depth {bits}")


def load_grayscale(path) -> GrayImage:
    """Read a binary PGM (P5, maxval 255) or 8-bit PNG as a grayscale image.

    Color inputs are reduced with ``round(0.299 R + 0.587 G + 0.114 B)``.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            magic = fh.read(8)
        im = Image.open(path)
        im.load()
    except OSError as exc:
        raise OSError(f"cannot read image {path}: {exc}") from exc

    if im.format == "PPM":
        if not magic.startswith(b"P5"):
            raise UnsupportedFormatError(f"{path}: only binary PGM (P5) is supported")
        if im.mode != "L":
            raise UnsupportedFormatError(f"{path}: PGM maxval must be 255")
        return GrayImage(np.asarray(im, dtype=np.int64))
    if im.format != "PNG":
        raise UnsupportedFormatError(f"{path}: format {im.format!r} not supported")

    _check_png_depth(im, path)
    if im.mode in ("L", "1"):
        arr = np.asarray(im.convert("L"), dtype=np.int64)
        return GrayImage(arr)
    rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
    return GrayImage(np.rint(rgb @ LUMA).astype(np.int64))


def save_pgm(img: GrayImage, path) -> None:
    if img.bit_depth != 8:
        raise UnsupportedFormatError("PGM output is 8-bit only")
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.pixels.astype(np.uint8).tobytes())


def save_png(img_or_array, path) -> None:
    arr = img_or_array.pixels if isinstance(img_or_array, GrayImage) else img_or_array
    arr = np.asarray(arr)
    Image.fromarray(arr.astype(np.uint8)).save(path, format="PNG")


def _bilinear_axis(n_in: int, n_out: int):
    # half-pixel-centred sampling, edge-clamped
    x = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    x = np.clip(x, 0.0, n_in - 1)
    i0 = np.floor(x).astype(np.int64)
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, x - i0


def resize_pow2(img: GrayImage, side: int) -> GrayImage:
    """Bilinear resample to ``side x side``; ``side`` must be a power of two."""
    if side < 2 or side & (side - 1):
        raise ValueError(f"side must be a power of two >= 2, got {side}")
    if img.width == side and img.height == side:
        return GrayImage(img.pixels, img.bit_depth)
    src = img.pixels.astype(np.float64)
    r0, r1, fr = _bilinear_axis(img.height, side)
    c0, c1, fc = _bilinear_axis(img.width, side)
    top = src[r0][:, c0] * (1 - fc) + src[r0][:, c1] * fc
    bot = src[r1][:, c0] * (1 - fc) + src[r1][:, c1] * fc
    out = top * (1 - fr)[:, None] + bot * fr[:, None]
    out = np.clip(np.rint(out), 0, img.max_value)
    return GrayImage(out.astype(np.int64), img.bit_depth)


def vectorize(img: GrayImage) -> ImageVector:
    """Row-major flattening; the L2 norm is recorded alongside."""
    return ImageVector(
        values=img.pixels.ravel().astype(np.float64),
        width=img.width,
        height=img.height,
        bit_depth=img.bit_depth,
    )


def devectorize(v: ImageVector) -> GrayImage:
    hi = (1 << v.bit_depth) - 1
    px = np.clip(np.rint(v.values), 0, hi).astype(np.int64)
    return GrayImage(px.reshape(v.height, v.width), v.bit_depth)


def transpose(img: GrayImage) -> GrayImage:
    return GrayImage(img.pixels.T, img.bit_depth)
