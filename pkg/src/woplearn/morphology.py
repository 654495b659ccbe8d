"""Binary images and the elementary lattice operators on them.

Sign conventions are fixed once and for all: erosion probes p+v, dilation
probes p+v as well, so that the adjunction dilate(x,a) <= y iff
x <= erode(y, reflect(a)) holds exactly on toroidal images.  Two boundary
policies exist: "zero_pad" reads 0 outside the grid (practical default for
user data), "toroidal" wraps reads (exact translation group; default for
synthetic data and property checks).
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .lattice import Interval, SubsetOfWindow, Window

ZERO_PAD = "zero_pad"
TOROIDAL = "toroidal"
BOUNDARIES = (ZERO_PAD, TOROIDAL)

# A structuring element is just a subset of a window, read as offsets
# relative to the probed pixel.
StructuringElement = SubsetOfWindow


class BinaryImage:
    """Immutable 2-D bit grid with a fixed boundary policy."""

    __slots__ = ("pixels", "boundary")

    def __init__(self, pixels, boundary: str = ZERO_PAD):
        arr = np.array(pixels, dtype=bool, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"image must be a 2-D grid with positive dims, got shape {arr.shape}")
        if boundary not in BOUNDARIES:
            raise InputError(f"unknown boundary policy {boundary!r}, expected one of {BOUNDARIES}")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)
        object.__setattr__(self, "boundary", boundary)

    def __setattr__(self, name, value):
        raise AttributeError("BinaryImage is immutable")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return (
            self.boundary == other.boundary
            and self.shape == other.shape
            and bool(np.array_equal(self.pixels, other.pixels))
        )

    def __hash__(self):
        return hash((self.boundary, self.shape, self.pixels.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryImage({self.height}x{self.width}, {self.boundary}, ones={int(self.pixels.sum())})"

    @classmethod
    def filled(cls, shape: tuple[int, int], value: bool, boundary: str = ZERO_PAD) -> "BinaryImage":
        return cls(np.full(shape, bool(value), dtype=bool), boundary)

    @classmethod
    def from_ones(cls, shape: tuple[int, int], ones, boundary: str = ZERO_PAD) -> "BinaryImage":
        arr = np.zeros(shape, dtype=bool)
        for r, c in ones:
            arr[r, c] = True
        return cls(arr, boundary)


def _read_at(arr: np.ndarray, v: tuple[int, int], boundary: str) -> np.ndarray:
    """Array t with t[p] = arr[p + v]; out-of-range reads 0 under zero_pad."""
    r, c = int(v[0]), int(v[1])
    if boundary == TOROIDAL:
        return np.roll(arr, shift=(-r, -c), axis=(0, 1))
    h, w = arr.shape
    out = np.zeros_like(arr)
    r0, r1 = max(0, -r), min(h, h - r)
    c0, c1 = max(0, -c), min(w, w - c)
    if r0 < r1 and c0 < c1:
        out[r0:r1, c0:c1] = arr[r0 + r : r1 + r, c0 + c : c1 + c]
    return out


def erode(x: BinaryImage, a: StructuringElement) -> BinaryImage:
    """Output pixel p is 1 iff x reads 1 at p+v for every offset v in a."""
    acc = np.ones(x.shape, dtype=bool)
    for v in a.offsets:
        acc &= _read_at(x.pixels, v, x.boundary)
    return BinaryImage(acc, x.boundary)


def dilate(x: BinaryImage, a: StructuringElement) -> BinaryImage:
    """Output pixel p is 1 iff x reads 1 at p+v for some offset v in a."""
    acc = np.zeros(x.shape, dtype=bool)
    for v in a.offsets:
        acc |= _read_at(x.pixels, v, x.boundary)
    return BinaryImage(acc, x.boundary)


def reflect(a: StructuringElement) -> StructuringElement:
    """The structuring element with all offsets negated (adjoint partner)."""
    offs = tuple((-r, -c) for r, c in a.window.offsets)
    win = Window(offs, cap=len(offs))
    return win.subset((-r, -c) for r, c in a.offsets)


def _check_same_grid(x: BinaryImage, y: BinaryImage) -> None:
    if x.shape != y.shape or x.boundary != y.boundary:
        raise InputError(
            f"images must share dimensions and boundary policy, got "
            f"{x.shape}/{x.boundary} vs {y.shape}/{y.boundary}"
        )


def complement(x: BinaryImage) -> BinaryImage:
    return BinaryImage(~x.pixels, x.boundary)


def union(x: BinaryImage, y: BinaryImage) -> BinaryImage:
    _check_same_grid(x, y)
    return BinaryImage(x.pixels | y.pixels, x.boundary)


def intersection(x: BinaryImage, y: BinaryImage) -> BinaryImage:
    _check_same_grid(x, y)
    return BinaryImage(x.pixels & y.pixels, x.boundary)


def pointwise(op: str, x: BinaryImage, y: BinaryImage | None = None) -> BinaryImage:
    """Pixelwise Boolean combination; op is complement, union or intersection."""
    if op == "complement":
        if y is not None:
            raise InputError("complement takes a single image")
        return complement(x)
    if y is None:
        raise InputError(f"{op} needs two images")
    if op == "union":
        return union(x, y)
    if op == "intersection":
        return intersection(x, y)
    raise InputError(f"unknown pointwise op {op!r}")


def subset_image(x: BinaryImage, y: BinaryImage) -> bool:
    """True iff every 1-pixel of x is a 1-pixel of y (same grid)."""
    _check_same_grid(x, y)
    return bool(np.all(~x.pixels | y.pixels))


def interval_operator(x: BinaryImage, i: Interval) -> BinaryImage:
    """Output pixel p is 1 iff lower <= window patch at p <= upper.

    The window patch at p is the subset of the interval's window whose
    offsets read 1 around p (boundary policy resolves outside reads).
    """
    acc = np.ones(x.shape, dtype=bool)
    for v in i.lower.offsets:
        acc &= _read_at(x.pixels, v, x.boundary)
    forbidden = i.window.full_mask & ~i.upper.mask
    for j, v in enumerate(i.window.offsets):
        if forbidden >> j & 1:
            acc &= ~_read_at(x.pixels, v, x.boundary)
    return BinaryImage(acc, x.boundary)


def apply_table(x: BinaryImage, w: Window, f) -> BinaryImage:
    """Apply a windowed lookup table: output pixel p = f(patch of x at p).

    Patches are encoded with the normative bit encoding (bit j reads
    w.offsets[j]), so f must be tabulated on exactly w.
    """
    if f.window != w:
        raise InputError(
            f"table is tabulated on {f.window.render()}, not on {w.render()}"
        )
    codes = np.zeros(x.shape, dtype=np.int64)
    for j, v in enumerate(w.offsets):
        codes |= _read_at(x.pixels, v, x.boundary).astype(np.int64) << j
    return BinaryImage(f.values[codes], x.boundary)


def shift(x: BinaryImage, v: tuple[int, int]) -> BinaryImage:
    """Translate a toroidal image by v: output pixel p = input pixel p-v."""
    if x.boundary != TOROIDAL:
        raise InputError("shift requires the toroidal boundary policy")
    return BinaryImage(np.roll(x.pixels, shift=(int(v[0]), int(v[1])), axis=(0, 1)), TOROIDAL)
