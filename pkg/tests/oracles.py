"""Independent oracles and small helpers shared by the test suite.

The basis oracle enumerates all 3^|W| intervals by brute force and keeps
the maximal ones contained in the kernel; it deliberately shares no code
path with the implicant-merging extractor it checks.
"""

import numpy as np

from woplearn import (
    BinaryImage,
    BooleanFunctionTable,
    Interval,
    SubsetOfWindow,
    Window,
    max_antichain,
)


def submasks(mask: int):
    """All submasks of mask, including 0 and mask itself."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def brute_force_basis(f: BooleanFunctionTable):
    """Maximal intervals [lo, up] with f identically 1 on them (oracle)."""
    w = f.window
    contained = []
    for up in range(1 << w.size):
        for lo in submasks(up):
            free = up & ~lo
            if all(f.values[lo | s] for s in submasks(free)):
                contained.append(
                    Interval(SubsetOfWindow(w, lo), SubsetOfWindow(w, up))
                )
    return tuple(max_antichain(contained))


def random_table(window: Window, rng: np.random.Generator) -> BooleanFunctionTable:
    vals = rng.integers(0, 2, size=1 << window.size).astype(bool)
    return BooleanFunctionTable(window, vals)


def random_image(rng, shape=(8, 8), density=0.5, boundary="toroidal") -> BinaryImage:
    return BinaryImage(rng.random(shape) < density, boundary)


def window_3x3() -> Window:
    return Window(tuple((r, c) for r in (-1, 0, 1) for c in (-1, 0, 1)))


def cross_window() -> Window:
    return Window(((-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)))
