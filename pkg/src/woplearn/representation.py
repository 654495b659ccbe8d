"""Representation maps for windowed operators: table, kernel, basis.

A W-operator is pinned down by its characteristic Boolean function
f: P(W) -> {0,1} (output at the origin as a function of the window patch).
The kernel is f's support; the basis is the family of maximal intervals
contained in the kernel, from which the sup-generating reconstruction and
the structural property flags are computed.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError, ParseError, SizeCapError
from .lattice import (
    ORIGIN,
    Interval,
    SubsetOfWindow,
    Window,
    max_antichain,
    parse_offsets,
)
from .morphology import TOROIDAL, BinaryImage

TABULATION_CAP = 20
BASIS_CAP = 16


@dataclass(frozen=True, eq=False)
class BooleanFunctionTable:
    """Characteristic function of a W-operator, tabulated over all patches.

    values[code] is f(X) for the subset X whose normative integer encoding
    is code; the array has exactly 2^|W| entries.
    """

    window: Window
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=bool, copy=True)
        if arr.ndim != 1 or arr.shape[0] != (1 << self.window.size):
            raise InputError(
                f"table needs 2^{self.window.size} entries, got shape {arr.shape}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BooleanFunctionTable):
            return NotImplemented
        return self.window == other.window and bool(np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.window, self.values.tobytes()))

    def value_at(self, s: SubsetOfWindow) -> bool:
        if s.window != self.window:
            raise InputError("subset belongs to a different window")
        return bool(self.values[s.mask])

    @classmethod
    def constant(cls, window: Window, value: bool) -> "BooleanFunctionTable":
        return cls(window, np.full(1 << window.size, bool(value), dtype=bool))

    @classmethod
    def from_predicate(
        cls, window: Window, predicate: Callable[[SubsetOfWindow], bool]
    ) -> "BooleanFunctionTable":
        vals = np.fromiter(
            (bool(predicate(SubsetOfWindow(window, m))) for m in range(1 << window.size)),
            dtype=bool,
            count=1 << window.size,
        )
        return cls(window, vals)


@dataclass(frozen=True)
class KernelSet:
    """The window patches mapped to 1 by a characteristic function."""

    window: Window
    members: frozenset[SubsetOfWindow]


@dataclass(frozen=True)
class Basis:
    """Canonical-ordered antichain of maximal kernel intervals."""

    window: Window
    intervals: tuple[Interval, ...]

    def __post_init__(self) -> None:
        for it in self.intervals:
            if it.window != self.window:
                raise InputError("basis intervals must live on the basis window")

    def render(self) -> str:
        return "".join(it.render() + "\n" for it in self.intervals)


@dataclass(frozen=True)
class PropertyReport:
    """Structural facts read off a basis.

    is_increasing: every interval has upper endpoint W (the stated shape of
    increasing-operator bases).  contains_full_interval_from_origin: the
    interval [{o},W] is present.  origin_in_all_lower_endpoints: the origin
    belongs to every lower endpoint.  Flags are vacuously true on an empty
    basis.
    """

    is_increasing: bool
    contains_full_interval_from_origin: bool
    origin_in_all_lower_endpoints: bool


def characteristic_of(
    realizer: Callable[[BinaryImage], BinaryImage],
    w: Window,
    cap: int = TABULATION_CAP,
) -> BooleanFunctionTable:
    """Tabulate the characteristic function of an operator on window w.

    Each subset X of w is placed as a patch around a probe pixel of a
    toroidal image large enough that wrap-around cannot re-enter the
    window; the realizer is applied and the probe pixel is read back.
    The realizer must be a translation-invariant operator locally defined
    in w, otherwise the table is meaningless.
    """
    if w.size > cap:
        raise SizeCapError(
            f"tabulation of 2^{w.size} patches exceeds cap {cap} "
            f"(window {w.render()})"
        )
    if w.size == 0:
        rows, cols, probe = 3, 3, (1, 1)
        positions: list[tuple[int, int]] = []
    else:
        rmin = min(r for r, _ in w.offsets)
        rmax = max(r for r, _ in w.offsets)
        cmin = min(c for _, c in w.offsets)
        cmax = max(c for _, c in w.offsets)
        rows = max(3, rmax - rmin + 2)
        cols = max(3, cmax - cmin + 2)
        probe = (-rmin, -cmin)
        positions = [(probe[0] + r, probe[1] + c) for r, c in w.offsets]
    probe_read = (probe[0] % rows, probe[1] % cols)
    values = np.zeros(1 << w.size, dtype=bool)
    grid = np.zeros((rows, cols), dtype=bool)
    for code in range(1 << w.size):
        grid[:] = False
        for j, pos in enumerate(positions):
            if code >> j & 1:
                grid[pos] = True
        out = realizer(BinaryImage(grid, TOROIDAL))
        if out.shape != (rows, cols):
            raise InputError("realizer changed the image dimensions")
        values[code] = out.pixels[probe_read]
    return BooleanFunctionTable(w, values)


def kernel_of(f: BooleanFunctionTable) -> KernelSet:
    members = frozenset(
        SubsetOfWindow(f.window, code) for code in np.flatnonzero(f.values)
    )
    return KernelSet(f.window, members)


def basis_of(f: BooleanFunctionTable, cap: int = BASIS_CAP) -> Basis:
    """Extract the basis: maximal intervals on which f is identically 1.

    Works like prime-implicant extraction: kernel members start as
    degenerate intervals [X,X]; intervals with equal free sets whose fixed
    parts differ in one bit merge into a wider interval; intervals that
    never merge are maximal.  A final antichain pass deduplicates and
    orders the result canonically.
    """
    n = f.window.size
    if n > cap:
        raise SizeCapError(
            f"basis extraction on a {n}-point window exceeds cap {cap}"
        )
    minterms = [int(c) for c in np.flatnonzero(f.values)]
    if not minterms:
        return Basis(f.window, ())
    level = {(m, 0) for m in minterms}  # (fixed-ones value, free/dash mask)
    primes: list[tuple[int, int]] = []
    while level:
        merged: set[tuple[int, int]] = set()
        nxt: set[tuple[int, int]] = set()
        by_dash: dict[int, set[int]] = defaultdict(set)
        for value, dash in level:
            by_dash[dash].add(value)
        for dash, values in by_dash.items():
            for value in values:
                for j in range(n):
                    bit = 1 << j
                    if dash & bit:
                        continue
                    partner = value ^ bit
                    if partner in values:
                        merged.add((value, dash))
                        merged.add((partner, dash))
                        if partner > value:
                            nxt.add((value & partner, dash | bit))
        primes.extend(cube for cube in level if cube not in merged)
        level = nxt
    intervals = [
        Interval(
            SubsetOfWindow(f.window, value),
            SubsetOfWindow(f.window, value | dash),
        )
        for value, dash in primes
    ]
    return Basis(f.window, tuple(max_antichain(intervals)))


def reconstruct(b: Basis) -> BooleanFunctionTable:
    """Sup-generating reconstruction: f(X) = 1 iff some interval contains X."""
    n = b.window.size
    codes = np.arange(1 << n, dtype=np.int64)
    values = np.zeros(1 << n, dtype=bool)
    for it in b.intervals:
        lo, up = it.lower.mask, it.upper.mask
        values |= ((codes & lo) == lo) & ((codes & ~np.int64(up)) == 0)
    return BooleanFunctionTable(b.window, values)


def property_report(b: Basis) -> PropertyReport:
    full = b.window.full_mask
    increasing = all(it.upper.mask == full for it in b.intervals)
    if b.window.has_origin:
        origin_bit = 1 << b.window.index_of(ORIGIN)
        has_full_from_origin = any(
            it.lower.mask == origin_bit and it.upper.mask == full for it in b.intervals
        )
        origin_in_lowers = all(it.lower.mask & origin_bit for it in b.intervals)
    else:
        has_full_from_origin = False
        origin_in_lowers = not b.intervals
    return PropertyReport(
        is_increasing=increasing,
        contains_full_interval_from_origin=has_full_from_origin,
        origin_in_all_lower_endpoints=origin_in_lowers,
    )


# ---------------------------------------------------------------------------
# Serialization: "window: <offsets>" header, then a little-endian hex dump
# ---------------------------------------------------------------------------

def table_to_hex(f: BooleanFunctionTable) -> str:
    packed = np.packbits(f.values.astype(np.uint8), bitorder="little")
    return packed.tobytes().hex()


def table_from_hex(window: Window, hex_text: str) -> BooleanFunctionTable:
    count = 1 << window.size
    expected_bytes = (count + 7) // 8
    try:
        raw = bytes.fromhex(hex_text.strip())
    except ValueError as exc:
        raise ParseError(f"bad table hex dump: {exc}") from None
    if len(raw) != expected_bytes:
        raise ParseError(
            f"table hex dump has {len(raw)} bytes, expected {expected_bytes} "
            f"for a {window.size}-point window"
        )
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:count]
    return BooleanFunctionTable(window, bits.astype(bool))


def render_table(f: BooleanFunctionTable) -> str:
    return f"window: {f.window.render()}\n{table_to_hex(f)}\n"


def parse_table(text: str, cap: int | None = None) -> BooleanFunctionTable:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if len(lines) != 2 or not lines[0].startswith("window:"):
        raise ParseError("table file must be a 'window:' line followed by a hex dump")
    window = Window(parse_offsets(lines[0].split(":", 1)[1].strip()), cap=cap)
    return table_from_hex(window, lines[1])
