"""Finite Boolean lattice machinery: windows, subsets, intervals, antichains.

A Window fixes a finite set of 2-D pixel offsets in canonical row-major
order.  Subsets of a window are encoded as integer bit masks with bit j
meaning membership of ``offsets[j]``; this encoding is the single indexing
contract used everywhere else (function tables, structuring elements,
parameter serializations).
"""

from __future__ import annotations

import re
from dataclasses import InitVar, dataclass
from typing import Iterable, Iterator, Union

from .errors import InputError, ParseError, SizeCapError

# 2^20 table entries is about 1 Mbit; beyond that exhaustive tabulation stops
# being a desk-scale operation.
DEFAULT_WINDOW_CAP = 20

ORIGIN = (0, 0)

Offset = tuple[int, int]


@dataclass(frozen=True)
class Window:
    """Ordered set of distinct pixel offsets; the ground set of the lattice."""

    offsets: tuple[Offset, ...]
    cap: InitVar[int | None] = None

    def __post_init__(self, cap: int | None) -> None:
        limit = DEFAULT_WINDOW_CAP if cap is None else cap
        offs = tuple((int(r), int(c)) for r, c in self.offsets)
        if len(set(offs)) != len(offs):
            raise InputError(f"window offsets must be distinct, got {list(offs)}")
        if len(offs) > limit:
            raise SizeCapError(f"window of size {len(offs)} exceeds cap {limit}")
        object.__setattr__(self, "offsets", tuple(sorted(offs)))

    @property
    def size(self) -> int:
        return len(self.offsets)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @property
    def has_origin(self) -> bool:
        return ORIGIN in self.offsets

    def index_of(self, offset: Offset) -> int:
        try:
            return self.offsets.index((int(offset[0]), int(offset[1])))
        except ValueError:
            raise InputError(f"offset {offset} is not in window {self.render()}") from None

    def subset(self, offsets: Iterable[Offset]) -> "SubsetOfWindow":
        mask = 0
        for off in offsets:
            mask |= 1 << self.index_of(off)
        return SubsetOfWindow(self, mask)

    def subset_from_mask(self, mask: int) -> "SubsetOfWindow":
        return SubsetOfWindow(self, mask)

    def empty(self) -> "SubsetOfWindow":
        return SubsetOfWindow(self, 0)

    def full(self) -> "SubsetOfWindow":
        return SubsetOfWindow(self, self.full_mask)

    def render(self) -> str:
        return render_offsets(self.offsets)


@dataclass(frozen=True)
class SubsetOfWindow:
    """A subset of a window, encoded as a bit mask over the window's offsets."""

    window: Window
    mask: int

    def __post_init__(self) -> None:
        if not 0 <= self.mask < (1 << self.window.size):
            raise InputError(
                f"mask {self.mask:#x} out of range for window of size {self.window.size}"
            )

    @property
    def offsets(self) -> tuple[Offset, ...]:
        return tuple(
            off for j, off in enumerate(self.window.offsets) if self.mask >> j & 1
        )

    @property
    def count(self) -> int:
        return self.mask.bit_count()

    def contains(self, offset: Offset) -> bool:
        off = (int(offset[0]), int(offset[1]))
        return off in self.window.offsets and bool(self.mask >> self.window.index_of(off) & 1)

    def flip(self, bit: int) -> "SubsetOfWindow":
        return SubsetOfWindow(self.window, self.mask ^ (1 << bit))

    def render(self) -> str:
        return render_offsets(self.offsets)


@dataclass(frozen=True)
class Interval:
    """Pair of subsets lower <= upper; stands for all X with lower <= X <= upper."""

    lower: SubsetOfWindow
    upper: SubsetOfWindow

    def __post_init__(self) -> None:
        if self.lower.window != self.upper.window:
            raise InputError("interval endpoints must share one window")
        if self.lower.mask & ~self.upper.mask:
            raise InputError(
                f"interval lower bound {self.lower.render()} is not contained "
                f"in upper bound {self.upper.render()}"
            )

    @property
    def window(self) -> Window:
        return self.lower.window

    def contains_subset(self, s: SubsetOfWindow) -> bool:
        if s.window != self.window:
            raise InputError("subset and interval must share one window")
        return (self.lower.mask & ~s.mask) == 0 and (s.mask & ~self.upper.mask) == 0

    def render(self) -> str:
        return f"[{self.lower.render()},{self.upper.render()}]"


Comparable = Union[SubsetOfWindow, Interval]


def leq(a: Comparable, b: Comparable) -> bool:
    """Partial order: subset inclusion, or interval containment for intervals.

    Intervals compare by [a,b] <= [a',b'] iff a' <= a and b <= b'
    (i.e. the first interval is contained in the second as a family of
    subsets).  Incomparable pairs return False in both directions.
    """
    if isinstance(a, SubsetOfWindow) and isinstance(b, SubsetOfWindow):
        if a.window != b.window:
            raise InputError("cannot compare subsets of different windows")
        return (a.mask & ~b.mask) == 0
    if isinstance(a, Interval) and isinstance(b, Interval):
        if a.window != b.window:
            raise InputError("cannot compare intervals over different windows")
        return (b.lower.mask & ~a.lower.mask) == 0 and (a.upper.mask & ~b.upper.mask) == 0
    raise InputError(f"cannot compare {type(a).__name__} with {type(b).__name__}")


def max_antichain(items: list[Interval]) -> list[Interval]:
    """Maximal elements of a family of intervals, deduplicated.

    Keeps exactly the intervals that are not strictly below any other item.
    Output is an antichain in canonical order (sorted by lower mask, then
    upper mask).  Pairwise O(m^2) dominance filtering; m stays small here.
    """
    if not items:
        return []
    window = items[0].window
    for it in items:
        if it.window != window:
            raise InputError("all intervals must share one window")
    unique = {(it.lower.mask, it.upper.mask): it for it in items}
    keys = list(unique)
    # strict dominance: key < other  <=>  other.lower <= lower and upper <= other.upper
    result = []
    for key in keys:
        lo, up = key
        strictly_below = any(
            other != key
            and (other[0] & ~lo) == 0
            and (up & ~other[1]) == 0
            for other in keys
        )
        if not strictly_below:
            result.append(unique[key])
    result.sort(key=lambda it: (it.lower.mask, it.upper.mask))
    return result


def hamming_neighbors(s: SubsetOfWindow) -> list[SubsetOfWindow]:
    """All subsets differing from s in exactly one bit, in bit-index order."""
    return [s.flip(j) for j in range(s.window.size)]


def enumerate_subsets(
    w: Window, cap: int = DEFAULT_WINDOW_CAP
) -> Iterator[SubsetOfWindow]:
    """Yield all 2^|W| subsets of w in increasing integer-encoding order."""
    if w.size > cap:
        raise SizeCapError(
            f"refusing to enumerate 2^{w.size} subsets (window cap {cap})"
        )
    for mask in range(1 << w.size):
        yield SubsetOfWindow(w, mask)


# ---------------------------------------------------------------------------
# Textual rendering and parsing (used verbatim by CLI output and serializers)
# ---------------------------------------------------------------------------

_OFFSET_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def render_offsets(offsets: Iterable[Offset]) -> str:
    return "{" + ",".join(f"({r},{c})" for r, c in sorted(offsets)) + "}"


def parse_offsets(text: str) -> tuple[Offset, ...]:
    """Parse a subset/window rendering like "{(0,0),(0,1)}" back to offsets."""
    t = text.strip()
    if not (t.startswith("{") and t.endswith("}")):
        raise ParseError(f"expected braced offset set, got {text!r}")
    body = t[1:-1]
    offs = tuple((int(r), int(c)) for r, c in _OFFSET_RE.findall(body))
    rebuilt = ",".join(f"({r},{c})" for r, c in offs)
    if re.sub(r"\s+", "", body) != rebuilt:
        raise ParseError(f"malformed offset set {text!r}")
    return offs


def parse_window(text: str, cap: int | None = None) -> Window:
    return Window(parse_offsets(text), cap=cap)


def parse_subset(text: str, window: Window) -> SubsetOfWindow:
    return window.subset(parse_offsets(text))


_INTERVAL_RE = re.compile(r"^\[\s*(\{[^{}]*\})\s*,\s*(\{[^{}]*\})\s*\]$")


def parse_interval(text: str, window: Window) -> Interval:
    m = _INTERVAL_RE.match(text.strip())
    if m is None:
        raise ParseError(f"malformed interval {text!r}")
    return Interval(parse_subset(m.group(1), window), parse_subset(m.group(2), window))
