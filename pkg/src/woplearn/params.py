"""Lattice overparametrizations of constrained operator classes.

Three parameter families are supported: tuples of structuring elements
realized as a union of erosions, tuples of intervals realized as a union
of interval operators, and sequences of lookup tables realized as a
layered composition.  Every family lives on a product of Boolean lattices,
so a unit move flips exactly one payload bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Union

import numpy as np

from .errors import InputError, ParseError, SizeCapError
from .lattice import (
    Interval,
    SubsetOfWindow,
    Window,
    parse_interval,
    parse_offsets,
)
from .morphology import BinaryImage, apply_table, erode, interval_operator, union
from .representation import (
    BASIS_CAP,
    TABULATION_CAP,
    Basis,
    BooleanFunctionTable,
    basis_of,
    characteristic_of,
    table_from_hex,
    table_to_hex,
)


@dataclass(frozen=True)
class ErosionSupSpec:
    """Union of k erosions with structuring elements in P(window)."""

    window: Window
    k: int

    kind = "erosion_sup"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InputError("erosion_sup needs k >= 1")


@dataclass(frozen=True)
class IntervalSupSpec:
    """Union of k interval operators with intervals over window."""

    window: Window
    k: int

    kind = "interval_sup"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InputError("interval_sup needs k >= 1")


@dataclass(frozen=True)
class SeqTablesSpec:
    """Composition of d table operators, layer j local in windows[j]."""

    windows: tuple[Window, ...]

    kind = "seq_tables"

    def __post_init__(self) -> None:
        if len(self.windows) < 1:
            raise InputError("seq_tables needs depth >= 1")


ClassSpec = Union[ErosionSupSpec, IntervalSupSpec, SeqTablesSpec]


@dataclass(frozen=True)
class ParamPoint:
    """An element of the parameter lattice: a spec plus a matching payload."""

    spec: ClassSpec
    payload: tuple

    def __post_init__(self) -> None:
        spec, payload = self.spec, self.payload
        if isinstance(spec, ErosionSupSpec):
            if len(payload) != spec.k or not all(
                isinstance(p, SubsetOfWindow) and p.window == spec.window for p in payload
            ):
                raise InputError("payload must be k structuring elements on the spec window")
        elif isinstance(spec, IntervalSupSpec):
            if len(payload) != spec.k or not all(
                isinstance(p, Interval) and p.window == spec.window for p in payload
            ):
                raise InputError("payload must be k intervals on the spec window")
        elif isinstance(spec, SeqTablesSpec):
            if len(payload) != len(spec.windows) or not all(
                isinstance(p, BooleanFunctionTable) and p.window == w
                for p, w in zip(payload, spec.windows)
            ):
                raise InputError("payload must be one table per layer window")
        else:
            raise InputError(f"unknown class spec {spec!r}")


def realize(theta: ParamPoint) -> Callable[[BinaryImage], BinaryImage]:
    """The operator represented by theta, as an image-to-image callable."""
    spec, payload = theta.spec, theta.payload
    if isinstance(spec, ErosionSupSpec):

        def run(x: BinaryImage) -> BinaryImage:
            return reduce(union, (erode(x, se) for se in payload))

        return run
    if isinstance(spec, IntervalSupSpec):

        def run(x: BinaryImage) -> BinaryImage:
            return reduce(union, (interval_operator(x, iv) for iv in payload))

        return run

    def run(x: BinaryImage) -> BinaryImage:
        for w, f in zip(spec.windows, payload):
            x = apply_table(x, w, f)
        return x

    return run


def _interval_moves(theta: ParamPoint) -> list[tuple[int, str, int]]:
    """Valid single-bit endpoint flips (index, "lower"|"upper", bit)."""
    moves = []
    n = theta.spec.window.size
    for i, iv in enumerate(theta.payload):
        lo, up = iv.lower.mask, iv.upper.mask
        for j in range(n):
            bit = 1 << j
            # lower flip: stays valid iff the flipped lower is still <= upper
            if (lo ^ bit) & ~up == 0:
                moves.append((i, "lower", j))
        for j in range(n):
            bit = 1 << j
            # upper flip: stays valid iff lower is still <= the flipped upper
            if lo & ~(up ^ bit) == 0:
                moves.append((i, "upper", j))
    return moves


def neighborhood_size(theta: ParamPoint) -> int:
    """Number of unit-distance neighbors of theta in its parameter lattice."""
    spec = theta.spec
    if isinstance(spec, ErosionSupSpec):
        return spec.k * spec.window.size
    if isinstance(spec, SeqTablesSpec):
        return sum(1 << w.size for w in spec.windows)
    return len(_interval_moves(theta))


def _neighbor_at(theta: ParamPoint, index: int) -> ParamPoint:
    """The neighbor reached by the index-th canonical unit move."""
    spec, payload = theta.spec, theta.payload
    if isinstance(spec, ErosionSupSpec):
        n = spec.window.size
        i, j = divmod(index, n)
        new = list(payload)
        new[i] = payload[i].flip(j)
        return ParamPoint(spec, tuple(new))
    if isinstance(spec, SeqTablesSpec):
        for layer, w in enumerate(spec.windows):
            count = 1 << w.size
            if index < count:
                vals = payload[layer].values.copy()
                vals[index] = ~vals[index]
                new = list(payload)
                new[layer] = BooleanFunctionTable(w, vals)
                return ParamPoint(spec, tuple(new))
            index -= count
        raise InputError("neighbor index out of range")
    i, which, j = _interval_moves(theta)[index]
    iv = payload[i]
    if which == "lower":
        flipped = Interval(iv.lower.flip(j), iv.upper)
    else:
        flipped = Interval(iv.lower, iv.upper.flip(j))
    new = list(payload)
    new[i] = flipped
    return ParamPoint(spec, tuple(new))


def all_neighbors(theta: ParamPoint) -> list[ParamPoint]:
    """All unit-distance neighbors in canonical move order."""
    return [_neighbor_at(theta, i) for i in range(neighborhood_size(theta))]


def sample_neighbors(theta: ParamPoint, n: int, rng: np.random.Generator) -> list[ParamPoint]:
    """Draw n distinct unit-distance neighbors uniformly without replacement.

    Returns all of the neighborhood when n is at least its size.  The
    result is listed in canonical move order regardless of the draw, so a
    full sample coincides with all_neighbors; determinism is inherited
    from the generator state.
    """
    if n < 1:
        raise InputError("must sample at least one neighbor")
    total = neighborhood_size(theta)
    if n >= total:
        indices = range(total)
    else:
        indices = sorted(int(i) for i in rng.choice(total, size=n, replace=False))
    return [_neighbor_at(theta, i) for i in indices]


def random_init(spec: ClassSpec, rng: np.random.Generator) -> ParamPoint:
    """Uniform random parameter point respecting the payload invariants."""
    if isinstance(spec, ErosionSupSpec):
        n = spec.window.size
        payload = tuple(
            SubsetOfWindow(spec.window, int(rng.integers(0, 1 << n))) for _ in range(spec.k)
        )
        return ParamPoint(spec, payload)
    if isinstance(spec, IntervalSupSpec):
        n = spec.window.size
        ivs = []
        for _ in range(spec.k):
            upper = int(rng.integers(0, 1 << n))
            lower = upper & int(rng.integers(0, 1 << n))  # uniform among subsets of upper
            ivs.append(
                Interval(SubsetOfWindow(spec.window, lower), SubsetOfWindow(spec.window, upper))
            )
        return ParamPoint(spec, tuple(ivs))
    tables = tuple(
        BooleanFunctionTable(w, rng.integers(0, 2, size=1 << w.size, dtype=np.uint8).astype(bool))
        for w in spec.windows
    )
    return ParamPoint(spec, tables)


def effective_window(theta: ParamPoint, cap: int = TABULATION_CAP) -> Window:
    """The window the realized operator is locally defined in.

    For a layered composition this is the Minkowski sum of the layer
    windows, which may exceed the tabulation cap.
    """
    spec = theta.spec
    if isinstance(spec, (ErosionSupSpec, IntervalSupSpec)):
        return spec.window
    acc = {(0, 0)}
    for w in spec.windows:
        acc = {(r1 + r2, c1 + c2) for (r1, c1) in acc for (r2, c2) in w.offsets}
    offsets = tuple(sorted(acc))
    if len(offsets) > cap:
        raise SizeCapError(
            f"effective window has {len(offsets)} offsets, exceeding cap {cap}: "
            + "{" + ",".join(f"({r},{c})" for r, c in offsets) + "}"
        )
    return Window(offsets, cap=cap)


def basis_of_param(
    theta: ParamPoint,
    tabulation_cap: int = TABULATION_CAP,
    basis_cap: int = BASIS_CAP,
) -> Basis:
    """Basis of the operator represented by theta (tabulate, then extract)."""
    w = effective_window(theta, cap=tabulation_cap)
    table = characteristic_of(realize(theta), w, cap=tabulation_cap)
    return basis_of(table, cap=basis_cap)


def bit_distance(a: ParamPoint, b: ParamPoint) -> int:
    """Number of payload bits on which two points of the same class differ."""
    if a.spec != b.spec:
        raise InputError("bit distance requires points of the same class spec")
    if isinstance(a.spec, ErosionSupSpec):
        return sum((p.mask ^ q.mask).bit_count() for p, q in zip(a.payload, b.payload))
    if isinstance(a.spec, IntervalSupSpec):
        return sum(
            (p.lower.mask ^ q.lower.mask).bit_count()
            + (p.upper.mask ^ q.upper.mask).bit_count()
            for p, q in zip(a.payload, b.payload)
        )
    return int(
        sum(np.count_nonzero(p.values != q.values) for p, q in zip(a.payload, b.payload))
    )


# ---------------------------------------------------------------------------
# Serialization (round-trip parseable structured text)
# ---------------------------------------------------------------------------

def render_param(theta: ParamPoint) -> str:
    spec = theta.spec
    lines = [f"class: {spec.kind}"]
    if isinstance(spec, ErosionSupSpec):
        lines.append(f"window: {spec.window.render()}")
        lines.extend(f"se: {se.render()}" for se in theta.payload)
    elif isinstance(spec, IntervalSupSpec):
        lines.append(f"window: {spec.window.render()}")
        lines.extend(f"interval: {iv.render()}" for iv in theta.payload)
    else:
        for w, f in zip(spec.windows, theta.payload):
            lines.append(f"layer: {w.render()}")
            lines.append(f"table: {table_to_hex(f)}")
    return "\n".join(lines) + "\n"


def parse_param(text: str, cap: int | None = None) -> ParamPoint:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("class:"):
        raise ParseError("parameter file must start with a 'class:' line")
    kind = lines[0].split(":", 1)[1].strip()
    body = lines[1:]

    def expect(prefix: str, line: str) -> str:
        if not line.startswith(prefix):
            raise ParseError(f"expected '{prefix}' line, got {line!r}")
        return line.split(":", 1)[1].strip()

    if kind in ("erosion_sup", "interval_sup"):
        if not body:
            raise ParseError("missing 'window:' line")
        window = Window(parse_offsets(expect("window:", body[0])), cap=cap)
        items = body[1:]
        if not items:
            raise ParseError("parameter payload is empty")
        if kind == "erosion_sup":
            payload = tuple(window.subset(parse_offsets(expect("se:", ln))) for ln in items)
            return ParamPoint(ErosionSupSpec(window, len(payload)), payload)
        payload = tuple(parse_interval(expect("interval:", ln), window) for ln in items)
        return ParamPoint(IntervalSupSpec(window, len(payload)), payload)
    if kind == "seq_tables":
        if len(body) % 2 != 0 or not body:
            raise ParseError("seq_tables expects alternating 'layer:'/'table:' lines")
        windows = []
        tables = []
        for i in range(0, len(body), 2):
            w = Window(parse_offsets(expect("layer:", body[i])), cap=cap)
            windows.append(w)
            tables.append(table_from_hex(w, expect("table:", body[i + 1])))
        return ParamPoint(SeqTablesSpec(tuple(windows)), tuple(tables))
    raise ParseError(f"unknown class kind {kind!r}")


def canonical_key(theta: ParamPoint) -> str:
    """Serialization string; its lexicographic order breaks argmin ties."""
    return render_param(theta)
