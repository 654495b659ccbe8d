"""Hierarchical descent over a lattice of window sequences.

The outer walk moves through sequences of layer windows (subsets of a
maximal window), scoring each node by the validation error of a fresh
inner fit of a layered-table class on that node's windows.  Inner fits are
seeded deterministically from the outer seed and the node serialization,
so node scores are exchangeable and memoizable.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ConfigError, InputError
from .lattice import ORIGIN, Window
from .learn import (
    Dataset,
    SLDAConfig,
    TrainResult,
    holdout_error,
    lda,
    slda,
)
from .params import SeqTablesSpec, random_init


@dataclass(frozen=True)
class WindowLatticeSpec:
    """The searched lattice: subsets of max_window, one per layer."""

    max_window: Window
    depth: int = 1
    min_layer_size: int = 1
    origin_pinned: bool = True

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise InputError("depth must be >= 1")
        if not 1 <= self.min_layer_size <= self.max_window.size:
            raise InputError("min_layer_size must be in [1, |max_window|]")
        if self.origin_pinned and not self.max_window.has_origin:
            raise InputError("origin pinning requires the origin inside max_window")


@dataclass(frozen=True)
class OuterConfig:
    """Outer-walk knobs plus the inner training protocol."""

    neighbors: int
    epochs: int
    inner: SLDAConfig
    seed: int = 0
    validation_fraction: Optional[float] = 0.25
    validation_data: Optional[Dataset] = None
    inner_mode: str = "slda"  # or "lda" (exhaustive deterministic inner fits)

    def __post_init__(self) -> None:
        if self.neighbors < 1 or self.epochs < 1:
            raise InputError("outer neighbors and epochs must be >= 1")
        if self.validation_data is None:
            if self.validation_fraction is None or not 0 < self.validation_fraction < 1:
                raise InputError("validation fraction must lie in (0,1)")
        if self.inner_mode not in ("slda", "lda"):
            raise ConfigError(f"unknown inner_mode {self.inner_mode!r}")


def render_node(ws: tuple[Window, ...]) -> str:
    return ";".join(w.render() for w in ws)


def window_neighbors(
    ws: tuple[Window, ...] | list[Window], spec: WindowLatticeSpec
) -> list[tuple[Window, ...]]:
    """All sequences reachable by adding or removing one point of one layer.

    Additions come from max_window; removals respect the minimum layer
    size and origin pinning.  Order is canonical: layer by layer,
    additions (by offset) then removals (by offset).
    """
    ws = tuple(ws)
    if len(ws) != spec.depth:
        raise InputError(f"expected {spec.depth} layer windows, got {len(ws)}")
    max_set = set(spec.max_window.offsets)
    for w in ws:
        if not set(w.offsets) <= max_set:
            raise InputError(f"layer window {w.render()} is not inside max_window")
    out = []
    for layer, w in enumerate(ws):
        members = set(w.offsets)
        for off in spec.max_window.offsets:
            if off not in members:
                grown = Window(tuple(sorted(members | {off})), cap=spec.max_window.size)
                out.append(ws[:layer] + (grown,) + ws[layer + 1 :])
        if w.size > spec.min_layer_size:
            for off in w.offsets:
                if spec.origin_pinned and off == ORIGIN:
                    continue
                shrunk = Window(tuple(sorted(members - {off})), cap=spec.max_window.size)
                out.append(ws[:layer] + (shrunk,) + ws[layer + 1 :])
    return out


def initial_node(spec: WindowLatticeSpec) -> tuple[Window, ...]:
    """Deterministic bottom node: smallest allowed windows, origin first."""
    picks: list = []
    if spec.origin_pinned:
        picks.append(ORIGIN)
    for off in spec.max_window.offsets:
        if len(picks) >= spec.min_layer_size:
            break
        if off not in picks:
            picks.append(off)
    w = Window(tuple(sorted(picks)), cap=spec.max_window.size)
    return (w,) * spec.depth


def _derived_seed(outer_seed: int, node_key: str, salt: str) -> int:
    digest = hashlib.sha256(f"{outer_seed}|{salt}|{node_key}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass
class NodeEvaluation:
    node: tuple[Window, ...]
    fit: TrainResult
    validation_error: float


@dataclass
class SelectionResult:
    """Winner of the outer walk plus the audit trail."""

    best_windows: tuple[Window, ...]
    fit: TrainResult
    validation_error: float
    path: list[tuple[int, str, float]] = field(default_factory=list)
    evaluations: list[tuple[str, float]] = field(default_factory=list)
    fit_indices: tuple[int, ...] = ()
    validation_indices: tuple[int, ...] = ()


def split_dataset(
    data: Dataset, fraction: float, seed: int
) -> tuple[Dataset, Dataset, tuple[int, ...], tuple[int, ...]]:
    """Prefix/suffix split of a seeded permutation into fit and validation."""
    n_val = int(round(fraction * data.n))
    n_val = max(1, min(data.n - 1, n_val))
    if data.n < 2:
        raise InputError("cannot split a single-pair dataset")
    perm = [int(i) for i in np.random.default_rng(_derived_seed(seed, "", "split")).permutation(data.n)]
    fit_idx, val_idx = tuple(perm[: data.n - n_val]), tuple(perm[data.n - n_val :])
    fit = Dataset(tuple(data.pairs[i] for i in fit_idx))
    val = Dataset(tuple(data.pairs[i] for i in val_idx))
    return fit, val, fit_idx, val_idx


def hierarchical_slda(
    spec: WindowLatticeSpec, train: Dataset, cfg: OuterConfig
) -> SelectionResult:
    """Outer lattice descent over window sequences minimizing validation error.

    Mirrors the batched descent with nodes in place of parameter points:
    per outer epoch, ``cfg.neighbors`` neighbor nodes are sampled, each is
    scored by a fresh (memoized) inner fit on the training part, and the
    walk moves to the node with the least validation error.  The best node
    seen, its fitted parameters, and its validation error are returned.
    """
    if cfg.validation_data is not None:
        fit_data, val_data = train, cfg.validation_data
        fit_idx = tuple(range(train.n))
        val_idx = ()
    else:
        fit_data, val_data, fit_idx, val_idx = split_dataset(
            train, cfg.validation_fraction, cfg.seed
        )

    memo: dict[str, NodeEvaluation] = {}

    def evaluate(node: tuple[Window, ...]) -> NodeEvaluation:
        key = render_node(node)
        if key in memo:
            return memo[key]
        init_rng = np.random.default_rng(_derived_seed(cfg.seed, key, "init"))
        theta0 = random_init(SeqTablesSpec(node), init_rng)
        fit_seed = _derived_seed(cfg.seed, key, "fit")
        if cfg.inner_mode == "lda":
            fit = lda(theta0, fit_data, epochs=cfg.inner.epochs, seed=fit_seed)
        else:
            inner_cfg = replace(
                cfg.inner, seed=fit_seed, batch_size=min(cfg.inner.batch_size, fit_data.n)
            )
            fit = slda(theta0, fit_data, inner_cfg)
        ev = NodeEvaluation(node, fit, holdout_error(fit.best_param, val_data))
        memo[key] = ev
        return ev

    rng = np.random.default_rng(_derived_seed(cfg.seed, "", "outer"))
    node = initial_node(spec)
    current = evaluate(node)
    best = current
    result = SelectionResult(
        best_windows=best.node,
        fit=best.fit,
        validation_error=best.validation_error,
        fit_indices=fit_idx,
        validation_indices=val_idx,
    )
    result.path.append((0, render_node(node), current.validation_error))
    result.evaluations.append((render_node(node), current.validation_error))
    seen = {render_node(node)}
    for step in range(1, cfg.epochs + 1):
        neighbors = window_neighbors(node, spec)
        m = min(cfg.neighbors, len(neighbors))
        idx = sorted(int(i) for i in rng.choice(len(neighbors), size=m, replace=False))
        candidates = [neighbors[i] for i in idx]
        evals = [evaluate(c) for c in candidates]
        for ev in evals:
            key = render_node(ev.node)
            if key not in seen:
                seen.add(key)
                result.evaluations.append((key, ev.validation_error))
        low = min(ev.validation_error for ev in evals)
        ties = [ev for ev in evals if ev.validation_error == low]
        current = min(ties, key=lambda ev: render_node(ev.node))
        node = current.node
        result.path.append((step, render_node(node), current.validation_error))
        if current.validation_error < best.validation_error:
            best = current
    result.best_windows = best.node
    result.fit = best.fit
    result.validation_error = best.validation_error
    return result


def render_selection_report(result: SelectionResult) -> str:
    """Structured text report: split, visited nodes, walk, and the winner."""
    lines = ["model selection report"]
    lines.append(f"fit_indices: {','.join(map(str, result.fit_indices))}")
    lines.append(f"validation_indices: {','.join(map(str, result.validation_indices))}")
    lines.append("evaluations:")
    for key, err in result.evaluations:
        lines.append(f"  {key}\t{err!r}")
    lines.append("path:")
    for step, key, err in result.path:
        lines.append(f"  step {step}\t{key}\t{err!r}")
    lines.append(f"winner: {render_node(result.best_windows)}")
    lines.append(f"validation_error: {result.validation_error!r}")
    return "\n".join(lines) + "\n"
