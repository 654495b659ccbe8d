"""Empirical risk machinery and stochastic lattice descent.

The loss is the pooled pixel-mismatch fraction: total mismatched pixels
over total pixels, summed across pairs before dividing, so small images do
not dominate and batch errors are exact (integer arithmetic until the one
final division).
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError
from .morphology import BinaryImage
from .params import (
    ParamPoint,
    all_neighbors,
    canonical_key,
    realize,
    render_param,
    sample_neighbors,
)


@dataclass(frozen=True)
class SamplePair:
    """One observed (input, target) image pair."""

    input: BinaryImage
    target: BinaryImage

    def __post_init__(self) -> None:
        if self.input.shape != self.target.shape or self.input.boundary != self.target.boundary:
            raise InputError(
                f"pair images must share dimensions and boundary, got "
                f"{self.input.shape}/{self.input.boundary} vs "
                f"{self.target.shape}/{self.target.boundary}"
            )


@dataclass(frozen=True)
class Dataset:
    pairs: tuple[SamplePair, ...]

    def __post_init__(self) -> None:
        if len(self.pairs) < 1:
            raise InputError("dataset needs at least one pair")

    @property
    def n(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class SLDAConfig:
    """Descent knobs: batch size b, sampled neighbors n, epochs, seed.

    require_improvement keeps the current point when it beats every
    sampled candidate on the batch; it is off by default, in which case
    the walk moves unconditionally to the best sampled neighbor.
    """

    batch_size: int
    neighbors: int
    epochs: int
    seed: int = 0
    require_improvement: bool = False

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise InputError("batch_size must be >= 1")
        if self.neighbors < 1:
            raise InputError("neighbors must be >= 1")
        if self.epochs < 1:
            raise InputError("epochs must be >= 1")


@dataclass(frozen=True)
class StepRecord:
    epoch: int
    batch: int
    step: int
    candidate_errors: tuple[float, ...]
    chosen_serialization: str
    batch_error: float


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    full_error: float
    best_updated: bool


@dataclass
class TrainTrace:
    """Full audited descent path: every step and every epoch-end check."""

    initial_serialization: str
    initial_error: float
    steps: list[StepRecord] = field(default_factory=list)
    epochs: list[EpochRecord] = field(default_factory=list)


@dataclass(frozen=True)
class TrainResult:
    best_param: ParamPoint
    best_error: float
    trace: TrainTrace


def _pair_counts(op, pair: SamplePair) -> tuple[int, int]:
    out = op(pair.input)
    mism = int(np.count_nonzero(out.pixels != pair.target.pixels))
    return mism, pair.target.pixels.size


def empirical_error(theta: ParamPoint, data: Dataset | Sequence[SamplePair]) -> float:
    """Pooled pixel-mismatch fraction of theta's operator on the sample."""
    pairs = data.pairs if isinstance(data, Dataset) else tuple(data)
    op = realize(theta)
    mism = 0
    total = 0
    for pair in pairs:
        m, t = _pair_counts(op, pair)
        mism += m
        total += t
    return mism / total


def holdout_error(theta: ParamPoint, test: Dataset) -> float:
    """Empirical error on held-out data; disjointness is the caller's duty."""
    return empirical_error(theta, test)


def iou_metric(theta: ParamPoint, data: Dataset | Sequence[SamplePair]) -> float:
    """Pooled intersection-over-union (reporting metric, not a training loss)."""
    pairs = data.pairs if isinstance(data, Dataset) else tuple(data)
    op = realize(theta)
    inter = 0
    uni = 0
    for pair in pairs:
        out = op(pair.input)
        inter += int(np.count_nonzero(out.pixels & pair.target.pixels))
        uni += int(np.count_nonzero(out.pixels | pair.target.pixels))
    return 1.0 if uni == 0 else inter / uni


def partition_batches(
    data: Dataset, b: int, rng: np.random.Generator
) -> list[list[SamplePair]]:
    """Random permutation of the pairs cut into ceil(N/b) consecutive batches.

    All batches have size b except possibly a shorter last one; every pair
    appears exactly once per partition.
    """
    if not 1 <= b <= data.n:
        raise InputError(f"batch size must be in [1, {data.n}], got {b}")
    order = [int(i) for i in rng.permutation(data.n)]
    shuffled = [data.pairs[i] for i in order]
    return [shuffled[i : i + b] for i in range(0, data.n, b)]


def _descend(
    theta0: ParamPoint,
    data: Dataset,
    epochs: int,
    batch_size: int,
    neighbor_count: int | None,
    rng: np.random.Generator,
    require_improvement: bool,
) -> TrainResult:
    """Shared descent loop; neighbor_count=None means exhaustive neighborhoods."""
    theta = theta0
    l_min = empirical_error(theta0, data)
    best = theta0
    trace = TrainTrace(render_param(theta0), l_min)
    step = 0
    for epoch in range(1, epochs + 1):
        batches = partition_batches(data, batch_size, rng)
        for j, batch in enumerate(batches, start=1):
            if neighbor_count is None:
                candidates = all_neighbors(theta)
            else:
                candidates = sample_neighbors(theta, neighbor_count, rng)
            errors = [empirical_error(c, batch) for c in candidates]
            low = min(errors)
            ties = [i for i, e in enumerate(errors) if e == low]
            pick = min(ties, key=lambda i: canonical_key(candidates[i]))
            chosen, chosen_err = candidates[pick], low
            if require_improvement:
                current_err = empirical_error(theta, batch)
                if current_err < low:
                    chosen, chosen_err = theta, current_err
            theta = chosen
            step += 1
            trace.steps.append(
                StepRecord(
                    epoch=epoch,
                    batch=j,
                    step=step,
                    candidate_errors=tuple(errors),
                    chosen_serialization=render_param(chosen),
                    batch_error=chosen_err,
                )
            )
        full = empirical_error(theta, data)
        updated = full < l_min
        if updated:
            l_min = full
            best = theta
        trace.epochs.append(EpochRecord(epoch=epoch, full_error=full, best_updated=updated))
    return TrainResult(best_param=best, best_error=l_min, trace=trace)


def slda(theta0: ParamPoint, data: Dataset, cfg: SLDAConfig) -> TrainResult:
    """Stochastic lattice descent over theta0's parameter lattice.

    Per epoch the sample is randomly repartitioned into batches; per batch
    ``cfg.neighbors`` unit-distance neighbors of the current point are
    sampled and the walk moves to the sampled neighbor with the least
    batch error (ties broken by canonical serialization).  The point with
    the least full-sample error seen at an epoch end (or at the start) is
    returned, together with the complete descent trace.

    Parameters
    ----------
    theta0 : ParamPoint
        Starting point; also the initial best.
    data : Dataset
        Training pairs.
    cfg : SLDAConfig
        Batch size, neighbor count, epochs, seed, move policy.

    Returns
    -------
    TrainResult
        Best point, its full-sample error, and the audited trace.
    """
    rng = np.random.default_rng(cfg.seed)
    return _descend(
        theta0,
        data,
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        neighbor_count=cfg.neighbors,
        rng=rng,
        require_improvement=cfg.require_improvement,
    )


def lda(theta0: ParamPoint, data: Dataset, epochs: int, seed: int = 0) -> TrainResult:
    """Deterministic lattice descent: full-sample batches, exhaustive neighbors.

    Equivalent to slda with b = N and n = |N(theta)| re-evaluated at every
    step; apart from the irrelevant single-batch permutation there is no
    randomness, so repeated runs agree exactly.
    """
    rng = np.random.default_rng(seed)
    return _descend(
        theta0,
        data,
        epochs=epochs,
        batch_size=data.n,
        neighbor_count=None,
        rng=rng,
        require_improvement=False,
    )


# ---------------------------------------------------------------------------
# Trace export
# ---------------------------------------------------------------------------

TRACE_COLUMNS = ("epoch", "batch", "step", "batch_error", "full_error_if_epoch_end", "theta_digest")


def theta_digest(serialization: str) -> str:
    return hashlib.sha256(serialization.encode()).hexdigest()[:16]


def render_trace_csv(trace: TrainTrace) -> str:
    """CSV text of the descent path; epoch-end rows carry the full error."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    per_epoch_last = {}
    for rec in trace.steps:
        per_epoch_last[rec.epoch] = rec.step
    epoch_errors = {er.epoch: er.full_error for er in trace.epochs}
    for rec in trace.steps:
        at_end = per_epoch_last[rec.epoch] == rec.step
        writer.writerow(
            [
                rec.epoch,
                rec.batch,
                rec.step,
                repr(rec.batch_error),
                repr(epoch_errors[rec.epoch]) if at_end else "",
                theta_digest(rec.chosen_serialization),
            ]
        )
    return buf.getvalue()


def write_trace_csv(trace: TrainTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_trace_csv(trace))


def read_trace_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
