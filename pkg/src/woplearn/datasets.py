"""Manifests, dataset loading, and planted-operator data generation."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParseError
from .learn import Dataset, SamplePair
from .morphology import TOROIDAL, BinaryImage, apply_table
from .params import ParamPoint, realize, render_param
from .pbm import read_pbm, write_pbm
from .representation import BooleanFunctionTable, render_table


@dataclass(frozen=True)
class Manifest:
    """Ordered (input path, target path) pairs, relative to the manifest dir."""

    entries: tuple[tuple[str, str], ...]


def read_manifest(path) -> Manifest:
    entries = []
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("manifest lines must be 'input<TAB>target'", line=lineno)
            entries.append((parts[0], parts[1]))
    return Manifest(tuple(entries))


def write_manifest(manifest: Manifest, path) -> None:
    with open(path, "w") as fh:
        for inp, tgt in manifest.entries:
            fh.write(f"{inp}\t{tgt}\n")


def load_dataset(manifest: Manifest, base_dir, boundary: str) -> Dataset:
    """Load and validate every referenced pair; dimensions must match."""
    pairs = []
    for inp, tgt in manifest.entries:
        x = read_pbm(os.path.join(base_dir, inp), boundary)
        y = read_pbm(os.path.join(base_dir, tgt), boundary)
        pairs.append(SamplePair(x, y))
    if not pairs:
        raise InputError("manifest references no pairs")
    return Dataset(tuple(pairs))


def _target_realizer(target):
    if isinstance(target, ParamPoint):
        return realize(target), render_param(target)
    if isinstance(target, BooleanFunctionTable):
        return (lambda x: apply_table(x, target.window, target)), render_table(target)
    raise InputError("target must be a ParamPoint or a BooleanFunctionTable")


def gen_dataset(
    target,
    count: int,
    dims: tuple[int, int],
    density: float,
    noise_rate: float,
    seed: int,
    out_dir,
) -> Manifest:
    """Write a planted-operator dataset: PBM pairs, manifest, provenance.

    Inputs are independent Bernoulli(density) toroidal images; targets are
    the planted operator's outputs with each pixel flipped independently
    with probability noise_rate.
    """
    if count < 1:
        raise InputError("count must be >= 1")
    if dims[0] < 1 or dims[1] < 1:
        raise InputError("dims must be positive")
    if not 0.0 <= density <= 1.0 or not 0.0 <= noise_rate <= 1.0:
        raise InputError("density and noise_rate must lie in [0,1]")
    op, target_text = _target_realizer(target)
    rng = np.random.default_rng(seed)
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for i in range(count):
        x = BinaryImage(rng.random(dims) < density, TOROIDAL)
        y = op(x)
        if noise_rate > 0.0:
            flips = rng.random(dims) < noise_rate
            y = BinaryImage(y.pixels ^ flips, TOROIDAL)
        in_name = f"in_{i:04d}.pbm"
        tg_name = f"tg_{i:04d}.pbm"
        write_pbm(x, os.path.join(out_dir, in_name))
        write_pbm(y, os.path.join(out_dir, tg_name))
        entries.append((in_name, tg_name))
    manifest = Manifest(tuple(entries))
    write_manifest(manifest, os.path.join(out_dir, "manifest.tsv"))
    with open(os.path.join(out_dir, "provenance.txt"), "w") as fh:
        fh.write(
            f"count: {count}\nheight: {dims[0]}\nwidth: {dims[1]}\n"
            f"density: {density!r}\nnoise_rate: {noise_rate!r}\nseed: {seed}\n"
            "target:\n"
        )
        fh.write(target_text)
    return manifest
