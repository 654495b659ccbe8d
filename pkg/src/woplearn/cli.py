"""Command-line surface: gen, train, eval, basis, inspect-trace.

Every command is a thin adapter over the library; all randomness flows
from the single config seed, so re-running a command with identical
inputs yields byte-identical artifacts.  Run configuration is a flat
key=value text file ('#' comments allowed); command-line flags mirror the
config keys and override them.  Unknown keys are errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, InputError, ParseError, SizeCapError, WoplearnError
from .lattice import DEFAULT_WINDOW_CAP, parse_window
from .learn import (
    Dataset,
    SLDAConfig,
    empirical_error,
    iou_metric,
    read_trace_csv,
    slda,
    write_trace_csv,
)
from .modelsel import (
    OuterConfig,
    WindowLatticeSpec,
    hierarchical_slda,
    render_node,
    render_selection_report,
)
from .morphology import BOUNDARIES, ZERO_PAD
from .datasets import gen_dataset, load_dataset, read_manifest
from .params import (
    ErosionSupSpec,
    IntervalSupSpec,
    SeqTablesSpec,
    basis_of_param,
    parse_param,
    random_init,
    render_param,
)
from .representation import (
    BASIS_CAP,
    TABULATION_CAP,
    parse_table,
    property_report,
)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


# key -> (converter, help text); this is the whole config vocabulary
CONFIG_KEYS = {
    "seed": (int, "master RNG seed (default 0)"),
    "boundary": (str, "boundary policy: zero_pad or toroidal"),
    "output_dir": (str, "directory the command writes into"),
    "window_cap": (int, f"max window size (default {DEFAULT_WINDOW_CAP})"),
    "basis_cap": (int, f"max window size for basis extraction (default {BASIS_CAP})"),
    "class": (str, "operator class: erosion_sup, interval_sup or seq_tables"),
    "window": (str, "window offsets, e.g. {(-1,0),(0,0),(0,1)}"),
    "k": (int, "number of structuring elements / intervals"),
    "layer_windows": (str, "seq_tables layer windows, ';'-separated offset sets"),
    "init": (str, "optional path to an initial parameter file"),
    "batch_size": (int, "pairs per descent batch"),
    "neighbors": (int, "neighbors sampled per descent step"),
    "epochs": (int, "training epochs"),
    "require_improvement": (_parse_bool, "keep current point when it beats all candidates"),
    "count": (int, "number of generated pairs"),
    "height": (int, "generated image height"),
    "width": (int, "generated image width"),
    "density": (float, "foreground probability of generated inputs"),
    "noise_rate": (float, "per-pixel target flip probability"),
    "target": (str, "path to the planted operator (parameter or table file)"),
    "model_selection": (_parse_bool, "run the hierarchical window search"),
    "max_window": (str, "largest window the search may use"),
    "depth": (int, "number of composed layers in the search"),
    "min_layer_size": (int, "minimum points per layer window"),
    "origin_pinned": (_parse_bool, "keep the origin inside every layer window"),
    "outer_neighbors": (int, "window-sequence neighbors sampled per outer step"),
    "outer_epochs": (int, "outer search steps"),
    "validation_fraction": (float, "fraction of pairs held out for validation"),
    "inner_mode": (str, "inner fit: slda or lda"),
}


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"expected 'key = value', got {body!r}", line=lineno)
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r} (line {lineno})")
        conv, _ = CONFIG_KEYS[key]
        try:
            values[key] = conv(raw)
        except (ValueError, TypeError):
            raise ConfigError(f"bad value for {key!r}: {raw!r} (line {lineno})") from None
    return values


def load_config(args: argparse.Namespace) -> dict:
    values = {}
    if getattr(args, "config", None):
        with open(args.config, "r") as fh:
            values.update(parse_config_text(fh.read()))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    boundary = values.get("boundary", ZERO_PAD)
    if boundary not in BOUNDARIES:
        raise ConfigError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
    values["boundary"] = boundary
    values.setdefault("seed", 0)
    values.setdefault("window_cap", DEFAULT_WINDOW_CAP)
    values.setdefault("basis_cap", BASIS_CAP)
    return values


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")


def _load_param_file(path, cap: int):
    with open(path, "r") as fh:
        text = fh.read()
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.startswith("class:"):
        return parse_param(text, cap=cap)
    if first.startswith("window:"):
        return parse_table(text, cap=cap)
    raise ParseError(f"{path}: not a parameter or table file")


def _class_spec(cfg: dict):
    _require(cfg, "class")
    kind = cfg["class"]
    cap = cfg["window_cap"]
    if kind in ("erosion_sup", "interval_sup"):
        _require(cfg, "window", "k")
        window = parse_window(cfg["window"], cap=cap)
        return (ErosionSupSpec if kind == "erosion_sup" else IntervalSupSpec)(window, cfg["k"])
    if kind == "seq_tables":
        _require(cfg, "layer_windows")
        windows = tuple(
            parse_window(part.strip(), cap=cap)
            for part in cfg["layer_windows"].split(";")
            if part.strip()
        )
        if not windows:
            raise ConfigError("layer_windows lists no windows")
        return SeqTablesSpec(windows)
    raise ConfigError(f"unknown class {kind!r}")


def _echo_config(cfg: dict) -> str:
    return "".join(f"  {k} = {cfg[k]}\n" for k in sorted(cfg))


def cmd_gen(args) -> int:
    cfg = load_config(args)
    _require(cfg, "target", "count", "height", "width", "density", "output_dir")
    target = _load_param_file(cfg["target"], cfg["window_cap"])
    manifest = gen_dataset(
        target,
        count=cfg["count"],
        dims=(cfg["height"], cfg["width"]),
        density=cfg["density"],
        noise_rate=cfg.get("noise_rate", 0.0),
        seed=cfg["seed"],
        out_dir=cfg["output_dir"],
    )
    print(f"wrote {len(manifest.entries)} pairs to {cfg['output_dir']}")
    return 0


def _train_flat(cfg: dict, data: Dataset, out_dir: str) -> None:
    spec = _class_spec(cfg)
    _require(cfg, "batch_size", "neighbors", "epochs")
    rng = np.random.default_rng(cfg["seed"])
    if "init" in cfg:
        theta0 = _load_param_file(cfg["init"], cfg["window_cap"])
    else:
        theta0 = random_init(spec, rng)
    slda_cfg = SLDAConfig(
        batch_size=cfg["batch_size"],
        neighbors=cfg["neighbors"],
        epochs=cfg["epochs"],
        seed=cfg["seed"],
        require_improvement=cfg.get("require_improvement", False),
    )
    result = slda(theta0, data, slda_cfg)
    with open(os.path.join(out_dir, "theta.txt"), "w") as fh:
        fh.write(render_param(result.best_param))
    write_trace_csv(result.trace, os.path.join(out_dir, "trace.csv"))
    with open(os.path.join(out_dir, "result.txt"), "w") as fh:
        fh.write("command: train\nconfig:\n")
        fh.write(_echo_config(cfg))
        fh.write(f"initial_error: {result.trace.initial_error!r}\n")
        fh.write(f"best_error: {result.best_error!r}\n")
        fh.write("theta:\n")
        fh.write(render_param(result.best_param))
    print(f"best_error: {result.best_error!r}")


def _train_selection(cfg: dict, data: Dataset, out_dir: str) -> None:
    _require(cfg, "max_window", "outer_neighbors", "outer_epochs",
             "batch_size", "neighbors", "epochs")
    spec = WindowLatticeSpec(
        max_window=parse_window(cfg["max_window"], cap=cfg["window_cap"]),
        depth=cfg.get("depth", 1),
        min_layer_size=cfg.get("min_layer_size", 1),
        origin_pinned=cfg.get("origin_pinned", True),
    )
    inner = SLDAConfig(
        batch_size=cfg["batch_size"],
        neighbors=cfg["neighbors"],
        epochs=cfg["epochs"],
        seed=cfg["seed"],
        require_improvement=cfg.get("require_improvement", False),
    )
    outer = OuterConfig(
        neighbors=cfg["outer_neighbors"],
        epochs=cfg["outer_epochs"],
        inner=inner,
        seed=cfg["seed"],
        validation_fraction=cfg.get("validation_fraction", 0.25),
        inner_mode=cfg.get("inner_mode", "slda"),
    )
    result = hierarchical_slda(spec, data, outer)
    with open(os.path.join(out_dir, "theta.txt"), "w") as fh:
        fh.write(render_param(result.fit.best_param))
    write_trace_csv(result.fit.trace, os.path.join(out_dir, "trace.csv"))
    with open(os.path.join(out_dir, "selection_report.txt"), "w") as fh:
        fh.write(render_selection_report(result))
    with open(os.path.join(out_dir, "result.txt"), "w") as fh:
        fh.write("command: train (model selection)\nconfig:\n")
        fh.write(_echo_config(cfg))
        fh.write(f"winner: {render_node(result.best_windows)}\n")
        fh.write(f"validation_error: {result.validation_error!r}\n")
        fh.write("theta:\n")
        fh.write(render_param(result.fit.best_param))
    print(f"winner: {render_node(result.best_windows)}")
    print(f"validation_error: {result.validation_error!r}")


def cmd_train(args) -> int:
    cfg = load_config(args)
    _require(cfg, "output_dir")
    manifest = read_manifest(args.manifest)
    data = load_dataset(manifest, os.path.dirname(os.path.abspath(args.manifest)), cfg["boundary"])
    out_dir = cfg["output_dir"]
    os.makedirs(out_dir, exist_ok=True)
    if cfg.get("model_selection", False):
        _train_selection(cfg, data, out_dir)
    else:
        _train_flat(cfg, data, out_dir)
    return 0


def cmd_eval(args) -> int:
    cfg = load_config(args)
    theta = _load_param_file(args.param, cfg["window_cap"])
    manifest = read_manifest(args.manifest)
    data = load_dataset(manifest, os.path.dirname(os.path.abspath(args.manifest)), cfg["boundary"])
    from .params import ParamPoint  # local alias for the isinstance check

    if not isinstance(theta, ParamPoint):
        raise InputError("eval expects a parameter file, not a bare table")
    print(f"pixel_error: {empirical_error(theta, data)!r}")
    print(f"iou: {iou_metric(theta, data)!r}")
    return 0


def cmd_basis(args) -> int:
    cfg = load_config(args)
    theta = _load_param_file(args.param, cfg["window_cap"])
    from .params import ParamPoint
    from .representation import basis_of

    if isinstance(theta, ParamPoint):
        basis = basis_of_param(
            theta, tabulation_cap=cfg["window_cap"], basis_cap=cfg["basis_cap"]
        )
    else:
        basis = basis_of(theta, cap=cfg["basis_cap"])
    for interval in basis.intervals:
        print(interval.render())
    report = property_report(basis)
    print(f"is_increasing: {str(report.is_increasing).lower()}")
    print(f"contains_full_interval_from_origin: "
          f"{str(report.contains_full_interval_from_origin).lower()}")
    print(f"origin_in_all_lower_endpoints: "
          f"{str(report.origin_in_all_lower_endpoints).lower()}")
    return 0


def cmd_inspect_trace(args) -> int:
    rows = read_trace_csv(args.trace)
    if not rows:
        print("empty trace")
        return 0
    epochs = []
    for row in rows:
        if row["full_error_if_epoch_end"]:
            epochs.append((int(row["epoch"]), float(row["full_error_if_epoch_end"])))
    print(f"steps: {len(rows)}")
    print(f"epochs: {len(epochs)}")
    for epoch, err in epochs:
        print(f"epoch {epoch}: full_error {err!r}")
    if epochs:
        best = min(epochs, key=lambda t: (t[1], t[0]))
        print(f"best_epoch: {best[0]} (full_error {best[1]!r})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="woplearn",
        description="Learn window operators on binary images and inspect their bases.",
    )
    parser.add_argument("--version", action="version", version=f"woplearn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", help="flat key=value config file")
        for key, (conv, help_text) in CONFIG_KEYS.items():
            conv_arg = conv if conv is not _parse_bool else _parse_bool
            p.add_argument(f"--{key}", type=conv_arg, default=None, help=help_text)

    p_gen = sub.add_parser("gen", help="generate a planted-operator dataset")
    add_config_flags(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_train = sub.add_parser("train", help="fit an operator by stochastic lattice descent")
    p_train.add_argument("--manifest", required=True, help="tab-separated pair manifest")
    add_config_flags(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="pooled pixel error and IoU of a parameter file")
    p_eval.add_argument("--param", required=True, help="parameter file")
    p_eval.add_argument("--manifest", required=True, help="tab-separated pair manifest")
    add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_basis = sub.add_parser("basis", help="print the basis and property flags of a parameter")
    p_basis.add_argument("--param", required=True, help="parameter or table file")
    add_config_flags(p_basis)
    p_basis.set_defaults(func=cmd_basis)

    p_tr = sub.add_parser("inspect-trace", help="summarize a descent trace CSV")
    p_tr.add_argument("--trace", required=True, help="trace.csv produced by train")
    p_tr.set_defaults(func=cmd_inspect_trace)

    return parser


_EXIT_CODES = (
    (ConfigError, 2),
    (ParseError, 2),
    (SizeCapError, 3),
    (InputError, 4),
    (WoplearnError, 1),
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WoplearnError as exc:
        for etype, code in _EXIT_CODES:
            if isinstance(exc, etype):
                print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
