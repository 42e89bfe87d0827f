"""Command-line front end.

Usage::

    senet <command> [--config FILE] [flags]

Commands: gen-data, train, eval, sweep-lambda, robustness, scaling.
Configuration files hold one ``key = value`` per line; ``#`` starts a comment.
Command-line flags override the file. Exit codes: 0 success, 2 configuration
error, 3 data error, 4 numerical failure.
"""

import argparse
import logging
import sys

from .backbone import Backbone, load_backbone, save_backbone
from .classifier import TaskConfig
from .data import DatasetSpec, generate_dataset, load_dataset, save_dataset
from .errors import ConfigError, DataError, NumericalError
from .experiments import (
    DEFAULT_LAMBDAS,
    RESULT_FIELDS,
    ROBUSTNESS_FIELDS,
    SCALING_FIELDS,
    EvalSettings,
    robustness,
    rows_to_csv,
    scaling,
    standalone,
    sweep_lambda,
)
from .shrinkage import DEFAULT_RANK_EPSILON_REL, ShrinkageConfig
from .training import TrainConfig, train

log = logging.getLogger("senet")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(" ", "").split(",") if v]


def _ints(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(" ", "").split(",") if v]


KEYS = {
    "experiment": str,
    "seed": int,
    "out": str,
    "data": str,
    "model": str,
    "identity_backbone": _bool,
    "record_time": _bool,
    # dataset generation
    "num_classes": int,
    "samples_per_class": int,
    "input_dim": int,
    "geometry": str,
    "noise_sigma": float,
    "data_seed": int,
    # task
    "alpha": float,
    "variant": str,
    "lambda": _floats,
    "rank_epsilon_rel": float,
    "augment": str,
    "predictor": str,
    # episodes
    "way": int,
    "shot": int,
    "query": int,
    "episodes": int,
    # training
    "hidden_dim": int,
    "embed_dim": int,
    "init_seed": int,
    "epochs": int,
    "batches_per_epoch": int,
    "episodes_per_batch": int,
    "lr": float,
    "train_shot": int,
    "history_out": str,
    # robustness / scaling
    "senet_lambda": float,
    "variances": _floats,
    "noise_seed": int,
    "ways": _ints,
    "shots": _ints,
}

DEFAULTS = {
    "seed": 0,
    "identity_backbone": False,
    "record_time": True,
    "num_classes": 10,
    "samples_per_class": 60,
    "input_dim": 16,
    "geometry": "isotropic_gaussian",
    "noise_sigma": 0.5,
    "alpha": 1.0,
    "rank_epsilon_rel": DEFAULT_RANK_EPSILON_REL,
    "augment": "flip",
    "predictor": "senet",
    "way": 5,
    "shot": 5,
    "query": 10,
    "episodes": 1000,
    "hidden_dim": 32,
    "embed_dim": 16,
    "init_seed": 0,
    "epochs": 1,
    "batches_per_epoch": 50,
    "episodes_per_batch": 4,
    "lr": 0.01,
    "senet_lambda": 10.0,
    "variances": [0.0, 0.5, 1.0, 2.0, 4.0, 8.0],
    "ways": [5, 10, 15, 20],
    "shots": [10, 20],
}

COMMAND_DEFAULTS = {
    "robustness": {"variant": "s2"},
    "scaling": {"num_classes": 20, "variant": "s2"},
}


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines into typed values; unknown keys are rejected."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = coerce(key, value, f"{source}:{lineno}")
    return out


def coerce(key, value, where="flag"):
    if key not in KEYS:
        raise ConfigError(f"{where}: unknown configuration key '{key}'")
    try:
        return KEYS[key](value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: bad value for '{key}': {exc}") from None


def read_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read(), path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def resolve(command, args):
    cfg = dict(DEFAULTS)
    cfg.update(COMMAND_DEFAULTS.get(command, {}))
    if args.config:
        cfg.update(read_config(args.config))
    flag_map = {
        "seed": args.seed, "out": args.out, "lambda": args.lam, "variant": args.variant,
        "way": args.way, "shot": args.shot, "query": args.query, "episodes": args.episodes,
        "model": args.model, "data": args.data,
    }
    for key, value in flag_map.items():
        if value is not None:
            cfg[key] = coerce(key, value, f"--{key}")
    if args.identity_backbone:
        cfg["identity_backbone"] = True
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        cfg[key] = coerce(key, value, "--set")
    cfg.setdefault("experiment", command)
    return cfg


def dataset_from(cfg):
    if cfg.get("data"):
        return load_dataset(cfg["data"])
    spec = DatasetSpec(
        num_classes=cfg["num_classes"],
        samples_per_class=cfg["samples_per_class"],
        input_dim=cfg["input_dim"],
        geometry=cfg["geometry"],
        noise_sigma=cfg["noise_sigma"],
        seed=cfg.get("data_seed", cfg["seed"]),
    )
    return generate_dataset(spec)


def task_from(cfg, lam=0.0):
    return TaskConfig(
        alpha=cfg["alpha"],
        variant=cfg.get("variant") or "s1",
        shrinkage=ShrinkageConfig(lam, cfg["rank_epsilon_rel"]),
    )


def backbone_from(cfg):
    if cfg.get("model"):
        return load_backbone(cfg["model"])
    if cfg["identity_backbone"]:
        return None
    raise DataError("missing model file: pass --model PATH or --identity-backbone")


def settings_from(cfg):
    return EvalSettings(
        way=cfg["way"], shot=cfg["shot"], query=cfg["query"], episodes=cfg["episodes"],
        seed=cfg["seed"], augment=cfg["augment"], record_time=cfg["record_time"],
    )


def emit(text, path):
    if not path:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def cmd_gen_data(cfg):
    if not cfg.get("out"):
        raise ConfigError("gen-data needs an output path (--out)")
    dataset = dataset_from(cfg)
    save_dataset(dataset, cfg["out"])
    log.info("wrote %d samples to %s", len(dataset.y), cfg["out"])


def cmd_train(cfg):
    if not cfg.get("out"):
        raise ConfigError("train needs a model output path (--out)")
    dataset = dataset_from(cfg)
    lambdas = cfg.get("lambda", [0.0])
    if len(lambdas) != 1:
        raise ConfigError("train takes exactly one lambda")
    tc = TrainConfig(
        task=task_from(cfg, lambdas[0]),
        way=cfg["way"], shot=cfg["shot"], query=cfg["query"],
        train_shot=cfg.get("train_shot"),
        episodes_per_batch=cfg["episodes_per_batch"], epochs=cfg["epochs"],
        batches_per_epoch=cfg["batches_per_epoch"], lr=cfg["lr"], augment=cfg["augment"],
    )
    init = Backbone.mlp(dataset.dim, cfg["hidden_dim"], cfg["embed_dim"], cfg["init_seed"])
    net, history = train(dataset, init, tc, seed=cfg["seed"])
    save_backbone(net, cfg["out"])
    fields = ("batch", "epoch", "lr", "loss", "probe_loss", "seed")
    rows = [{**h, "lr": repr(h["lr"]), "loss": repr(h["loss"]),
             "probe_loss": repr(h["probe_loss"]), "seed": cfg["seed"]} for h in history]
    emit(rows_to_csv(rows, fields), cfg.get("history_out") or cfg["out"] + ".history.csv")


def cmd_eval(cfg):
    dataset = dataset_from(cfg)
    backbone = backbone_from(cfg)
    settings = settings_from(cfg)
    predictor = cfg["predictor"]
    if predictor == "senet":
        variants = [cfg["variant"]] if cfg.get("variant") else ["s1"]
        rows = sweep_lambda(dataset, backbone, task_from(cfg), cfg.get("lambda", [0.0]),
                            variants, settings, cfg["experiment"])
    else:
        rows = [standalone(dataset, backbone, task_from(cfg), predictor, settings,
                           cfg["experiment"])]
    emit(rows_to_csv(rows, RESULT_FIELDS), cfg.get("out"))


def cmd_sweep_lambda(cfg):
    dataset = dataset_from(cfg)
    backbone = backbone_from(cfg)
    variants = [cfg["variant"]] if cfg.get("variant") else ["s1", "s2"]
    rows = sweep_lambda(dataset, backbone, task_from(cfg), cfg.get("lambda", DEFAULT_LAMBDAS),
                        variants, settings_from(cfg), cfg["experiment"])
    emit(rows_to_csv(rows, RESULT_FIELDS), cfg.get("out"))


def cmd_robustness(cfg):
    dataset = dataset_from(cfg)
    backbone = backbone_from(cfg)
    rows = robustness(dataset, backbone, task_from(cfg), cfg["variances"], cfg["senet_lambda"],
                      cfg.get("noise_seed", cfg["seed"]), settings_from(cfg), cfg["experiment"])
    emit(rows_to_csv(rows, ROBUSTNESS_FIELDS), cfg.get("out"))


def cmd_scaling(cfg):
    dataset = dataset_from(cfg)
    backbone = backbone_from(cfg)
    rows = scaling(dataset, backbone, task_from(cfg), cfg["ways"], cfg["shots"],
                   cfg["senet_lambda"], settings_from(cfg), cfg["experiment"])
    emit(rows_to_csv(rows, SCALING_FIELDS), cfg.get("out"))


COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "sweep-lambda": cmd_sweep_lambda,
    "robustness": cmd_robustness,
    "scaling": cmd_scaling,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="senet", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", metavar="PATH")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--lambda", dest="lam", metavar="LIST",
                        help="comma-separated shrinkage coefficients")
    parser.add_argument("--variant", choices=("s1", "s2"))
    parser.add_argument("--way", type=int)
    parser.add_argument("--shot", type=int)
    parser.add_argument("--query", type=int)
    parser.add_argument("--episodes", type=int)
    parser.add_argument("--model", metavar="PATH")
    parser.add_argument("--data", metavar="PATH")
    parser.add_argument("--identity-backbone", action="store_true")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override any configuration key")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](resolve(args.command, args))
    except ConfigError as exc:
        print(f"senet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"senet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"senet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
