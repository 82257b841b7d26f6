"""Command-line interface: train, enhance, eval, score, serve.

Exit codes: 0 success, 2 usage or configuration problems, 3 runtime or
resource failures (unreadable checkpoints, occupied ports).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import a3c, metrics, nn, rl
from .data import (
    CheckpointError,
    PairedDataset,
    load_checkpoint,
    load_image,
    save_image,
    synth_dataset,
)
from .inference import InferenceConfig, PersonalizationTarget, enhance_adaptive, normalized_zfc

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageFault(Exception):
    """Configuration or argument problem; maps to exit code 2."""


class RuntimeFault(Exception):
    """Resource or execution problem; maps to exit code 3."""


DEFAULT_CONFIG = {
    "train": asdict(a3c.TrainConfig()),
    "rewards": {"w_iq": 1000.0, "w_amp": 60.0, "zfc_bar": 0.45, "raw_zfc": False},
    "inference": {"epsilon": 0.05, "max_iterations": 20},
    "data": {"train_dir": None, "eval_dir": None, "synthetic": None},
    "scorer": "proxy",
}


def load_run_config(path=None) -> dict:
    """Defaults overlaid with a JSON config file; unknown keys rejected."""
    config = json.loads(json.dumps(DEFAULT_CONFIG))
    if path is None:
        return config
    path = Path(path)
    if not path.exists():
        raise UsageFault(f"config file not found: {path}")
    try:
        user = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise UsageFault(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(user, dict):
        raise UsageFault("config root must be an object")
    for section, value in user.items():
        if section not in config:
            raise UsageFault(f"unknown config section {section!r}")
        if isinstance(config[section], dict):
            if not isinstance(value, dict):
                raise UsageFault(f"config section {section!r} must be an object")
            for key, v in value.items():
                if key not in config[section]:
                    raise UsageFault(f"unknown config key {section}.{key}")
                config[section][key] = v
        else:
            config[section] = value
    return config


def _parse_synthetic(text: str):
    try:
        seed, count, size = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageFault("--synthetic expects SEED,COUNT,SIZE, e.g. 7,16,64")
    return seed, count, size


def _load_net(path) -> tuple[nn.PolicyValueNet, dict]:
    try:
        ckpt = load_checkpoint(path)
        return nn.PolicyValueNet.from_params(ckpt.params), ckpt.metadata
    except (FileNotFoundError, CheckpointError, KeyError, ValueError) as exc:
        raise RuntimeFault(f"cannot load checkpoint: {exc}")


def _load_input(path) -> np.ndarray:
    try:
        return load_image(path)
    except (FileNotFoundError, ValueError) as exc:
        raise UsageFault(str(exc))


# --- subcommands ------------------------------------------------------------

def cmd_train(args) -> int:
    config = load_run_config(args.config)
    tr = config["train"]
    for flag, key in (("rounds", "max_rounds"), ("workers", "workers"),
                      ("seed", "seed"), ("lr", "learning_rate"),
                      ("batch_size", "batch_size")):
        value = getattr(args, flag)
        if value is not None:
            tr[key] = value
    rw = config["rewards"]
    for flag, key in (("w_iq", "w_iq"), ("w_amp", "w_amp"), ("zfc_bar", "zfc_bar")):
        value = getattr(args, flag)
        if value is not None:
            rw[key] = value
    if args.raw_zfc:
        rw["raw_zfc"] = True
    if args.scorer is not None:
        config["scorer"] = args.scorer
    if args.synthetic is not None:
        config["data"]["synthetic"] = args.synthetic
    if args.dataset is not None:
        config["data"]["train_dir"] = str(args.dataset)

    if args.print_config:
        print(json.dumps(config, indent=2))
        return EXIT_OK

    try:
        train_config = a3c.TrainConfig(**tr)
        weights = rl.RewardWeights(**rw)
        scorer = rl.get_scorer(config["scorer"])
    except (TypeError, ValueError, KeyError) as exc:
        raise UsageFault(str(exc))

    if config["data"]["synthetic"]:
        seed, count, size = _parse_synthetic(config["data"]["synthetic"])
        dataset = synth_dataset(seed, count, size)
    elif config["data"]["train_dir"]:
        try:
            dataset = PairedDataset.from_directory(config["data"]["train_dir"])
        except (FileNotFoundError, ValueError) as exc:
            raise UsageFault(str(exc))
    else:
        raise UsageFault("no training data: give --dataset DIR or --synthetic S,C,Z")

    out_dir = Path(args.out)
    a3c.train(
        train_config,
        dataset.lows,
        weights=weights,
        scorer=scorer,
        out_dir=out_dir,
        checkpoint_every=args.checkpoint_every,
    )
    print(json.dumps({"checkpoint": str(out_dir / "final.ckpt"),
                      "log": str(out_dir / "train_log.jsonl")}))
    return EXIT_OK


def _resolve_target_flags(args) -> PersonalizationTarget:
    given = [name for name, val in
             (("--ref", args.ref), ("--zfc", args.zfc), ("--iters", args.iters))
             if val is not None]
    if len(given) != 1:
        raise UsageFault(
            f"exactly one of --ref, --zfc or --iters is required, got {given or 'none'}"
        )
    try:
        if args.ref is not None:
            return PersonalizationTarget(reference_image=_load_input(args.ref))
        if args.zfc is not None:
            return PersonalizationTarget(zfc_target=args.zfc, zfc_is_raw=args.raw_zfc)
        return PersonalizationTarget(fixed_iterations=args.iters)
    except ValueError as exc:
        raise UsageFault(str(exc))


def cmd_enhance(args) -> int:
    target = _resolve_target_flags(args)
    net, _ = _load_net(args.checkpoint)
    image = _load_input(args.input)
    config = InferenceConfig(
        epsilon=args.epsilon,
        max_iterations=args.max_iterations,
        record_trajectory=args.step_images is not None,
    )
    try:
        result = enhance_adaptive(net, image, target, config)
    except ValueError as exc:
        raise UsageFault(str(exc))

    out = Path(args.out) if args.out else Path(args.input).with_suffix(".enhanced.png")
    save_image(result.output, out)

    if args.trajectory:
        with open(args.trajectory, "w", encoding="utf-8") as fh:
            for step, zfc in result.zfc_trajectory:
                fh.write(json.dumps({"step": step, "zfc": zfc}) + "\n")
    if args.step_images:
        step_dir = Path(args.step_images)
        step_dir.mkdir(parents=True, exist_ok=True)
        for step, img in enumerate(result.step_images or []):
            save_image(img, step_dir / f"step_{step:03d}.png")

    print(json.dumps({
        "output": str(out),
        "iterations_used": result.iterations_used,
        "converged": result.converged,
        "final_zfc": result.zfc_trajectory[-1][1],
    }))
    return EXIT_OK


def cmd_eval(args) -> int:
    net, _ = _load_net(args.checkpoint)
    try:
        dataset = PairedDataset.from_directory(args.dataset)
    except (FileNotFoundError, ValueError) as exc:
        raise UsageFault(str(exc))
    config = InferenceConfig(epsilon=args.epsilon, max_iterations=args.max_iterations)

    rows = []
    for name, low, high in dataset.pairs():
        target = PersonalizationTarget(reference_image=high)
        result = enhance_adaptive(net, low, target, config)
        row = metrics.evaluate_pair(result.output, high, name=name)
        row["iterations_used"] = result.iterations_used
        row["converged"] = result.converged
        rows.append(row)

    report = metrics.MetricReport(rows)
    with open(args.report, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
        fh.write(json.dumps(report.aggregate()) + "\n")
    print(json.dumps(report.aggregate()))
    return EXIT_OK


def cmd_score(args) -> int:
    image = _load_input(args.input)
    print(json.dumps({
        "quality_score": rl.quality_score(image),
        "normalized_zfc": normalized_zfc(image),
    }))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .data import CheckpointError
    from .service import create_app

    try:
        app = create_app(
            checkpoint_path=args.checkpoint,
            max_pixels=args.max_pixels,
            static_dir=args.static,
        )
    except (FileNotFoundError, CheckpointError, KeyError, ValueError) as exc:
        raise RuntimeFault(f"cannot load checkpoint: {exc}")
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        raise RuntimeFault(f"server failed to start: {exc}")
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lumenrl",
        description="Low-light enhancement by reinforcement-learned "
                    "Fourier amplitude scaling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a policy on low-light images")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", default="runs/latest", help="output directory")
    p.add_argument("--dataset", help="paired dataset root (low/ and high/)")
    p.add_argument("--synthetic", help="SEED,COUNT,SIZE synthetic dataset")
    p.add_argument("--rounds", type=int, help="override max_rounds")
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--w-iq", type=float, dest="w_iq")
    p.add_argument("--w-amp", type=float, dest="w_amp")
    p.add_argument("--zfc-bar", type=float, dest="zfc_bar")
    p.add_argument("--raw-zfc", action="store_true", dest="raw_zfc",
                   help="interpret zfc_bar as a raw luminance sum")
    p.add_argument("--scorer", help="registered quality scorer name")
    p.add_argument("--checkpoint-every", type=int, default=0,
                   dest="checkpoint_every")
    p.add_argument("--print-config", action="store_true", dest="print_config",
                   help="echo the effective configuration and exit")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("enhance", help="enhance one image")
    p.add_argument("checkpoint")
    p.add_argument("input")
    p.add_argument("--ref", help="reference image path")
    p.add_argument("--zfc", type=float, help="brightness target (mean luminance)")
    p.add_argument("--raw-zfc", action="store_true", dest="raw_zfc",
                   help="interpret --zfc as a raw luminance sum")
    p.add_argument("--iters", type=int, help="fixed number of iterations")
    p.add_argument("--out", help="output image path")
    p.add_argument("--trajectory", help="write per-step zfc records (JSONL)")
    p.add_argument("--step-images", dest="step_images",
                   help="directory for per-step images")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--max-iterations", type=int, default=20, dest="max_iterations")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("eval", help="evaluate on a paired dataset")
    p.add_argument("checkpoint")
    p.add_argument("dataset", help="dataset root with low/ and high/")
    p.add_argument("--report", default="eval_report.jsonl")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--max-iterations", type=int, default=20, dest="max_iterations")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("score", help="print quality score and brightness")
    p.add_argument("input")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("serve", help="start the HTTP enhancement service")
    p.add_argument("checkpoint", nargs="?", default=None,
                   help="checkpoint path (omit for scorer-only mode)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8760)
    p.add_argument("--max-pixels", type=int, default=4_000_000, dest="max_pixels")
    p.add_argument("--static", help="static directory for the web UI")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
