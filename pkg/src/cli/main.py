"""Command-line entry point: train, eval, iidtest, qq, sweep and dataset."""

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import pandas as pd

from src import __version__
from src.cli.runner import dataset_frame, evaluate_state, iid_test, run_seeds, write_qq, write_run
from src.metrics import StatisticsError
from src.schemas import ConfigError, ExperimentConfig, load_experiment_config
from src.services import CSVService
from src.training import CheckpointError, TrainingDivergedError, load_checkpoint
from src.utils.logging import configure_logging, get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_CHECKPOINT = 4


def _output_dir(exp: ExperimentConfig, out: str | None) -> Path:
    path = Path(out or exp.output_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"output directory {path} is not writable: {e}") from e
    return path


def cmd_train(config: str, out: str | None = None) -> int:
    exp, config_hash = load_experiment_config(config)
    out_dir = _output_dir(exp, out)
    if exp.export_dataset:
        CSVService(out_dir).write(dataset_frame(exp), "dataset.csv")
    results = run_seeds(exp, out_dir)
    document = write_run(exp, config_hash, out_dir, results)
    logger.info("Run completed", out_dir=str(out_dir), aggregate=document["aggregate"])
    return EXIT_OK


def cmd_eval(manifest: str, config: str, out: str | None = None) -> int:
    exp, _ = load_experiment_config(config)
    state, cfg = load_checkpoint(manifest)
    report = evaluate_state(state, exp, cfg.seed, cfg.mixture())
    CSVService(_output_dir(exp, out)).write(pd.DataFrame([report.csv_row()]), "eval.csv")
    print(report.model_dump_json())
    return EXIT_OK


def iid_table(sw: list[float], ks: list[float]) -> str:
    """Per-dimension SW/KS statistics as a plain-text table."""
    frame = pd.DataFrame(
        {"SW statistic": sw, "KS statistic": ks},
        index=pd.Index([f"Dimension {m + 1}" for m in range(len(sw))]),
    )
    return frame.T.to_string(float_format=lambda v: f"{v:.4f}")


def cmd_iidtest(manifest: str, config: str, qq_out: str) -> int:
    exp, _ = load_experiment_config(config)
    state, cfg = load_checkpoint(manifest)
    z_tilde, sw, ks = iid_test(state, cfg, exp)
    print(iid_table(sw, ks))
    write_qq(z_tilde, Path(qq_out))
    logger.info("IID test completed", step=state.step, sw=sw, ks=ks, qq_out=qq_out)
    return EXIT_OK


def cmd_qq(manifest: str, config: str, out: str | None = None) -> int:
    exp, _ = load_experiment_config(config)
    state, cfg = load_checkpoint(manifest)
    directory = Path(out) if out else Path(exp.output_dir) / f"seed_{cfg.seed}" / "qq"
    z_tilde, _, _ = iid_test(state, cfg, exp)
    paths = write_qq(z_tilde, directory)
    logger.info("QQ data written", step=state.step, files=[str(p) for p in paths])
    return EXIT_OK


def cmd_sweep(config: str, out: str | None = None) -> int:
    exp, config_hash = load_experiment_config(config)
    out_dir = _output_dir(exp, out)
    variants = exp.variants or [exp.gau_variant]
    rows = []
    for variant in variants:
        results = run_seeds(exp, out_dir / variant.value, variant)
        document = write_run(exp, config_hash, out_dir / variant.value, results)
        row: dict[str, str | float] = {"variant": variant.value}
        for name, stats in document["aggregate"].items():
            row[f"{name}_mean"] = stats["mean"]
            row[f"{name}_std"] = stats["std"]
        rows.append(row)
    CSVService(out_dir).write(pd.DataFrame(rows), "sweep.csv")
    logger.info("Sweep completed", variants=[v.value for v in variants], out_dir=str(out_dir))
    return EXIT_OK


def cmd_dataset(config: str, out: str | None = None) -> int:
    exp, _ = load_experiment_config(config)
    path = CSVService(_output_dir(exp, out)).write(dataset_frame(exp), "dataset.csv")
    logger.info("Dataset written", path=str(path), rows=exp.dataset_dump_size)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iidgan",
        description="IID-GAN experiments on the Ring and Grid Gaussian mixtures",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train every configured seed")
    p.add_argument("--config", required=True, help="experiment config (JSON)")
    p.add_argument("--out", help="output directory (defaults to output_dir of the config)")

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("--manifest", required=True, help="checkpoint manifest.json")
    p.add_argument("--config", required=True, help="experiment config with evaluation sizes")
    p.add_argument("--out", help="directory for eval.csv")

    p = sub.add_parser("iidtest", help="normality tests and QQ data for F(real data)")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--qq-out", required=True, help="directory for the QQ CSV files")

    p = sub.add_parser("qq", help="write QQ data for F(real data) without the test table")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", required=True)
    p.add_argument(
        "--out", help="directory for the QQ CSV files (defaults to seed_{seed}/qq under output_dir)"
    )

    p = sub.add_parser("sweep", help="train each Gaussian-consistency variant on the same seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--out")

    p = sub.add_parser("dataset", help="dump labelled training draws")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    return parser


def _dispatch(args: argparse.Namespace) -> Callable[[], int]:
    commands: dict[str, Callable[[], int]] = {
        "train": lambda: cmd_train(args.config, args.out),
        "eval": lambda: cmd_eval(args.manifest, args.config, args.out),
        "iidtest": lambda: cmd_iidtest(args.manifest, args.config, args.qq_out),
        "qq": lambda: cmd_qq(args.manifest, args.config, args.out),
        "sweep": lambda: cmd_sweep(args.config, args.out),
        "dataset": lambda: cmd_dataset(args.config, args.out),
    }
    return commands[args.command]


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    try:
        return _dispatch(args)()
    except ConfigError as e:
        logger.error("Configuration error", error=str(e), exc_info=True)
        return EXIT_CONFIG
    except TrainingDivergedError as e:
        logger.error("Training diverged", step=e.step, loss=e.loss, error=str(e), exc_info=True)
        return EXIT_DIVERGED
    except CheckpointError as e:
        logger.error("Checkpoint error", error=str(e), exc_info=True)
        return EXIT_CHECKPOINT
    except StatisticsError as e:
        logger.error("Degenerate inverse", error=str(e), exc_info=True)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
