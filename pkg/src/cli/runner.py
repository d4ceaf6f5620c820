"""Multi-seed experiment execution and aggregation."""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd
import structlog

from src import __version__
from src.config import settings
from src.losses import GauVariant
from src.metrics import MetricsReport, StatisticsError, evaluate, inverse_normality, qq_data
from src.neuralcore import Matrix
from src.schemas import ExperimentConfig, TrainConfig
from src.services import CSVService
from src.synthdata import GaussianMixture, Rng, sample_mixture, sample_mixture_labeled
from src.training import TrainerState, TrainingDivergedError, save_checkpoint, train
from src.utils.logging import get_logger

logger = get_logger(__name__)

SUMMARY_FIELDS = (
    "modes_covered",
    "quality",
    "reverse_kl",
    "sw_mean",
    "sw_min",
    "inverse_w2",
    "inverse_kl",
)


@dataclass
class SeedResult:
    seed: int
    variant: GauVariant
    reports: list[MetricsReport] = field(default_factory=list)

    @property
    def final(self) -> MetricsReport:
        return self.reports[-1]

    def metrics_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.csv_row() for r in self.reports])


def evaluate_state(
    state: TrainerState, exp: ExperimentConfig, seed: int, mix: GaussianMixture
) -> MetricsReport:
    """Evaluation on a stream derived from (seed, step), independent of training."""
    return evaluate(
        state,
        mix,
        exp.eval_n_gen,
        exp.n_real,
        Rng.derive(seed, "eval", state.step),
        radius_factor=exp.radius_factor,
        min_count=exp.min_count,
        sw_max_n=exp.sw_max_n,
    )


def run_seed(
    exp: ExperimentConfig, seed: int, out_dir: Path, variant: GauVariant | None = None
) -> SeedResult:
    """Train one seed, evaluating and checkpointing at every interval."""
    cfg = exp.train_config(seed, variant)
    seed_dir = out_dir / f"seed_{seed}"
    result = SeedResult(seed=seed, variant=cfg.gau_variant)
    mix = cfg.mixture()

    def sink(state: TrainerState) -> None:
        try:
            report = evaluate_state(state, exp, seed, mix)
        except StatisticsError as e:
            raise TrainingDivergedError(state.step, "inverse variance", str(e)) from e
        result.reports.append(report)
        logger.info(
            "Evaluation",
            step=report.step,
            modes=report.modes_covered,
            quality=round(report.quality, 4),
            rkl=round(report.reverse_kl, 4),
            sw_mean=round(report.sw_mean, 4),
        )
        if exp.save_checkpoints:
            save_checkpoint(state, cfg, seed_dir / "checkpoint")

    with structlog.contextvars.bound_contextvars(seed=seed, variant=cfg.gau_variant.value):
        state = train(cfg, sink)
        CSVService(seed_dir).write(result.metrics_frame(), "metrics.csv")
        if exp.export_qq:
            z_tilde, _, _ = iid_test(state, cfg, exp)
            write_qq(z_tilde, seed_dir / "qq")
    return result


def run_seeds(
    exp: ExperimentConfig, out_dir: Path, variant: GauVariant | None = None
) -> list[SeedResult]:
    """Run every configured seed, in parallel up to ``settings.threads``; results in seed order."""
    workers = min(settings.threads, len(exp.seeds))
    logger.info("Starting seeds", seeds=exp.seeds, workers=workers, out_dir=str(out_dir))
    if workers == 1:
        return [run_seed(exp, seed, out_dir, variant) for seed in exp.seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_seed, exp, seed, out_dir, variant) for seed in exp.seeds]
        return [f.result() for f in futures]


def merged_metrics(results: list[SeedResult]) -> pd.DataFrame:
    frames = []
    for result in results:
        frame = result.metrics_frame()
        frame.insert(0, "seed", result.seed)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def aggregate(results: list[SeedResult]) -> dict[str, dict[str, float]]:
    """Mean and sample standard deviation over seeds of the final reports (std 0 for one seed)."""
    finals = pd.DataFrame([{k: getattr(r.final, k) for k in SUMMARY_FIELDS} for r in results])
    std = finals.std(ddof=1).fillna(0.0)
    return {k: {"mean": float(finals[k].mean()), "std": float(std[k])} for k in SUMMARY_FIELDS}


def summary_document(
    exp: ExperimentConfig, config_hash: str, results: list[SeedResult]
) -> dict[str, Any]:
    return {
        "schema_version": exp.schema_version,
        "code_version": __version__,
        "config_sha256": config_hash,
        "dataset": exp.dataset.value,
        "variant": results[0].variant.value,
        "seeds": {str(r.seed): r.final.model_dump(mode="json") for r in results},
        "aggregate": aggregate(results),
    }


def write_summary(out_dir: Path, document: dict[str, Any]) -> Path:
    path = out_dir / "summary.json"
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_run(
    exp: ExperimentConfig, config_hash: str, out_dir: Path, results: list[SeedResult]
) -> dict[str, Any]:
    """Merged metrics.csv and summary.json for one set of seed results."""
    CSVService(out_dir).write(merged_metrics(results), "metrics.csv")
    document = summary_document(exp, config_hash, results)
    write_summary(out_dir, document)
    return document


def dataset_frame(exp: ExperimentConfig) -> pd.DataFrame:
    """Labelled training draws from the configured mixture, keyed by the first seed."""
    samples, modes = sample_mixture_labeled(
        exp.mixture(), exp.dataset_dump_size, Rng.derive(exp.seeds[0], "dataset")
    )
    return pd.DataFrame({"x0": samples[:, 0], "x1": samples[:, 1], "mode": modes})


def iid_test(
    state: TrainerState, cfg: TrainConfig, exp: ExperimentConfig
) -> tuple[Matrix, list[float], list[float]]:
    """F(x) on fresh real draws with its per-dimension SW and KS statistics."""
    rng = Rng.derive(cfg.seed, "iidtest", state.step)
    z_tilde = state.f.predict(sample_mixture(cfg.mixture(), exp.n_real, rng))
    sw, ks = inverse_normality(z_tilde, exp.sw_max_n)
    return z_tilde, sw, ks


def write_qq(z_tilde: Matrix, directory: Path) -> list[Path]:
    """One qq_dim{m}.csv per inverse dimension."""
    csv = CSVService(directory)
    paths = []
    for m in range(z_tilde.shape[1]):
        frame = qq_data(z_tilde[:, m])
        frame["dim"] = m + 1
        paths.append(csv.write(frame, f"qq_dim{m + 1}.csv"))
    return paths
